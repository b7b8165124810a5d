// Copyright 2026 The pancake Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "pancake/plate.hpp"

#include <cmath>
#include <set>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "pancake/errors.hpp"
#include "pancake/linalg.hpp"

namespace pancake {
namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void require_keys(const nlohmann::json& j, std::set<std::string> allowed) {
  allowed.insert("family");
  for (const auto& [key, _] : j.items()) {
    if (!allowed.contains(key)) {
      throw InvalidArgument(fmt::format("plate: unknown key \"{}\" for family {}",
                                        key, j.at("family").get<std::string>()));
    }
  }
}

}  // namespace

int ambient_dim(const PlateSpec& plate) {
  return std::visit(
      Overloaded{[](const HalfPlane& p) { return p.k + 1; },
                 [](const Disc&) { return 3; },
                 [](const SinaiTorus&) { return 3; },
                 [](const SemiInfiniteLine&) { return 3; },
                 [](const SphereFactor& p) { return p.k + 3; },
                 [](const CylinderFactor& p) { return p.k + 2; },
                 [](const SmoothPlanarPlate&) { return 3; }},
      plate);
}

std::string family_name(const PlateSpec& plate) {
  return std::visit(
      Overloaded{[](const HalfPlane&) { return "HalfPlane"; },
                 [](const Disc&) { return "Disc"; },
                 [](const SinaiTorus&) { return "SinaiTorus"; },
                 [](const SemiInfiniteLine&) { return "SemiInfiniteLine"; },
                 [](const SphereFactor&) { return "SphereFactor"; },
                 [](const CylinderFactor&) { return "CylinderFactor"; },
                 [](const SmoothPlanarPlate&) { return "SmoothPlanarPlate"; }},
      plate);
}

void validate(const PlateSpec& plate) {
  std::visit(
      Overloaded{
          [](const HalfPlane& p) {
            if (p.k < 1) throw InvalidArgument("HalfPlane: k must be >= 1");
          },
          [](const Disc& p) {
            if (!(p.R > 0.0)) throw InvalidArgument("Disc: R must be > 0");
          },
          [](const SinaiTorus& p) {
            if (!(p.L > 0.0) || !(p.rho > 0.0) || !(p.rho < 0.5 * p.L)) {
              throw InvalidArgument("SinaiTorus: need 0 < rho < L/2");
            }
          },
          [](const SemiInfiniteLine&) {},
          [](const SphereFactor& p) {
            if (p.k < 0) throw InvalidArgument("SphereFactor: k must be >= 0");
          },
          [](const CylinderFactor& p) {
            if (p.k < 0) throw InvalidArgument("CylinderFactor: k must be >= 0");
          },
          [](const SmoothPlanarPlate& p) {
            if (p.points.size() < 4) {
              throw InvalidArgument("SmoothPlanarPlate: need at least 4 samples");
            }
            if (p.curvatures.size() != p.points.size()) {
              throw InvalidArgument(
                  "SmoothPlanarPlate: one curvature per sample required");
            }
            for (double k : p.curvatures) {
              if (!std::isfinite(k)) {
                throw InvalidArgument("SmoothPlanarPlate: curvatures must be finite");
              }
            }
          }},
      plate);
  if (ambient_dim(plate) > kMaxDim) {
    throw InvalidArgument(fmt::format("{}: ambient dimension {} exceeds {}",
                                      family_name(plate), ambient_dim(plate),
                                      kMaxDim));
  }
}

void to_json(nlohmann::json& j, const PlateSpec& plate) {
  j = nlohmann::json{{"family", family_name(plate)}};
  std::visit(Overloaded{[&](const HalfPlane& p) { j["k"] = p.k; },
                        [&](const Disc& p) { j["R"] = p.R; },
                        [&](const SinaiTorus& p) {
                          j["L"] = p.L;
                          j["rho"] = p.rho;
                        },
                        [&](const SemiInfiniteLine&) {},
                        [&](const SphereFactor& p) { j["k"] = p.k; },
                        [&](const CylinderFactor& p) { j["k"] = p.k; },
                        [&](const SmoothPlanarPlate& p) {
                          j["points"] = p.points;
                          j["curvatures"] = p.curvatures;
                        }},
             plate);
}

void from_json(const nlohmann::json& j, PlateSpec& plate) {
  if (!j.is_object() || !j.contains("family")) {
    throw InvalidArgument("plate: expected an object with a \"family\" field");
  }
  const auto family = j.at("family").get<std::string>();
  if (family == "HalfPlane") {
    require_keys(j, {"k"});
    plate = HalfPlane{j.value("k", 2)};
  } else if (family == "Disc") {
    require_keys(j, {"R"});
    plate = Disc{j.at("R").get<double>()};
  } else if (family == "SinaiTorus") {
    require_keys(j, {"L", "rho"});
    plate = SinaiTorus{j.at("L").get<double>(), j.at("rho").get<double>()};
  } else if (family == "SemiInfiniteLine") {
    require_keys(j, {});
    plate = SemiInfiniteLine{};
  } else if (family == "SphereFactor") {
    require_keys(j, {"k"});
    plate = SphereFactor{j.value("k", 0)};
  } else if (family == "CylinderFactor") {
    require_keys(j, {"k"});
    plate = CylinderFactor{j.value("k", 1)};
  } else if (family == "SmoothPlanarPlate") {
    require_keys(j, {"points", "curvatures"});
    SmoothPlanarPlate p;
    p.points = j.at("points").get<std::vector<std::array<double, 2>>>();
    p.curvatures = j.at("curvatures").get<std::vector<double>>();
    plate = std::move(p);
  } else {
    throw InvalidArgument(fmt::format("plate: unknown family \"{}\"", family));
  }
  validate(plate);
}

PlateSpec plate_from_json(const nlohmann::json& j) {
  PlateSpec p;
  from_json(j, p);
  return p;
}

nlohmann::json plate_to_json(const PlateSpec& plate) {
  nlohmann::json j;
  to_json(j, plate);
  return j;
}

}  // namespace pancake
