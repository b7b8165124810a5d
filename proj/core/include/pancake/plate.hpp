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

#pragma once

#include <array>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace pancake {

/// Half-space {x_k >= 0} of R^k, embedded in R^{k+1} at height zero.
struct HalfPlane {
  int k = 2;
};

/// Disc of radius R centred at the origin of the plane z = 0 in R^3.
struct Disc {
  double R = 1.0;
};

/// Flat torus of period L with a disc hole of radius rho centred in the
/// fundamental cell [0, L)^2; lives in T^2 x R.
struct SinaiTorus {
  double L = 1.0;
  double rho = 0.25;
};

/// Ray {(t, 0, 0) : t >= 0} in R^3.
struct SemiInfiniteLine {};

/// R^k inside R^{k+3}; the pancake is R^k x S^2(r).
struct SphereFactor {
  int k = 0;
};

/// R^k inside R^{k+2}; the pancake is R^k x S^1(r).
struct CylinderFactor {
  int k = 1;
};

/// Planar plate bounded by a smooth closed curve through the given samples,
/// listed counter-clockwise. `curvatures` are the signed boundary curvatures
/// at the samples (positive where the plate is locally convex); they bound the
/// admissible ball radius.
struct SmoothPlanarPlate {
  std::vector<std::array<double, 2>> points;
  std::vector<double> curvatures;
};

using PlateSpec = std::variant<HalfPlane, Disc, SinaiTorus, SemiInfiniteLine,
                               SphereFactor, CylinderFactor, SmoothPlanarPlate>;

/// Ambient dimension m of the space the pancake surface lives in.
int ambient_dim(const PlateSpec& plate);

/// Family name as used in the JSON "family" field.
std::string family_name(const PlateSpec& plate);

/// Throws InvalidArgument when the family parameters violate their
/// invariants (R > 0, 0 < rho < L/2, ...).
void validate(const PlateSpec& plate);

void to_json(nlohmann::json& j, const PlateSpec& plate);
void from_json(const nlohmann::json& j, PlateSpec& plate);

PlateSpec plate_from_json(const nlohmann::json& j);
nlohmann::json plate_to_json(const PlateSpec& plate);

}  // namespace pancake
