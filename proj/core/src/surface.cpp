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

#include "pancake/surface.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include <fmt/format.h>

#include "pancake/boundary_curve.hpp"
#include "pancake/errors.hpp"

namespace pancake {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

[[noreturn]] void bad_region(RegionKind region) {
  throw InvalidArgument(
      fmt::format("surface has no region {}", to_string(region)));
}

// Plate bounded by a smooth edge P0 inside the hyperplane {x_h = 0}, h = m-1:
// two flat sheets at height ±r joined by a half-tube of radius r around P0.
class EdgePancake final : public PancakeSurface {
 public:
  using FootFn = std::function<EdgeFrame(const Vec&)>;
  using RayFn = std::function<double(const Vec&, const Vec&, double)>;

  EdgePancake(PlateSpec plate, double r, FootFn foot, double wrap_period,
              RayFn ray = nullptr)
      : PancakeSurface(std::move(plate), r),
        h_(dim() - 1),
        foot_(std::move(foot)),
        ray_(std::move(ray)),
        wrap_period_(wrap_period) {}

  double sheet_seam_time(const Vec& x, const Vec& u, double horizon) const override {
    if (ray_) return ray_(x, u, horizon);
    return PancakeSurface::sheet_seam_time(x, u, horizon);
  }

  std::vector<SurfaceRegion> regions() const override {
    return {{RegionKind::FlatSheetPlus, "x_h = +r over P"},
            {RegionKind::FlatSheetMinus, "x_h = -r over P"},
            {RegionKind::EdgeTube, "foot(s) + r(cos phi (-n) + sin phi e_h)"},
            {RegionKind::Seam, "P0 x {+r, -r}"}};
  }

  Vec closest_plate_point(const Vec& x) const override {
    const EdgeFrame f = foot_(x);
    if (f.signed_distance >= 0.0) {
      Vec p = x;
      p[h_] = 0.0;
      return p;
    }
    return f.point;
  }

  RegionKind side(const Vec& x) const override {
    if (foot_(x).signed_distance < 0.0) return RegionKind::EdgeTube;
    return x[h_] >= 0.0 ? RegionKind::FlatSheetPlus : RegionKind::FlatSheetMinus;
  }

  double seam_function(RegionKind region, const Vec& x) const override {
    switch (region) {
      case RegionKind::FlatSheetPlus:
      case RegionKind::FlatSheetMinus:
        return foot_(x).signed_distance;
      case RegionKind::EdgeTube:
        return -foot_(x).signed_distance;
      default:
        bad_region(region);
    }
  }

  RegionKind region_across_seam(RegionKind from, const Vec& x) const override {
    switch (from) {
      case RegionKind::FlatSheetPlus:
      case RegionKind::FlatSheetMinus:
        return RegionKind::EdgeTube;
      case RegionKind::EdgeTube:
        return x[h_] >= 0.0 ? RegionKind::FlatSheetPlus
                            : RegionKind::FlatSheetMinus;
      default:
        bad_region(from);
    }
  }

  Vec normal_in(RegionKind region, const Vec& x) const override {
    switch (region) {
      case RegionKind::FlatSheetPlus:
        return unit(dim(), h_);
      case RegionKind::FlatSheetMinus:
        return -unit(dim(), h_);
      case RegionKind::EdgeTube: {
        const Vec v = x - foot_(x).point;
        const double d = v.norm();
        if (!(d > 0.0)) throw SingularGeometry("tube normal on the edge itself");
        return v / d;
      }
      default:
        bad_region(region);
    }
  }

  Mat shape_operator_in(RegionKind region, const Vec& x) const override {
    switch (region) {
      case RegionKind::FlatSheetPlus:
      case RegionKind::FlatSheetMinus:
        return Mat::Zero(dim(), dim());
      case RegionKind::EdgeTube:
        return tube_shape(x);
      default:
        bad_region(region);
    }
  }

  EdgeFrame edge_frame(const Vec& x) const override { return foot_(x); }

  Vec display_point(const Vec& x) const override {
    if (wrap_period_ <= 0.0) return x;
    Vec y = x;
    for (int i = 0; i < 2; ++i) {
      y[i] = std::fmod(y[i], wrap_period_);
      if (y[i] < 0.0) y[i] += wrap_period_;
    }
    return y;
  }

 private:
  // Hessian of the distance to P0, negated: the meridian direction E has
  // curvature 1/d, each edge tangent T_j the tube's parallel curvature.
  Mat tube_shape(const Vec& x) const {
    const EdgeFrame f = foot_(x);
    const Vec v = x - f.point;
    const double d = v.norm();
    if (!(d > 0.0)) throw SingularGeometry("tube shape operator on the edge");
    const Vec nu = v / d;
    const double cos_phi = -nu.dot(f.inward_normal);
    const double sin_phi = nu[h_];
    const Vec e = sin_phi * f.inward_normal + cos_phi * unit(dim(), h_);
    Mat s = -(1.0 / d) * (e * e.transpose());
    if (f.tangents.cols() > 0 && f.curvature != 0.0) {
      const double denom = 1.0 + f.curvature * d * cos_phi;
      if (!(denom > 0.0)) {
        throw SingularGeometry("tube point beyond the focal set of the edge");
      }
      const Vec t = f.tangents.col(0);
      s -= (f.curvature * cos_phi / denom) * (t * t.transpose());
    }
    return s;
  }

  int h_;
  FootFn foot_;
  RayFn ray_;
  double wrap_period_;
};

// Ray {(t, 0, 0) : t >= 0}: cylinder R x S^1(r) for x_0 > 0 and a
// hemispherical cap for x_0 < 0.
class LinePancake final : public PancakeSurface {
 public:
  LinePancake(PlateSpec plate, double r) : PancakeSurface(std::move(plate), r) {}

  std::vector<SurfaceRegion> regions() const override {
    return {{RegionKind::EdgeTube, "(t, r cos a, r sin a), t > 0"},
            {RegionKind::Cap, "r (cos a sin b ...), x_0 < 0"},
            {RegionKind::Seam, "circle x_0 = 0"}};
  }

  Vec closest_plate_point(const Vec& x) const override {
    Vec p = Vec::Zero(3);
    p[0] = std::max(x[0], 0.0);
    return p;
  }

  RegionKind side(const Vec& x) const override {
    return x[0] >= 0.0 ? RegionKind::EdgeTube : RegionKind::Cap;
  }

  double seam_function(RegionKind region, const Vec& x) const override {
    if (region == RegionKind::EdgeTube) return x[0];
    if (region == RegionKind::Cap) return -x[0];
    bad_region(region);
  }

  RegionKind region_across_seam(RegionKind from, const Vec&) const override {
    if (from == RegionKind::EdgeTube) return RegionKind::Cap;
    if (from == RegionKind::Cap) return RegionKind::EdgeTube;
    bad_region(from);
  }

  Vec normal_in(RegionKind region, const Vec& x) const override {
    const Vec v = offset(region, x);
    const double d = v.norm();
    if (!(d > 0.0)) throw SingularGeometry("normal on the line itself");
    return v / d;
  }

  Mat shape_operator_in(RegionKind region, const Vec& x) const override {
    const Vec v = offset(region, x);
    const double d = v.norm();
    if (!(d > 0.0)) throw SingularGeometry("shape operator on the line itself");
    const Vec nu = v / d;
    Mat proj = Mat::Identity(3, 3);
    if (region == RegionKind::EdgeTube) proj(0, 0) = 0.0;
    return -(1.0 / d) * (proj - nu * nu.transpose());
  }

 private:
  Vec offset(RegionKind region, const Vec& x) const {
    Vec v = x;
    if (region == RegionKind::EdgeTube) {
      v[0] = 0.0;
    } else if (region != RegionKind::Cap) {
      bad_region(region);
    }
    return v;
  }
};

// R^k x S^{f-1}(r) inside R^{k+f}: a single seamless region.
class ProductPancake final : public PancakeSurface {
 public:
  ProductPancake(PlateSpec plate, double r, int k, RegionKind kind)
      : PancakeSurface(std::move(plate), r), k_(k), kind_(kind) {}

  std::vector<SurfaceRegion> regions() const override {
    return {{kind_, kind_ == RegionKind::Cap ? "R^k x S^2(r)" : "R^k x S^1(r)"}};
  }

  Vec closest_plate_point(const Vec& x) const override {
    Vec p = x;
    p.tail(dim() - k_).setZero();
    return p;
  }

  RegionKind side(const Vec&) const override { return kind_; }

  double seam_function(RegionKind region, const Vec&) const override {
    if (region != kind_) bad_region(region);
    return kInf;
  }

  RegionKind region_across_seam(RegionKind from, const Vec&) const override {
    bad_region(from);
  }

  Vec normal_in(RegionKind region, const Vec& x) const override {
    if (region != kind_) bad_region(region);
    const Vec v = x - closest_plate_point(x);
    const double d = v.norm();
    if (!(d > 0.0)) throw SingularGeometry("normal on the flat factor itself");
    return v / d;
  }

  Mat shape_operator_in(RegionKind region, const Vec& x) const override {
    const Vec nu = normal_in(region, x);
    const double d = (x - closest_plate_point(x)).norm();
    Mat proj = Mat::Zero(dim(), dim());
    proj.bottomRightCorner(dim() - k_, dim() - k_).setIdentity();
    return -(1.0 / d) * (proj - nu * nu.transpose());
  }

 private:
  int k_;
  RegionKind kind_;
};

EdgeFrame half_plane_foot(const Vec& x, int k) {
  const int m = k + 1;
  EdgeFrame f;
  f.signed_distance = x[k - 1];
  f.point = x;
  f.point[k - 1] = 0.0;
  f.point[k] = 0.0;
  f.inward_normal = unit(m, k - 1);
  f.tangents = Mat::Zero(m, k - 1);
  for (int j = 0; j < k - 1; ++j) f.tangents(j, j) = 1.0;
  return f;
}

EdgeFrame curve_foot(const BoundaryCurve& curve, const Vec& x) {
  const CurveFoot c = curve.foot(Eigen::Vector2d(x[0], x[1]));
  EdgeFrame f;
  f.point = Vec::Zero(3);
  f.point.head<2>() = c.point;
  f.inward_normal = Vec::Zero(3);
  f.inward_normal.head<2>() = c.inward_normal;
  f.tangents = Mat::Zero(3, 1);
  f.tangents.col(0).head<2>() = c.tangent;
  f.curvature = c.curvature;
  f.signed_distance = c.signed_distance;
  return f;
}

SurfacePtr curve_pancake(const PlateSpec& plate, double r,
                         std::shared_ptr<const BoundaryCurve> curve,
                         double wrap_period) {
  auto foot = [curve](const Vec& x) { return curve_foot(*curve, x); };
  auto ray = [curve](const Vec& x, const Vec& u, double horizon) {
    const double t = curve->ray_hit(Eigen::Vector2d(x[0], x[1]),
                                    Eigen::Vector2d(u[0], u[1]), 0.0, horizon);
    return t > 0.0 ? t : std::numeric_limits<double>::infinity();
  };
  return std::make_shared<EdgePancake>(plate, r, foot, wrap_period, ray);
}

}  // namespace

std::string_view to_string(RegionKind kind) {
  switch (kind) {
    case RegionKind::FlatSheetPlus:
      return "FlatSheetPlus";
    case RegionKind::FlatSheetMinus:
      return "FlatSheetMinus";
    case RegionKind::EdgeTube:
      return "EdgeTube";
    case RegionKind::Cap:
      return "Cap";
    case RegionKind::Seam:
      return "Seam";
  }
  return "?";
}

PancakeSurface::PancakeSurface(PlateSpec plate, double r)
    : plate_(std::move(plate)), r_(r), dim_(ambient_dim(plate_)) {}

double PancakeSurface::distance_to_plate(const Vec& x) const {
  return (x - closest_plate_point(x)).norm();
}

EdgeFrame PancakeSurface::edge_frame(const Vec&) const {
  throw InvalidArgument(
      fmt::format("{} plate has no boundary edge curve", family_name(plate_)));
}

void PancakeSurface::require_on_surface(const Vec& x) const {
  if (x.size() != dim_) {
    throw InvalidArgument(
        fmt::format("point has dimension {}, surface lives in R^{}", x.size(), dim_));
  }
  const double gap = std::abs(distance_to_plate(x) - r_);
  if (!(gap <= kOnSurfaceTol)) {
    throw NotOnSurface(fmt::format("|dist(x, P) - r| = {:.3e}", gap));
  }
}

RegionKind PancakeSurface::classify(const Vec& x) const {
  const RegionKind s = side(x);
  if (std::abs(seam_function(s, x)) <= kSeamBand) return RegionKind::Seam;
  return s;
}

Vec PancakeSurface::normal(const Vec& x) const {
  require_on_surface(x);
  const Vec v = x - closest_plate_point(x);
  return v / v.norm();
}

Mat PancakeSurface::shape_operator(const Vec& x) const {
  require_on_surface(x);
  const RegionKind kind = classify(x);
  if (kind == RegionKind::Seam) {
    throw SeamPoint("shape operator is discontinuous on a seam");
  }
  return shape_operator_in(kind, x);
}

double PancakeSurface::sheet_seam_time(const Vec&, const Vec&, double) const {
  return std::numeric_limits<double>::infinity();
}

Vec PancakeSurface::project(const Vec& x) const {
  if (x.size() != dim_) throw InvalidArgument("project: dimension mismatch");
  const Vec p = closest_plate_point(x);
  const Vec v = x - p;
  const double d = v.norm();
  if (!(std::abs(d - r_) <= 0.5 * r_) || !(d > 0.0)) {
    throw AmbiguousProjection(fmt::format(
        "point is {:.3e} from the surface (limit r/2 = {:.3e})",
        std::abs(d - r_), 0.5 * r_));
  }
  return p + (r_ / d) * v;
}

SurfacePtr build_pancake(const PlateSpec& plate, double r) {
  validate(plate);
  if (!(r > 0.0) || !std::isfinite(r)) {
    throw InadmissibleRadius(fmt::format("radius r = {} must be > 0", r));
  }
  if (const auto* p = std::get_if<HalfPlane>(&plate)) {
    const int k = p->k;
    return std::make_shared<EdgePancake>(
        plate, r, [k](const Vec& x) { return half_plane_foot(x, k); }, 0.0);
  }
  if (const auto* p = std::get_if<Disc>(&plate)) {
    if (!(r < p->R)) {
      throw InadmissibleRadius(fmt::format("Disc: need r < R = {}, got r = {}", p->R, r));
    }
    return curve_pancake(plate, r,
                         std::make_shared<CircleBoundary>(Eigen::Vector2d::Zero(), p->R),
                         0.0);
  }
  if (const auto* p = std::get_if<SinaiTorus>(&plate)) {
    if (!(r < p->rho)) {
      throw InadmissibleRadius(
          fmt::format("SinaiTorus: need r < rho = {}, got r = {}", p->rho, r));
    }
    return curve_pancake(plate, r,
                         std::make_shared<PeriodicHoleBoundary>(p->L, p->rho), p->L);
  }
  if (const auto* p = std::get_if<SmoothPlanarPlate>(&plate)) {
    auto curve = std::make_shared<SplineBoundary>(p->points);
    double kmax = curve->max_abs_curvature();
    for (double k : p->curvatures) kmax = std::max(kmax, std::abs(k));
    if (kmax > 0.0 && !(r < 1.0 / kmax)) {
      throw InadmissibleRadius(fmt::format(
          "SmoothPlanarPlate: need r < 1/max|kappa| = {}, got r = {}", 1.0 / kmax, r));
    }
    return curve_pancake(plate, r, std::move(curve), 0.0);
  }
  if (std::holds_alternative<SemiInfiniteLine>(plate)) {
    return std::make_shared<LinePancake>(plate, r);
  }
  if (const auto* p = std::get_if<SphereFactor>(&plate)) {
    return std::make_shared<ProductPancake>(plate, r, p->k, RegionKind::Cap);
  }
  const auto& c = std::get<CylinderFactor>(plate);
  return std::make_shared<ProductPancake>(plate, r, c.k, RegionKind::EdgeTube);
}

Vec normal(const PancakeSurface& surface, const Vec& x) { return surface.normal(x); }

Mat shape_operator(const PancakeSurface& surface, const Vec& x) {
  return surface.shape_operator(x);
}

Vec project_to_surface(const PancakeSurface& surface, const Vec& x) {
  return surface.project(x);
}

RegionKind classify_region(const PancakeSurface& surface, const Vec& x) {
  return surface.classify(x);
}

}  // namespace pancake
