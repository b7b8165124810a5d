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

// Shared helpers for the unit and acceptance tests.
#pragma once

#include <cmath>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "pancake/billiard.hpp"
#include "pancake/limit_lab.hpp"
#include "pancake/linalg.hpp"
#include "pancake/plate.hpp"
#include "pancake/rolling.hpp"
#include "pancake/surface.hpp"

namespace pancake::testing {

using Rng = std::mt19937_64;

inline double uniform(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline Vec random_vec(Rng& rng, int n, double scale = 1.0) {
  Vec v(n);
  for (int i = 0; i < n; ++i) v[i] = uniform(rng, -scale, scale);
  return v;
}

inline SkewMap random_skew(Rng& rng, int n, double scale = 1.0) {
  Mat m(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) m(i, j) = uniform(rng, -scale, scale);
  }
  return SkewMap::skew_part(m);
}

/// Random tangent (u, 𝒮) at a surface point x.
inline RollingState random_state_at(const PancakeSurface& surface, const Vec& x, Rng& rng,
                                    double u_scale = 1.0, double spin_scale = 1.0) {
  const int m = surface.dim();
  const Mat proj = tangent_projector(surface.normal(x));
  RollingState s;
  s.x = x;
  s.u = proj * random_vec(rng, m, u_scale);
  s.spin = SkewMap::skew_part(proj * random_skew(rng, m, spin_scale).matrix() * proj);
  return s;
}

/// A built-in surface with a start point on it.
struct SurfaceCase {
  std::string name;
  PlateSpec plate;
  double r = 0.1;
  Vec x0;
  SurfacePtr surface;
};

inline Vec vec(std::initializer_list<double> v) {
  Vec out(static_cast<int>(v.size()));
  int i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

/// Spline plate sampled from the ellipse (a cos t, b sin t) with its exact
/// curvatures.
inline SmoothPlanarPlate ellipse_plate(double a, double b, int n) {
  SmoothPlanarPlate p;
  for (int i = 0; i < n; ++i) {
    const double t = 2.0 * 3.14159265358979323846 * i / n;
    p.points.push_back({a * std::cos(t), b * std::sin(t)});
    const double q = a * a * std::sin(t) * std::sin(t) + b * b * std::cos(t) * std::cos(t);
    p.curvatures.push_back(a * b / std::pow(q, 1.5));
  }
  return p;
}

/// Every plate family with a representative radius and start point.
inline std::vector<SurfaceCase> built_in_surfaces(double r = 0.1) {
  std::vector<SurfaceCase> cases;
  auto add = [&](std::string name, PlateSpec plate, Vec x0) {
    cases.push_back({std::move(name), plate, r, std::move(x0), build_pancake(plate, r)});
  };
  add("HalfPlane(k=2)", HalfPlane{2}, vec({0.0, 0.3, r}));
  add("HalfPlane(k=3)", HalfPlane{3}, vec({0.1, -0.2, 0.3, -r}));
  add("Disc", Disc{1.0}, vec({0.2, 0.1, r}));
  add("SinaiTorus", SinaiTorus{1.0, 0.25}, vec({0.1, 0.15, r}));
  add("SemiInfiniteLine", SemiInfiniteLine{},
      vec({0.5, r * std::cos(0.3), r * std::sin(0.3)}));
  add("SphereFactor(k=1)", SphereFactor{1},
      vec({0.2, r * std::cos(0.4), r * std::sin(0.4) * std::cos(0.2),
           r * std::sin(0.4) * std::sin(0.2)}));
  add("CylinderFactor(k=2)", CylinderFactor{2},
      vec({0.1, -0.3, r * std::cos(1.0), r * std::sin(1.0)}));
  add("SmoothPlanarPlate", ellipse_plate(1.2, 0.8, 24), vec({0.1, 0.2, r}));
  return cases;
}

inline bool is_edge_family(const PlateSpec& p) {
  return std::holds_alternative<HalfPlane>(p) || std::holds_alternative<Disc>(p) ||
         std::holds_alternative<SinaiTorus>(p) ||
         std::holds_alternative<SmoothPlanarPlate>(p);
}

/// Random point of a built-in surface together with its region.
struct Sample {
  Vec x;
  RegionKind region;
};

inline Sample sample_point(const PancakeSurface& s, Rng& rng) {
  const int m = s.dim();
  const double r = s.radius();
  const PlateSpec& plate = s.plate();
  if (is_edge_family(plate)) {
    Vec q = random_vec(rng, m, 1.0);
    q[m - 1] = 0.0;
    const EdgeFrame f = s.edge_frame(q);
    if (uniform(rng, 0.0, 1.0) < 0.5 && f.signed_distance > 2e-3) {
      q[m - 1] = uniform(rng, 0.0, 1.0) < 0.5 ? r : -r;
      return {q, q[m - 1] > 0 ? RegionKind::FlatSheetPlus : RegionKind::FlatSheetMinus};
    }
    const double a = uniform(rng, -0.49 * std::numbers::pi, 0.49 * std::numbers::pi);
    const Vec x = f.point + r * (-std::cos(a) * f.inward_normal + std::sin(a) * unit(m, m - 1));
    return {x, RegionKind::EdgeTube};
  }
  if (std::holds_alternative<SemiInfiniteLine>(plate)) {
    const Vec d = random_vec(rng, 3).normalized();
    Vec x = r * d;
    if (x[0] >= 0.0) {
      x[0] = uniform(rng, 1e-3, 2.0);
      const double a = uniform(rng, 0.0, 2.0 * std::numbers::pi);
      x[1] = r * std::cos(a);
      x[2] = r * std::sin(a);
      return {x, RegionKind::EdgeTube};
    }
    return {x, RegionKind::Cap};
  }
  const int k = std::holds_alternative<SphereFactor>(plate) ? std::get<SphereFactor>(plate).k
                                                            : std::get<CylinderFactor>(plate).k;
  Vec x = random_vec(rng, m);
  x.tail(m - k) = r * x.tail(m - k).normalized();
  return {x, std::holds_alternative<SphereFactor>(plate) ? RegionKind::Cap
                                                         : RegionKind::EdgeTube};
}

/// Axial scalar 𝓈 of the sphere block of 𝒮 (𝒮₁₁ = 𝓈 J with Jv = ν × v)
/// for ℝ^k × S²(r), sphere coordinates starting at index k.
inline double sphere_spin_scalar(const RollingState& s, int k) {
  const Mat& b = s.spin.matrix();
  const Eigen::Vector3d axial(b(k + 2, k + 1), b(k, k + 2), b(k + 1, k));
  const Eigen::Vector3d nu = s.x.segment(k, 3).normalized();
  return axial.dot(nu);
}

/// Independent geodesic integrator for a level set {F = 0}: classical RK4
/// on ẍ = −(ẋᵀ∇²F ẋ) ∇F / |∇F|², followed by a Newton projection of x and a
/// tangent projection of ẋ (norm preserved).
struct LevelSet {
  std::function<double(const Vec&)> f;
  std::function<Vec(const Vec&)> grad;
  std::function<Mat(const Vec&)> hess;
};

inline void geodesic_rk4(const LevelSet& ls, Vec& x, Vec& v, double h) {
  auto acc = [&](const Vec& p, const Vec& q) -> Vec {
    const Vec g = ls.grad(p);
    return -(q.dot(ls.hess(p) * q) / g.squaredNorm()) * g;
  };
  const Vec k1x = v, k1v = acc(x, v);
  const Vec k2x = v + 0.5 * h * k1v, k2v = acc(x + 0.5 * h * k1x, v + 0.5 * h * k1v);
  const Vec k3x = v + 0.5 * h * k2v, k3v = acc(x + 0.5 * h * k2x, v + 0.5 * h * k2v);
  const Vec k4x = v + h * k3v, k4v = acc(x + h * k3x, v + h * k3v);
  const double speed = v.norm();
  x += (h / 6.0) * (k1x + 2.0 * k2x + 2.0 * k3x + k4x);
  v += (h / 6.0) * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
  for (int it = 0; it < 3; ++it) {
    const Vec g = ls.grad(x);
    x -= (ls.f(x) / g.squaredNorm()) * g;
  }
  const Vec n = ls.grad(x).normalized();
  v -= v.dot(n) * n;
  v *= speed / v.norm();
}

/// Level set |x_tail| = r of ℝ^k × S^{m-k-1}(r).
inline LevelSet product_level_set(int m, int k, double r) {
  LevelSet ls;
  ls.f = [=](const Vec& x) { return x.tail(m - k).norm() - r; };
  ls.grad = [=](const Vec& x) {
    Vec g = Vec::Zero(m);
    g.tail(m - k) = x.tail(m - k).normalized();
    return g;
  };
  ls.hess = [=](const Vec& x) {
    const Vec y = x.tail(m - k);
    const double d = y.norm();
    Mat h = Mat::Zero(m, m);
    h.bottomRightCorner(m - k, m - k) =
        (Mat::Identity(m - k, m - k) - (y * y.transpose()) / (d * d)) / d;
    return h;
  };
  return ls;
}

/// Classical specular billiard in the disc of radius R (independent of the
/// library's flight code).
struct SpecularHit {
  Vec point;
  Vec velocity;  // after reflection
};
inline std::vector<SpecularHit> specular_disc_orbit(Vec x, Vec u, double R, int n) {
  std::vector<SpecularHit> hits;
  for (int i = 0; i < n; ++i) {
    const double a = u.squaredNorm(), b = x.dot(u), c = x.squaredNorm() - R * R;
    const double t = (-b + std::sqrt(b * b - a * c)) / a;
    x = x + t * u;
    const Vec nrm = x / R;
    u = u - 2.0 * u.dot(nrm) * nrm;
    hits.push_back({x, u});
  }
  return hits;
}

/// Generic incoming edge state with |u⊥| bounded away from zero.
inline EdgeState random_edge_state(Rng& rng, int k, double min_perp = 0.3) {
  EdgeState e;
  e.u_bar = random_vec(rng, k - 1);
  e.W = random_vec(rng, k - 1);
  e.u_perp = -uniform(rng, min_perp, 1.0);
  e.tangential = random_skew(rng, k - 1).matrix();
  return e;
}

}  // namespace pancake::testing
