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

#include "pancake/boundary_curve.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>

#include <Eigen/LU>
#include <boost/math/tools/toms748_solve.hpp>
#include <fmt/format.h>

#include "pancake/errors.hpp"

namespace pancake {
namespace {

Eigen::Vector2d rot90(const Eigen::Vector2d& v) { return {-v.y(), v.x()}; }

// Smallest root t > t_min of |q + t d - c|^2 = R^2, or -1.
double ray_circle(const Eigen::Vector2d& q, const Eigen::Vector2d& d,
                  const Eigen::Vector2d& c, double radius, double t_min) {
  const Eigen::Vector2d w = q - c;
  const double a = d.squaredNorm();
  const double b = w.dot(d);
  const double cc = w.squaredNorm() - radius * radius;
  const double disc = b * b - a * cc;
  if (disc < 0.0) return -1.0;
  const double sq = std::sqrt(disc);
  // Numerically stable pair of roots.
  const double qq = -(b + std::copysign(sq, b));
  double t1 = qq / a;
  double t2 = qq != 0.0 ? cc / qq : t1;
  if (t1 > t2) std::swap(t1, t2);
  if (t1 > t_min) return t1;
  if (t2 > t_min) return t2;
  return -1.0;
}

}  // namespace

// --- CircleBoundary --------------------------------------------------------

CircleBoundary::CircleBoundary(Eigen::Vector2d center, double radius)
    : center_(std::move(center)), radius_(radius) {
  if (!(radius > 0.0)) throw InvalidArgument("CircleBoundary: radius must be > 0");
}

CurveFoot CircleBoundary::foot(const Eigen::Vector2d& q) const {
  const Eigen::Vector2d v = q - center_;
  const double rho = v.norm();
  const Eigen::Vector2d dir = rho > 0.0 ? Eigen::Vector2d(v / rho)
                                        : Eigen::Vector2d::UnitX();
  CurveFoot f;
  f.point = center_ + radius_ * dir;
  f.inward_normal = -dir;
  f.tangent = -rot90(f.inward_normal);
  f.curvature = 1.0 / radius_;
  f.signed_distance = radius_ - rho;
  return f;
}

double CircleBoundary::ray_hit(const Eigen::Vector2d& q, const Eigen::Vector2d& d,
                       double t_min, double /*t_max*/) const {
  return ray_circle(q, d, center_, radius_, t_min);
}

// --- PeriodicHoleBoundary --------------------------------------------------

PeriodicHoleBoundary::PeriodicHoleBoundary(double period, double hole_radius)
    : period_(period), hole_radius_(hole_radius) {
  if (!(period > 0.0) || !(hole_radius > 0.0) || !(hole_radius < 0.5 * period)) {
    throw InvalidArgument("PeriodicHoleBoundary: need 0 < rho < L/2");
  }
}

Eigen::Vector2d PeriodicHoleBoundary::nearest_center(
    const Eigen::Vector2d& q) const {
  const Eigen::Vector2d cell(std::floor(q.x() / period_),
                             std::floor(q.y() / period_));
  return period_ * (cell + Eigen::Vector2d(0.5, 0.5));
}

CurveFoot PeriodicHoleBoundary::foot(const Eigen::Vector2d& q) const {
  const Eigen::Vector2d c = nearest_center(q);
  const Eigen::Vector2d v = q - c;
  const double rho = v.norm();
  const Eigen::Vector2d dir = rho > 0.0 ? Eigen::Vector2d(v / rho)
                                        : Eigen::Vector2d::UnitX();
  CurveFoot f;
  f.point = c + hole_radius_ * dir;
  f.inward_normal = dir;
  f.tangent = -rot90(f.inward_normal);
  f.curvature = -1.0 / hole_radius_;
  f.signed_distance = rho - hole_radius_;
  return f;
}

double PeriodicHoleBoundary::ray_hit(const Eigen::Vector2d& q,
                                     const Eigen::Vector2d& d, double t_min,
                                     double t_max) const {
  // Grid traversal over integer cell indices; each hole sits strictly inside
  // its cell, so the first hole met inside the current cell is the first hit.
  constexpr long kMaxCells = 1'000'000;
  const double t0 = std::max(t_min, 0.0);
  const Eigen::Vector2d p0 = q + t0 * d;
  long idx[2];
  int step[2];
  for (int i = 0; i < 2; ++i) {
    idx[i] = static_cast<long>(std::floor(p0[i] / period_));
    step[i] = d[i] > 0.0 ? 1 : (d[i] < 0.0 ? -1 : 0);
    // On a face moving backwards the ray enters the lower cell.
    if (step[i] < 0 && p0[i] == period_ * static_cast<double>(idx[i])) --idx[i];
  }
  auto face_time = [&](int i) {
    if (step[i] == 0) return std::numeric_limits<double>::infinity();
    const double face = period_ * static_cast<double>(idx[i] + (step[i] > 0 ? 1 : 0));
    return (face - q[i]) / d[i];
  };
  for (long visited = 0; visited < kMaxCells; ++visited) {
    const double tx = face_time(0), ty = face_time(1);
    const double t_exit = std::min(tx, ty);
    const Eigen::Vector2d c(period_ * (static_cast<double>(idx[0]) + 0.5),
                            period_ * (static_cast<double>(idx[1]) + 0.5));
    const double hit = ray_circle(q, d, c, hole_radius_, t_min);
    if (hit > 0.0 && hit <= t_exit) return hit;
    if (!std::isfinite(t_exit) || t_exit > t_max) return -1.0;
    if (tx <= ty) idx[0] += step[0];
    if (ty <= tx) idx[1] += step[1];
  }
  return -1.0;
}

// --- SplineBoundary --------------------------------------------------------

SplineBoundary::SplineBoundary(const std::vector<std::array<double, 2>>& points) {
  const auto n = static_cast<Eigen::Index>(points.size());
  if (n < 4) throw InvalidArgument("SplineBoundary: need at least 4 samples");
  std::vector<Eigen::Vector2d> y(n);
  for (Eigen::Index i = 0; i < n; ++i) y[i] = {points[i][0], points[i][1]};

  double area2 = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& a = y[i];
    const auto& b = y[(i + 1) % n];
    area2 += a.x() * b.y() - b.x() * a.y();
  }
  if (!(area2 > 0.0)) {
    throw InvalidArgument("SplineBoundary: samples must be counter-clockwise");
  }

  std::vector<double> h(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    h[i] = (y[(i + 1) % n] - y[i]).norm();
    if (!(h[i] > 0.0)) throw InvalidArgument("SplineBoundary: repeated sample");
  }

  // Cyclic tridiagonal system for the second derivatives.
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  Eigen::MatrixXd rhs(n, 2);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::Index im = (i + n - 1) % n;
    const Eigen::Index ip = (i + 1) % n;
    a(i, im) += h[im];
    a(i, i) += 2.0 * (h[im] + h[i]);
    a(i, ip) += h[i];
    const Eigen::Vector2d r =
        6.0 * ((y[ip] - y[i]) / h[i] - (y[i] - y[im]) / h[im]);
    rhs.row(i) = r.transpose();
  }
  const Eigen::MatrixXd m = a.partialPivLu().solve(rhs);

  double t0 = 0.0;
  segments_.reserve(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::Index ip = (i + 1) % n;
    segments_.push_back({t0, h[i], y[i], y[ip], m.row(i).transpose(),
                         m.row(ip).transpose()});
    t0 += h[i];
  }
  period_ = t0;

  for (const auto& s : segments_) {
    for (int j = 0; j <= 16; ++j) {
      max_abs_curvature_ =
          std::max(max_abs_curvature_, std::abs(curvature_at(s.t0 + s.h * j / 16.0)));
    }
  }
}

double SplineBoundary::wrap(double t) const {
  t = std::fmod(t, period_);
  if (t < 0.0) t += period_;
  return t;
}

const SplineBoundary::Segment& SplineBoundary::segment_for(double& t) const {
  t = wrap(t);
  auto it = std::upper_bound(
      segments_.begin(), segments_.end(), t,
      [](double value, const Segment& s) { return value < s.t0; });
  const Segment& s = it == segments_.begin() ? segments_.front() : *(it - 1);
  t -= s.t0;
  return s;
}

Eigen::Vector2d SplineBoundary::position(double t) const {
  const Segment& s = segment_for(t);
  const double a = (s.h - t) / s.h;
  const double b = t / s.h;
  return a * s.y0 + b * s.y1 +
         ((a * a * a - a) * s.m0 + (b * b * b - b) * s.m1) * (s.h * s.h) / 6.0;
}

Eigen::Vector2d SplineBoundary::first_derivative(double t) const {
  const Segment& s = segment_for(t);
  const double a = (s.h - t) / s.h;
  const double b = t / s.h;
  return (s.y1 - s.y0) / s.h -
         (3.0 * a * a - 1.0) * s.h / 6.0 * s.m0 +
         (3.0 * b * b - 1.0) * s.h / 6.0 * s.m1;
}

Eigen::Vector2d SplineBoundary::second_derivative(double t) const {
  const Segment& s = segment_for(t);
  const double a = (s.h - t) / s.h;
  const double b = t / s.h;
  return a * s.m0 + b * s.m1;
}

double SplineBoundary::curvature_at(double t) const {
  const Eigen::Vector2d d1 = first_derivative(t);
  const Eigen::Vector2d d2 = second_derivative(t);
  const double speed = d1.norm();
  return (d1.x() * d2.y() - d1.y() * d2.x()) / (speed * speed * speed);
}

CurveFoot SplineBoundary::foot(const Eigen::Vector2d& q) const {
  // Coarse scan, then Newton on (c(t) - q) . c'(t) = 0.
  constexpr int kSamplesPerSegment = 8;
  double best_t = 0.0;
  double best_d2 = std::numeric_limits<double>::infinity();
  for (const auto& s : segments_) {
    for (int j = 0; j < kSamplesPerSegment; ++j) {
      const double t = s.t0 + s.h * j / kSamplesPerSegment;
      const double d2 = (position(t) - q).squaredNorm();
      if (d2 < best_d2) {
        best_d2 = d2;
        best_t = t;
      }
    }
  }
  double t = best_t;
  const double max_step = period_ / (segments_.size() * kSamplesPerSegment);
  for (int it = 0; it < 50; ++it) {
    const Eigen::Vector2d c = position(t) - q;
    const Eigen::Vector2d d1 = first_derivative(t);
    const Eigen::Vector2d d2 = second_derivative(t);
    const double f = c.dot(d1);
    double fp = d1.squaredNorm() + c.dot(d2);
    if (fp <= 0.0) fp = d1.squaredNorm();
    double dt = -f / fp;
    dt = std::clamp(dt, -max_step, max_step);
    t += dt;
    if (std::abs(dt) < 1e-15 * period_) break;
  }
  t = wrap(t);
  CurveFoot foot;
  foot.point = position(t);
  const Eigen::Vector2d d1 = first_derivative(t);
  foot.tangent = d1.normalized();
  foot.inward_normal = rot90(foot.tangent);
  foot.curvature = curvature_at(t);
  const Eigen::Vector2d v = q - foot.point;
  const double dist = v.norm();
  foot.signed_distance = v.dot(foot.inward_normal) >= 0.0 ? dist : -dist;
  return foot;
}

double SplineBoundary::ray_hit(const Eigen::Vector2d& q, const Eigen::Vector2d& d,
                       double t_min, double /*t_max*/) const {
  const double speed = d.norm();
  if (!(speed > 0.0)) return -1.0;
  double min_h = std::numeric_limits<double>::infinity();
  for (const auto& s : segments_) min_h = std::min(min_h, s.h);
  const double dt = 0.05 * min_h / speed;
  auto g = [&](double t) { return foot(q + t * d).signed_distance; };

  double a = t_min;
  double ga = g(a);
  const double t_max = t_min + 1e3 * period_ / speed;
  for (double b = a + dt; b < t_max; b += dt) {
    const double gb = g(b);
    if (ga >= 0.0 && gb < 0.0) {
      std::uintmax_t iters = 200;
      auto tol = boost::math::tools::eps_tolerance<double>(52);
      const auto [lo, hi] =
          boost::math::tools::toms748_solve(g, a, b, ga, gb, tol, iters);
      return 0.5 * (lo + hi);
    }
    a = b;
    ga = gb;
  }
  return -1.0;
}

}  // namespace pancake
