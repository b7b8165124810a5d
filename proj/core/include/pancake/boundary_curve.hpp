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
#include <limits>
#include <memory>
#include <vector>

#include <Eigen/Core>

namespace pancake {

/// Closest point on a planar boundary curve together with its Frenet data.
/// The curve is oriented so the plate lies on its left: inward_normal = J
/// tangent, with J the rotation by +pi/2. Curvature is signed so that
/// d(tangent)/ds = curvature * inward_normal (positive where the plate is
/// locally convex).
struct CurveFoot {
  Eigen::Vector2d point;
  Eigen::Vector2d tangent;
  Eigen::Vector2d inward_normal;
  double curvature = 0.0;
  /// Distance from the query point to `point`, positive inside the plate.
  double signed_distance = 0.0;
};

/// Smooth closed (or periodic) boundary of a planar plate.
class BoundaryCurve {
 public:
  virtual ~BoundaryCurve() = default;

  /// Foot of the perpendicular from q. Returned coordinates are in the same
  /// (unwrapped) frame as q.
  virtual CurveFoot foot(const Eigen::Vector2d& q) const = 0;

  /// Largest |curvature| along the curve.
  virtual double max_abs_curvature() const = 0;

  /// Smallest t > t_min with q + t d on the curve, or a negative value when
  /// the ray never meets it. Implementations may give up (negative result)
  /// once the search passes t_max.
  virtual double ray_hit(const Eigen::Vector2d& q, const Eigen::Vector2d& d, double t_min,
                         double t_max = kNoHorizon) const = 0;

  static constexpr double kNoHorizon = std::numeric_limits<double>::infinity();
};

/// Circle of radius R around `center` bounding a disc plate.
class CircleBoundary final : public BoundaryCurve {
 public:
  CircleBoundary(Eigen::Vector2d center, double radius);
  CurveFoot foot(const Eigen::Vector2d& q) const override;
  double max_abs_curvature() const override { return 1.0 / radius_; }
  double ray_hit(const Eigen::Vector2d& q, const Eigen::Vector2d& d, double t_min,
                 double t_max = kNoHorizon) const override;

 private:
  Eigen::Vector2d center_;
  double radius_;
};

/// Lattice of circular holes of radius rho centred at (L/2, L/2) + L Z^2;
/// the plate is the complement, i.e. a flat torus with one hole.
class PeriodicHoleBoundary final : public BoundaryCurve {
 public:
  PeriodicHoleBoundary(double period, double hole_radius);
  CurveFoot foot(const Eigen::Vector2d& q) const override;
  double max_abs_curvature() const override { return 1.0 / hole_radius_; }
  double ray_hit(const Eigen::Vector2d& q, const Eigen::Vector2d& d, double t_min,
                 double t_max = kNoHorizon) const override;

  /// Hole centre of the fundamental cell containing q (unwrapped frame).
  Eigen::Vector2d nearest_center(const Eigen::Vector2d& q) const;
  double period() const { return period_; }

 private:
  double period_;
  double hole_radius_;
};

/// Closed periodic cubic spline through counter-clockwise samples,
/// parametrised by cumulative chord length.
class SplineBoundary final : public BoundaryCurve {
 public:
  explicit SplineBoundary(const std::vector<std::array<double, 2>>& points);
  CurveFoot foot(const Eigen::Vector2d& q) const override;
  double max_abs_curvature() const override { return max_abs_curvature_; }
  double ray_hit(const Eigen::Vector2d& q, const Eigen::Vector2d& d, double t_min,
                 double t_max = kNoHorizon) const override;

  double period() const { return period_; }
  Eigen::Vector2d position(double t) const;
  Eigen::Vector2d first_derivative(double t) const;
  Eigen::Vector2d second_derivative(double t) const;
  double curvature_at(double t) const;

 private:
  struct Segment {
    double t0;
    double h;
    Eigen::Vector2d y0, y1;  // endpoint values
    Eigen::Vector2d m0, m1;  // endpoint second derivatives
  };
  const Segment& segment_for(double& t) const;
  double wrap(double t) const;

  std::vector<Segment> segments_;
  double period_ = 0.0;
  double max_abs_curvature_ = 0.0;
};

}  // namespace pancake
