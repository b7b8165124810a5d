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

#include <Eigen/Core>

#include "pancake/linalg.hpp"

namespace pancake {

/// x(t) = cos(ωt) a + sin(ωt) b + c.
struct EllipseParams {
  double omega = 0.0;
  Vec a, b, c;

  Vec at(double t) const;
};

/// Rolling on R^k x S^1(r): the R^k components at time t.
struct Codim2Solution {
  Vec x;   // flat-factor position
  Vec u0;  // flat-factor velocity
  Vec w;   // 𝒮_01 E
  double phase = 0.0;  // angle swept around the circle factor, μt/r
  EllipseParams ellipse;
};

/// Closed form of u̇₀ = ωw, ẇ = −ωu₀ with ω = ημ/r:
///   u₀(t) = u₀(0) cos ωt + w(0) sin ωt,  w(t) = w(0) cos ωt − u₀(0) sin ωt,
///   a = −w(0)/ω, b = u₀(0)/ω, c = x(0) + w(0)/ω.
/// Throws InvalidArgument when ω = 0.
Codim2Solution codim2_solution(const Vec& w0, const Vec& u00, const Vec& x0,
                               double mu, double eta, double r, double t);

/// I = η𝓈 x₁ + x₁ × u₁ for rolling on R^k x S^2(r), where 𝓈 is the spin
/// scalar of 𝒮₁₁ = 𝓈J, Jv = ν × v. Throws NotOnSurface unless |x₁| = r > 0
/// and u₁·x₁ = 0 (relative tolerance 1e-9).
Eigen::Vector3d codim3_invariant(const Eigen::Vector3d& x1,
                                 const Eigen::Vector3d& u1, double s,
                                 double eta);

/// The edge-rolling map of a straight edge in its three forms; each block
/// is the given scalar times the identity on T P0.
struct EdgeRollMap {
  /// (u₀, w) with w = (𝒮E)·E_i: [[c, σs], [−σs, c]] (rotation by σπη).
  Eigen::Matrix2d rotation;
  /// (ū, 𝒮𝕟) in rolling variables: [[c, −s], [−s, −c]], σ-free.
  Eigen::Matrix2d rolling;
  /// (ū, W) with the billiard spin W = −𝒮𝕟: [[c, s], [s, −c]], σ-free.
  Eigen::Matrix2d billiard;
};

/// c = cos πη, s = sin πη. Throws InvalidArgument unless η ∈ [0, 1) and
/// σ = ±1.
EdgeRollMap edge_roll_matrix(double eta, int sigma);

/// πr/|μ|; throws InvalidArgument for μ = 0.
double edge_roll_duration(double r, double mu);

/// (1/|ω|)(√(u₀(0)² + 𝓈(0)²) − sgn(ω) 𝓈(0)) for a start on the cap equator
/// heading into the cylinder, with E = ν × e₁ orienting μ (so ω = ημ/r is
/// signed). Throws InvalidArgument for ω = 0.
double semi_infinite_max_displacement(double u0_0, double s_0, double omega);

struct GammaCorrespondence {
  double eta_r = 0.0;
  double gamma_r = 0.0;
};

/// η_r = arccos((1−γ_b²)/(1+γ_b²))/π, γ_r = η_r/√(1−η_r²).
GammaCorrespondence gamma_correspondence(double gamma_b);

/// Reverse map γ_b = tan(πη_r/2).
double gamma_b_from_eta_r(double eta_r);

/// (c_β, s_β) = ((1−γ²)/(1+γ²), 2γ/(1+γ²)).
Eigen::Vector2d cbeta_sbeta(double gamma);

/// β(γ) = 2 arctan γ, the collision angle with cos β = c_β, sin β = s_β.
double beta_angle(double gamma);

}  // namespace pancake
