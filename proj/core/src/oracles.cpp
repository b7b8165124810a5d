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

#include "pancake/oracles.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include <Eigen/Geometry>
#include <fmt/format.h>

#include "pancake/errors.hpp"

namespace pancake {

Vec EllipseParams::at(double t) const {
  return std::cos(omega * t) * a + std::sin(omega * t) * b + c;
}

Codim2Solution codim2_solution(const Vec& w0, const Vec& u00, const Vec& x0,
                               double mu, double eta, double r, double t) {
  if (w0.size() != u00.size() || w0.size() != x0.size()) {
    throw InvalidArgument("codim2_solution: dimension mismatch");
  }
  if (!(r > 0.0)) throw InvalidArgument("codim2_solution: r must be > 0");
  const double omega = eta * mu / r;
  if (omega == 0.0 || !std::isfinite(omega)) {
    throw InvalidArgument("codim2_solution: omega = eta mu / r must be nonzero");
  }
  Codim2Solution out;
  out.ellipse = {omega, -w0 / omega, u00 / omega, x0 + w0 / omega};
  const double c = std::cos(omega * t);
  const double s = std::sin(omega * t);
  out.x = out.ellipse.at(t);
  out.u0 = c * u00 + s * w0;
  out.w = c * w0 - s * u00;
  out.phase = mu * t / r;
  return out;
}

Eigen::Vector3d codim3_invariant(const Eigen::Vector3d& x1,
                                 const Eigen::Vector3d& u1, double s,
                                 double eta) {
  const double r = x1.norm();
  if (!(r > 0.0)) throw NotOnSurface("codim3_invariant: x1 = 0");
  if (std::abs(u1.dot(x1)) > 1e-9 * r * std::max(1.0, u1.norm())) {
    throw NotOnSurface("codim3_invariant: u1 is not tangent to the sphere");
  }
  return eta * s * x1 + x1.cross(u1);
}

EdgeRollMap edge_roll_matrix(double eta, int sigma) {
  if (!(eta >= 0.0 && eta < 1.0)) {
    throw InvalidArgument(fmt::format("edge_roll_matrix: eta = {} not in [0, 1)", eta));
  }
  if (sigma != 1 && sigma != -1) {
    throw InvalidArgument("edge_roll_matrix: sigma must be +1 or -1");
  }
  const double c = std::cos(std::numbers::pi * eta);
  const double s = std::sin(std::numbers::pi * eta);
  EdgeRollMap m;
  m.rotation << c, sigma * s, -sigma * s, c;
  m.rolling << c, -s, -s, -c;
  m.billiard << c, s, s, -c;
  return m;
}

double edge_roll_duration(double r, double mu) {
  if (mu == 0.0) {
    throw InvalidArgument("edge_roll_duration: mu = 0, the ball never rounds the edge");
  }
  return std::numbers::pi * r / std::abs(mu);
}

double semi_infinite_max_displacement(double u0_0, double s_0, double omega) {
  if (omega == 0.0) {
    throw InvalidArgument("semi_infinite_max_displacement: omega must be nonzero");
  }
  const double sign = omega > 0.0 ? 1.0 : -1.0;
  return (std::hypot(u0_0, s_0) - sign * s_0) / std::abs(omega);
}

GammaCorrespondence gamma_correspondence(double gamma_b) {
  if (!(gamma_b >= 0.0)) {
    throw InvalidArgument(fmt::format("gamma_b = {} must be >= 0", gamma_b));
  }
  GammaCorrespondence g;
  // arccos((1-γ²)/(1+γ²)) = 2 arctan γ, which stays accurate near γ = 0.
  g.eta_r = 2.0 * std::atan(gamma_b) / std::numbers::pi;
  g.gamma_r = g.eta_r < 1.0 ? g.eta_r / std::sqrt(1.0 - g.eta_r * g.eta_r)
                            : std::numeric_limits<double>::infinity();
  return g;
}

double gamma_b_from_eta_r(double eta_r) {
  if (!(eta_r >= 0.0 && eta_r < 1.0)) {
    throw InvalidArgument(fmt::format("eta_r = {} not in [0, 1)", eta_r));
  }
  return std::tan(0.5 * std::numbers::pi * eta_r);
}

Eigen::Vector2d cbeta_sbeta(double gamma) {
  if (!(gamma >= 0.0)) throw InvalidArgument("cbeta_sbeta: gamma must be >= 0");
  const double g2 = gamma * gamma;
  return {(1.0 - g2) / (1.0 + g2), 2.0 * gamma / (1.0 + g2)};
}

double beta_angle(double gamma) {
  if (!(gamma >= 0.0)) throw InvalidArgument("beta_angle: gamma must be >= 0");
  return 2.0 * std::atan(gamma);
}

}  // namespace pancake
