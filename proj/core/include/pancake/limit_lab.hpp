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

#include <iosfwd>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "pancake/billiard.hpp"
#include "pancake/linalg.hpp"
#include "pancake/plate.hpp"
#include "pancake/rolling.hpp"
#include "pancake/surface.hpp"

namespace pancake {

/// Velocities at a boundary point in billiard variables, as coefficients in
/// the edge frame (T_1..T_{k-1}, n): ū_i = u·T_i, u⊥ = u·n, W_i = W·T_i with
/// W = 𝒮^b n, and the tangential block Π𝒮^bΠ in the T frame.
///
/// The rolling spin relates to the billiard spin by 𝒮^r = −𝒮^b: with this
/// identification the straight-edge rolling map is exactly edge_roll_matrix.
struct EdgeState {
  Vec u_bar;
  Vec W;
  double u_perp = 0.0;
  Mat tangential;
};

/// The non-holonomic collision map 𝒞ₓ with c = cos πη, s = sin πη.
EdgeState noholonomic_collision(const EdgeState& in, double eta);

/// Sup-norm distance over (ū, W, u⊥).
double edge_state_distance(const EdgeState& a, const EdgeState& b);

/// Rolling state on the `side` sheet's seam above `boundary_point` (a point
/// of P0) carrying the given billiard-variable velocities.
RollingState seam_state(const PancakeSurface& surface, const Vec& boundary_point,
                        const EdgeState& in, RegionKind side = RegionKind::FlatSheetPlus);

/// Billiard-variable split of a rolling sheet state in an edge frame.
EdgeState edge_state_of(const RollingState& s, const EdgeFrame& frame);

struct CrossingOptions {
  /// Tube step h = h_factor · r / ‖(u, 𝒮)‖.
  double h_factor = 2e-3;
  /// NonExit after budget_factor · πr/|u| in the tube.
  double budget_factor = 1e3;
};

struct CrossingResult {
  EdgeState incoming;
  EdgeState outgoing;
  double traversal_time = 0.0;
  /// τ = cT/r with c = ‖(u, 𝒮)‖, and its straight-edge value πc/|μ|.
  double rescaled_time = 0.0;
  double expected_rescaled_time = 0.0;
  double mu = 0.0;  // u·E at entry
  /// max |u·E − μ| over the tube steps.
  double mu_drift = 0.0;
  double energy_error = 0.0;
  RegionKind entry_side = RegionKind::FlatSheetPlus;
  RegionKind exit_side = RegionKind::FlatSheetMinus;
  bool opposite_side = true;
  RollingState exit_state;
};

/// Integrates from a seam state heading into the tube until it exits to a
/// flat sheet. Outgoing velocities are split in the adapted edge frame at
/// the exit foot. Throws NonExit when the time budget runs out.
CrossingResult run_edge_crossing(const PancakeSurface& surface,
                                 const RollingState& incoming, double eta,
                                 const CrossingOptions& options = {});

struct EdgeExperiment {
  PlateSpec plate;
  Vec boundary_point;  // point of P0 in ambient coordinates (height 0)
  EdgeState incoming;
  double eta = 0.0;
  std::vector<double> radii;  // decreasing
  CrossingOptions crossing;
};

struct ConvergenceRow {
  double r = 0.0;
  double error = 0.0;           // sup-norm vs 𝒞ₓ
  double relative_error = 0.0;  // error / |u_in|
  double traversal_time = 0.0;
  double rescaled_time = 0.0;
  double expected_rescaled_time = 0.0;
  double mu_drift = 0.0;
  double energy_error = 0.0;
  RegionKind exit_side = RegionKind::FlatSheetMinus;
  bool non_exit = false;
};

struct ConvergenceReport {
  std::vector<ConvergenceRow> rows;
  /// Least-squares slope of log error against log r (exploratory; NaN when
  /// skipped: straight edge, or fewer than two usable rows).
  double fitted_rate = 0.0;
  bool rate_fitted = false;
};

/// One crossing per radius; NonExit rows are reported and excluded from the
/// fit. Requires >= 4 radii spanning >= 2 decades.
ConvergenceReport convergence_study(const EdgeExperiment& experiment);

/// CSV `r,error,traversal_time,exit_side`.
void write_convergence_csv(std::ostream& out, const ConvergenceReport& report);
nlohmann::json convergence_summary(const ConvergenceReport& report);

struct RollingCrossing {
  double entry_time = 0.0;
  double exit_time = 0.0;
  Vec entry_foot;  // in-plane coordinates (k = 2)
  Vec exit_foot;
  RegionKind exit_side = RegionKind::FlatSheetMinus;
  BilliardState before;  // billiard variables at the entry foot
  BilliardState after;   // billiard variables at the exit foot
};

struct PairedOrbits {
  BilliardOrbit billiard;
  std::vector<RollingCrossing> rolling;
  /// |billiard hit n − rolling entry foot n|.
  std::vector<double> global_divergence;
  /// Billiard collision + flight from rolling crossing n, compared with the
  /// rolling entry foot n+1 (one-step positional divergence).
  std::vector<double> local_divergence;
  /// Origin-to-line distances of the rolling sheet segments.
  std::vector<double> rolling_chord_distances;
  double max_energy_error = 0.0;
};

/// Runs the rolling system on N(r) of a Disc or SinaiTorus plate and the
/// no-slip billiard with θ = πη from the same billiard-variable start.
PairedOrbits rolling_vs_billiard_orbit(const PlateSpec& plate, double r, double eta,
                                       const BilliardState& state0, int n_crossings,
                                       const CrossingOptions& options = {});

}  // namespace pancake
