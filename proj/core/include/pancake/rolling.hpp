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

#include <functional>
#include <iosfwd>
#include <vector>

#include "pancake/linalg.hpp"
#include "pancake/surface.hpp"

namespace pancake {

/// Moment-of-inertia parameters with eta = gamma / sqrt(1 + gamma^2).
struct InertiaParams {
  double gamma = 0.0;
  double eta = 0.0;

  static InertiaParams from_eta(double eta);
  static InertiaParams from_gamma(double gamma);
  /// Throws InvalidArgument unless gamma >= 0, eta in [0, 1) and the two agree
  /// to 1e-12.
  void validate() const;
};

/// Centre position x on N, centre velocity u in T_xN, tangential spin
/// (the scaled spin rηS, skew and tangential).
struct RollingState {
  Vec x;
  Vec u;
  SkewMap spin;
};

struct StateDerivative {
  Vec dx;
  Vec du;
  SkewMap dspin;
};

/// ½|u|² + ¼Tr(𝒮𝒮ᵀ).
double energy(const RollingState& s);

/// |u·ν| and ‖𝒮 − Π𝒮Π‖_F at the state's position.
struct ConstraintResidual {
  double normal_velocity = 0.0;
  double normal_spin = 0.0;
};
ConstraintResidual constraint_residual(const PancakeSurface& surface,
                                       const RollingState& s);

/// Ambient rolling vector field in a given chart:
///   dx = u, du = −η𝒮𝕊u + ⟨𝕊u,u⟩ν, d𝒮 = η(𝕊u)∧u + ν∧(𝒮𝕊u).
StateDerivative rhs(const PancakeSurface& surface, RegionKind region,
                    const RollingState& s, double eta);

/// Same, with the chart chosen by classify(); throws SeamPoint on a seam.
StateDerivative rhs(const PancakeSurface& surface, const RollingState& s,
                    double eta);

/// ⟨e, f(e)⟩ in the bundle metric: u·(−η𝒮𝕊u) + ½Tr((η𝕊u∧u)𝒮ᵀ). Vanishes
/// identically; returns the rounding residual.
double orthogonality_residual(const PancakeSurface& surface,
                              const RollingState& s, double eta);

/// Region the motion from a (possibly seam) point x with velocity u proceeds
/// into.
RegionKind region_for_motion(const PancakeSurface& surface, const Vec& x,
                             const Vec& u);

/// Classical RK4 step of the ambient system in one chart, no projection.
RollingState rk4_step(const PancakeSurface& surface, RegionKind region,
                      const RollingState& s, double eta, double h);

/// Constraint renormalisation: project x, restore tangency of u and 𝒮
/// keeping their norms, then rescale (u, 𝒮) jointly to energy `target`.
RollingState renormalize(const PancakeSurface& surface, RegionKind region,
                         const RollingState& s, double target_energy);

/// One RK4 step plus renormalisation. Throws SeamPoint when the step would
/// leave the region it started in (use integrate() for seam crossings).
RollingState step(const PancakeSurface& surface, const RollingState& s,
                  double eta, double h);

struct SeamEvent {
  double t = 0.0;
  RegionKind from = RegionKind::Seam;
  RegionKind to = RegionKind::Seam;
  RollingState state;
};

struct IntegrationStats {
  double energy0 = 0.0;
  /// Cumulative relative energy change produced by the RK4 updates before
  /// renormalisation (signed sum, i.e. the drift an unrenormalised run would
  /// accumulate to first order), and the largest single-step change.
  double energy_drift = 0.0;
  double max_step_drift = 0.0;
  /// Largest constraint residuals seen after renormalisation.
  double max_normal_velocity = 0.0;
  double max_normal_spin = 0.0;
  long steps = 0;
  long crossings = 0;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<RollingState> states;
  std::vector<RegionKind> regions;
  std::vector<SeamEvent> events;
  IntegrationStats stats;
  bool stopped_early = false;
};

struct IntegrateOptions {
  double T = 1.0;
  double h = 1e-3;
  /// Step used while on a flat sheet, where 𝕊 = 0 and RK4 is exact; 0 means
  /// use h everywhere. Steps stay aligned to multiples of the active step.
  double flat_h = 0.0;
  /// Record every n-th step (the initial and final states are always
  /// recorded); 0 records only the endpoints.
  int record_stride = 1;
  /// Returning true stops the integration right after the event.
  std::function<bool(const SeamEvent&)> stop_on_event;
  /// Called after every accepted step (not after event sub-steps).
  std::function<void(double t, const RollingState&, RegionKind)> observer;
};

/// Fixed-step integration with seam events located by root finding on the
/// region's seam function (time tolerance 1e-12·T).
Trajectory integrate(const PancakeSurface& surface, const RollingState& s0,
                     double eta, const IntegrateOptions& options);
Trajectory integrate(const PancakeSurface& surface, const RollingState& s0,
                     double eta, double T, double h);

/// sup over interior samples of ‖Π (d𝒮/dt) Π‖_F, with d𝒮/dt from a
/// five-point stencil on uniformly spaced samples; stencils straddling a
/// region change are skipped. Zero for exact parallel transport (η = 0).
double parallel_transport_residual(const PancakeSurface& surface,
                                   const Trajectory& trajectory);

/// Angular velocity U = 𝒮/(rη) + ν∧u/r of the full SE(m) formulation.
/// Throws InvalidArgument for gamma = 0 (S is undefined from 𝒮).
SkewMap full_U_crosscheck(const PancakeSurface& surface, const RollingState& s,
                          double r, double gamma);

/// One RK4 step of ẋ = rUν, U̇ = −(r/(1+γ²))(U𝕊Uν)∧ν, mapped back through
/// u = rUν and 𝒮 = rηΠUΠ.
RollingState u_equation_step(const PancakeSurface& surface, RegionKind region,
                             const RollingState& s, double r, double gamma,
                             double h);

/// CSV with header t,x1..xm,u1..um,S12,...,energy,region.
void write_trajectory_csv(std::ostream& out, const PancakeSurface& surface,
                          const Trajectory& trajectory);

/// JSON lines {"t":..., "from":..., "to":...}.
void write_events_jsonl(std::ostream& out, const Trajectory& trajectory);

}  // namespace pancake
