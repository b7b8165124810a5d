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

#include "pancake/limit_lab.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>
#include <variant>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "pancake/errors.hpp"

namespace pancake {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

bool is_sheet(RegionKind k) {
  return k == RegionKind::FlatSheetPlus || k == RegionKind::FlatSheetMinus;
}

double speed(const EdgeState& s) {
  return std::sqrt(s.u_bar.squaredNorm() + s.u_perp * s.u_perp);
}

// u·E with E the meridian direction of the tube through x.
double meridian_speed(const PancakeSurface& surface, const Vec& x, const Vec& u) {
  const EdgeFrame f = surface.edge_frame(x);
  const int h = surface.dim() - 1;
  const Vec nu = surface.normal_in(RegionKind::EdgeTube, x);
  const double sin_phi = nu[h];
  const double cos_phi = -nu.dot(f.inward_normal);
  const Vec e = sin_phi * f.inward_normal + cos_phi * unit(surface.dim(), h);
  return u.dot(e);
}

void check_edge_state(const EdgeState& s, int k) {
  if (s.u_bar.size() != k - 1 || s.W.size() != k - 1 ||
      s.tangential.rows() != k - 1 || s.tangential.cols() != k - 1) {
    throw InvalidArgument(fmt::format(
        "edge state: expected {} tangential coefficients for k = {}", k - 1, k));
  }
  if (!((s.tangential + s.tangential.transpose()).cwiseAbs().maxCoeff() <= 1e-12 ||
        k == 1)) {
    throw InvalidArgument("edge state: tangential spin block must be skew");
  }
}

Vec head2(const Vec& v) { return v.head(2); }

}  // namespace

EdgeState noholonomic_collision(const EdgeState& in, double eta) {
  const ReducedCollision c =
      collision_reduced(in.u_bar, in.W, in.u_perp, std::numbers::pi * eta);
  return {c.u_bar, c.W, c.u_perp, in.tangential};
}

double edge_state_distance(const EdgeState& a, const EdgeState& b) {
  double d = std::abs(a.u_perp - b.u_perp);
  if (a.u_bar.size() > 0) {
    d = std::max(d, (a.u_bar - b.u_bar).cwiseAbs().maxCoeff());
    d = std::max(d, (a.W - b.W).cwiseAbs().maxCoeff());
  }
  return d;
}

RollingState seam_state(const PancakeSurface& surface, const Vec& boundary_point,
                        const EdgeState& in, RegionKind side) {
  if (!is_sheet(side)) throw InvalidArgument("seam_state: side must be a flat sheet");
  const int m = surface.dim();
  check_edge_state(in, m - 1);
  if (boundary_point.size() != m) {
    throw InvalidArgument(fmt::format("seam_state: boundary point must have {} coordinates", m));
  }
  const EdgeFrame f = surface.edge_frame(boundary_point);
  if (std::abs(f.signed_distance) > PancakeSurface::kOnSurfaceTol) {
    throw InvalidArgument(fmt::format(
        "seam_state: point is {:.3g} away from the plate edge", f.signed_distance));
  }
  RollingState s;
  s.x = f.point;
  s.x[m - 1] = side == RegionKind::FlatSheetPlus ? surface.radius() : -surface.radius();
  s.u = f.tangents * in.u_bar + in.u_perp * f.inward_normal;
  const Mat billiard_spin = f.tangents * in.tangential * f.tangents.transpose() +
                            wedge(f.inward_normal, f.tangents * in.W).matrix();
  s.spin = -SkewMap::skew_part(billiard_spin);
  return s;
}

EdgeState edge_state_of(const RollingState& s, const EdgeFrame& frame) {
  const Mat& t = frame.tangents;
  const Vec& n = frame.inward_normal;
  const Mat billiard_spin = -s.spin.matrix();
  EdgeState e;
  e.u_bar = t.transpose() * s.u;
  e.u_perp = n.dot(s.u);
  e.W = t.transpose() * (billiard_spin * n);
  e.tangential = t.transpose() * billiard_spin * t;
  return e;
}

CrossingResult run_edge_crossing(const PancakeSurface& surface,
                                 const RollingState& incoming, double eta,
                                 const CrossingOptions& options) {
  if (!(options.h_factor > 0.0) || !(options.budget_factor > 0.0)) {
    throw InvalidArgument("run_edge_crossing: h_factor and budget_factor must be > 0");
  }
  const int m = surface.dim();
  const double r = surface.radius();
  const EdgeFrame entry = surface.edge_frame(incoming.x);
  if (std::abs(entry.signed_distance) > PancakeSurface::kOnSurfaceTol ||
      std::abs(std::abs(incoming.x[m - 1]) - r) > PancakeSurface::kOnSurfaceTol) {
    throw InvalidArgument("run_edge_crossing: initial point is not on a seam");
  }
  const double u_in = incoming.u.norm();
  if (!(incoming.u.dot(entry.inward_normal) < 0.0)) {
    throw InvalidArgument("run_edge_crossing: velocity must point into the edge tube");
  }

  CrossingResult res;
  res.entry_side = incoming.x[m - 1] >= 0.0 ? RegionKind::FlatSheetPlus
                                            : RegionKind::FlatSheetMinus;
  res.incoming = edge_state_of(incoming, entry);
  const double e0 = energy(incoming);
  const double c = std::sqrt(2.0 * e0);
  res.mu = meridian_speed(surface, incoming.x, incoming.u);
  res.expected_rescaled_time = std::numbers::pi * c / std::abs(res.mu);

  IntegrateOptions opt;
  opt.h = options.h_factor * r / c;
  opt.T = options.budget_factor * std::numbers::pi * r / u_in;
  opt.record_stride = 0;
  opt.stop_on_event = [](const SeamEvent& ev) { return ev.from == RegionKind::EdgeTube; };
  opt.observer = [&](double, const RollingState& s, RegionKind region) {
    if (region != RegionKind::EdgeTube) return;
    res.mu_drift = std::max(res.mu_drift,
                            std::abs(meridian_speed(surface, s.x, s.u) - res.mu));
  };
  const Trajectory tr = integrate(surface, incoming, eta, opt);
  if (!tr.stopped_early) {
    throw NonExit(fmt::format(
        "run_edge_crossing: still on the edge tube after t = {:.6g} (r = {:.3g})", opt.T, r));
  }
  const SeamEvent& exit = tr.events.back();
  res.traversal_time = exit.t;
  res.rescaled_time = c * exit.t / r;
  res.exit_side = exit.to;
  res.opposite_side = exit.to != res.entry_side;
  res.exit_state = exit.state;
  // Entry-frame convention: P0 is flat, so parallel transport keeps the
  // entry frame's coefficients.
  res.outgoing = edge_state_of(exit.state, entry);
  res.energy_error =
      std::max(std::abs(energy(exit.state) - e0) / e0, std::abs(tr.stats.energy_drift));
  return res;
}

ConvergenceReport convergence_study(const EdgeExperiment& ex) {
  if (ex.radii.size() < 4) throw InvalidArgument("convergence_study: need >= 4 radii");
  std::vector<double> radii = ex.radii;
  std::sort(radii.begin(), radii.end(), std::greater<>());
  if (!(radii.back() > 0.0) || radii.front() / radii.back() < 100.0 * (1.0 - 1e-12)) {
    throw InvalidArgument("convergence_study: radii must be positive and span >= 2 decades");
  }
  const EdgeState expected = noholonomic_collision(ex.incoming, ex.eta);
  const double u_in = speed(ex.incoming);
  if (!(ex.incoming.u_perp < 0.0)) {
    throw InvalidArgument("convergence_study: incoming u_perp must be < 0");
  }

  ConvergenceReport rep;
  for (double r : radii) {
    const SurfacePtr surface = build_pancake(ex.plate, r);
    const RollingState s0 = seam_state(*surface, ex.boundary_point, ex.incoming);
    ConvergenceRow row;
    row.r = r;
    try {
      const CrossingResult c = run_edge_crossing(*surface, s0, ex.eta, ex.crossing);
      row.error = edge_state_distance(c.outgoing, expected);
      row.relative_error = row.error / u_in;
      row.traversal_time = c.traversal_time;
      row.rescaled_time = c.rescaled_time;
      row.expected_rescaled_time = c.expected_rescaled_time;
      row.mu_drift = c.mu_drift;
      row.energy_error = c.energy_error;
      row.exit_side = c.exit_side;
    } catch (const NonExit&) {
      row.non_exit = true;
      row.error = row.relative_error = row.traversal_time = kNaN;
      row.rescaled_time = row.expected_rescaled_time = row.mu_drift = kNaN;
      row.energy_error = kNaN;
      row.exit_side = RegionKind::EdgeTube;
    }
    rep.rows.push_back(row);
  }

  rep.fitted_rate = kNaN;
  if (std::holds_alternative<HalfPlane>(ex.plate)) return rep;
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  int n = 0;
  for (const auto& row : rep.rows) {
    if (row.non_exit || !(row.error > 0.0) || !std::isfinite(row.error)) continue;
    const double lx = std::log(row.r), ly = std::log(row.error);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++n;
  }
  if (n >= 2) {
    rep.fitted_rate = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    rep.rate_fitted = true;
  }
  return rep;
}

void write_convergence_csv(std::ostream& out, const ConvergenceReport& report) {
  out << "r,error,traversal_time,exit_side\n";
  for (const auto& row : report.rows) {
    out << fmt::format("{:.17g},{:.17g},{:.17g},{}\n", row.r, row.error,
                       row.traversal_time,
                       row.non_exit ? std::string_view("NonExit") : to_string(row.exit_side));
  }
}

nlohmann::json convergence_summary(const ConvergenceReport& report) {
  auto num = [](double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(); };
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& row : report.rows) {
    rows.push_back({{"r", row.r},
                    {"error", num(row.error)},
                    {"relative_error", num(row.relative_error)},
                    {"traversal_time", num(row.traversal_time)},
                    {"rescaled_time", num(row.rescaled_time)},
                    {"expected_rescaled_time", num(row.expected_rescaled_time)},
                    {"mu_drift", num(row.mu_drift)},
                    {"energy_error", num(row.energy_error)},
                    {"exit_side", row.non_exit ? std::string("NonExit")
                                               : std::string(to_string(row.exit_side))},
                    {"non_exit", row.non_exit}});
  }
  return {{"rows", rows},
          {"rate_fitted", report.rate_fitted},
          {"fitted_rate", report.rate_fitted ? nlohmann::json(report.fitted_rate)
                                             : nlohmann::json()},
          {"fitted_rate_note", "exploratory least-squares slope of log error vs log r"}};
}

PairedOrbits rolling_vs_billiard_orbit(const PlateSpec& plate, double r, double eta,
                                       const BilliardState& state0, int n_crossings,
                                       const CrossingOptions& options) {
  if (!std::holds_alternative<Disc>(plate) && !std::holds_alternative<SinaiTorus>(plate)) {
    throw InvalidArgument("rolling_vs_billiard_orbit: plate must be Disc or SinaiTorus");
  }
  if (n_crossings < 1) throw InvalidArgument("rolling_vs_billiard_orbit: n_crossings >= 1");
  if (state0.x.size() != 2 || state0.u.size() != 2 || state0.spin.dim() != 2) {
    throw InvalidArgument("rolling_vs_billiard_orbit: planar state expected");
  }
  const InertiaParams inertia = InertiaParams::from_eta(eta);
  inertia.validate();
  const double theta = std::numbers::pi * eta;
  const SurfacePtr surface = build_pancake(plate, r);
  const DomainPtr domain = make_billiard_domain(plate);

  PairedOrbits out;
  out.billiard = billiard_orbit(*domain, state0, theta, n_crossings);

  RollingState s;
  s.x = Vec::Zero(3);
  s.x.head(2) = state0.x;
  s.x[2] = r;
  s.u = Vec::Zero(3);
  s.u.head(2) = state0.u;
  Mat spin = Mat::Zero(3, 3);
  spin.topLeftCorner(2, 2) = -state0.spin.matrix();
  s.spin = SkewMap::from_matrix(spin);

  const double c = std::sqrt(2.0 * energy(s));
  const double h_tube = options.h_factor * r / c;
  auto to_billiard = [](const Vec& foot, const RollingState& rs) {
    BilliardState b;
    b.x = head2(foot);
    b.u = head2(rs.u);
    b.spin = SkewMap::from_matrix(-rs.spin.matrix().topLeftCorner(2, 2));
    return b;
  };
  auto chord = [](const Vec& x, const Vec& u) {
    return std::abs(x[0] * u[1] - x[1] * u[0]) / std::hypot(u[0], u[1]);
  };
  out.rolling_chord_distances.push_back(chord(s.x, s.u));

  double t_total = 0.0;
  for (int i = 0; i < n_crossings; ++i) {
    // Sheet flight: the sheet is a copy of P, so the billiard flight time
    // bounds the time to the seam.
    const FlightHit hit = domain->flight(head2(s.x), head2(s.u));
    IntegrateOptions opt;
    opt.h = h_tube;
    opt.flat_h = std::max(h_tube, hit.time / 8.0);
    opt.T = 1.5 * hit.time + 10.0 * opt.flat_h;
    opt.record_stride = 0;
    opt.stop_on_event = [](const SeamEvent& ev) { return ev.to == RegionKind::EdgeTube; };
    const Trajectory flight = integrate(*surface, s, eta, opt);
    if (!flight.stopped_early) {
      throw Error(fmt::format(
          "rolling_vs_billiard_orbit: segment {} missed the edge (flight time {:.6g}, "
          "{} events, last region {})",
          i, hit.time, flight.events.size(), to_string(flight.regions.back())));
    }
    const SeamEvent& entry = flight.events.back();
    t_total += entry.t;

    RollingCrossing rc;
    rc.entry_time = t_total;
    const EdgeFrame ef = surface->edge_frame(entry.state.x);
    rc.entry_foot = head2(ef.point);
    rc.before = to_billiard(ef.point, entry.state);

    CrossingResult cr;
    try {
      cr = run_edge_crossing(*surface, entry.state, eta, options);
    } catch (const NonExit& e) {
      throw NonExit(fmt::format("rolling_vs_billiard_orbit: crossing {}: {}", i, e.what()));
    }
    t_total += cr.traversal_time;
    rc.exit_time = t_total;
    const EdgeFrame xf = surface->edge_frame(cr.exit_state.x);
    rc.exit_foot = head2(xf.point);
    rc.exit_side = cr.exit_side;
    rc.after = to_billiard(xf.point, cr.exit_state);
    out.max_energy_error = std::max(out.max_energy_error, cr.energy_error);
    out.rolling_chord_distances.push_back(chord(rc.exit_foot, rc.after.u));
    out.rolling.push_back(rc);
    s = cr.exit_state;
  }

  for (int i = 0; i < n_crossings; ++i) {
    const auto& rc = out.rolling[static_cast<std::size_t>(i)];
    out.global_divergence.push_back(
        (out.billiard.collisions[static_cast<std::size_t>(i)].point - rc.entry_foot).norm());
    if (i == 0) {
      out.local_divergence.push_back(out.global_divergence.front());
      continue;
    }
    const auto& prev = out.rolling[static_cast<std::size_t>(i - 1)];
    const EdgeFrame f = surface->edge_frame(
        (Vec(3) << prev.entry_foot[0], prev.entry_foot[1], 0.0).finished());
    const BilliardState after = collide(prev.before, head2(f.inward_normal), theta);
    const FlightHit next = domain->flight(after.x, after.u);
    out.local_divergence.push_back((next.point - rc.entry_foot).norm());
  }
  return out;
}

}  // namespace pancake
