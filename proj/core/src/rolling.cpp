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

#include "pancake/rolling.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <ostream>

#include <boost/math/tools/toms748_solve.hpp>
#include <fmt/format.h>
#include <fmt/ostream.h>

#include "pancake/errors.hpp"

namespace pancake {
namespace {

// Crossings allowed inside a single grid step before giving up (guards
// against flip-flopping on a trajectory that grazes a seam).
constexpr int kMaxCrossingsPerStep = 8;

RollingState advance(const RollingState& s, const StateDerivative& k, double a) {
  return {s.x + a * k.dx, s.u + a * k.du, s.spin + a * k.dspin};
}

struct Renormalized {
  RollingState state;
  ConstraintResidual residual;
};

Renormalized renormalize_impl(const PancakeSurface& surface,
                              const RollingState& s, double target_energy) {
  Renormalized out;
  RollingState& o = out.state;
  o.x = surface.project(s.x);
  const Vec p = surface.closest_plate_point(o.x);
  const Vec nu = (o.x - p).normalized();
  const Mat proj = tangent_projector(nu);

  o.u = proj * s.u;
  const double un = o.u.norm();
  if (un > 0.0) o.u *= s.u.norm() / un;

  o.spin = SkewMap::skew_part(proj * s.spin.matrix() * proj);
  const double sn = o.spin.norm();
  if (sn > 0.0) o.spin *= s.spin.norm() / sn;

  const double e = energy(o);
  if (e > 0.0 && target_energy > 0.0) {
    const double scale = std::sqrt(target_energy / e);
    o.u *= scale;
    o.spin *= scale;
  }
  out.residual.normal_velocity = std::abs(o.u.dot(nu));
  out.residual.normal_spin =
      (o.spin.matrix() - proj * o.spin.matrix() * proj).norm();
  return out;
}

}  // namespace

InertiaParams InertiaParams::from_eta(double eta) {
  if (!(eta >= 0.0 && eta < 1.0)) {
    throw InvalidArgument(fmt::format("eta = {} must lie in [0, 1)", eta));
  }
  return {eta / std::sqrt(1.0 - eta * eta), eta};
}

InertiaParams InertiaParams::from_gamma(double gamma) {
  if (!(gamma >= 0.0) || !std::isfinite(gamma)) {
    throw InvalidArgument(fmt::format("gamma = {} must be finite and >= 0", gamma));
  }
  return {gamma, gamma / std::sqrt(1.0 + gamma * gamma)};
}

void InertiaParams::validate() const {
  if (!(gamma >= 0.0) || !(eta >= 0.0 && eta < 1.0)) {
    throw InvalidArgument("InertiaParams: need gamma >= 0 and eta in [0, 1)");
  }
  const double expected = gamma / std::sqrt(1.0 + gamma * gamma);
  if (!(std::abs(eta - expected) <= 1e-12)) {
    throw InvalidArgument(fmt::format(
        "InertiaParams: eta = {} but gamma/sqrt(1+gamma^2) = {}", eta, expected));
  }
}

double energy(const RollingState& s) {
  return 0.5 * s.u.squaredNorm() + 0.25 * s.spin.trace_inner(s.spin);
}

ConstraintResidual constraint_residual(const PancakeSurface& surface,
                                       const RollingState& s) {
  const Vec nu = surface.normal(s.x);
  const Mat proj = tangent_projector(nu);
  return {std::abs(s.u.dot(nu)),
          (s.spin.matrix() - proj * s.spin.matrix() * proj).norm()};
}

StateDerivative rhs(const PancakeSurface& surface, RegionKind region,
                    const RollingState& s, double eta) {
  const Vec nu = surface.normal_in(region, s.x);
  const Mat shape = surface.shape_operator_in(region, s.x);
  const Vec su = shape * s.u;
  const Vec spin_su = s.spin.apply(su);
  StateDerivative d;
  d.dx = s.u;
  d.du = -eta * spin_su + su.dot(s.u) * nu;
  d.dspin = eta * wedge(su, s.u) + wedge(nu, spin_su);
  return d;
}

StateDerivative rhs(const PancakeSurface& surface, const RollingState& s,
                    double eta) {
  const RegionKind region = surface.classify(s.x);
  if (region == RegionKind::Seam) {
    throw SeamPoint("rhs: state sits on a seam; choose a chart explicitly");
  }
  return rhs(surface, region, s, eta);
}

double orthogonality_residual(const PancakeSurface& surface,
                              const RollingState& s, double eta) {
  const RegionKind region = surface.side(s.x);
  const Mat shape = surface.shape_operator_in(region, s.x);
  const Vec su = shape * s.u;
  const double linear = s.u.dot(-eta * s.spin.apply(su));
  const double angular = 0.5 * (eta * wedge(su, s.u)).trace_inner(s.spin);
  return linear + angular;
}

RegionKind region_for_motion(const PancakeSurface& surface, const Vec& x,
                             const Vec& u) {
  const RegionKind a = surface.side(x);
  const double ga = surface.seam_function(a, x);
  if (!std::isfinite(ga) || ga > PancakeSurface::kSeamBand) return a;
  const double speed = u.norm();
  if (!(speed > 0.0)) return a;
  const double eps = 1e-7 * surface.radius() / speed;
  const Vec ahead = x + eps * u;
  if (surface.seam_function(a, ahead) >= ga) return a;
  return surface.region_across_seam(a, x);
}

RollingState rk4_step(const PancakeSurface& surface, RegionKind region,
                      const RollingState& s, double eta, double h) {
  const StateDerivative k1 = rhs(surface, region, s, eta);
  const StateDerivative k2 = rhs(surface, region, advance(s, k1, 0.5 * h), eta);
  const StateDerivative k3 = rhs(surface, region, advance(s, k2, 0.5 * h), eta);
  const StateDerivative k4 = rhs(surface, region, advance(s, k3, h), eta);
  RollingState out;
  out.x = s.x + (h / 6.0) * (k1.dx + 2.0 * k2.dx + 2.0 * k3.dx + k4.dx);
  out.u = s.u + (h / 6.0) * (k1.du + 2.0 * k2.du + 2.0 * k3.du + k4.du);
  out.spin = s.spin + (h / 6.0) * (k1.dspin + 2.0 * k2.dspin + 2.0 * k3.dspin + k4.dspin);
  return out;
}

RollingState renormalize(const PancakeSurface& surface, RegionKind,
                         const RollingState& s, double target_energy) {
  return renormalize_impl(surface, s, target_energy).state;
}

RollingState step(const PancakeSurface& surface, const RollingState& s,
                  double eta, double h) {
  if (!(h > 0.0)) throw InvalidArgument("step: h must be > 0");
  const RegionKind region = region_for_motion(surface, s.x, s.u);
  const RollingState trial = rk4_step(surface, region, s, eta, h);
  if (surface.seam_function(region, trial.x) < 0.0) {
    throw SeamPoint(fmt::format("step leaves region {}; use integrate()",
                                to_string(region)));
  }
  return renormalize(surface, region, trial, energy(s));
}

Trajectory integrate(const PancakeSurface& surface, const RollingState& s0,
                     double eta, const IntegrateOptions& opt) {
  if (!(opt.h > 0.0) || !(opt.T > 0.0)) {
    throw InvalidArgument("integrate: need T > 0 and h > 0");
  }
  Trajectory tr;
  IntegrationStats& st = tr.stats;
  const double e0 = energy(s0);
  st.energy0 = e0;

  RollingState s = s0;
  RegionKind region = region_for_motion(surface, s.x, s.u);
  tr.times.push_back(0.0);
  tr.states.push_back(s);
  tr.regions.push_back(region);

  auto account = [&](const RollingState& before, const RollingState& after) {
    if (e0 > 0.0) {
      const double d = (energy(after) - energy(before)) / e0;
      st.energy_drift += d;
      st.max_step_drift = std::max(st.max_step_drift, std::abs(d));
    }
  };
  auto settle = [&](const RollingState& raw) {
    Renormalized r = renormalize_impl(surface, raw, e0);
    st.max_normal_velocity = std::max(st.max_normal_velocity, r.residual.normal_velocity);
    st.max_normal_spin = std::max(st.max_normal_spin, r.residual.normal_spin);
    return r.state;
  };

  const double root_tol = 1e-12 * std::min(opt.T, opt.h);
  double t = 0.0;
  std::int64_t step_index = 0;
  auto next_grid_time = [&](double from) {
    const bool flat = region == RegionKind::FlatSheetPlus ||
                      region == RegionKind::FlatSheetMinus;
    const double hc = flat && opt.flat_h > 0.0 ? opt.flat_h : opt.h;
    const double tt = (std::floor(from / hc + 1e-9) + 1.0) * hc;
    return tt >= opt.T || opt.T - tt < 1e-9 * hc ? opt.T : tt;
  };
  while (t < opt.T) {
    double t_target = next_grid_time(t);
    int crossings = 0;
    while (t < t_target) {
      if (region == RegionKind::FlatSheetPlus || region == RegionKind::FlatSheetMinus) {
        // Sheet motion is straight: end the step just past an exact seam hit
        // so grazing passes between grid points are not missed.
        const double ts = surface.sheet_seam_time(s.x, s.u, t_target - t);
        if (ts * s.u.norm() > 1e-9 * surface.radius() && t + ts <= t_target) {
          t_target = std::min(opt.T, t + ts * (1.0 + 1e-9));
        }
      }
      const double dt = t_target - t;
      const RollingState trial = rk4_step(surface, region, s, eta, dt);
      const double g1 = surface.seam_function(region, trial.x);
      if (!(g1 < 0.0)) {
        account(s, trial);
        s = settle(trial);
        t = t_target;
        break;
      }
      if (++crossings > kMaxCrossingsPerStep) {
        throw SeamPoint(fmt::format(
            "integrate: trajectory grazes a seam near t = {:.17g}", t));
      }
      const double g0 = surface.seam_function(region, s.x);
      double tau = 0.0;
      RollingState at = s;
      if (g0 > 0.0) {
        auto g = [&](double tt) {
          return surface.seam_function(region, rk4_step(surface, region, s, eta, tt).x);
        };
        std::uintmax_t iters = 100;
        auto tol = [&](double a, double b) { return std::abs(b - a) <= root_tol; };
        const auto bracket =
            boost::math::tools::toms748_solve(g, 0.0, dt, g0, g1, tol, iters);
        // The upper end lies just past the seam, inside the next region.
        tau = bracket.second;
        const RollingState raw = rk4_step(surface, region, s, eta, tau);
        account(s, raw);
        at = settle(raw);
      }
      const RegionKind next = surface.region_across_seam(region, at.x);
      SeamEvent ev{t + tau, region, next, at};
      ++st.crossings;
      s = at;
      t = tau < dt ? t + tau : t_target;
      region = next;
      // A finer step may apply in the new region.
      t_target = std::min(t_target, next_grid_time(t));
      tr.events.push_back(ev);
      if (opt.stop_on_event && opt.stop_on_event(ev)) {
        tr.times.push_back(t);
        tr.states.push_back(s);
        tr.regions.push_back(region);
        tr.stopped_early = true;
        return tr;
      }
    }
    ++st.steps;
    ++step_index;
    if (opt.observer) opt.observer(t, s, region);
    const bool last = t >= opt.T;
    if (last || (opt.record_stride > 0 && step_index % opt.record_stride == 0)) {
      tr.times.push_back(t);
      tr.states.push_back(s);
      tr.regions.push_back(region);
    }
  }
  return tr;
}

Trajectory integrate(const PancakeSurface& surface, const RollingState& s0,
                     double eta, double T, double h) {
  IntegrateOptions opt;
  opt.T = T;
  opt.h = h;
  return integrate(surface, s0, eta, opt);
}

double parallel_transport_residual(const PancakeSurface& surface,
                                   const Trajectory& tr) {
  const auto n = tr.states.size();
  double worst = 0.0;
  for (std::size_t i = 2; i + 2 < n; ++i) {
    const double dt = tr.times[i + 1] - tr.times[i];
    bool uniform = dt > 0.0;
    for (std::size_t j = i - 2; j < i + 2 && uniform; ++j) {
      uniform = std::abs((tr.times[j + 1] - tr.times[j]) - dt) <= 1e-9 * dt;
    }
    if (!uniform) continue;
    bool smooth = true;
    for (std::size_t j = i - 2; j <= i + 2; ++j) {
      smooth = smooth && tr.regions[j] == tr.regions[i];
    }
    for (const auto& ev : tr.events) {
      smooth = smooth && !(ev.t > tr.times[i - 2] && ev.t < tr.times[i + 2]);
    }
    if (!smooth) continue;
    const Mat d = (-tr.states[i + 2].spin.matrix() + 8.0 * tr.states[i + 1].spin.matrix() -
                   8.0 * tr.states[i - 1].spin.matrix() + tr.states[i - 2].spin.matrix()) /
                  (12.0 * dt);
    const Mat proj = tangent_projector(surface.normal(tr.states[i].x));
    worst = std::max(worst, (proj * d * proj).norm());
  }
  return worst;
}

SkewMap full_U_crosscheck(const PancakeSurface& surface, const RollingState& s,
                          double r, double gamma) {
  if (!(gamma > 0.0)) {
    throw InvalidArgument("full_U_crosscheck: S = spin/(r eta) needs gamma > 0");
  }
  if (!(r > 0.0)) throw InvalidArgument("full_U_crosscheck: r must be > 0");
  const double eta = InertiaParams::from_gamma(gamma).eta;
  const Vec nu = surface.normal_in(surface.side(s.x), s.x);
  return (1.0 / (r * eta)) * s.spin + (1.0 / r) * wedge(nu, s.u);
}

RollingState u_equation_step(const PancakeSurface& surface, RegionKind region,
                             const RollingState& s, double r, double gamma,
                             double h) {
  const double eta = InertiaParams::from_gamma(gamma).eta;
  const double coef = r / (1.0 + gamma * gamma);
  struct XU {
    Vec x;
    SkewMap U;
  };
  auto f = [&](const XU& z) {
    const Vec nu = surface.normal_in(region, z.x);
    const Mat shape = surface.shape_operator_in(region, z.x);
    const Vec unu = z.U.apply(nu);
    const Vec a = z.U.apply(shape * unu);
    return XU{r * unu, -coef * wedge(a, nu)};
  };
  auto add = [](const XU& z, const XU& k, double a) {
    return XU{z.x + a * k.x, z.U + a * k.U};
  };
  const Vec nu0 = surface.normal_in(region, s.x);
  const XU z0{s.x, (1.0 / (r * eta)) * s.spin + (1.0 / r) * wedge(nu0, s.u)};
  const XU k1 = f(z0);
  const XU k2 = f(add(z0, k1, 0.5 * h));
  const XU k3 = f(add(z0, k2, 0.5 * h));
  const XU k4 = f(add(z0, k3, h));
  const Vec x1 = z0.x + (h / 6.0) * (k1.x + 2.0 * k2.x + 2.0 * k3.x + k4.x);
  const SkewMap u1 = z0.U + (h / 6.0) * (k1.U + 2.0 * k2.U + 2.0 * k3.U + k4.U);
  const Vec nu1 = surface.normal_in(region, x1);
  const Mat proj = tangent_projector(nu1);
  return {x1, r * u1.apply(nu1),
          SkewMap::skew_part((r * eta) * (proj * u1.matrix() * proj))};
}

void write_trajectory_csv(std::ostream& out, const PancakeSurface& surface,
                          const Trajectory& tr) {
  const int m = surface.dim();
  out << 't';
  for (int i = 1; i <= m; ++i) out << ",x" << i;
  for (int i = 1; i <= m; ++i) out << ",u" << i;
  for (int i = 1; i <= m; ++i) {
    for (int j = i + 1; j <= m; ++j) out << ",S" << i << j;
  }
  out << ",energy,region\n";
  for (std::size_t n = 0; n < tr.states.size(); ++n) {
    const RollingState& s = tr.states[n];
    const Vec x = surface.display_point(s.x);
    fmt::print(out, "{:.17g}", tr.times[n]);
    for (int i = 0; i < m; ++i) fmt::print(out, ",{:.17g}", x[i]);
    for (int i = 0; i < m; ++i) fmt::print(out, ",{:.17g}", s.u[i]);
    const Vec tri = upper_triangle(s.spin);
    for (Eigen::Index i = 0; i < tri.size(); ++i) fmt::print(out, ",{:.17g}", tri[i]);
    fmt::print(out, ",{:.17g},{}\n", energy(s), to_string(tr.regions[n]));
  }
}

void write_events_jsonl(std::ostream& out, const Trajectory& tr) {
  for (const auto& ev : tr.events) {
    fmt::print(out, "{{\"t\":{:.17g},\"from\":\"{}\",\"to\":\"{}\"}}\n", ev.t,
               to_string(ev.from), to_string(ev.to));
  }
}

}  // namespace pancake
