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

#include "scenario.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <future>
#include <map>
#include <numbers>
#include <random>
#include <set>
#include <sstream>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "pancake/billiard.hpp"
#include "pancake/limit_lab.hpp"
#include "pancake/oracles.hpp"
#include "pancake/plate.hpp"
#include "pancake/rolling.hpp"
#include "pancake/surface.hpp"
#include "pancake/version.hpp"

namespace pancake::cli {
namespace {

using nlohmann::json;
constexpr double kPi = std::numbers::pi;

// ---------------------------------------------------------------------------
// Field-level config reading.

[[noreturn]] void fail(const std::string& field, const std::string& msg) {
  throw ConfigError(fmt::format("{}: {}", field, msg));
}

class Obj {
 public:
  Obj(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) fail(path_.empty() ? "config" : path_, "expected a JSON object");
  }

  std::string field(const std::string& key) const {
    return path_.empty() ? key : path_ + "." + key;
  }

  bool has(const std::string& key) const { return j_.contains(key); }

  const json& req(const std::string& key) {
    seen_.insert(key);
    if (!j_.contains(key)) fail(field(key), "required field is missing");
    return j_.at(key);
  }

  const json* opt(const std::string& key) {
    seen_.insert(key);
    return j_.contains(key) ? &j_.at(key) : nullptr;
  }

  double number(const std::string& key) { return as_number(req(key), field(key)); }
  double number_or(const std::string& key, double def) {
    const json* v = opt(key);
    return v ? as_number(*v, field(key)) : def;
  }
  double positive(const std::string& key) {
    const double v = number(key);
    if (!(v > 0.0)) fail(field(key), fmt::format("must be > 0 (got {})", v));
    return v;
  }
  double positive_or(const std::string& key, double def) {
    const double v = number_or(key, def);
    if (!(v > 0.0)) fail(field(key), fmt::format("must be > 0 (got {})", v));
    return v;
  }
  long integer_or(const std::string& key, long def, long min) {
    const json* v = opt(key);
    if (!v) return def;
    if (!v->is_number_integer()) fail(field(key), "expected an integer");
    const long n = v->get<long>();
    if (n < min) fail(field(key), fmt::format("must be >= {} (got {})", min, n));
    return n;
  }
  long integer(const std::string& key, long min) {
    req(key);
    return integer_or(key, 0, min);
  }
  std::string string(const std::string& key) {
    const json& v = req(key);
    if (!v.is_string()) fail(field(key), "expected a string");
    return v.get<std::string>();
  }
  Vec vector(const std::string& key, int size) { return as_vector(req(key), field(key), size); }
  std::vector<double> list(const std::string& key) {
    const json& v = req(key);
    if (!v.is_array() || v.empty()) fail(field(key), "expected a non-empty array of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < v.size(); ++i) {
      out.push_back(as_number(v[i], fmt::format("{}[{}]", field(key), i)));
    }
    return out;
  }
  Mat matrix_or_zero(const std::string& key, int n) {
    const json* v = opt(key);
    if (!v) return Mat::Zero(n, n);
    if (!v->is_array() || static_cast<int>(v->size()) != n) {
      fail(field(key), fmt::format("expected a {}x{} array of rows", n, n));
    }
    Mat m(n, n);
    for (int i = 0; i < n; ++i) {
      m.row(i) = as_vector((*v)[i], fmt::format("{}[{}]", field(key), i), n).transpose();
    }
    return m;
  }
  Obj child(const std::string& key) { return Obj(req(key), field(key)); }

  /// Rejects keys that were never read.
  void finish() const {
    for (const auto& [key, value] : j_.items()) {
      if (!seen_.count(key)) fail(field(key), "unknown key");
    }
  }

  static double as_number(const json& v, const std::string& field) {
    if (!v.is_number()) fail(field, "expected a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) fail(field, "must be finite");
    return d;
  }
  static Vec as_vector(const json& v, const std::string& field, int size) {
    if (!v.is_array() || (size >= 0 && static_cast<int>(v.size()) != size)) {
      fail(field, fmt::format("expected an array of {} numbers", size));
    }
    Vec out(static_cast<int>(v.size()));
    for (std::size_t i = 0; i < v.size(); ++i) {
      out[static_cast<int>(i)] = as_number(v[i], fmt::format("{}[{}]", field, i));
    }
    return out;
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

// Exactly one of eta / gamma_b; returns the rolling η values (γ_b mapped
// through the correspondence).
struct EtaChoice {
  std::vector<double> eta;
  std::vector<double> gamma_b;  // empty when eta was given
};

EtaChoice read_eta(Obj& o, bool allow_list) {
  const bool has_eta = o.has("eta"), has_gb = o.has("gamma_b");
  if (has_eta == has_gb) fail("eta/gamma_b", "exactly one of eta or gamma_b must be given");
  const std::string key = has_eta ? "eta" : "gamma_b";
  std::vector<double> values;
  const json& v = o.req(key);
  if (v.is_array()) {
    if (!allow_list) fail(o.field(key), "expected a single number");
    values = o.list(key);
  } else {
    values = {o.number(key)};
  }
  EtaChoice out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const std::string f = values.size() > 1 ? fmt::format("{}[{}]", o.field(key), i) : o.field(key);
    if (has_eta) {
      if (!(values[i] >= 0.0 && values[i] < 1.0)) fail(f, "must lie in [0, 1)");
      out.eta.push_back(values[i]);
    } else {
      if (!(values[i] >= 0.0)) fail(f, "must be >= 0");
      out.gamma_b.push_back(values[i]);
      out.eta.push_back(gamma_correspondence(values[i]).eta_r);
    }
  }
  return out;
}

PlateSpec read_plate(Obj& o) {
  const json& j = o.req("plate");
  try {
    return plate_from_json(j);
  } catch (const InvalidArgument& e) {
    fail(o.field("plate"), e.what());
  }
}

SurfacePtr make_surface(Obj& o, const PlateSpec& plate, double r) {
  try {
    return build_pancake(plate, r);
  } catch (const InadmissibleRadius& e) {
    fail(o.field("r"), e.what());
  }
}

SkewMap skew_or_fail(const Mat& m, const std::string& field) {
  try {
    return SkewMap::from_matrix(m);
  } catch (const InvalidArgument& e) {
    fail(field, e.what());
  }
}

SkewMap planar_spin(double s, int k) {
  Mat m = Mat::Zero(k, k);
  m(0, 1) = s;
  m(1, 0) = -s;
  return SkewMap::from_matrix(m);
}

// ---------------------------------------------------------------------------
// Output helpers: every file goes through one writer at the end of a run.

struct Outputs {
  std::vector<std::pair<std::string, std::string>> files;
  void add(std::string name, std::string content) {
    files.emplace_back(std::move(name), std::move(content));
  }
};

std::string dump_json(const json& j) { return j.dump(2) + "\n"; }

json edge_state_json(const EdgeState& e) {
  return {{"u_bar", std::vector<double>(e.u_bar.data(), e.u_bar.data() + e.u_bar.size())},
          {"W", std::vector<double>(e.W.data(), e.W.data() + e.W.size())},
          {"u_perp", e.u_perp}};
}

// ---------------------------------------------------------------------------
// Scenarios. Each reads its fields, calls finish(), runs, and fills outputs.

struct Context {
  Obj& cfg;
  Outputs& out;
  json& summary;
  std::uint64_t seed;
  bool quiet;
};

int roll_trajectory(Context& c) {
  Obj& o = c.cfg;
  const PlateSpec plate = read_plate(o);
  const double r = o.positive("r");
  const EtaChoice eta = read_eta(o, false);
  const double T = o.positive("T"), h = o.positive("h");
  const double flat_h = o.number_or("flat_h", 0.0);
  if (flat_h < 0.0) fail(o.field("flat_h"), "must be >= 0");
  const long stride = o.integer_or("record_stride", 1, 0);
  const SurfacePtr surf = make_surface(o, plate, r);
  const int m = surf->dim();
  Obj init = o.child("initial");
  RollingState s0;
  s0.x = init.vector("x", m);
  s0.u = init.vector("u", m);
  s0.spin = skew_or_fail(init.matrix_or_zero("spin", m), init.field("spin"));
  init.finish();
  o.finish();

  Vec nu;
  try {
    nu = surf->normal(s0.x);
  } catch (const Error& e) {
    fail(init.field("x"), e.what());
  }
  if (std::abs(s0.u.dot(nu)) > 1e-9 * std::max(1.0, s0.u.norm())) {
    fail(init.field("u"), fmt::format("not tangent to the surface (u.nu = {:.3e})", s0.u.dot(nu)));
  }
  const Mat proj = tangent_projector(nu);
  if ((proj * s0.spin.matrix() * proj - s0.spin.matrix()).norm() >
      1e-9 * std::max(1.0, s0.spin.norm())) {
    fail(init.field("spin"), "spin must be tangential (spin = P spin P)");
  }

  IntegrateOptions opt;
  opt.T = T;
  opt.h = h;
  opt.flat_h = flat_h;
  opt.record_stride = static_cast<int>(stride);
  const Trajectory tr = integrate(*surf, s0, eta.eta[0], opt);

  std::ostringstream csv, ev;
  write_trajectory_csv(csv, *surf, tr);
  write_events_jsonl(ev, tr);
  c.out.add("trajectory.csv", csv.str());
  c.out.add("events.jsonl", ev.str());
  c.summary = {{"eta", eta.eta[0]},
               {"energy0", tr.stats.energy0},
               {"energy_drift", tr.stats.energy_drift},
               {"max_normal_velocity", tr.stats.max_normal_velocity},
               {"max_normal_spin", tr.stats.max_normal_spin},
               {"steps", tr.stats.steps},
               {"crossings", tr.stats.crossings},
               {"samples", tr.states.size()}};
  if (!eta.gamma_b.empty()) c.summary["gamma_b"] = eta.gamma_b[0];
  c.out.add("summary.json", dump_json(c.summary));
  return 0;
}

json caustics_json(const std::vector<CausticCluster>& clusters) {
  json arr = json::array();
  for (const auto& cl : clusters) arr.push_back({{"radius", cl.radius}, {"multiplicity", cl.multiplicity}});
  return arr;
}

int billiard_orbit_scenario(Context& c) {
  Obj& o = c.cfg;
  const json& dj = o.req("domain");
  DomainPtr domain;
  try {
    domain = billiard_domain_from_json(dj);
  } catch (const InvalidArgument& e) {
    fail(o.field("domain"), e.what());
  }
  const EtaChoice eta = read_eta(o, false);
  const long n = o.integer("n_collisions", 1);
  const int k = domain->dim();
  Obj init = o.child("initial");
  BilliardState s0;
  s0.x = init.vector("x", k);
  s0.u = init.vector("u", k);
  s0.spin = skew_or_fail(init.matrix_or_zero("spin", k), init.field("spin"));
  init.finish();
  o.finish();
  if (!(s0.u.norm() > 0.0)) fail(init.field("u"), "velocity must be nonzero");

  const double theta = kPi * eta.eta[0];
  const BilliardOrbit orbit = billiard_orbit(*domain, s0, theta, static_cast<int>(n));
  std::ostringstream csv;
  write_orbit_csv(csv, *domain, orbit);
  c.out.add("orbit.csv", csv.str());
  const double e0 = billiard_energy(s0);
  double worst = 0.0;
  for (const auto& rec : orbit.collisions) {
    worst = std::max(worst, std::abs(billiard_energy(rec.after) - e0) / e0);
  }
  c.summary = {{"eta", eta.eta[0]},
               {"theta", theta},
               {"collisions", orbit.collisions.size()},
               {"energy", e0},
               {"max_energy_error", worst}};
  if (!eta.gamma_b.empty()) c.summary["gamma_b"] = eta.gamma_b[0];
  if (domain->kind() == "Disc" && k == 2 && n + 1 >= 50) {
    const double R = dj.at("R").get<double>();
    c.summary["caustics"] = caustics_json(caustic_radii(orbit, R));
  }
  c.out.add("summary.json", dump_json(c.summary));
  return 0;
}

int edge_convergence(Context& c) {
  Obj& o = c.cfg;
  EdgeExperiment ex;
  ex.plate = read_plate(o);
  const int m = ambient_dim(ex.plate);
  ex.boundary_point = o.vector("boundary_point", m);
  const EtaChoice eta = read_eta(o, false);
  ex.eta = eta.eta[0];
  ex.radii = o.list("radii");
  Obj in = o.child("incoming");
  ex.incoming.u_bar = in.vector("u_bar", m - 2);
  ex.incoming.W = in.vector("W", m - 2);
  ex.incoming.u_perp = in.number("u_perp");
  ex.incoming.tangential = in.matrix_or_zero("tangential", m - 2);
  in.finish();
  if (o.has("crossing")) {
    Obj cr = o.child("crossing");
    ex.crossing.h_factor = cr.positive_or("h_factor", ex.crossing.h_factor);
    ex.crossing.budget_factor = cr.positive_or("budget_factor", ex.crossing.budget_factor);
    cr.finish();
  }
  o.finish();
  if (!(ex.incoming.u_perp < 0.0)) fail(in.field("u_perp"), "must be < 0 (heading into the edge)");

  ConvergenceReport rep;
  try {
    rep = convergence_study(ex);
  } catch (const InadmissibleRadius& e) {
    fail(o.field("radii"), e.what());
  } catch (const InvalidArgument& e) {
    throw ConfigError(e.what());
  }
  std::ostringstream csv;
  write_convergence_csv(csv, rep);
  c.out.add("convergence.csv", csv.str());
  json s = convergence_summary(rep);
  s["eta"] = ex.eta;
  s["incoming"] = edge_state_json(ex.incoming);
  s["expected_outgoing"] = edge_state_json(noholonomic_collision(ex.incoming, ex.eta));
  if (!eta.gamma_b.empty()) s["gamma_b"] = eta.gamma_b[0];
  c.out.add("convergence.json", dump_json(s));
  c.summary = s;
  return 0;
}

// One oracle comparison row.
struct OracleRow {
  std::string check;
  double error = 0.0;
  double tolerance = 0.0;
  bool skipped = false;
  bool pass() const { return skipped || error < tolerance; }
};

int oracle_check(Context& c) {
  Obj& o = c.cfg;
  const EtaChoice eta_choice = read_eta(o, false);
  const double eta = eta_choice.eta[0];
  const double r = o.positive("r");
  const double h = o.positive("h");
  const double T = o.positive("T");
  const long n_states = o.integer_or("n_states", 5, 1);
  o.finish();

  std::mt19937_64 rng(c.seed);
  auto uni = [&](double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); };
  std::vector<OracleRow> rows;

  // Cod-2: R x S^1(r) against the ellipse solution over one period.
  {
    OracleRow row{"codim2_ellipse", 0.0, 1e-6};
    if (eta == 0.0) {
      row.skipped = true;
    } else {
      const SurfacePtr surf = build_pancake(CylinderFactor{1}, r);
      for (long i = 0; i < n_states; ++i) {
        const double a0 = uni(0.0, 2.0 * kPi), mu = uni(0.3, 1.0) * (uni(0, 1) < 0.5 ? -1 : 1);
        const double u00 = uni(-1.0, 1.0), w0 = uni(-1.0, 1.0), x00 = uni(-1.0, 1.0);
        Vec e(3), e1 = unit(3, 0), x(3);
        e << 0.0, -std::sin(a0), std::cos(a0);
        x << x00, r * std::cos(a0), r * std::sin(a0);
        const RollingState s{x, u00 * e1 + mu * e, -w0 * wedge(e1, e)};
        const double period = 2.0 * kPi / std::abs(eta * mu / r);
        const Trajectory tr = integrate(*surf, s, eta, period, h);
        Vec w0v(1), u0v(1), x0v(1);
        w0v << w0;
        u0v << u00;
        x0v << x00;
        for (std::size_t j = 0; j < tr.states.size(); ++j) {
          const Codim2Solution z = codim2_solution(w0v, u0v, x0v, mu, eta, r, tr.times[j]);
          row.error = std::max({row.error, std::abs(tr.states[j].x[0] - z.x[0]),
                                std::abs(tr.states[j].u[0] - z.u0[0])});
        }
      }
    }
    rows.push_back(row);
  }
  // Cod-3: invariant and |u1| on R x S^2(r) over T.
  {
    OracleRow inv_row{"codim3_invariant", 0.0, 1e-8};
    OracleRow speed_row{"codim3_sphere_speed", 0.0, 1e-10};
    const SurfacePtr surf = build_pancake(SphereFactor{1}, r);
    for (long i = 0; i < n_states; ++i) {
      Vec dir(3);
      for (int j = 0; j < 3; ++j) dir[j] = uni(-1.0, 1.0);
      dir.normalize();
      Vec x(4);
      x << uni(-1.0, 1.0), r * dir[0], r * dir[1], r * dir[2];
      const Mat proj = tangent_projector(surf->normal(x));
      Vec u(4);
      Mat sm(4, 4);
      for (int j = 0; j < 4; ++j) {
        u[j] = uni(-1.0, 1.0);
        for (int l = 0; l < 4; ++l) sm(j, l) = uni(-1.0, 1.0);
      }
      const RollingState s{x, proj * u,
                           SkewMap::skew_part(proj * SkewMap::skew_part(sm).matrix() * proj)};
      auto scalar = [](const RollingState& st) {
        const Mat& b = st.spin.matrix();
        const Eigen::Vector3d axial(b(3, 2), b(1, 3), b(2, 1));
        return axial.dot(Eigen::Vector3d(st.x.segment(1, 3).normalized()));
      };
      auto inv = [&](const RollingState& st) {
        return codim3_invariant(st.x.segment(1, 3), st.u.segment(1, 3), scalar(st), eta);
      };
      const Eigen::Vector3d i0 = inv(s);
      const double sp0 = s.u.segment(1, 3).norm();
      IntegrateOptions opt;
      opt.T = T;
      opt.h = h;
      opt.record_stride = 0;
      opt.observer = [&](double, const RollingState& st, RegionKind) {
        inv_row.error = std::max(inv_row.error, (inv(st) - i0).norm());
        speed_row.error = std::max(speed_row.error, std::abs(st.u.segment(1, 3).norm() - sp0));
      };
      integrate(*surf, s, eta, opt);
    }
    rows.push_back(inv_row);
    rows.push_back(speed_row);
  }
  // Straight edge: exact rolling map and πr/|μ|.
  {
    OracleRow map_row{"edge_roll_map", 0.0, 1e-8};
    OracleRow time_row{"edge_roll_time", 0.0, 1e-6};
    const SurfacePtr surf = build_pancake(HalfPlane{2}, r);
    const Eigen::Matrix2d b = edge_roll_matrix(eta, 1).billiard;
    for (long i = 0; i < n_states; ++i) {
      EdgeState in{Vec::Constant(1, uni(-1.0, 1.0)), Vec::Constant(1, uni(-1.0, 1.0)),
                   -uni(0.3, 1.0), Mat::Zero(1, 1)};
      Vec foot = Vec::Zero(3);
      const CrossingResult res = run_edge_crossing(*surf, seam_state(*surf, foot, in), eta);
      const Eigen::Vector2d expect = b * Eigen::Vector2d(in.u_bar[0], in.W[0]);
      map_row.error = std::max({map_row.error, std::abs(res.outgoing.u_bar[0] - expect[0]),
                                std::abs(res.outgoing.W[0] - expect[1]),
                                std::abs(res.outgoing.u_perp + in.u_perp)});
      time_row.error = std::max(time_row.error,
                                std::abs(res.traversal_time - edge_roll_duration(r, in.u_perp)));
    }
    rows.push_back(map_row);
    rows.push_back(time_row);
  }
  // Semi-infinite line: largest excursion into the cylinder.
  {
    OracleRow row{"semi_infinite_excursion", 0.0, 1e-6};
    if (eta == 0.0) {
      row.skipped = true;
    } else {
      const SurfacePtr surf = build_pancake(SemiInfiniteLine{}, r);
      for (long i = 0; i < n_states; ++i) {
        const double a0 = uni(0.0, 2.0 * kPi), u00 = uni(0.2, 1.0), mu = uni(0.3, 1.0);
        const double spin = uni(-0.5, 0.5);
        Vec nu(3), e1 = unit(3, 0), e(3);
        nu << 0.0, std::cos(a0), std::sin(a0);
        e << 0.0, std::sin(a0), -std::cos(a0);
        const RollingState s{r * nu, u00 * e1 + mu * e, spin * wedge(e1, e)};
        const double omega = eta * mu / r;
        double max_x = 0.0;
        IntegrateOptions opt;
        opt.T = 2.0 * kPi / omega;
        opt.h = h;
        opt.record_stride = 0;
        opt.stop_on_event = [](const SeamEvent& ev) { return ev.to == RegionKind::Cap; };
        opt.observer = [&](double, const RollingState& st, RegionKind) {
          max_x = std::max(max_x, st.x[0]);
        };
        integrate(*surf, s, eta, opt);
        row.error = std::max(row.error,
                             std::abs(max_x - semi_infinite_max_displacement(u00, spin, omega)));
      }
    }
    rows.push_back(row);
  }
  // θ correspondence.
  {
    OracleRow row{"gamma_correspondence", 0.0, 1e-12};
    const double gb = eta_choice.gamma_b.empty() ? gamma_b_from_eta_r(eta) : eta_choice.gamma_b[0];
    const GammaCorrespondence g = gamma_correspondence(gb);
    const Eigen::Vector2d cs = cbeta_sbeta(gb);
    row.error = std::max({std::abs(kPi * g.eta_r - beta_angle(gb)),
                          std::abs(std::cos(kPi * g.eta_r) - cs[0]),
                          std::abs(std::sin(kPi * g.eta_r) - cs[1]), std::abs(g.eta_r - eta)});
    rows.push_back(row);
  }

  std::string csv = "check,error,tolerance,pass\n";
  json checks = json::array();
  bool all = true;
  for (const auto& row : rows) {
    const std::string status = row.skipped ? "skipped" : (row.pass() ? "true" : "false");
    csv += fmt::format("{},{:.17g},{:g},{}\n", row.check, row.error, row.tolerance, status);
    checks.push_back({{"check", row.check},
                      {"error", row.error},
                      {"tolerance", row.tolerance},
                      {"status", row.skipped ? "skipped" : (row.pass() ? "pass" : "fail")}});
    all = all && row.pass();
  }
  c.out.add("oracle_check.csv", csv);
  c.summary = {{"eta", eta}, {"checks", checks}, {"all_passed", all}};
  if (!eta_choice.gamma_b.empty()) c.summary["gamma_b"] = eta_choice.gamma_b[0];
  return all ? 0 : 1;
}

int figure_sinai(Context& c) {
  Obj& o = c.cfg;
  const PlateSpec plate = read_plate(o);
  if (!std::holds_alternative<SinaiTorus>(plate)) fail(o.field("plate"), "FigureSinai needs a SinaiTorus plate");
  const double r = o.positive("r");
  const EtaChoice eta = read_eta(o, true);
  const double T = o.positive("T"), h = o.positive("h");
  const double flat_h = o.number_or("flat_h", 0.0);
  if (flat_h < 0.0) fail(o.field("flat_h"), "must be >= 0");
  const long stride = o.integer_or("record_stride", 10, 0);
  Obj init = o.child("initial");
  const Vec x2 = init.vector("x", 2), u2 = init.vector("u", 2);
  const double spin = init.number_or("spin", 0.0);
  init.finish();
  o.finish();
  const SurfacePtr surf = make_surface(o, plate, r);
  RollingState s0{Vec::Zero(3), Vec::Zero(3), planar_spin(spin, 3)};
  s0.x << x2[0], x2[1], r;
  s0.u << u2[0], u2[1], 0.0;
  if (!(surf->edge_frame(s0.x).signed_distance > 0.0)) fail(init.field("x"), "must lie inside the plate (outside the hole)");
  std::set<std::string> names;
  for (double e : eta.eta) {
    if (!names.insert(fmt::format("{:g}", e)).second) fail("eta", "values must be distinct");
  }

  IntegrateOptions opt;
  opt.T = T;
  opt.h = h;
  opt.flat_h = flat_h;
  opt.record_stride = static_cast<int>(stride);
  // Independent trajectories run concurrently; files are written afterwards.
  std::vector<std::future<Trajectory>> jobs;
  for (double e : eta.eta) {
    jobs.push_back(std::async(std::launch::async, [&, e] { return integrate(*surf, s0, e, opt); }));
  }
  const double L = std::get<SinaiTorus>(plate).L;
  std::string dat = "# x y (wrapped); one block per eta, blank lines at torus wraps\n";
  json runs = json::array();
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    const Trajectory tr = jobs[i].get();
    const std::string tag = fmt::format("{:g}", eta.eta[i]);
    std::ostringstream csv;
    write_trajectory_csv(csv, *surf, tr);
    c.out.add(fmt::format("sinai_eta_{}.csv", tag), csv.str());
    dat += fmt::format("# eta={}\n", tag);
    Vec prev;
    for (const auto& st : tr.states) {
      const Vec p = surf->display_point(st.x);
      if (prev.size() && (p.head(2) - prev.head(2)).norm() > 0.5 * L) dat += "\n";
      dat += fmt::format("{:.17g} {:.17g}\n", p[0], p[1]);
      prev = p;
    }
    dat += "\n\n";
    runs.push_back({{"eta", eta.eta[i]},
                    {"crossings", tr.stats.crossings},
                    {"steps", tr.stats.steps},
                    {"energy_drift", tr.stats.energy_drift},
                    {"max_normal_velocity", tr.stats.max_normal_velocity},
                    {"max_normal_spin", tr.stats.max_normal_spin},
                    {"final_time", tr.times.back()}});
  }
  c.out.add("sinai_paths.dat", dat);
  c.summary = {{"runs", runs}};
  if (!eta.gamma_b.empty()) c.summary["gamma_b"] = eta.gamma_b;
  return 0;
}

int figure_disc_caustics(Context& c) {
  Obj& o = c.cfg;
  const PlateSpec plate = read_plate(o);
  if (!std::holds_alternative<Disc>(plate)) fail(o.field("plate"), "FigureDiscCaustics needs a Disc plate");
  const double R = std::get<Disc>(plate).R;
  const EtaChoice eta = read_eta(o, false);
  const long n = o.integer_or("n_collisions", 500, 49);
  Obj init = o.child("initial");
  const BilliardState s0{init.vector("x", 2), init.vector("u", 2),
                         planar_spin(init.number_or("spin", 0.0), 2)};
  init.finish();
  double rolling_r = 0.0;
  long rolling_n = 0;
  CrossingOptions crossing;
  if (o.has("rolling")) {
    Obj ro = o.child("rolling");
    rolling_r = ro.positive("r");
    rolling_n = ro.integer("n_crossings", 1);
    crossing.h_factor = ro.positive_or("h_factor", crossing.h_factor);
    ro.finish();
  }
  o.finish();
  if (!(s0.x.norm() < R)) fail(init.field("x"), "must lie inside the disc");
  if (!(s0.u.norm() > 0.0)) fail(init.field("u"), "velocity must be nonzero");

  const double theta = kPi * eta.eta[0];
  const DomainPtr domain = make_billiard_domain(plate);
  const BilliardOrbit orbit = billiard_orbit(*domain, s0, theta, static_cast<int>(n));
  const auto clusters = caustic_radii(orbit, R);
  std::ostringstream csv;
  write_orbit_csv(csv, *domain, orbit);
  c.out.add("disc_orbit.csv", csv.str());
  json caust = {{"eta", eta.eta[0]},
                {"theta", theta},
                {"collisions", orbit.collisions.size()},
                {"clusters", caustics_json(clusters)},
                {"count", clusters.size()}};
  if (!eta.gamma_b.empty()) caust["gamma_b"] = eta.gamma_b[0];

  if (rolling_n > 0) {
    try {
      (void)build_pancake(plate, rolling_r);
    } catch (const InadmissibleRadius& e) {
      fail("rolling.r", e.what());
    }
    const PairedOrbits p = rolling_vs_billiard_orbit(plate, rolling_r, eta.eta[0], s0,
                                                     static_cast<int>(rolling_n), crossing);
    std::string rc =
        "n,entry_time,exit_time,entry_x1,entry_x2,exit_x1,exit_x2,exit_side,chord_dist,"
        "global_divergence,local_divergence\n";
    for (std::size_t i = 0; i < p.rolling.size(); ++i) {
      const RollingCrossing& x = p.rolling[i];
      rc += fmt::format("{},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{},{:.17g},{:.17g},{:.17g}\n",
                        i + 1, x.entry_time, x.exit_time, x.entry_foot[0], x.entry_foot[1],
                        x.exit_foot[0], x.exit_foot[1], to_string(x.exit_side),
                        p.rolling_chord_distances.at(i), p.global_divergence.at(i),
                        p.local_divergence.at(i));
    }
    c.out.add("rolling_crossings.csv", rc);
    // Each rolling chord distance against its nearest billiard caustic.
    json match = json::array();
    for (const auto& cl : clusters) match.push_back({{"radius", cl.radius}, {"rolling_segments", 0}, {"max_deviation", 0.0}});
    for (double d : p.rolling_chord_distances) {
      std::size_t best = 0;
      for (std::size_t j = 1; j < clusters.size(); ++j) {
        if (std::abs(d - clusters[j].radius) < std::abs(d - clusters[best].radius)) best = j;
      }
      match[best]["rolling_segments"] = match[best]["rolling_segments"].get<int>() + 1;
      match[best]["max_deviation"] =
          std::max(match[best]["max_deviation"].get<double>(), std::abs(d - clusters[best].radius));
    }
    caust["rolling"] = {{"r", rolling_r},
                        {"crossings", p.rolling.size()},
                        {"max_energy_error", p.max_energy_error},
                        {"max_local_divergence",
                         *std::max_element(p.local_divergence.begin(), p.local_divergence.end())},
                        {"clusters", match}};
  }
  c.out.add("caustics.json", dump_json(caust));
  c.summary = caust;
  return 0;
}

using ScenarioFn = int (*)(Context&);

const std::map<std::string, ScenarioFn>& registry() {
  static const std::map<std::string, ScenarioFn> r = {
      {"RollTrajectory", roll_trajectory},
      {"BilliardOrbit", billiard_orbit_scenario},
      {"EdgeConvergence", edge_convergence},
      {"OracleCheck", oracle_check},
      {"FigureSinai", figure_sinai},
      {"FigureDiscCaustics", figure_disc_caustics},
  };
  return r;
}

}  // namespace

const std::vector<std::string>& scenario_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> v;
    for (const auto& [name, fn] : registry()) v.push_back(name);
    return v;
  }();
  return names;
}

nlohmann::json load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(fmt::format("{}: cannot open config file", path.string()));
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(fmt::format("{}: invalid JSON: {}", path.string(), e.what()));
  }
  // A manifest carries the config it was produced from.
  if (j.is_object() && !j.contains("scenario") && j.contains("config") && j.contains("version")) {
    return j.at("config");
  }
  return j;
}

RunResult run_scenario(const nlohmann::json& config, const RunOptions& options) {
  const auto t0 = std::chrono::steady_clock::now();
  Obj cfg(config, "");
  const std::string name = cfg.string("scenario");
  const auto it = registry().find(name);
  if (it == registry().end()) {
    std::string known;
    for (const auto& n : scenario_names()) known += (known.empty() ? "" : ", ") + n;
    fail("scenario", fmt::format("unknown scenario \"{}\" (known: {})", name, known));
  }
  const long seed = cfg.integer_or("seed", 0, 0);
  if (const json* d = cfg.opt("output_dir"); d && !d->is_string()) {
    fail("output_dir", "expected a string");
  }

  Outputs out;
  RunResult result;
  Context ctx{cfg, out, result.summary, static_cast<std::uint64_t>(seed), options.quiet};
  try {
    result.exit_code = it->second(ctx);
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ScenarioError(fmt::format("{}: {}", name, e.what()));
  }
  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  std::filesystem::create_directories(options.out_dir);
  for (const auto& [file, content] : out.files) {
    std::ofstream f(options.out_dir / file, std::ios::binary);
    if (!f) throw ScenarioError(fmt::format("{}: cannot write {}", name, file));
    f << content;
    result.outputs.push_back(file);
  }
  json manifest = {{"config", config},
                   {"version", std::string(version())},
                   {"wall_time_s", wall},
                   {"outputs", result.outputs},
                   {"summary", result.summary}};
  {
    std::ofstream f(options.out_dir / "manifest.json", std::ios::binary);
    f << dump_json(manifest);
  }
  result.outputs.push_back("manifest.json");
  return result;
}

}  // namespace pancake::cli
