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

#include <cmath>
#include <numbers>
#include <sstream>

#include <Eigen/Geometry>
#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "pancake/errors.hpp"
#include "pancake/oracles.hpp"
#include "pancake/rolling.hpp"
#include "test_support.hpp"

namespace pancake {
namespace {

using testing::vec;
constexpr double kPi = std::numbers::pi;

// Matrix of v ↦ ν × v in the sphere block starting at index k.
SkewMap sphere_rotation(int m, int k, const Vec& nu, double s) {
  Mat j = Mat::Zero(m, m);
  const Eigen::Vector3d n = nu.segment(k, 3);
  j(k, k + 1) = -n[2];
  j(k, k + 2) = n[1];
  j(k + 1, k) = n[2];
  j(k + 1, k + 2) = -n[0];
  j(k + 2, k) = -n[1];
  j(k + 2, k + 1) = n[0];
  return SkewMap::from_matrix(s * j);
}

// Start on ℝ × S²(r) with no flat velocity and a pure sphere-block spin: the
// centre moves uniformly on the circle {x·I = const} about the invariant axis.
struct SphereCircle {
  SurfacePtr surface;
  RollingState s0;
  double eta;
  Eigen::Vector3d axis;
  double omega;

  Vec at(double t) const {
    const Eigen::Vector3d x0 = s0.x.segment(1, 3);
    const Eigen::Vector3d c = axis.dot(x0) * axis;
    const Eigen::Vector3d y = c + Eigen::AngleAxisd(omega * t, axis) * (x0 - c);
    Vec x = s0.x;
    x.segment(1, 3) = y;
    return x;
  }
};

SphereCircle sphere_circle(double r, double eta, double spin_scalar) {
  SphereCircle sc;
  sc.surface = build_pancake(SphereFactor{1}, r);
  sc.eta = eta;
  const Vec nu = vec({0.0, 0.6, 0.0, 0.8});
  sc.s0.x = r * nu;
  sc.s0.x[0] = 0.3;
  sc.s0.u = vec({0.0, 0.8, 0.5, -0.6});
  sc.s0.spin = sphere_rotation(4, 1, nu, spin_scalar);
  const Eigen::Vector3d x1 = sc.s0.x.segment(1, 3), u1 = sc.s0.u.segment(1, 3);
  const Eigen::Vector3d inv = codim3_invariant(x1, u1, spin_scalar, eta);
  sc.axis = inv.normalized();
  const Eigen::Vector3d lever = sc.axis.cross(x1);
  sc.omega = u1.dot(lever) / lever.squaredNorm();
  return sc;
}

TEST(Inertia, Params) {
  const InertiaParams p = InertiaParams::from_gamma(0.75);
  EXPECT_NEAR(p.eta, 0.6, 1e-15);
  EXPECT_NEAR(InertiaParams::from_eta(0.6).gamma, 0.75, 1e-14);
  EXPECT_NO_THROW(p.validate());
  EXPECT_THROW(InertiaParams::from_eta(1.0), InvalidArgument);
  EXPECT_THROW(InertiaParams::from_gamma(-0.1), InvalidArgument);
  EXPECT_THROW((InertiaParams{0.75, 0.5}.validate()), InvalidArgument);
}

TEST(Energy, Examples) {
  RollingState s{vec({0.0, 0.0, 0.0}), vec({0.0, 0.0, 0.0}), SkewMap::zero(3)};
  EXPECT_EQ(energy(s), 0.0);
  s.u = vec({1.0, 0.0, 0.0});
  EXPECT_DOUBLE_EQ(energy(s), 0.5);
  s.spin = wedge(unit(3, 0), unit(3, 1));
  EXPECT_DOUBLE_EQ(energy(s), 1.0);
}

TEST(Rhs, FlatSheetIsStraightMotion) {
  const SurfacePtr hp = build_pancake(HalfPlane{2}, 0.1);
  testing::Rng rng(1);
  const RollingState s = testing::random_state_at(*hp, vec({0.0, 0.5, 0.1}), rng);
  const StateDerivative d = rhs(*hp, s, 0.7);
  EXPECT_EQ(d.dx, s.u);
  EXPECT_EQ(d.du.norm(), 0.0);
  EXPECT_EQ(d.dspin.norm(), 0.0);
  EXPECT_THROW(rhs(*hp, RollingState{vec({0.0, 0.0, 0.1}), s.u, s.spin}, 0.7), SeamPoint);
}

TEST(Rhs, EtaZeroIsGeodesicAndTransport) {
  testing::Rng rng(2);
  for (const auto& c : testing::built_in_surfaces(0.1)) {
    for (int i = 0; i < 20; ++i) {
      const testing::Sample p = testing::sample_point(*c.surface, rng);
      const RollingState s = testing::random_state_at(*c.surface, p.x, rng);
      const Vec nu = c.surface->normal(p.x);
      const Mat sh = c.surface->shape_operator(p.x);
      const StateDerivative d = rhs(*c.surface, s, 0.0);
      EXPECT_LT((d.du - (sh * s.u).dot(s.u) * nu).norm(), 1e-12) << c.name;
      EXPECT_LT((d.dspin - wedge(nu, s.spin.apply(sh * s.u))).norm(), 1e-12) << c.name;
    }
  }
}

TEST(Rhs, SphereLinearEquation) {
  // Tangential du = (η𝓈/r) ν × u on the sphere factor.
  const double r = 0.2, eta = 0.4, sc = 1.7;
  const SphereCircle c = sphere_circle(r, eta, sc);
  const StateDerivative d = rhs(*c.surface, c.s0, eta);
  const Vec nu = c.surface->normal(c.s0.x);
  const Vec tangential = tangent_projector(nu) * d.du;
  const Eigen::Vector3d n3 = nu.segment(1, 3), u3 = c.s0.u.segment(1, 3);
  const Eigen::Vector3d expected = (eta * sc / r) * n3.cross(u3);
  EXPECT_LT((tangential.segment(1, 3) - expected).norm(), 1e-12);
  EXPECT_NEAR(tangential[0], 0.0, 1e-15);
  EXPECT_NEAR(testing::sphere_spin_scalar(c.s0, 1), sc, 1e-15);
}

TEST(Rhs, OrthogonalityResidual) {
  testing::Rng rng(3);
  int n = 0;
  for (const auto& c : testing::built_in_surfaces(0.1)) {
    for (int i = 0; i < 1250; ++i) {
      const testing::Sample p = testing::sample_point(*c.surface, rng);
      const RollingState s = testing::random_state_at(*c.surface, p.x, rng);
      const double eta = testing::uniform(rng, 0.0, 0.95);
      EXPECT_LT(std::abs(orthogonality_residual(*c.surface, s, eta)), 1e-12) << c.name;
      EXPECT_EQ(orthogonality_residual(*c.surface, s, 0.0), 0.0);
      if (p.region == RegionKind::FlatSheetPlus || p.region == RegionKind::FlatSheetMinus) {
        EXPECT_EQ(orthogonality_residual(*c.surface, s, eta), 0.0);
      }
      ++n;
    }
  }
  EXPECT_GE(n, 10000);
}

TEST(Step, FlatSheetExact) {
  const SurfacePtr disc = build_pancake(Disc{1.0}, 0.1);
  testing::Rng rng(4);
  const RollingState s = testing::random_state_at(*disc, vec({0.1, -0.2, -0.1}), rng, 0.3);
  const RollingState t = step(*disc, s, 0.5, 1e-2);
  EXPECT_LT((t.x - (s.x + 1e-2 * s.u)).norm(), 1e-15);
  EXPECT_LT((t.u - s.u).norm(), 1e-15);
  EXPECT_LT((t.spin - s.spin).norm(), 1e-15);
  // A step across the seam must go through integrate().
  RollingState near = s;
  near.x = vec({0.0, 0.999, 0.1});
  near.u = vec({0.0, 1.0, 0.0});
  EXPECT_THROW(step(*disc, near, 0.5, 1e-2), SeamPoint);
}

TEST(Step, DegenerateZeroVelocityIsStationaryOnSheet) {
  const SurfacePtr disc = build_pancake(Disc{1.0}, 0.1);
  RollingState s{vec({0.1, 0.2, 0.1}), Vec::Zero(3), wedge(unit(3, 0), unit(3, 1))};
  const Trajectory tr = integrate(*disc, s, 0.5, 1.0, 1e-2);
  EXPECT_EQ(tr.states.back().x, s.x);
  EXPECT_LT((tr.states.back().spin - s.spin).norm(), 1e-15);
}

TEST(Step, SphereLocalErrorIsFifthOrder) {
  const SphereCircle c = sphere_circle(0.5, 0.7, 2.0);
  auto err = [&](double h) { return (step(*c.surface, c.s0, c.eta, h).x - c.at(h)).norm(); };
  const double e1 = err(2e-2), e2 = err(1e-2);
  EXPECT_GT(std::log2(e1 / e2), 4.5) << e1 << " " << e2;
}

TEST(Integrate, SphereGlobalOrder) {
  const SphereCircle c = sphere_circle(0.5, 0.7, 2.0);
  const double T = 4.0;
  std::vector<double> errs;
  for (double h : {1e-2, 5e-3, 2.5e-3}) {
    const Trajectory tr = integrate(*c.surface, c.s0, c.eta, T, h);
    ASSERT_NEAR(tr.times.back(), T, 1e-12);
    errs.push_back((tr.states.back().x - c.at(T)).norm());
  }
  for (int i = 0; i + 1 < 3; ++i) {
    const double order = std::log2(errs[i] / errs[i + 1]);
    EXPECT_GE(order, 3.8) << errs[i] << " " << errs[i + 1];
    EXPECT_LE(order, 4.2) << errs[i] << " " << errs[i + 1];
  }
}

TEST(Integrate, HalfPlaneEventsAndTimes) {
  const double r = 0.1;
  const SurfacePtr hp = build_pancake(HalfPlane{2}, r);
  RollingState s{vec({0.0, 0.3, r}), vec({0.2, -1.0, 0.0}), wedge(unit(3, 0), unit(3, 1))};
  const Trajectory tr = integrate(*hp, s, 0.4, 1.0, 1e-3);
  ASSERT_EQ(tr.events.size(), 2u);
  EXPECT_EQ(tr.events[0].from, RegionKind::FlatSheetPlus);
  EXPECT_EQ(tr.events[0].to, RegionKind::EdgeTube);
  EXPECT_EQ(tr.events[1].from, RegionKind::EdgeTube);
  EXPECT_EQ(tr.events[1].to, RegionKind::FlatSheetMinus);
  EXPECT_NEAR(tr.events[0].t, 0.3, 1e-12);
  EXPECT_NEAR(tr.events[1].t - tr.events[0].t, edge_roll_duration(r, 1.0), 1e-8);
  for (std::size_t i = 1; i < tr.times.size(); ++i) EXPECT_GT(tr.times[i], tr.times[i - 1]);
  EXPECT_EQ(tr.stats.crossings, 2);
  EXPECT_EQ(tr.regions.back(), RegionKind::FlatSheetMinus);
  EXPECT_EQ(region_for_motion(*hp, vec({0.0, 0.0, r}), vec({0.0, -1.0, 0.0})),
            RegionKind::EdgeTube);
  EXPECT_EQ(region_for_motion(*hp, vec({0.0, 0.0, r}), vec({0.0, 1.0, 0.0})),
            RegionKind::FlatSheetPlus);
}

TEST(Integrate, StopOnEventAndObserver) {
  const SurfacePtr hp = build_pancake(HalfPlane{2}, 0.1);
  RollingState s{vec({0.0, 0.3, 0.1}), vec({0.0, -1.0, 0.0}), SkewMap::zero(3)};
  IntegrateOptions o;
  o.T = 5.0;
  o.h = 1e-3;
  int calls = 0;
  o.observer = [&](double, const RollingState&, RegionKind) { ++calls; };
  o.stop_on_event = [](const SeamEvent& e) { return e.to == RegionKind::EdgeTube; };
  const Trajectory tr = integrate(*hp, s, 0.0, o);
  EXPECT_TRUE(tr.stopped_early);
  EXPECT_EQ(tr.events.size(), 1u);
  EXPECT_NEAR(tr.times.back(), 0.3, 1e-12);
  EXPECT_GT(calls, 250);
}

TEST(Integrate, ConstraintsAndEnergyAlongTrajectories) {
  testing::Rng rng(7);
  for (const auto& c : testing::built_in_surfaces(0.1)) {
    const RollingState s = testing::random_state_at(*c.surface, c.x0, rng);
    const Trajectory tr = integrate(*c.surface, s, 0.3, 3.0, 1e-3);
    const double e0 = energy(s);
    for (const auto& st : tr.states) {
      EXPECT_LT(std::abs(energy(st) - e0) / e0, 1e-10) << c.name;
      const ConstraintResidual res = constraint_residual(*c.surface, st);
      EXPECT_LT(res.normal_velocity, 1e-9) << c.name;
      EXPECT_LT(res.normal_spin, 1e-9) << c.name;
    }
    EXPECT_LT(std::abs(tr.stats.energy_drift), 1e-6) << c.name;
    EXPECT_LT(tr.stats.max_normal_velocity, 1e-9) << c.name;
  }
}

TEST(Integrate, CylinderMeridianSpeedConstant) {
  const double r = 0.1;
  const SurfacePtr cyl = build_pancake(CylinderFactor{2}, r);
  testing::Rng rng(8);
  const RollingState s = testing::random_state_at(*cyl, vec({0.0, 0.0, r, 0.0}), rng);
  IntegrateOptions o;
  o.T = 5.0;
  o.h = 1e-3;
  double lo = 1e300, hi = -1e300;
  o.observer = [&](double, const RollingState& st, RegionKind) {
    const Vec e = vec({0.0, 0.0, -st.x[3] / r, st.x[2] / r});
    const double mu = st.u.dot(e);
    lo = std::min(lo, mu);
    hi = std::max(hi, mu);
  };
  integrate(*cyl, s, 0.6, o);
  EXPECT_LT(hi - lo, 1e-10);
}

TEST(Integrate, EtaZeroMatchesIndependentGeodesics) {
  const double r = 0.3, h = 1e-4, T = 5.0;
  testing::Rng rng(9);
  for (const PlateSpec& plate : {PlateSpec{SphereFactor{1}}, PlateSpec{CylinderFactor{1}}}) {
    const SurfacePtr surf = build_pancake(plate, r);
    const int m = surf->dim();
    const int k = 1;  // both plates have a one-dimensional flat factor
    const testing::Sample p = testing::sample_point(*surf, rng);
    const RollingState s = testing::random_state_at(*surf, p.x, rng, 1.0, 2.0);
    const Trajectory tr = integrate(*surf, s, 0.0, T, h);
    Vec x = s.x, v = s.u;
    const testing::LevelSet ls = testing::product_level_set(m, k, r);
    const long n = std::lround(T / h);
    for (long i = 0; i < n; ++i) testing::geodesic_rk4(ls, x, v, h);
    EXPECT_LT((tr.states.back().x - x).norm(), 1e-8) << family_name(plate);
    const double s0 = s.spin.norm();
    for (const auto& st : tr.states) EXPECT_NEAR(st.spin.norm(), s0, 1e-10);
  }
}

TEST(Integrate, ParallelTransportResidual) {
  const SurfacePtr hp = build_pancake(HalfPlane{2}, 0.1);
  RollingState flat{vec({0.0, 0.5, 0.1}), vec({1.0, 0.2, 0.0}), wedge(unit(3, 0), unit(3, 1))};
  EXPECT_EQ(parallel_transport_residual(*hp, integrate(*hp, flat, 0.0, 1.0, 1e-2)), 0.0);

  const SphereCircle c = sphere_circle(0.5, 0.0, 1.0);
  RollingState s = c.s0;
  s.u[0] = 0.4;
  s.spin = s.spin + wedge(unit(4, 0), tangent_projector(c.surface->normal(s.x)) * unit(4, 2));
  const double e1 = parallel_transport_residual(*c.surface, integrate(*c.surface, s, 0.0, 2.0, 2e-2));
  const double e2 = parallel_transport_residual(*c.surface, integrate(*c.surface, s, 0.0, 2.0, 1e-2));
  EXPECT_LT(e1, 1e-5);
  EXPECT_GT(std::log2(e1 / e2), 3.5) << e1 << " " << e2;
  // With η > 0 the residual is genuinely nonzero.
  EXPECT_GT(parallel_transport_residual(*c.surface, integrate(*c.surface, s, 0.7, 2.0, 1e-2)),
            1e-2);
}

TEST(FullU, ConstraintIdentityAndErrors) {
  const double r = 0.1, gamma = 0.8;
  const double eta = InertiaParams::from_gamma(gamma).eta;
  testing::Rng rng(10);
  const auto cases = testing::built_in_surfaces(r);
  for (const auto& c : cases) {
    for (int i = 0; i < 50; ++i) {
      const testing::Sample p = testing::sample_point(*c.surface, rng);
      RollingState s = testing::random_state_at(*c.surface, p.x, rng);
      const Vec nu = c.surface->normal(p.x);
      const SkewMap u_mat = full_U_crosscheck(*c.surface, s, r, gamma);
      EXPECT_LT((r * u_mat.apply(nu) - s.u).norm(), 1e-12) << c.name;
      const Mat proj = tangent_projector(nu);
      EXPECT_LT((r * eta * SkewMap::skew_part(proj * u_mat.matrix() * proj).matrix() -
                 s.spin.matrix()).norm(),
                1e-12)
          << c.name;
      s.spin = SkewMap::zero(c.surface->dim());
      EXPECT_LT((full_U_crosscheck(*c.surface, s, r, gamma) - wedge(nu, s.u / r)).norm(), 1e-12);
    }
  }
  RollingState s = testing::random_state_at(*cases[0].surface, cases[0].x0, rng);
  EXPECT_THROW(full_U_crosscheck(*cases[0].surface, s, r, 0.0), InvalidArgument);
}

TEST(FullU, EquationStepMatchesRhsStep) {
  const double r = 0.1, gamma = 0.8, h = 1e-4;
  const double eta = InertiaParams::from_gamma(gamma).eta;
  testing::Rng rng(11);
  for (const auto& c : testing::built_in_surfaces(r)) {
    for (int i = 0; i < 50; ++i) {
      const testing::Sample p = testing::sample_point(*c.surface, rng);
      const RollingState s = testing::random_state_at(*c.surface, p.x, rng);
      const RollingState a = u_equation_step(*c.surface, p.region, s, r, gamma, h);
      const RollingState b = rk4_step(*c.surface, p.region, s, eta, h);
      EXPECT_LT((a.x - b.x).norm(), 1e-10) << c.name;
      EXPECT_LT((a.u - b.u).norm(), 1e-10) << c.name;
      EXPECT_LT((a.spin - b.spin).norm(), 1e-10) << c.name;
    }
  }
}

TEST(Integrate, ShortReversibility) {
  testing::Rng rng(12);
  for (const auto& c : testing::built_in_surfaces(0.1)) {
    const RollingState s = testing::random_state_at(*c.surface, c.x0, rng, 0.5, 0.5);
    const Trajectory fwd = integrate(*c.surface, s, 0.5, 2.0, 2e-4);
    RollingState back = fwd.states.back();
    back.u = -back.u;
    back.spin = -1.0 * back.spin;
    const Trajectory bwd = integrate(*c.surface, back, 0.5, 2.0, 2e-4);
    const RollingState& e = bwd.states.back();
    const double err = std::max({(e.x - s.x).norm(), (e.u + s.u).norm(), (e.spin + s.spin).norm()});
    EXPECT_LT(err, 1e-8) << c.name;
  }
}

TEST(Export, CsvAndJsonl) {
  const SurfacePtr hp = build_pancake(HalfPlane{2}, 0.1);
  RollingState s{vec({0.0, 0.05, 0.1}), vec({0.0, -1.0, 0.0}), wedge(unit(3, 0), unit(3, 1))};
  const Trajectory tr = integrate(*hp, s, 0.3, 0.5, 1e-2);
  std::ostringstream csv;
  write_trajectory_csv(csv, *hp, tr);
  std::istringstream in(csv.str());
  std::string header;
  std::getline(in, header);
  EXPECT_EQ(header, "t,x1,x2,x3,u1,u2,u3,S12,S13,S23,energy,region");
  std::string line;
  std::size_t rows = 0;
  while (std::getline(in, line)) ++rows;
  EXPECT_EQ(rows, tr.states.size());

  std::ostringstream jl;
  write_events_jsonl(jl, tr);
  std::istringstream ev(jl.str());
  std::size_t n = 0;
  while (std::getline(ev, line)) {
    const auto j = nlohmann::json::parse(line);
    EXPECT_NEAR(j.at("t").get<double>(), tr.events[n].t, 1e-15);
    EXPECT_EQ(j.at("from").get<std::string>(), to_string(tr.events[n].from));
    EXPECT_EQ(j.at("to").get<std::string>(), to_string(tr.events[n].to));
    ++n;
  }
  EXPECT_EQ(n, tr.events.size());
  EXPECT_EQ(n, 2u);
}

}  // namespace
}  // namespace pancake
