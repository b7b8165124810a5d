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


// Micro-benchmarks of the hot paths: the rolling vector field, one RK4
// step, the billiard collision maps and a full edge crossing.

#include <cmath>
#include <numbers>

#include <benchmark/benchmark.h>

#include "pancake/billiard.hpp"
#include "pancake/limit_lab.hpp"
#include "pancake/rolling.hpp"
#include "pancake/surface.hpp"

namespace {

using namespace pancake;

Vec vec3(double a, double b, double c) {
  Vec v(3);
  v << a, b, c;
  return v;
}

// A tube state on the disc pancake: on the seam heading into the edge,
// advanced a little so it lies strictly inside the tube.
RollingState tube_state(const PancakeSurface& surf) {
  const EdgeState in{Vec::Constant(1, 0.6), Vec::Constant(1, 0.4), -0.7, Mat::Zero(1, 1)};
  RollingState s = seam_state(surf, vec3(1.0, 0.0, 0.0), in);
  for (int i = 0; i < 10; ++i) s = step(surf, s, 0.3, 1e-3);
  return s;
}

void BM_RhsTube(benchmark::State& state) {
  const SurfacePtr surf = build_pancake(Disc{1.0}, 0.1);
  const RollingState s = tube_state(*surf);
  for (auto _ : state) benchmark::DoNotOptimize(rhs(*surf, s, 0.3));
}
BENCHMARK(BM_RhsTube);

void BM_StepTube(benchmark::State& state) {
  const SurfacePtr surf = build_pancake(Disc{1.0}, 0.1);
  const RollingState s = tube_state(*surf);
  for (auto _ : state) benchmark::DoNotOptimize(step(*surf, s, 0.3, 1e-4));
}
BENCHMARK(BM_StepTube);

void BM_StepSphere(benchmark::State& state) {
  const int k = static_cast<int>(state.range(0));
  const SurfacePtr surf = build_pancake(SphereFactor{k}, 0.5);
  Vec x = Vec::Zero(k + 3), u = Vec::Zero(k + 3);
  x[k] = 0.5;
  u[0] = 0.3;
  u[k + 1] = 0.8;
  Mat spin = Mat::Zero(k + 3, k + 3);
  spin(k + 1, k + 2) = 0.4;
  spin(k + 2, k + 1) = -0.4;
  const RollingState s{x, u, SkewMap::from_matrix(spin)};
  for (auto _ : state) benchmark::DoNotOptimize(step(*surf, s, 0.5, 1e-3));
}
BENCHMARK(BM_StepSphere)->Arg(0)->Arg(3);

void BM_CollisionReduced(benchmark::State& state) {
  const int k = static_cast<int>(state.range(0));
  const Vec u_bar = Vec::Constant(k - 1, 0.3), W = Vec::Constant(k - 1, -0.2);
  for (auto _ : state) {
    benchmark::DoNotOptimize(collision_reduced(u_bar, W, -0.7, 0.4 * std::numbers::pi));
  }
}
BENCHMARK(BM_CollisionReduced)->Arg(2)->Arg(4);

void BM_CollisionFull(benchmark::State& state) {
  const int k = static_cast<int>(state.range(0));
  Vec n = Vec::Zero(k), u = Vec::Constant(k, 0.2);
  n[0] = 1.0;
  u[0] = -0.5;
  Mat m = Mat::Zero(k, k);
  m(0, 1) = 0.3;
  m(1, 0) = -0.3;
  const SkewMap S = SkewMap::from_matrix(m);
  for (auto _ : state) benchmark::DoNotOptimize(collision_full(u, S, n, 0.5, 0.4));
}
BENCHMARK(BM_CollisionFull)->Arg(2)->Arg(4);

void BM_DiscOrbit(benchmark::State& state) {
  const DomainPtr disc = make_disc_domain(1.0);
  Vec x(2), u(2);
  x << 0.3, 0.1;
  u << std::cos(0.5), std::sin(0.5);
  Mat m{{0.0, 0.6}, {-0.6, 0.0}};
  const BilliardState s0{x, u, SkewMap::from_matrix(m)};
  for (auto _ : state) benchmark::DoNotOptimize(billiard_orbit(*disc, s0, 1.1, 500));
}
BENCHMARK(BM_DiscOrbit)->Unit(benchmark::kMicrosecond);

void BM_EdgeCrossing(benchmark::State& state) {
  const double r = 1.0 / static_cast<double>(state.range(0));
  const SurfacePtr surf = build_pancake(Disc{1.0}, r);
  const EdgeState in{Vec::Constant(1, 0.6), Vec::Constant(1, 0.4), -0.7, Mat::Zero(1, 1)};
  const RollingState s0 = seam_state(*surf, vec3(1.0, 0.0, 0.0), in);
  for (auto _ : state) benchmark::DoNotOptimize(run_edge_crossing(*surf, s0, 0.3));
}
BENCHMARK(BM_EdgeCrossing)->Arg(10)->Arg(100)->Arg(1000)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
