// Copyright 2026 The gcmd Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include <benchmark/benchmark.h>

#include "gcmd/filtering.hpp"
#include "gcmd/gcm.hpp"
#include "gcmd/solver.hpp"
#include "gcmd/synth.hpp"

namespace {

using namespace gcmd;

SynthSpec scene(int n) {
  SynthSpec s = two_plane_spec(n, n, 1.0, 3.0, cross_hair(2), 11);
  s.lambda_min = 3;
  s.lambda_max = 16;
  s.components = 32;
  s.noise_sigma = 0.005;
  s.noise_seed = 7;
  return s;
}

void BM_GaussianBlur(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  ImageGrid img(n, n);
  for (std::size_t i = 0; i < img.size(); ++i) img[i] = double(i % 17) / 17.0;
  for (auto _ : state) benchmark::DoNotOptimize(gaussian_blur(img, 2.0));
  state.SetItemsProcessed(state.iterations() * n * n);
}
BENCHMARK(BM_GaussianBlur)->Arg(64)->Arg(128)->Arg(256);

void BM_ScaleStack(benchmark::State& state) {
  const ViewSet v = synth_scene(scene(static_cast<int>(state.range(0))));
  for (auto _ : state) benchmark::DoNotOptimize(build_scale_stack(v, 3));
}
BENCHMARK(BM_ScaleStack)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

void BM_ComputeWeights(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const ViewSet v = synth_scene(scene(n));
  const ScaleStack s = build_scale_stack(v, 3);
  const DisparityField w(n, n);
  for (auto _ : state) benchmark::DoNotOptimize(compute_weights(s, w, GcmConfig{}));
}
BENCHMARK(BM_ComputeWeights)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

void BM_CgSolve(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const ViewSet v = synth_scene(scene(n));
  const ScaleStack s = build_scale_stack(v, 3);
  const DisparityField w(n, n);
  const WeightField W = uniform_weights(s);
  std::vector<std::vector<ImageGrid>> R;
  for (const auto& level : s.levels) R.emplace_back(level.delta_I.size(), ImageGrid(n, n, 1.0));
  const LinearSystem sys = assemble(W, R, s, irls_reg_weights(w, 1e-3), 0.5, &w);
  for (auto _ : state) benchmark::DoNotOptimize(cg_solve(sys, 1e-6, 2000));
}
BENCHMARK(BM_CgSolve)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

void BM_SolveIteration(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const ViewSet v = synth_scene(scene(n));
  ActiveSet active;
  for (std::size_t t = 0; t < v.targets().size(); ++t) active.targets.push_back(t);
  active.scales = {0, 1, 2};
  active.with_base = true;
  const WeightProvider weigh = [](const ScaleStack& s, const DisparityField& w) {
    return compute_weights(s, w, GcmConfig{});
  };
  for (auto _ : state) {
    SolverState st{DisparityField(n, n), 0};
    benchmark::DoNotOptimize(solve_iteration(st, v, active, weigh, SolverConfig{}, 1.0));
  }
}
BENCHMARK(BM_SolveIteration)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
