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

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "gcmd/errors.hpp"
#include "gcmd/gcm.hpp"
#include "gcmd/metrics.hpp"
#include "gcmd/schedule.hpp"
#include "gcmd/synth.hpp"
#include "oracles.hpp"

using namespace gcmd;

namespace {

ViewSet blank_views(const std::vector<Baseline>& baselines, int size = 16) {
  std::vector<TargetView> targets;
  for (std::size_t i = 0; i < baselines.size(); ++i) {
    targets.push_back({"v" + std::to_string(i), oracle::random_grid(size, size, 100 + i), baselines[i]});
  }
  return ViewSet(oracle::random_grid(size, size, 99), std::move(targets),
                 oracle::random_field(size, size, 98, -1, 1));
}

std::vector<Baseline> scaled(std::vector<Baseline> b, double f) {
  for (auto& x : b) {
    x.b1 *= f;
    x.b2 *= f;
  }
  return b;
}

}  // namespace

TEST_SUITE("schedule") {

TEST_CASE("method names") {
  CHECK(parse_method("naive") == Method::naive);
  CHECK(parse_method("piv") == Method::piv);
  CHECK(parse_method("c2f") == Method::c2f);
  CHECK(parse_method("gcm") == Method::gcm);
  CHECK(parse_method("gcm-sliding") == Method::gcm_sliding);
  CHECK(parse_method("gcm_sliding") == Method::gcm_sliding);
  for (Method m : {Method::naive, Method::piv, Method::c2f, Method::gcm, Method::gcm_sliding}) {
    CHECK(parse_method(to_string(m)) == m);
  }
  CHECK_THROWS_AS(parse_method("GCM"), ConfigError);
  CHECK_THROWS_AS(parse_method(""), ConfigError);

  Strategy s;
  CHECK_NOTHROW(s.validate());
  s.max_solves = 0;
  CHECK_THROWS_AS(s.validate(), ConfigError);
  s = {};
  s.scales = 0;
  CHECK_THROWS_AS(s.validate(), ConfigError);
  s = {};
  s.converge_tol = 0;
  CHECK_THROWS_AS(s.validate(), ConfigError);
}

TEST_CASE("baseline normalisation") {
  SUBCASE("already unit") {
    const ViewSet v = blank_views({{1, 0}, {2, 0}});
    const ViewSet n = normalise_baselines(v);
    CHECK(n.targets()[0].baseline == Baseline{1, 0});
    CHECK(n.targets()[1].baseline == Baseline{2, 0});
    for (std::size_t i = 0; i < v.ground_truth()->size(); ++i) CHECK((*n.ground_truth())[i] == (*v.ground_truth())[i]);
  }
  SUBCASE("halved baselines, doubled disparity") {
    const ViewSet v = blank_views({{2, 0}, {4, 0}});
    const ViewSet n = normalise_baselines(v);
    CHECK(n.targets()[0].baseline == Baseline{1, 0});
    CHECK(n.targets()[1].baseline == Baseline{2, 0});
    for (std::size_t i = 0; i < v.ground_truth()->size(); ++i) {
      CHECK((*n.ground_truth())[i] == 2.0 * (*v.ground_truth())[i]);
    }
  }
  SUBCASE("cross-hair rig has a widest baseline of 4") {
    const ViewSet n = normalise_baselines(blank_views(scaled(cross_hair(4), 0.37)));
    CHECK(n.min_baseline() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(n.max_baseline() == doctest::Approx(4.0).epsilon(1e-12));
    CHECK(1.0 / n.max_baseline() == doctest::Approx(0.25).epsilon(1e-12));
  }
  SUBCASE("displacements are preserved") {
    const ViewSet v = blank_views({{0.5, 1.5}, {-2.5, 0}, {0, -3}});
    const ViewSet n = normalise_baselines(v);
    for (std::size_t t = 0; t < 3; ++t) {
      for (std::size_t i = 0; i < v.ground_truth()->size(); ++i) {
        const Vec2 a = displacement_of(v.targets()[t].baseline, (*v.ground_truth())[i]);
        const Vec2 b = displacement_of(n.targets()[t].baseline, (*n.ground_truth())[i]);
        CHECK(b.s1 == doctest::Approx(a.s1).epsilon(1e-14));
        CHECK(b.s2 == doctest::Approx(a.s2).epsilon(1e-14));
      }
    }
    // A power-of-two factor leaves them bit-identical.
    const ViewSet p = normalise_baselines(blank_views({{0.5, 0}, {0, 1}}));
    const ViewSet q = blank_views({{0.5, 0}, {0, 1}});
    for (std::size_t i = 0; i < q.ground_truth()->size(); ++i) {
      CHECK(displacement_of(p.targets()[1].baseline, (*p.ground_truth())[i]) ==
            displacement_of(q.targets()[1].baseline, (*q.ground_truth())[i]));
    }
  }
}

TEST_CASE("progressive inclusion stages on the 17-view cross-hair") {
  const ViewSet v = blank_views(cross_hair(4));
  const auto stages = piv_stages(v);
  REQUIRE(stages.size() == 4);
  const std::size_t views_per_stage[] = {5, 9, 13, 17};
  for (std::size_t s = 0; s < 4; ++s) {
    CHECK(stages[s].size() + 1 == views_per_stage[s]);  // plus the reference
    std::set<double> norms;
    for (std::size_t i = 0; i < 4; ++i) norms.insert(v.targets()[stages[s][stages[s].size() - 1 - i]].baseline.norm());
    CHECK(norms.size() == 1);
    CHECK(*norms.begin() == doctest::Approx(double(s + 1)));
    std::set<int> sectors;
    for (std::size_t i = 0; i < 4; ++i) sectors.insert(sector_of(v.targets()[stages[s][stages[s].size() - 1 - i]].baseline));
    CHECK(sectors == std::set<int>{0, 2, 4, 6});
    if (s > 0) CHECK(std::equal(stages[s - 1].begin(), stages[s - 1].end(), stages[s].begin()));
  }
  const auto order = targets_by_distance(v);
  for (std::size_t i = 1; i < order.size(); ++i) {
    const auto& a = v.targets()[order[i - 1]].baseline;
    const auto& b = v.targets()[order[i]].baseline;
    CHECK(a.norm() <= b.norm());
    if (a.norm() == b.norm()) CHECK(sector_of(a) < sector_of(b));
  }
  CHECK_THROWS_AS(piv_stages(v, 0, 4), ConfigError);
}

TEST_CASE("zero-disparity scene is a fixed point") {
  SynthSpec spec = two_plane_spec(48, 48, 0.0, 0.0, cross_hair(2), 3);
  const ViewSet v = synth_scene(spec);
  for (Method m : {Method::naive, Method::gcm}) {
    Strategy s;
    s.kind = m;
    s.max_solves = 20;
    const RunResult r = run(v, s, SolverConfig{}, GcmConfig{});
    CHECK(r.converged);
    CHECK(r.trace.size() <= 5);
    CHECK(r.w.max_abs() < 1e-4);
  }
}

TEST_CASE("trace bookkeeping and stage monotonicity") {
  const ViewSet v = synth_scene(two_plane_spec(48, 48, 0.5, 2.0, cross_hair(2), 8));
  for (Method m : {Method::naive, Method::piv, Method::c2f, Method::gcm, Method::gcm_sliding}) {
    CAPTURE(to_string(m));
    Strategy s;
    s.kind = m;
    s.max_solves = 12;
    s.scales = 3;
    s.window = 2;
    int callbacks = 0;
    int cg_solves = 0;
    SolveHooks hooks;
    hooks.on_solved = [&](const CgResult&) { ++cg_solves; };
    const RunResult r = run(v, s, SolverConfig{}, GcmConfig{}, &hooks,
                            [&](const TraceEntry&, const DisparityField&) { ++callbacks; });
    CHECK(r.trace.size() <= 12u);
    CHECK(callbacks == static_cast<int>(r.trace.size()));
    CHECK(cg_solves == static_cast<int>(r.trace.size()));
    for (std::size_t i = 0; i < r.trace.size(); ++i) {
      const TraceEntry& e = r.trace[i];
      CHECK(e.report.solve_count == static_cast<int>(i + 1));
      REQUIRE(e.rmse.has_value());
      CHECK(*e.rmse >= 0.0);
      CHECK_FALSE(e.scales.empty());
      if (i == 0) continue;
      const TraceEntry& p = r.trace[i - 1];
      CHECK(e.active_targets >= p.active_targets);
      CHECK(*std::min_element(e.scales.begin(), e.scales.end()) <=
            *std::min_element(p.scales.begin(), p.scales.end()));
      CHECK(*std::max_element(e.scales.begin(), e.scales.end()) <=
            *std::max_element(p.scales.begin(), p.scales.end()));
    }
    CHECK(*r.trace.back().rmse == doctest::Approx(rmse(r.w, *v.ground_truth())).epsilon(1e-15));
    switch (m) {
      case Method::naive:
      case Method::gcm:
        CHECK(r.trace.front().limit == doctest::Approx(0.5));
        break;
      case Method::piv:
        CHECK(r.trace.front().active_targets == 4);
        CHECK(r.trace.front().limit == doctest::Approx(1.0));
        break;
      case Method::c2f:
        CHECK(r.trace.front().scales == std::vector<int>{2});
        CHECK(r.trace.front().limit == doctest::Approx(2.0));
        break;
      case Method::gcm_sliding:
        CHECK(r.trace.front().scales == std::vector<int>{2, 1});
        CHECK(r.trace.front().limit == doctest::Approx(1.0));
        break;
    }
  }
}

TEST_CASE("GCM beats naive on a two-plane scene after 60 solves") {
  SynthSpec spec = two_plane_spec(128, 128, 1.0, 3.0, cross_hair(2), 11);
  spec.lambda_min = 3;
  spec.lambda_max = 16;
  spec.components = 32;
  spec.noise_sigma = 0.005;
  spec.noise_seed = 7;
  const ViewSet v = synth_scene(spec);
  Strategy s;
  s.max_solves = 60;
  s.kind = Method::naive;
  const RunResult naive = run(v, s, SolverConfig{}, GcmConfig{});
  s.kind = Method::gcm;
  const RunResult gcm = run(v, s, SolverConfig{}, GcmConfig{});
  CHECK(*gcm.trace.back().rmse < *naive.trace.back().rmse);
}

}  // TEST_SUITE
