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
#include <numbers>
#include <random>

#include "gcmd/errors.hpp"
#include "gcmd/gcm.hpp"
#include "gcmd/solver.hpp"
#include "gcmd/synth.hpp"
#include "oracles.hpp"

using namespace gcmd;

namespace {

struct Sample {
  double dI;
  double g;
  double gd = 0.0;
};

// Spatially constant stack at the listed scales, one sample per target. The
// grids are wide enough for the variance window of every scale used here.
constexpr int kFlat = 40;

ScaleStack point_stack(const std::vector<Sample>& samples, std::vector<int> scales = {0}) {
  ScaleStack s;
  s.width = kFlat;
  s.height = kFlat;
  for (std::size_t t = 0; t < samples.size(); ++t) s.baselines.push_back({double(t + 1), 0});
  for (int q : scales) {
    ScaleLevel level;
    level.q = q;
    level.sigma = scale_sigma(q);
    level.effective_sigma = effective_sigma(q);
    for (const auto& smp : samples) {
      level.delta_I.emplace_back(kFlat, kFlat, smp.dI);
      level.g.emplace_back(kFlat, kFlat, smp.g);
      level.grad_diff.emplace_back(kFlat, kFlat, smp.gd);
      level.grad.emplace_back(kFlat, kFlat);
    }
    s.levels.push_back(std::move(level));
  }
  return s;
}

ScaleStack field_stack(const std::vector<ImageGrid>& dI, const std::vector<ImageGrid>& g) {
  ScaleStack s;
  s.width = dI[0].width();
  s.height = dI[0].height();
  ScaleLevel level;
  level.sigma = scale_sigma(0);
  level.effective_sigma = effective_sigma(0);
  for (std::size_t t = 0; t < dI.size(); ++t) {
    s.baselines.push_back({double(t + 1), 0});
    level.delta_I.push_back(dI[t]);
    level.g.push_back(g[t]);
    level.grad_diff.emplace_back(s.width, s.height);
    level.grad.emplace_back(s.width, s.height);
  }
  s.levels.push_back(std::move(level));
  return s;
}

ImageGrid sq(const ImageGrid& x) {
  ImageGrid out = x;
  for (double& v : out.samples()) v *= v;
  return out;
}

// Expected squared error of the point-wise weighted solution when every
// term carries independent zero-mean noise of the given power.
double expected_error(const std::vector<double>& W, const std::vector<double>& g,
                      const std::vector<double>& n2) {
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < W.size(); ++i) {
    num += W[i] * W[i] * g[i] * g[i] * n2[i];
    den += W[i] * g[i] * g[i];
  }
  return num / (den * den);
}

}  // namespace

TEST_SUITE("gcm") {

TEST_CASE("residual proxy") {
  const double eps = 2e-4;
  CHECK(residual_proxy(point_stack({{0.0, 1.0}, {0.0, 0.5}}), eps)(0, 0) == 0.0);
  CHECK(residual_proxy(point_stack({{0.2, 1.0}}), eps)(0, 0) == doctest::Approx(0.2 / 1.0002).epsilon(1e-12));
  CHECK(residual_proxy(point_stack({{0.2, 1.0}}), eps)(0, 0) == doctest::Approx(0.19996).epsilon(1e-5));
  const double two = residual_proxy(point_stack({{0.1, 0.5}, {-0.3, 1.0}}), eps)(0, 0);
  CHECK(two == doctest::Approx(0.4 / 1.5002).epsilon(1e-12));
  CHECK(two == doctest::Approx(0.26663).epsilon(1e-4));
  CHECK_THROWS_AS(residual_proxy(point_stack({{0.1, 1.0}}, {1}), eps), ParameterError);
}

TEST_CASE("scale inconsistency") {
  const double sigma = std::numbers::sqrt2;
  const ImageGrid g0 = oracle::random_grid(16, 16, 11, -1, 1);
  const ImageGrid g1 = oracle::random_grid(16, 16, 12, -1, 1);
  const ImageGrid proxy = oracle::random_grid(16, 16, 13, 0, 0.5);
  const ScaleStack s = field_stack({ImageGrid(16, 16), ImageGrid(16, 16)}, {g0, g1});

  SUBCASE("matches a dense-convolution oracle") {
    const auto taps = oracle::gaussian_taps(sigma, kernel_radius(sigma));
    const ImageGrid pp = oracle::dense_conv(sq(proxy), taps, taps);
    const auto o2 = scale_inconsistency(s, proxy, 1);
    REQUIRE(o2.size() == 2);
    const ImageGrid* gs[] = {&g0, &g1};
    for (int t = 0; t < 2; ++t) {
      const ImageGrid gg = oracle::dense_conv(sq(*gs[t]), taps, taps);
      for (std::size_t i = 0; i < gg.size(); ++i) {
        CHECK(o2[t][i] == doctest::Approx(gg[i] * pp[i]).epsilon(1e-12));
      }
    }
  }
  SUBCASE("vanishes with a zero factor") {
    CHECK(scale_inconsistency(s, ImageGrid(16, 16), 1)[0].max_abs() == 0.0);
    const ScaleStack flat = field_stack({ImageGrid(16, 16)}, {ImageGrid(16, 16)});
    CHECK(scale_inconsistency(flat, proxy, 1)[0].max_abs() == 0.0);
  }
}

TEST_CASE("error bound") {
  GcmConfig cfg;

  SUBCASE("constant previous disparity has no variance term") {
    const ImageGrid v = local_variance(ImageGrid(20, 20, 0.731), 2.0);
    CHECK(v.max_abs() < 1e-10);
  }
  SUBCASE("floor only") {
    const ScaleStack s = point_stack({{0.0, 1.0}});
    const double want = (4e-8 / (4 * std::numbers::pi * 0.5)) / (1 + 2e-4);
    const double got = error_bound(s, DisparityField(kFlat, kFlat, 0.3), cfg, 0)(0, 0);
    CHECK(got == doctest::Approx(want).epsilon(1e-12));
    CHECK(got == doctest::Approx(6.365e-9).epsilon(1e-3));
  }
  SUBCASE("sums run over every target and active level") {
    ScaleStack s = point_stack({{0.1, 0.5}, {0.2, 1.5}}, {0, 1});
    const double floor1 = acquisition_noise_floor(cfg.epsilon, scale_sigma(1));
    const double want = (floor1 + 2 * (0.01 + 0.04)) / (2 * (0.25 + 2.25) + cfg.epsilon);
    CHECK(error_bound(s, DisparityField(kFlat, kFlat), cfg, 1)(0, 0) == doctest::Approx(want).epsilon(1e-12));
    s.levels[1].active = false;
    const double want0 = (floor1 + 0.05) / (2.5 + cfg.epsilon);
    CHECK(error_bound(s, DisparityField(kFlat, kFlat), cfg, 1)(0, 0) == doctest::Approx(want0).epsilon(1e-12));
  }
  SUBCASE("checkerboard under a wide window has variance 1/4") {
    DisparityField w(64, 64);
    for (int y = 0; y < 64; ++y) {
      for (int x = 0; x < 64; ++x) w(x, y) = (x + y) % 2;
    }
    // Oracle: population variance of a balanced two-valued field.
    double mean = 0.0;
    for (double v : w.samples()) mean += v;
    mean /= double(w.size());
    double var = 0.0;
    for (double v : w.samples()) var += (v - mean) * (v - mean);
    var /= double(w.size());
    const ImageGrid lv = local_variance(w, 8.0);
    for (int y = 20; y < 44; ++y) {
      for (int x = 20; x < 44; ++x) CHECK(lv(x, y) == doctest::Approx(var).epsilon(1e-6));
    }
  }
  SUBCASE("shape mismatch") {
    CHECK_THROWS_AS(error_bound(point_stack({{0.0, 1.0}}), DisparityField(2, 1), cfg, 0), DimensionError);
  }
}

TEST_CASE("noise power") {
  const double floor0 = acquisition_noise_floor(2e-4, 1 / std::numbers::sqrt2);
  const ImageGrid one(1, 1, 0.1);
  const ImageGrid dw2(1, 1, 0.04);
  const ImageGrid o2(1, 1, 0.002);

  CHECK(noise_power(one, dw2, o2, floor0, true, true)(0, 0) == floor0);
  CHECK(noise_power(one, dw2, o2, floor0, false, false)(0, 0) ==
        doctest::Approx(4e-4 + 2e-3 + 6.366e-9).epsilon(1e-6));
  CHECK(noise_power(one, dw2, o2, floor0, false, false)(0, 0) == doctest::Approx(2.4e-3).epsilon(1e-5));
  CHECK(noise_power(one, dw2, o2, floor0, true, false)(0, 0) == doctest::Approx(2e-3 + floor0).epsilon(1e-12));
  CHECK(noise_power(one, dw2, o2, floor0, false, true)(0, 0) == doctest::Approx(4e-4 + floor0).epsilon(1e-12));
  CHECK_THROWS_AS(noise_power(ImageGrid(2, 1), dw2, o2, floor0, false, false), DimensionError);

  SUBCASE("identical views leave the scale term and the floor") {
    const ImageGrid ref = oracle::random_grid(32, 32, 5);
    const ViewSet v(ref, {{"a", ref, {1, 0}}, {"b", ref, {0, 2}}});
    const ScaleStack s = build_scale_stack(v, 2);
    GcmConfig cfg;
    const ImageGrid proxy = residual_proxy(s, cfg.epsilon);
    const DisparityField w = oracle::random_field(32, 32, 6);
    for (std::size_t t = 0; t < 2; ++t) {
      for (int q = 0; q < 2; ++q) {
        const ImageGrid n2 = noise_power(s, proxy, w, cfg, t, q);
        const ImageGrid o = scale_inconsistency(s, proxy, q)[t];
        const double fl = acquisition_noise_floor(cfg.epsilon, scale_sigma(q));
        for (std::size_t i = 0; i < n2.size(); ++i) CHECK(n2[i] == doctest::Approx(o[i] + fl).epsilon(1e-12));
      }
    }
    CHECK_THROWS_AS(noise_power(s, proxy, w, cfg, 2, 0), ParameterError);
    CHECK_THROWS_AS(noise_power(s, proxy, w, cfg, 0, 4), ParameterError);
  }
}

TEST_CASE("acquisition noise floor integrates the filtered white spectrum") {
  for (double sigma : {1 / std::numbers::sqrt2, std::numbers::sqrt2, 2 * std::numbers::sqrt2}) {
    const double eps = 2e-4;
    const double L = 30.0 / sigma;
    const int n = 1200;
    const double h = 2 * L / n;
    double acc = 0.0;
    for (int j = 0; j < n; ++j) {
      const double wy = -L + (j + 0.5) * h;
      for (int i = 0; i < n; ++i) {
        const double wx = -L + (i + 0.5) * h;
        const double r2 = wx * wx + wy * wy;
        if (r2 <= L * L) acc += std::exp(-sigma * sigma * r2);
      }
    }
    const double integral = eps * eps * acc * h * h / (4 * std::numbers::pi * std::numbers::pi);
    CHECK(acquisition_noise_floor(eps, sigma) == doctest::Approx(integral).epsilon(1e-3));
  }
}

TEST_CASE("sectors") {
  CHECK(sector_of({1, 0}) == 0);
  CHECK(sector_of({-1, 0}) == 4);
  CHECK(sector_of({1, 1}) == 1);
  CHECK(sector_of({0, 1}) == 2);
  CHECK(sector_of({0, -1}) == 6);
  CHECK(sector_of({1, -1}) == 7);
  CHECK(sector_of({1, -1e-9}) == 7);
  CHECK(sector_of({3, 1}) == 0);
  CHECK_THROWS_AS(sector_of({0, 0}), ParameterError);
}

TEST_CASE("monotonicity constraint") {
  auto px = [](double v) { return ImageGrid(1, 1, v); };

  SUBCASE("one view per sector is unchanged") {
    const std::vector<Baseline> b{{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
    const WeightField f = apply_monotonicity({{px(3), px(1), px(4), px(1.5)}}, b);
    CHECK(f.weights[0][0](0, 0) == 3);
    CHECK(f.weights[0][1](0, 0) == 1);
    CHECK(f.weights[0][2](0, 0) == 4);
    CHECK(f.weights[0][3](0, 0) == 1.5);
  }
  SUBCASE("prefix minimum along baseline length") {
    const std::vector<Baseline> two{{1, 0}, {2, 0}};
    const WeightField a = apply_monotonicity({{px(4), px(9)}}, two);
    CHECK(a.weights[0][0](0, 0) == 4);
    CHECK(a.weights[0][1](0, 0) == 4);

    const std::vector<Baseline> three{{1, 0}, {2, 0}, {3, 0}};
    const WeightField b = apply_monotonicity({{px(9), px(4), px(16)}}, three);
    CHECK(b.weights[0][0](0, 0) == 9);
    CHECK(b.weights[0][1](0, 0) == 4);
    CHECK(b.weights[0][2](0, 0) == 4);
  }
  SUBCASE("random fields are non-increasing within each sector") {
    const std::vector<Baseline> b = cross_hair(4);
    std::vector<std::vector<ImageGrid>> raw(2);
    for (std::size_t t = 0; t < b.size(); ++t) {
      raw[0].push_back(oracle::random_grid(8, 8, 100 + t, 0.1, 2));
      raw[1].push_back(oracle::random_grid(8, 8, 200 + t, 0.1, 2));
    }
    const WeightField f = apply_monotonicity(raw, b, 2.0);
    CHECK(f.Z == 2.0);
    for (int l = 0; l < 2; ++l) {
      for (std::size_t t = 0; t < b.size(); ++t) {
        for (std::size_t m = 0; m < b.size(); ++m) {
          if (sector_of(b[m]) != sector_of(b[t]) || b[m].norm() > b[t].norm()) continue;
          for (std::size_t i = 0; i < 64; ++i) {
            CHECK(f.weights[l][t][i] <= f.weights[l][m][i]);
            CHECK(f.weights[l][t][i] <= raw[l][t][i]);
          }
        }
      }
    }
  }
}

TEST_CASE("weight pipeline") {
  SUBCASE("floor-only weights scale with sigma squared") {
    const ImageGrid ref = oracle::random_grid(48, 48, 21);
    std::vector<TargetView> targets;
    int k = 0;
    for (const auto& b : cross_hair(2)) {
      targets.push_back({"t" + std::to_string(k), oracle::random_grid(48, 48, 30 + k), b});
      ++k;
    }
    const ViewSet v(ref, targets);
    const ScaleStack s = build_scale_stack(v, 3);
    GcmConfig cfg;
    cfg.zero_G = true;
    cfg.zero_O = true;
    const WeightField f = compute_weights(s, DisparityField(48, 48), cfg);
    for (int q = 0; q < 3; ++q) {
      const double want = 4 * std::numbers::pi * scale_sigma(q) * scale_sigma(q) / (cfg.epsilon * cfg.epsilon);
      for (const auto& w : f.weights[q]) {
        for (double x : w.samples()) CHECK(x == doctest::Approx(want).epsilon(1e-12));
      }
    }
  }

  SUBCASE("identical views and a flat disparity give spatially constant weights") {
    const ImageGrid ref = oracle::random_grid(24, 24, 22);
    const ViewSet v(ref, {{"a", ref, {1, 0}}, {"b", ref, {-1, 0}}});
    const ScaleStack s = build_scale_stack(v, 1);
    const WeightField f = compute_weights(s, DisparityField(24, 24, 0.4), GcmConfig{});
    for (const auto& w : f.weights[0]) {
      for (double x : w.samples()) CHECK(x == doctest::Approx(w[0]).epsilon(1e-9));
    }
  }

  SUBCASE("Z scales weights and leaves the point-wise update unchanged") {
    const ImageGrid ref = oracle::random_grid(24, 24, 23);
    const ViewSet v(ref, {{"a", oracle::random_grid(24, 24, 24), {1, 0}},
                          {"b", oracle::random_grid(24, 24, 25), {2, 0}},
                          {"c", oracle::random_grid(24, 24, 26), {0, 1}}});
    const ScaleStack s = build_scale_stack(v, 2);
    const DisparityField w = oracle::random_field(24, 24, 27, -0.5, 0.5);
    GcmConfig c1;
    GcmConfig c7;
    c7.Z = 7.0;
    const WeightField f1 = compute_weights(s, w, c1);
    const WeightField f7 = compute_weights(s, w, c7);
    for (std::size_t l = 0; l < f1.weights.size(); ++l) {
      for (std::size_t t = 0; t < f1.weights[l].size(); ++t) {
        for (std::size_t i = 0; i < w.size(); ++i) {
          CHECK(f7.weights[l][t][i] == doctest::Approx(7.0 * f1.weights[l][t][i]).epsilon(1e-12));
        }
      }
    }
    const DisparityField u1 = closed_form_update(f1, s);
    const DisparityField u7 = closed_form_update(f7, s);
    for (std::size_t i = 0; i < w.size(); ++i) CHECK(u7[i] == doctest::Approx(u1[i]).epsilon(1e-10));
  }

  SUBCASE("weights stay finite and positive across the epsilon range") {
    const SynthSpec spec = two_plane_spec(48, 48, 0.5, 1.5, cross_hair(2), 3);
    const ViewSet v = synth_scene(spec);
    const ScaleStack s = build_scale_stack(v, 3);
    for (double eps : {2e-5, 2e-4, 2e-3}) {
      GcmConfig cfg;
      cfg.epsilon = eps;
      const WeightField f = compute_weights(s, DisparityField(48, 48), cfg);
      for (const auto& level : f.weights) {
        for (const auto& w : level) {
          CHECK(w.all_finite());
          CHECK(*std::min_element(w.samples().begin(), w.samples().end()) > 0.0);
        }
      }
    }
  }

  SUBCASE("depth discontinuities are down-weighted for the widest view") {
    SynthSpec spec = two_plane_spec(64, 64, 1.0, 3.0, cross_hair(2), 5);
    spec.lambda_min = 3;
    spec.lambda_max = 16;
    const ViewSet v = synth_scene(spec);
    const DisparityField gt = *v.ground_truth();
    std::vector<ImageGrid> warped;
    std::vector<Baseline> baselines;
    for (const auto& t : v.targets()) {
      warped.push_back(warp_target(t.image, v.reference(), gt, t.baseline));
      baselines.push_back(t.baseline);
    }
    const std::vector<int> scales{0};
    const ScaleStack s = build_scale_stack(v.reference(), warped, baselines, scales, false);
    const WeightField f = compute_weights(s, gt, GcmConfig{});

    std::size_t widest = 0;
    for (std::size_t t = 1; t < baselines.size(); ++t) {
      if (baselines[t].norm() > baselines[widest].norm()) widest = t;
    }
    const Rect fg = spec.layers[1].rect;
    auto edge_distance = [&](int x, int y) {
      const double dx = std::max({fg.x0 - x, x - (fg.x1 - 1), 0.0});
      const double dy = std::max({fg.y0 - y, y - (fg.y1 - 1), 0.0});
      if (dx > 0 || dy > 0) return std::max(dx, dy);
      return std::min({x - fg.x0, fg.x1 - 1 - x, y - fg.y0, fg.y1 - 1 - y});
    };
    double edge_sum = 0.0;
    double flat_sum = 0.0;
    int edge_n = 0;
    int flat_n = 0;
    for (int y = 8; y < 56; ++y) {
      for (int x = 8; x < 56; ++x) {
        const double d = edge_distance(x, y);
        const double wgt = f.weights[0][widest](x, y);
        if (d <= 2) {
          edge_sum += wgt;
          ++edge_n;
        } else if (d >= 8) {
          flat_sum += wgt;
          ++flat_n;
        }
      }
    }
    REQUIRE(edge_n > 0);
    REQUIRE(flat_n > 0);
    CHECK(edge_sum / edge_n < flat_sum / flat_n);
  }
}

TEST_CASE("inverse-noise weights minimise the expected squared error") {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> gdist(0.05, 2.0);
  std::uniform_real_distribution<double> ndist(1e-4, 1.0);
  std::exponential_distribution<double> simplex(1.0);
  std::uniform_int_distribution<int> count(3, 5);
  for (int instance = 0; instance < 50; ++instance) {
    const int n = count(rng);
    std::vector<double> g(n);
    std::vector<double> n2(n);
    for (int i = 0; i < n; ++i) {
      g[i] = gdist(rng) * (rng() % 2 ? 1 : -1);
      n2[i] = ndist(rng);
    }
    // The library's raw weight for each term: Z / N^2 with the noise power as given.
    std::vector<double> W(n);
    for (int i = 0; i < n; ++i) {
      W[i] = 1.0 / noise_power(ImageGrid(1, 1), ImageGrid(1, 1), ImageGrid(1, 1, n2[i]), 0.0, true, false)(0, 0);
    }
    const double best = expected_error(W, g, n2);
    double worst_gap = 0.0;
    for (int trial = 0; trial < 10000; ++trial) {
      std::vector<double> r(n);
      double sum = 0.0;
      for (double& v : r) sum += v = simplex(rng);
      for (double& v : r) v /= sum;
      worst_gap = std::min(worst_gap, expected_error(r, g, n2) - best);
    }
    CHECK(worst_gap >= -1e-12);
  }
}

}  // TEST_SUITE
