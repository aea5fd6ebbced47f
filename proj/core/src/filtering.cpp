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

#include "gcmd/filtering.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "gcmd/errors.hpp"

namespace gcmd {

namespace {

// Gaussians are cut at 6 sigma: the tail beyond is below 2e-9 of the mass.
constexpr double kTruncation = 6.0;

void check_sigma(double sigma) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    throw ParameterError("kernel sigma must be positive and finite, got " + std::to_string(sigma));
  }
}

// Half-sample symmetric extension: -1 -> 0, -2 -> 1, n -> n-1, n+1 -> n-2.
inline int reflect(int i, int n) noexcept {
  if (i < 0) return -i - 1;
  if (i >= n) return 2 * n - i - 1;
  return i;
}

void convolve_rows(const double* src, double* dst, int width, int height, const Kernel1D& k) {
  const int r = k.radius;
  std::vector<double> line(static_cast<std::size_t>(width + 2 * r));
  for (int y = 0; y < height; ++y) {
    const double* row = src + static_cast<std::size_t>(y) * width;
    for (int i = -r; i < width + r; ++i) line[i + r] = row[reflect(i, width)];
    double* out = dst + static_cast<std::size_t>(y) * width;
    for (int x = 0; x < width; ++x) {
      // out(x) = sum_o k(o) f(x - o)
      const double* centre = line.data() + x + r;
      double acc = 0.0;
      for (int o = -r; o <= r; ++o) acc += k.taps[o + r] * centre[-o];
      out[x] = acc;
    }
  }
}

void convolve_cols(const double* src, double* dst, int width, int height, const Kernel1D& k) {
  const int r = k.radius;
  std::vector<double> acc(static_cast<std::size_t>(width));
  for (int y = 0; y < height; ++y) {
    std::fill(acc.begin(), acc.end(), 0.0);
    for (int o = -r; o <= r; ++o) {
      const double c = k.taps[o + r];
      const double* row = src + static_cast<std::size_t>(reflect(y - o, height)) * width;
      for (int x = 0; x < width; ++x) acc[x] += c * row[x];
    }
    std::copy(acc.begin(), acc.end(), dst + static_cast<std::size_t>(y) * width);
  }
}

}  // namespace

int kernel_radius(double sigma) {
  check_sigma(sigma);
  return std::max(1, static_cast<int>(std::ceil(kTruncation * sigma)));
}

Kernel1D gaussian_kernel(double sigma) {
  Kernel1D k;
  k.sigma = sigma;
  k.radius = kernel_radius(sigma);
  k.taps.resize(static_cast<std::size_t>(2 * k.radius + 1));
  const double inv = 1.0 / (2.0 * sigma * sigma);
  for (int x = -k.radius; x <= k.radius; ++x) k.taps[x + k.radius] = std::exp(-x * x * inv);
  // Sum from the tails inward so the result is exactly symmetric.
  double sum = k.taps[k.radius];
  for (int x = k.radius; x >= 1; --x) sum += 2.0 * k.taps[k.radius + x];
  for (double& t : k.taps) t /= sum;
  return k;
}

Kernel1D dog_kernel(double sigma) {
  Kernel1D k;
  k.sigma = sigma;
  k.radius = kernel_radius(sigma);
  k.taps.resize(static_cast<std::size_t>(2 * k.radius + 1));
  const double inv = 1.0 / (2.0 * sigma * sigma);
  double moment = 0.0;  // -sum x k(x), the response to the ramp
  for (int x = 1; x <= k.radius; ++x) {
    const double v = -x * std::exp(-x * x * inv) / (sigma * sigma);
    k.taps[k.radius + x] = v;
    k.taps[k.radius - x] = -v;
    moment += -2.0 * x * v;
  }
  k.taps[k.radius] = 0.0;
  for (double& t : k.taps) t /= moment;
  return k;
}

ImageGrid conv_separable(const ImageGrid& grid, const Kernel1D& kh, const Kernel1D& kv) {
  if (kh.radius >= grid.width() || kv.radius >= grid.height()) {
    throw DimensionError("kernel radii " + std::to_string(kh.radius) + "/" +
                         std::to_string(kv.radius) + " too large for a " +
                         std::to_string(grid.width()) + "x" + std::to_string(grid.height()) +
                         " grid");
  }
  ImageGrid tmp(grid.width(), grid.height());
  ImageGrid out(grid.width(), grid.height());
  convolve_rows(grid.samples().data(), tmp.samples().data(), grid.width(), grid.height(), kh);
  convolve_cols(tmp.samples().data(), out.samples().data(), grid.width(), grid.height(), kv);
  return out;
}

ImageGrid gaussian_blur(const ImageGrid& grid, double sigma) {
  const Kernel1D k = gaussian_kernel(sigma);
  return conv_separable(grid, k, k);
}

double scale_sigma(int q) {
  if (q < 0) throw ParameterError("scale index must be non-negative");
  return std::ldexp(1.0, q) / std::sqrt(2.0);
}

double effective_sigma(int q) {
  const double s = scale_sigma(q);
  return std::sqrt(kBaseSigma * kBaseSigma + s * s);
}

const ScaleLevel* ScaleStack::find(int q) const noexcept {
  for (const auto& level : levels) {
    if (level.q == q) return &level;
  }
  return nullptr;
}

namespace {

ScaleLevel build_level(int q, bool active, const ImageGrid& reference,
                       std::span<const ImageGrid> targets, std::span<const Baseline> baselines) {
  ScaleLevel level;
  level.q = q;
  level.sigma = scale_sigma(q);
  level.effective_sigma = effective_sigma(q);
  level.active = active;

  const Kernel1D smooth = gaussian_kernel(level.effective_sigma);
  const Kernel1D deriv = dog_kernel(level.effective_sigma);
  const int w = reference.width();
  const int h = reference.height();

  for (std::size_t t = 0; t < targets.size(); ++t) {
    ImageGrid diff(w, h);
    ImageGrid sum(w, h);
    for (std::size_t i = 0; i < diff.size(); ++i) {
      diff[i] = targets[t][i] - reference[i];
      sum[i] = targets[t][i] + reference[i];
    }
    const Baseline& b = baselines[t];

    ImageGrid sum_d1 = conv_separable(sum, deriv, smooth);
    ImageGrid sum_d2 = conv_separable(sum, smooth, deriv);
    ImageGrid diff_d1 = conv_separable(diff, deriv, smooth);
    ImageGrid diff_d2 = conv_separable(diff, smooth, deriv);

    VectorGrid grad(w, h);
    ImageGrid g(w, h);
    ImageGrid grad_diff(w, h);
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        const Vec2 v{0.5 * sum_d1(x, y), 0.5 * sum_d2(x, y)};
        grad(x, y) = v;
        g(x, y) = v.s1 * b.b1 + v.s2 * b.b2;
        grad_diff(x, y) = 0.5 * (diff_d1(x, y) * b.b1 + diff_d2(x, y) * b.b2);
      }
    }
    level.delta_I.push_back(conv_separable(diff, smooth, smooth));
    level.grad.push_back(std::move(grad));
    level.g.push_back(std::move(g));
    level.grad_diff.push_back(std::move(grad_diff));
  }
  return level;
}

}  // namespace

ScaleStack build_scale_stack(const ImageGrid& reference, std::span<const ImageGrid> targets,
                             std::span<const Baseline> baselines, std::span<const int> scales,
                             bool with_base) {
  if (targets.size() != baselines.size()) {
    throw DimensionError("target and baseline counts differ");
  }
  if (scales.empty()) throw ParameterError("at least one scale is required");
  for (const auto& t : targets) {
    if (!t.same_shape(reference)) throw DimensionError("target shape differs from reference");
  }
  for (std::size_t i = 0; i < scales.size(); ++i) {
    if (scales[i] < 0) throw ParameterError("scale index must be non-negative");
    for (std::size_t j = 0; j < i; ++j) {
      if (scales[i] == scales[j]) throw ParameterError("repeated scale index");
    }
  }

  ScaleStack stack;
  stack.width = reference.width();
  stack.height = reference.height();
  stack.baselines.assign(baselines.begin(), baselines.end());
  for (int q : scales) {
    stack.levels.push_back(build_level(q, true, reference, targets, baselines));
  }
  if (with_base && std::find(scales.begin(), scales.end(), 0) == scales.end()) {
    stack.levels.push_back(build_level(0, false, reference, targets, baselines));
  }
  return stack;
}

ScaleStack build_scale_stack(const ViewSet& views, int Q) {
  if (Q < 1) throw ParameterError("scale count must be at least 1");
  std::vector<ImageGrid> targets;
  std::vector<Baseline> baselines;
  for (const auto& t : views.targets()) {
    targets.push_back(t.image);
    baselines.push_back(t.baseline);
  }
  std::vector<int> scales(static_cast<std::size_t>(Q));
  std::iota(scales.begin(), scales.end(), 0);
  return build_scale_stack(views.reference(), targets, baselines, scales);
}

}  // namespace gcmd
