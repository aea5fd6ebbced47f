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

#include "gcmd/gcm.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

#include "gcmd/errors.hpp"

namespace gcmd {

namespace {

const ScaleLevel& base_level(const ScaleStack& stack) {
  const ScaleLevel* base = stack.find(0);
  if (base == nullptr) throw ParameterError("scale stack has no q = 0 level");
  return *base;
}

const ScaleLevel& level_of(const ScaleStack& stack, int q) {
  const ScaleLevel* level = stack.find(q);
  if (level == nullptr) throw ParameterError("scale stack has no level q = " + std::to_string(q));
  return *level;
}

ImageGrid squared(const ImageGrid& x) {
  ImageGrid out(x.width(), x.height());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i] * x[i];
  return out;
}

}  // namespace

void GcmConfig::validate() const {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) throw ParameterError("epsilon must be > 0");
  if (!(Z > 0.0) || !std::isfinite(Z)) throw ParameterError("Z must be > 0");
  if (sigma_c && !(*sigma_c > 0.0)) throw ParameterError("sigma_c must be > 0");
}

double acquisition_noise_floor(double epsilon, double sigma_q) {
  return epsilon * epsilon / (4.0 * std::numbers::pi * sigma_q * sigma_q);
}

ImageGrid residual_proxy(const ScaleStack& stack, double epsilon) {
  const ScaleLevel& base = base_level(stack);
  ImageGrid num(stack.width, stack.height);
  ImageGrid den(stack.width, stack.height, epsilon);
  for (std::size_t t = 0; t < stack.target_count(); ++t) {
    for (std::size_t i = 0; i < num.size(); ++i) {
      num[i] += std::abs(base.delta_I[t][i]);
      den[i] += std::abs(base.g[t][i]);
    }
  }
  for (std::size_t i = 0; i < num.size(); ++i) num[i] /= den[i];
  return num;
}

std::vector<ImageGrid> scale_inconsistency(const ScaleStack& stack, const ImageGrid& proxy, int q) {
  const ScaleLevel& base = base_level(stack);
  const double sigma = scale_sigma(q);
  const Kernel1D k = gaussian_kernel(sigma);
  const ImageGrid proxy_power = conv_separable(squared(proxy), k, k);

  std::vector<ImageGrid> out;
  out.reserve(stack.target_count());
  for (std::size_t t = 0; t < stack.target_count(); ++t) {
    ImageGrid o2 = conv_separable(squared(base.g[t]), k, k);
    for (std::size_t i = 0; i < o2.size(); ++i) o2[i] = std::max(0.0, o2[i] * proxy_power[i]);
    out.push_back(std::move(o2));
  }
  return out;
}

ImageGrid local_variance(const ImageGrid& x, double sigma) {
  const Kernel1D k = gaussian_kernel(sigma);
  const ImageGrid mean = conv_separable(x, k, k);
  ImageGrid out = conv_separable(squared(x), k, k);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::max(0.0, out[i] - mean[i] * mean[i]);
  return out;
}

ImageGrid error_bound(const ScaleStack& stack, const DisparityField& w_prev, const GcmConfig& cfg,
                      int q) {
  if (w_prev.width() != stack.width || w_prev.height() != stack.height) {
    throw DimensionError("previous disparity shape differs from the scale stack");
  }
  const double floor = acquisition_noise_floor(cfg.epsilon, scale_sigma(q));
  ImageGrid num(stack.width, stack.height, floor);
  ImageGrid den(stack.width, stack.height, cfg.epsilon);
  for (const auto& level : stack.levels) {
    if (!level.active) continue;
    for (std::size_t t = 0; t < stack.target_count(); ++t) {
      for (std::size_t i = 0; i < num.size(); ++i) {
        num[i] += level.delta_I[t][i] * level.delta_I[t][i];
        den[i] += level.g[t][i] * level.g[t][i];
      }
    }
  }
  ImageGrid out = local_variance(w_prev, cfg.variance_sigma(q));
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += num[i] / den[i];
  return out;
}

ImageGrid noise_power(const ImageGrid& grad_diff, const ImageGrid& dw_e2,
                      const ImageGrid& scale_term, double floor, bool zero_G, bool zero_O) {
  if (!grad_diff.same_shape(dw_e2) || !grad_diff.same_shape(scale_term)) {
    throw DimensionError("noise power inputs differ in shape");
  }
  ImageGrid out(grad_diff.width(), grad_diff.height(), floor);
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (!zero_G) out[i] += grad_diff[i] * grad_diff[i] * dw_e2[i];
    if (!zero_O) out[i] += scale_term[i];
  }
  return out;
}

ImageGrid noise_power(const ScaleStack& stack, const ImageGrid& proxy, const DisparityField& w_prev,
                      const GcmConfig& cfg, std::size_t t, int q) {
  if (t >= stack.target_count()) throw ParameterError("target index out of range");
  const ScaleLevel& level = level_of(stack, q);
  const ImageGrid dw_e2 = error_bound(stack, w_prev, cfg, q);
  const ImageGrid o2 = std::move(scale_inconsistency(stack, proxy, q)[t]);
  return noise_power(level.grad_diff[t], dw_e2, o2,
                     acquisition_noise_floor(cfg.epsilon, level.sigma), cfg.zero_G, cfg.zero_O);
}

NoiseComponents noise_components(const ScaleStack& stack, const DisparityField& w_prev,
                                 const GcmConfig& cfg) {
  cfg.validate();
  NoiseComponents nc;
  nc.grad_term.resize(stack.levels.size());
  nc.scale_term.resize(stack.levels.size());
  nc.floor.assign(stack.levels.size(), 0.0);

  const ImageGrid proxy = residual_proxy(stack, cfg.epsilon);
  for (std::size_t l = 0; l < stack.levels.size(); ++l) {
    const ScaleLevel& level = stack.levels[l];
    if (!level.active) continue;
    nc.floor[l] = acquisition_noise_floor(cfg.epsilon, level.sigma);
    const ImageGrid dw_e2 = error_bound(stack, w_prev, cfg, level.q);
    nc.scale_term[l] = scale_inconsistency(stack, proxy, level.q);
    for (std::size_t t = 0; t < stack.target_count(); ++t) {
      ImageGrid gterm(stack.width, stack.height);
      for (std::size_t i = 0; i < gterm.size(); ++i) {
        gterm[i] = level.grad_diff[t][i] * level.grad_diff[t][i] * dw_e2[i];
      }
      nc.grad_term[l].push_back(std::move(gterm));
    }
  }
  return nc;
}

int sector_of(const Baseline& baseline) {
  if (baseline.norm() == 0.0) throw ParameterError("zero baseline has no sector");
  double angle = std::atan2(baseline.b2, baseline.b1);
  if (angle < 0.0) angle += 2.0 * std::numbers::pi;
  // Snap angles that sit on a boundary up to round-off, e.g. atan2(1, 1) vs pi/4.
  const double scaled = angle / (std::numbers::pi / 4.0);
  const double nearest = std::round(scaled);
  const double s = std::abs(scaled - nearest) < 1e-12 ? nearest : scaled;
  return std::clamp(static_cast<int>(std::floor(s)), 0, 8) % 8;
}

WeightField apply_monotonicity(std::vector<std::vector<ImageGrid>> raw,
                               std::span<const Baseline> baselines, double Z) {
  const std::size_t n = baselines.size();
  std::vector<int> sector(n);
  for (std::size_t t = 0; t < n; ++t) sector[t] = sector_of(baselines[t]);

  // For each target, the views whose raw weights bound it from above.
  std::vector<std::vector<std::size_t>> dominated_by(n);
  for (std::size_t t = 0; t < n; ++t) {
    for (std::size_t m = 0; m < n; ++m) {
      if (m != t && sector[m] == sector[t] && baselines[m].norm() <= baselines[t].norm()) {
        dominated_by[t].push_back(m);
      }
    }
  }

  WeightField field;
  field.Z = Z;
  field.weights.resize(raw.size());
  for (std::size_t l = 0; l < raw.size(); ++l) {
    if (raw[l].empty()) continue;
    if (raw[l].size() != n) throw DimensionError("raw weight count differs from view count");
    for (std::size_t t = 0; t < n; ++t) {
      ImageGrid w = raw[l][t];
      for (std::size_t m : dominated_by[t]) {
        const ImageGrid& other = raw[l][m];
        for (std::size_t i = 0; i < w.size(); ++i) w[i] = std::min(w[i], other[i]);
      }
      field.weights[l].push_back(std::move(w));
    }
  }
  return field;
}

WeightField compute_weights(const ScaleStack& stack, const DisparityField& w_prev,
                            const GcmConfig& cfg) {
  const NoiseComponents nc = noise_components(stack, w_prev, cfg);
  std::vector<std::vector<ImageGrid>> raw(stack.levels.size());
  for (std::size_t l = 0; l < stack.levels.size(); ++l) {
    if (!stack.levels[l].active) continue;
    for (std::size_t t = 0; t < stack.target_count(); ++t) {
      ImageGrid w(stack.width, stack.height, nc.floor[l]);
      for (std::size_t i = 0; i < w.size(); ++i) {
        double n2 = nc.floor[l];
        if (!cfg.zero_G) n2 += nc.grad_term[l][t][i];
        if (!cfg.zero_O) n2 += nc.scale_term[l][t][i];
        w[i] = cfg.Z / n2;
      }
      raw[l].push_back(std::move(w));
    }
  }
  return apply_monotonicity(std::move(raw), stack.baselines, cfg.Z);
}

WeightField uniform_weights(const ScaleStack& stack) {
  WeightField field;
  field.weights.resize(stack.levels.size());
  for (std::size_t l = 0; l < stack.levels.size(); ++l) {
    if (!stack.levels[l].active) continue;
    field.weights[l].assign(stack.target_count(), ImageGrid(stack.width, stack.height, 1.0));
  }
  return field;
}

}  // namespace gcmd
