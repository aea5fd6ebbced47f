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

#pragma once

// Gradient Consistency Model: per-pixel, per-view, per-scale data-term weights
// W = Z / N^2, where the noise power N^2 collects gradient inconsistency, scale
// inconsistency and an acquisition-noise floor, followed by a sector-wise
// monotonicity constraint over baseline length.

#include <optional>
#include <span>
#include <vector>

#include "gcmd/filtering.hpp"
#include "gcmd/grid.hpp"

namespace gcmd {

struct GcmConfig {
  double epsilon = 2e-4;             // acquisition noise amplitude
  std::optional<double> sigma_c;     // variance window; default 2 * sigma_q per scale
  double Z = 1.0;
  bool zero_G = false;               // ablation: drop the gradient-inconsistency term
  bool zero_O = false;               // ablation: drop the scale-inconsistency term

  double variance_sigma(int q) const { return sigma_c ? *sigma_c : 2.0 * scale_sigma(q); }
  /// Throws ParameterError unless epsilon > 0, Z > 0 and sigma_c (if set) > 0.
  void validate() const;
};

/// weights[l][t] pairs with stack.levels[l] and target t. Inactive levels are empty.
struct WeightField {
  double Z = 1.0;
  std::vector<std::vector<ImageGrid>> weights;
};

/// The three parts of N^2 for every active (level, target).
struct NoiseComponents {
  std::vector<std::vector<ImageGrid>> grad_term;   // G^2 * dw_e^2
  std::vector<std::vector<ImageGrid>> scale_term;  // O^2
  std::vector<double> floor;                       // eps^2 / (4 pi sigma_q^2), per level
};

/// eps^2 / (4 pi sigma_q^2): power of white noise of amplitude eps after G_{sigma_q}.
double acquisition_noise_floor(double epsilon, double sigma_q);

/// Point-wise residual estimate at scale 0, shared by all views and scales:
/// sum_t |dI_{t,0}| / (sum_t |g_{t,0}| + eps).
ImageGrid residual_proxy(const ScaleStack& stack, double epsilon);

/// O^2_{t,q} = (G_{sigma_q} * g_{t,0}^2) (G_{sigma_q} * proxy^2), one grid per target.
std::vector<ImageGrid> scale_inconsistency(const ScaleStack& stack, const ImageGrid& proxy, int q);

/// (G_sigma * x^2) - (G_sigma * x)^2, clamped at zero against round-off.
ImageGrid local_variance(const ImageGrid& x, double sigma);

/// Upper bound on the squared error of the current disparity at scale q:
/// (floor_q + sum dI^2) / (sum g^2 + eps) + var_{sigma_c}(w_prev),
/// with the sums over every target and every active level.
ImageGrid error_bound(const ScaleStack& stack, const DisparityField& w_prev, const GcmConfig& cfg,
                      int q);

/// Point-wise N^2 = G^2 dw_e^2 + O^2 + floor, with the ablation switches applied.
ImageGrid noise_power(const ImageGrid& grad_diff, const ImageGrid& dw_e2,
                      const ImageGrid& scale_term, double floor, bool zero_G, bool zero_O);

/// N^2_{t,q} assembled from the stack. Throws ParameterError for an unknown target or scale.
ImageGrid noise_power(const ScaleStack& stack, const ImageGrid& proxy, const DisparityField& w_prev,
                      const GcmConfig& cfg, std::size_t t, int q);

NoiseComponents noise_components(const ScaleStack& stack, const DisparityField& w_prev,
                                 const GcmConfig& cfg);

/// Angular sector 0..7 of a baseline; sector k covers [k pi/4, (k+1) pi/4).
/// Throws ParameterError for a zero baseline.
int sector_of(const Baseline& baseline);

/// W_t = min over views n in t's sector with |B_n| <= |B_t| of raw_n, per level and pixel.
/// `raw[l][t]` are the unconstrained weights Z / N^2.
WeightField apply_monotonicity(std::vector<std::vector<ImageGrid>> raw,
                               std::span<const Baseline> baselines, double Z = 1.0);

/// Full pipeline: proxy, O^2, dw_e^2, N^2, Z / N^2, monotonicity.
WeightField compute_weights(const ScaleStack& stack, const DisparityField& w_prev,
                            const GcmConfig& cfg);

/// W = 1 everywhere on the active levels (naive, PIV and coarse-to-fine schedules).
WeightField uniform_weights(const ScaleStack& stack);

}  // namespace gcmd
