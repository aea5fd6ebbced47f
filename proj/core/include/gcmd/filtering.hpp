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

// Gaussian scale space: kernels, separable convolution and the per-scale
// differences, gradients and gradient differences used by the data term.

#include <span>
#include <vector>

#include "gcmd/grid.hpp"

namespace gcmd {

/// Odd-length 1-D filter indexed by offset in [-radius, radius].
struct Kernel1D {
  std::vector<double> taps;
  int radius = 0;
  double sigma = 0.0;

  double at(int offset) const noexcept { return taps[static_cast<std::size_t>(offset + radius)]; }
};

/// Truncation radius for a Gaussian-family kernel of the given sigma.
int kernel_radius(double sigma);

/// Sampled, renormalised Gaussian. Throws ParameterError for sigma <= 0.
Kernel1D gaussian_kernel(double sigma);

/// Sampled derivative of Gaussian, scaled so that its response to f(x) = x is 1.
Kernel1D dog_kernel(double sigma);

/// Convolution along rows with `kh`, then along columns with `kv`.
/// Borders use half-sample symmetric extension. Throws DimensionError when a
/// radius is not smaller than the matching grid extent.
ImageGrid conv_separable(const ImageGrid& grid, const Kernel1D& kh, const Kernel1D& kv);

ImageGrid gaussian_blur(const ImageGrid& grid, double sigma);

/// sigma_q = 2^q / sqrt(2).
double scale_sigma(int q);

/// Pre-filter applied to every scale, including q = 0.
inline constexpr double kBaseSigma = 0.70710678118654752440;

/// Total smoothing of scale q relative to the raw images: sqrt(base^2 + sigma_q^2).
double effective_sigma(int q);

/// Quantities of one scale q, one entry per target (same order as the stack).
struct ScaleLevel {
  int q = 0;
  double sigma = 0.0;            // sigma_q
  double effective_sigma = 0.0;  // smoothing actually applied to the images
  bool active = true;            // false: kept only as the q = 0 reference for the weights
  std::vector<ImageGrid> delta_I;
  std::vector<VectorGrid> grad;
  std::vector<ImageGrid> g;
  std::vector<ImageGrid> grad_diff;
};

struct ScaleStack {
  int width = 0;
  int height = 0;
  std::vector<Baseline> baselines;  // one per target
  std::vector<ScaleLevel> levels;   // ordered as requested; an inactive q = 0 level may trail

  std::size_t target_count() const noexcept { return baselines.size(); }
  /// Level with the given q, or nullptr.
  const ScaleLevel* find(int q) const noexcept;
};

/// Builds the levels listed in `scales` (each q >= 0, no repeats) for every target.
/// When `with_base` is set and q = 0 is not among `scales`, an inactive q = 0 level
/// is appended so the scale-0 quantities stay available.
ScaleStack build_scale_stack(const ImageGrid& reference, std::span<const ImageGrid> targets,
                             std::span<const Baseline> baselines, std::span<const int> scales,
                             bool with_base = true);

/// All targets of `views`, scales 0..Q-1. Throws ParameterError if Q < 1.
ScaleStack build_scale_stack(const ViewSet& views, int Q);

}  // namespace gcmd
