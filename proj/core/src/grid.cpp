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

#include "gcmd/grid.hpp"

#include <algorithm>
#include <limits>

#include "gcmd/errors.hpp"

namespace gcmd {

ImageGrid::ImageGrid(int width, int height, double fill) : width_(width), height_(height) {
  if (width < 1 || height < 1) {
    throw ParameterError("grid dimensions must be positive, got " + std::to_string(width) +
                         "x" + std::to_string(height));
  }
  data_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), fill);
}

ImageGrid::ImageGrid(int width, int height, std::vector<double> samples)
    : width_(width), height_(height), data_(std::move(samples)) {
  if (width < 1 || height < 1) {
    throw ParameterError("grid dimensions must be positive, got " + std::to_string(width) +
                         "x" + std::to_string(height));
  }
  if (data_.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height)) {
    throw DimensionError("sample count " + std::to_string(data_.size()) + " does not match " +
                         std::to_string(width) + "x" + std::to_string(height));
  }
  if (!all_finite()) throw ParameterError("grid samples must be finite");
}

bool ImageGrid::all_finite() const noexcept {
  return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

double ImageGrid::max_abs() const noexcept {
  double m = 0.0;
  for (double v : data_) m = std::max(m, std::abs(v));
  return m;
}

VectorGrid::VectorGrid(int width, int height) : width_(width), height_(height) {
  if (width < 1 || height < 1) throw ParameterError("grid dimensions must be positive");
  data_.resize(static_cast<std::size_t>(width) * static_cast<std::size_t>(height));
}

ViewSet::ViewSet(ImageGrid reference, std::vector<TargetView> targets,
                 std::optional<DisparityField> ground_truth)
    : reference_(std::move(reference)),
      targets_(std::move(targets)),
      ground_truth_(std::move(ground_truth)) {
  if (reference_.empty()) throw DimensionError("reference view is empty");
  for (std::size_t i = 0; i < targets_.size(); ++i) {
    const auto& t = targets_[i];
    if (!t.image.same_shape(reference_)) {
      throw DimensionError("target '" + t.id + "' is " + std::to_string(t.image.width()) + "x" +
                           std::to_string(t.image.height()) + ", reference is " +
                           std::to_string(reference_.width()) + "x" +
                           std::to_string(reference_.height()));
    }
    if (!std::isfinite(t.baseline.b1) || !std::isfinite(t.baseline.b2)) {
      throw ParameterError("target '" + t.id + "' has a non-finite baseline");
    }
    if (t.baseline.norm() == 0.0) {
      throw ParameterError("target '" + t.id + "' has a zero baseline");
    }
    for (std::size_t j = 0; j < i; ++j) {
      if (targets_[j].baseline == t.baseline) {
        throw ParameterError("targets '" + targets_[j].id + "' and '" + t.id +
                             "' share a baseline");
      }
    }
  }
  if (ground_truth_ && !ground_truth_->same_shape(reference_)) {
    throw DimensionError("ground truth shape differs from the reference");
  }
}

double ViewSet::min_baseline() const {
  if (targets_.empty()) throw ParameterError("view set has no targets");
  double m = std::numeric_limits<double>::infinity();
  for (const auto& t : targets_) m = std::min(m, t.baseline.norm());
  return m;
}

double ViewSet::max_baseline() const {
  if (targets_.empty()) throw ParameterError("view set has no targets");
  double m = 0.0;
  for (const auto& t : targets_) m = std::max(m, t.baseline.norm());
  return m;
}

ImageGrid to_grayscale(const ImageGrid& red, const ImageGrid& green, const ImageGrid& blue) {
  if (!red.same_shape(green) || !red.same_shape(blue)) {
    throw DimensionError("colour channels differ in shape");
  }
  ImageGrid out(red.width(), red.height());
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double y = 0.299 * red[i] + 0.587 * green[i] + 0.114 * blue[i];
    out[i] = std::clamp(y, 0.0, 1.0);
  }
  return out;
}

}  // namespace gcmd
