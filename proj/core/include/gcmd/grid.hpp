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

// Rasters, view geometry and the scene container.
//
// Pixel coordinates are s = (s1, s2): s1 is the column index (horizontal),
// s2 the row index (vertical), origin at the centre of the top-left pixel.
// Storage is row-major.

#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace gcmd {

struct Vec2 {
  double s1 = 0.0;
  double s2 = 0.0;

  friend bool operator==(const Vec2&, const Vec2&) = default;
};

/// Dense scalar raster of doubles.
class ImageGrid {
 public:
  ImageGrid() = default;
  /// Throws ParameterError unless width, height >= 1.
  ImageGrid(int width, int height, double fill = 0.0);
  /// Throws DimensionError on a length mismatch, ParameterError on non-finite samples.
  ImageGrid(int width, int height, std::vector<double> samples);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  double& operator()(int x, int y) noexcept { return data_[index(x, y)]; }
  double operator()(int x, int y) const noexcept { return data_[index(x, y)]; }
  double& operator[](std::size_t i) noexcept { return data_[i]; }
  double operator[](std::size_t i) const noexcept { return data_[i]; }

  std::span<double> samples() noexcept { return data_; }
  std::span<const double> samples() const noexcept { return data_; }

  bool same_shape(const ImageGrid& other) const noexcept {
    return width_ == other.width_ && height_ == other.height_;
  }

  bool all_finite() const noexcept;
  double max_abs() const noexcept;

 private:
  std::size_t index(int x, int y) const noexcept {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(x);
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<double> data_;
};

/// The reciprocal-depth-per-unit-baseline field w(s), or a residual dw(s).
class DisparityField : public ImageGrid {
 public:
  using ImageGrid::ImageGrid;
  DisparityField() = default;
  explicit DisparityField(ImageGrid grid) : ImageGrid(std::move(grid)) {}
};

/// Per-pixel 2-D vectors, e.g. image gradients.
class VectorGrid {
 public:
  VectorGrid() = default;
  VectorGrid(int width, int height);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }

  Vec2& operator()(int x, int y) noexcept {
    return data_[static_cast<std::size_t>(y) * width_ + x];
  }
  const Vec2& operator()(int x, int y) const noexcept {
    return data_[static_cast<std::size_t>(y) * width_ + x];
  }
  std::span<const Vec2> samples() const noexcept { return data_; }

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<Vec2> data_;
};

/// Offset of a target camera from the reference in a planar rig.
struct Baseline {
  double b1 = 0.0;
  double b2 = 0.0;

  double norm() const noexcept { return std::hypot(b1, b2); }
  friend bool operator==(const Baseline&, const Baseline&) = default;
};

/// B * w: the displacement of a point with disparity w in a view with baseline B.
constexpr Vec2 displacement_of(const Baseline& baseline, double w) noexcept {
  return {baseline.b1 * w, baseline.b2 * w};
}

struct TargetView {
  std::string id;
  ImageGrid image;
  Baseline baseline;
};

/// Reference view plus targets, all sharing one raster shape.
class ViewSet {
 public:
  /// Throws DimensionError if any grid's shape differs from the reference,
  /// ParameterError on a zero, non-finite or repeated baseline.
  ViewSet(ImageGrid reference, std::vector<TargetView> targets,
          std::optional<DisparityField> ground_truth = std::nullopt);

  const ImageGrid& reference() const noexcept { return reference_; }
  const std::vector<TargetView>& targets() const noexcept { return targets_; }
  const std::optional<DisparityField>& ground_truth() const noexcept { return ground_truth_; }

  int width() const noexcept { return reference_.width(); }
  int height() const noexcept { return reference_.height(); }

  double min_baseline() const;
  double max_baseline() const;

 private:
  ImageGrid reference_;
  std::vector<TargetView> targets_;
  std::optional<DisparityField> ground_truth_;
};

/// ITU-R BT.601 luminance, clamped to [0, 1].
ImageGrid to_grayscale(const ImageGrid& red, const ImageGrid& green, const ImageGrid& blue);

}  // namespace gcmd
