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

// Synthetic layered scenes with exact ground truth.
//
// Each layer is a fronto-parallel plane carrying a band-limited texture: a sum
// of sinusoids with seeded wavelengths, orientations and phases, evaluated in
// closed form so a view at any baseline is sampled without interpolation.
// Layer 0 is the unbounded background; later layers are nearer and occlude
// earlier ones.
//
// Text form (one directive per line, '#' comments):
//   size <width> <height>
//   texture <lambda_min> <lambda_max> <components>
//   noise <sigma> [seed]
//   layer <x0> <y0> <x1> <y1> <disparity> <seed>
//   view <b1> <b2>

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "gcmd/grid.hpp"
#include "gcmd/scene.hpp"

namespace gcmd {

/// Half-open pixel rectangle [x0, x1) x [y0, y1) in reference coordinates.
struct Rect {
  double x0 = 0.0;
  double y0 = 0.0;
  double x1 = 0.0;
  double y1 = 0.0;

  bool contains(double x, double y) const noexcept { return x >= x0 && x < x1 && y >= y0 && y < y1; }
};

struct SynthLayer {
  Rect rect;
  double disparity = 0.0;
  std::uint64_t seed = 0;
};

struct SynthSpec {
  int width = 0;
  int height = 0;
  std::vector<SynthLayer> layers;
  double noise_sigma = 0.0;
  std::uint64_t noise_seed = 0;
  std::vector<Baseline> baselines;
  double lambda_min = 4.0;    // shortest texture wavelength, pixels (>= 2)
  double lambda_max = 32.0;
  int components = 24;

  /// Throws ParameterError: non-positive size, no layers, a rectangle outside
  /// the frame, non-finite disparity, bad texture band, negative noise, or no views.
  void validate() const;
};

/// Throws FormatError on unknown directives or malformed numbers.
SynthSpec parse_synth_spec(std::string_view text);
std::string format_synth_spec(const SynthSpec& spec);

/// Noise-free view at baseline B (B = 0 is the reference). If `layer_ids` is
/// given it receives, per pixel, the index of the visible layer.
ImageGrid render_view(const SynthSpec& spec, const Baseline& baseline,
                      std::vector<int>* layer_ids = nullptr);

/// Disparity of the visible layer at each reference pixel.
DisparityField ground_truth(const SynthSpec& spec);

/// Reference + one target per baseline, each with independent seeded noise,
/// and the ground truth attached. Baselines are used as given.
ViewSet synth_scene(const SynthSpec& spec);

/// Writes ref.pfm, view_<i>.pfm, gt.pfm and scene.txt into `dir` (created if
/// needed) and returns the manifest. Throws IoError.
SceneManifest write_scene(const ViewSet& views, const std::filesystem::path& dir,
                          const std::string& dataset = "synthetic");

/// Baselines of a cross-hair rig: (±k, 0) and (0, ±k) for k = 1..arm.
std::vector<Baseline> cross_hair(int arm);

/// Background plane plus one frontal rectangle, the usual two-plane test scene.
SynthSpec two_plane_spec(int width, int height, double w_far, double w_near,
                         std::vector<Baseline> baselines, std::uint64_t seed = 1);

}  // namespace gcmd
