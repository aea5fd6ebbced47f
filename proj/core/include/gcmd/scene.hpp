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

// Scene manifests: a line-oriented text format describing one multi-view scene.
//
//   # comment
//   dataset <tag>
//   ref <path>
//   view <path> <b1> <b2>      (one per target view)
//   gt <path>                  (optional)
//   scale <factor>             (optional, multiplies the ground truth; default 1)
//
// Relative paths are resolved against the manifest's directory. The view path
// is everything between the keyword and the last two fields, so it may
// contain spaces.

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gcmd/grid.hpp"

namespace gcmd {

struct ManifestView {
  std::filesystem::path path;
  Baseline baseline;
};

struct SceneManifest {
  std::filesystem::path reference;
  std::vector<ManifestView> views;
  std::optional<std::filesystem::path> ground_truth;
  double scale = 1.0;
  std::string dataset;
  std::filesystem::path base_dir;  // prefix for relative paths
};

/// Throws FormatError (offset = start of the offending line) on unknown keys,
/// missing fields, non-finite numbers, a repeated ref/gt/scale, or no ref.
SceneManifest parse_manifest(std::string_view text,
                             const std::filesystem::path& base_dir = {});
/// Throws LoadError naming `path` when it cannot be read or parsed.
SceneManifest read_manifest(const std::filesystem::path& path);
/// Inverse of parse_manifest, paths written as stored.
std::string format_manifest(const SceneManifest& manifest);

/// Loads every image (grayscale), multiplies the ground truth by `scale`, and
/// normalises baselines so the smallest |B| is 1.
/// Throws LoadError naming the path of a missing, unreadable or mis-sized file.
ViewSet load_scene(const SceneManifest& manifest);

}  // namespace gcmd
