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

// Accuracy metric and k-fold selection of the regularisation weight.

#include <map>
#include <string>
#include <vector>

#include "gcmd/grid.hpp"

namespace gcmd {

/// sqrt(mean((a - b)^2)). Throws DimensionError on a shape mismatch.
double rmse(const ImageGrid& a, const ImageGrid& b);

/// One estimation run on one scene.
struct RunRecord {
  std::string scene;
  std::string method;
  double alpha = 0.0;
  double epsilon = 0.0;
  std::vector<double> rmse_trace;  // one entry per executed solve
  double final_rmse = 0.0;
  double wall_seconds = 0.0;
};

struct FoldOutcome {
  int fold = 0;
  double alpha = 0.0;                 // selected on the other folds
  std::vector<std::string> scenes;    // held out
  double held_out_rmse = 0.0;         // mean over the held-out scenes
};

struct KfoldResult {
  std::string method;
  std::vector<FoldOutcome> folds;
  double mean_rmse = 0.0;             // mean of held-out RMSE over all scenes
  std::vector<double> mean_trace;     // per-solve held-out mean, padded with final values
};

/// Scenes are sorted by id and dealt round-robin into k folds. For each
/// method and fold, the alpha with the lowest mean final RMSE on the other
/// folds (all scenes when k = 1) is evaluated on the held-out scenes.
/// Every (scene, method, alpha) combination must be present.
/// Throws ConfigError for k < 1, k > scene count, an empty grid, or gaps.
std::map<std::string, KfoldResult> kfold_sweep(const std::vector<RunRecord>& records, int k);

}  // namespace gcmd
