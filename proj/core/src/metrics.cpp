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

#include "gcmd/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <tuple>

#include "gcmd/errors.hpp"

namespace gcmd {

double rmse(const ImageGrid& a, const ImageGrid& b) {
  if (!a.same_shape(b)) throw DimensionError("rmse: grids differ in shape");
  if (a.empty()) throw DimensionError("rmse: empty grids");
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    sum += d * d;
  }
  return std::sqrt(sum / static_cast<double>(a.size()));
}

std::map<std::string, KfoldResult> kfold_sweep(const std::vector<RunRecord>& records, int k) {
  if (records.empty()) throw ConfigError("kfold: no run records");
  std::set<std::string> scene_set;
  std::set<std::string> methods;
  std::set<double> alphas;
  std::map<std::tuple<std::string, std::string, double>, const RunRecord*> table;
  for (const auto& r : records) {
    scene_set.insert(r.scene);
    methods.insert(r.method);
    alphas.insert(r.alpha);
    if (!table.emplace(std::tuple{r.method, r.scene, r.alpha}, &r).second) {
      throw ConfigError("kfold: duplicate record for " + r.method + "/" + r.scene);
    }
  }
  const std::vector<std::string> scenes(scene_set.begin(), scene_set.end());
  if (k < 1 || static_cast<std::size_t>(k) > scenes.size()) {
    throw ConfigError("kfold: k must lie in [1, " + std::to_string(scenes.size()) + "]");
  }
  if (table.size() != scenes.size() * methods.size() * alphas.size()) {
    throw ConfigError("kfold: the (scene, method, alpha) grid has gaps");
  }

  std::vector<std::vector<std::size_t>> folds(static_cast<std::size_t>(k));
  for (std::size_t i = 0; i < scenes.size(); ++i) folds[i % folds.size()].push_back(i);

  std::map<std::string, KfoldResult> out;
  for (const auto& method : methods) {
    KfoldResult result;
    result.method = method;
    std::vector<const RunRecord*> chosen;
    double total = 0.0;
    for (std::size_t f = 0; f < folds.size(); ++f) {
      std::vector<bool> held(scenes.size(), false);
      for (std::size_t i : folds[f]) held[i] = true;

      double best_alpha = *alphas.begin();
      double best = INFINITY;
      for (double alpha : alphas) {
        double sum = 0.0;
        int n = 0;
        for (std::size_t i = 0; i < scenes.size(); ++i) {
          if (held[i] && k > 1) continue;
          sum += table.at({method, scenes[i], alpha})->final_rmse;
          ++n;
        }
        const double mean = sum / n;
        if (mean < best) {
          best = mean;
          best_alpha = alpha;
        }
      }

      FoldOutcome fold;
      fold.fold = static_cast<int>(f);
      fold.alpha = best_alpha;
      double held_sum = 0.0;
      for (std::size_t i : folds[f]) {
        const RunRecord* r = table.at({method, scenes[i], best_alpha});
        fold.scenes.push_back(scenes[i]);
        held_sum += r->final_rmse;
        chosen.push_back(r);
      }
      total += held_sum;
      fold.held_out_rmse = held_sum / static_cast<double>(folds[f].size());
      result.folds.push_back(std::move(fold));
    }
    result.mean_rmse = total / static_cast<double>(scenes.size());

    std::size_t length = 0;
    for (const auto* r : chosen) length = std::max(length, r->rmse_trace.size());
    result.mean_trace.assign(length, 0.0);
    for (const auto* r : chosen) {
      for (std::size_t i = 0; i < length; ++i) {
        const auto& t = r->rmse_trace;
        result.mean_trace[i] += t.empty() ? r->final_rmse : t[std::min(i, t.size() - 1)];
      }
    }
    for (double& v : result.mean_trace) v /= static_cast<double>(chosen.size());
    out.emplace(method, std::move(result));
  }
  return out;
}

}  // namespace gcmd
