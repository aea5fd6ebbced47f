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

// Estimation strategies: naive, progressive inclusion of views (PIV),
// coarse-to-fine (C2F), the self-scheduling GCM, and GCM with a sliding
// window of scales.

#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gcmd/gcm.hpp"
#include "gcmd/grid.hpp"
#include "gcmd/solver.hpp"

namespace gcmd {

enum class Method { naive, piv, c2f, gcm, gcm_sliding };

std::string_view to_string(Method m) noexcept;
/// Accepts naive, piv, c2f, gcm, gcm-sliding (or gcm_sliding). Throws ConfigError.
Method parse_method(std::string_view name);

struct Strategy {
  Method kind = Method::gcm;
  int scales = 3;            // Q; naive and PIV always use q = 0 only
  int max_solves = 300;
  int window = 3;            // active scales for gcm_sliding
  int piv_initial = 4;       // targets in the first PIV stage
  int piv_step = 4;          // targets added per PIV stage
  double converge_tol = 1e-4;
  int converge_count = 3;    // consecutive quiet solves

  /// Throws ConfigError on non-positive counts or tolerances.
  void validate() const;
};

struct TraceEntry {
  IterationReport report;
  std::optional<double> rmse;  // present when the views carry ground truth
  double limit = 0.0;          // M used for this solve
  int active_targets = 0;
  std::vector<int> scales;     // active scales for this solve
};

struct RunResult {
  DisparityField w;
  std::vector<TraceEntry> trace;
  bool converged = false;
};

/// Divides every baseline by the smallest |B| and rescales the ground truth by
/// the same factor, leaving every displacement B w unchanged.
/// Throws ParameterError for an empty target list or a zero baseline.
ViewSet normalise_baselines(const ViewSet& views);

/// Target indices sorted by |B|, ties broken by sector, then by position.
std::vector<std::size_t> targets_by_distance(const ViewSet& views);

/// Cumulative PIV target sets: the `initial` nearest targets, then `step` more per stage.
std::vector<std::vector<std::size_t>> piv_stages(const ViewSet& views, int initial = 4,
                                                 int step = 4);

using SolveCallback = std::function<void(const TraceEntry&, const DisparityField&)>;

/// Runs `strategy` from w = 0 until convergence (|dw| < converge_tol for
/// converge_count consecutive solves at the final stage) or max_solves.
RunResult run(const ViewSet& views, const Strategy& strategy, const SolverConfig& solver_cfg,
              const GcmConfig& gcm_cfg, const SolveHooks* hooks = nullptr,
              const SolveCallback& on_solve = {});

}  // namespace gcmd
