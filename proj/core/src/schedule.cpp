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

#include "gcmd/schedule.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "gcmd/errors.hpp"
#include "gcmd/metrics.hpp"

namespace gcmd {

std::string_view to_string(Method m) noexcept {
  switch (m) {
    case Method::naive: return "naive";
    case Method::piv: return "piv";
    case Method::c2f: return "c2f";
    case Method::gcm: return "gcm";
    case Method::gcm_sliding: return "gcm-sliding";
  }
  return "unknown";
}

Method parse_method(std::string_view name) {
  if (name == "naive") return Method::naive;
  if (name == "piv") return Method::piv;
  if (name == "c2f") return Method::c2f;
  if (name == "gcm") return Method::gcm;
  if (name == "gcm-sliding" || name == "gcm_sliding") return Method::gcm_sliding;
  throw ConfigError("unknown method '" + std::string(name) +
                    "' (expected naive|piv|c2f|gcm|gcm-sliding)");
}

void Strategy::validate() const {
  if (scales < 1) throw ConfigError("scale count must be >= 1");
  if (max_solves < 1) throw ConfigError("max_solves must be >= 1");
  if (window < 1) throw ConfigError("sliding window must hold at least one scale");
  if (piv_initial < 1 || piv_step < 1) throw ConfigError("PIV stage sizes must be >= 1");
  if (!(converge_tol > 0.0)) throw ConfigError("convergence tolerance must be > 0");
  if (converge_count < 1) throw ConfigError("convergence count must be >= 1");
}

ViewSet normalise_baselines(const ViewSet& views) {
  const double m = views.min_baseline();
  std::vector<TargetView> targets = views.targets();
  for (auto& t : targets) {
    t.baseline.b1 /= m;
    t.baseline.b2 /= m;
  }
  std::optional<DisparityField> gt = views.ground_truth();
  if (gt) {
    for (double& v : gt->samples()) v *= m;
  }
  return ViewSet(views.reference(), std::move(targets), std::move(gt));
}

std::vector<std::size_t> targets_by_distance(const ViewSet& views) {
  std::vector<std::size_t> order(views.targets().size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  const auto& t = views.targets();
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const double na = t[a].baseline.norm();
    const double nb = t[b].baseline.norm();
    if (std::abs(na - nb) > 1e-9 * std::max(na, nb)) return na < nb;
    return sector_of(t[a].baseline) < sector_of(t[b].baseline);
  });
  return order;
}

std::vector<std::vector<std::size_t>> piv_stages(const ViewSet& views, int initial, int step) {
  if (initial < 1 || step < 1) throw ConfigError("PIV stage sizes must be >= 1");
  const std::vector<std::size_t> order = targets_by_distance(views);
  std::vector<std::vector<std::size_t>> stages;
  std::size_t count = std::min<std::size_t>(static_cast<std::size_t>(initial), order.size());
  while (true) {
    stages.emplace_back(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(count));
    if (count == order.size()) break;
    count = std::min(order.size(), count + static_cast<std::size_t>(step));
  }
  return stages;
}

namespace {

double max_norm(const ViewSet& views, const std::vector<std::size_t>& targets) {
  double m = 0.0;
  for (std::size_t i : targets) m = std::max(m, views.targets()[i].baseline.norm());
  return m;
}

std::vector<int> descending(int hi, int lo) {
  std::vector<int> out;
  for (int q = hi; q >= lo; --q) out.push_back(q);
  return out;
}

}  // namespace

RunResult run(const ViewSet& views, const Strategy& strategy, const SolverConfig& solver_cfg,
              const GcmConfig& gcm_cfg, const SolveHooks* hooks, const SolveCallback& on_solve) {
  strategy.validate();
  solver_cfg.validate();
  gcm_cfg.validate();
  if (views.targets().empty()) throw ConfigError("scene has no target views");

  std::vector<std::size_t> all(views.targets().size());
  std::iota(all.begin(), all.end(), std::size_t{0});

  const WeightProvider uniform = [](const ScaleStack& stack, const DisparityField&) {
    return uniform_weights(stack);
  };
  const WeightProvider gcm = [&gcm_cfg](const ScaleStack& stack, const DisparityField& w) {
    return compute_weights(stack, w, gcm_cfg);
  };

  const int Q = strategy.scales;
  const auto stages = piv_stages(views, strategy.piv_initial, strategy.piv_step);
  std::size_t stage = 0;                                   // PIV
  int c2f_scale = Q - 1;                                   // C2F
  const int window = std::min(strategy.window, Q);
  int window_lo = Q - window;                              // gcm_sliding: finest active scale

  SolverState state{DisparityField(views.width(), views.height()), 0};
  RunResult result;
  int quiet = 0;

  while (state.solve_count < strategy.max_solves) {
    ActiveSet active;
    const WeightProvider* weigh = &uniform;
    double M = 0.0;
    bool final_stage = true;

    switch (strategy.kind) {
      case Method::naive:
        active.targets = all;
        active.scales = {0};
        M = 1.0 / max_norm(views, active.targets);
        break;
      case Method::piv:
        active.targets = stages[stage];
        active.scales = {0};
        M = 1.0 / max_norm(views, active.targets);
        final_stage = stage + 1 == stages.size();
        break;
      case Method::c2f:
        active.targets = all;
        active.scales = {c2f_scale};
        M = std::ldexp(1.0, c2f_scale) / max_norm(views, active.targets);
        final_stage = c2f_scale == 0;
        break;
      case Method::gcm:
        active.targets = all;
        active.scales = descending(Q - 1, 0);
        active.with_base = true;
        weigh = &gcm;
        M = 1.0 / max_norm(views, active.targets);
        break;
      case Method::gcm_sliding:
        active.targets = all;
        active.scales = descending(window_lo + window - 1, window_lo);
        active.with_base = true;
        weigh = &gcm;
        M = std::ldexp(1.0, window_lo) / max_norm(views, active.targets);
        final_stage = window_lo == 0;
        break;
    }

    TraceEntry entry;
    entry.report = solve_iteration(state, views, active, *weigh, solver_cfg, M, hooks);
    entry.limit = M;
    entry.active_targets = static_cast<int>(active.targets.size());
    entry.scales = active.scales;
    if (views.ground_truth()) entry.rmse = rmse(state.w, *views.ground_truth());
    result.trace.push_back(entry);
    if (on_solve) on_solve(entry, state.w);

    if (!final_stage) {
      // No clipping: the current stage has settled, move on.
      if (!entry.report.clipped) {
        if (strategy.kind == Method::piv) ++stage;
        if (strategy.kind == Method::c2f) --c2f_scale;
        if (strategy.kind == Method::gcm_sliding) --window_lo;
      }
      continue;
    }
    quiet = entry.report.max_abs_dw < strategy.converge_tol ? quiet + 1 : 0;
    if (quiet >= strategy.converge_count) {
      result.converged = true;
      break;
    }
  }
  result.w = std::move(state.w);
  return result;
}

}  // namespace gcmd
