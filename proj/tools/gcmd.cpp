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

// gcmd: multi-view disparity estimation from the command line.
//
//   gcmd estimate --manifest scene.txt --method gcm --alpha 0.5 --scales 3 --out w.pfm --trace t.csv
//   gcmd eval --est w.pfm --gt gt.pfm
//   gcmd sweep --scenes DIR --methods gcm,c2f --alphas 0.25,0.5,1 --k 6 --jobs 4 --out DIR
//   gcmd synth --spec scene.spec --out DIR
//   gcmd analyze-spectrum --sigmas 1,2,4,8 --models white,1/f,1/f2,1/f3 --out ratio.csv
//
// Exit status: 0 success, 1 usage error, 2 data error.

#include <CLI11.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <limits>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "gcmd/errors.hpp"
#include "gcmd/metrics.hpp"
#include "gcmd/pfm.hpp"
#include "gcmd/scene.hpp"
#include "gcmd/schedule.hpp"
#include "gcmd/spectrum.hpp"
#include "gcmd/synth.hpp"
#include "gcmd/trace.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kUsage = 1;
constexpr int kData = 2;

struct RunOptions {
  std::string method = "gcm";
  double alpha = 0.5;
  int scales = 3;
  bool zero_g = false;
  bool zero_o = false;
  double epsilon = 2e-4;
  int max_solves = 300;
  int window = 3;
};

void add_run_options(CLI::App* cmd, RunOptions& o, bool single) {
  if (single) {
    cmd->add_option("--method", o.method, "naive | piv | c2f | gcm | gcm-sliding")->capture_default_str();
    cmd->add_option("--alpha", o.alpha, "Regularisation weight")->capture_default_str();
    cmd->add_option("--epsilon", o.epsilon, "Acquisition noise amplitude (GCM)")->capture_default_str();
  }
  cmd->add_option("--scales", o.scales, "Number of scales Q")->capture_default_str()->check(CLI::PositiveNumber);
  cmd->add_flag("--zero-g", o.zero_g, "GCM ablation: drop the gradient-inconsistency term");
  cmd->add_flag("--zero-o", o.zero_o, "GCM ablation: drop the scale-inconsistency term");
  cmd->add_option("--max-solves", o.max_solves, "Solve budget")->capture_default_str()->check(CLI::PositiveNumber);
  cmd->add_option("--window", o.window, "Active scales for gcm-sliding")->capture_default_str()->check(CLI::PositiveNumber);
}

struct Configured {
  gcmd::Strategy strategy;
  gcmd::SolverConfig solver;
  gcmd::GcmConfig gcm;
};

Configured configure(const RunOptions& o, const std::string& method, double alpha, double epsilon) {
  Configured c;
  c.strategy.kind = gcmd::parse_method(method);
  c.strategy.scales = o.scales;
  c.strategy.max_solves = o.max_solves;
  c.strategy.window = o.window;
  c.solver.alpha = alpha;
  c.gcm.epsilon = epsilon;
  c.gcm.zero_G = o.zero_g;
  c.gcm.zero_O = o.zero_o;
  c.strategy.validate();
  try {
    c.solver.validate();
    c.gcm.validate();
  } catch (const gcmd::ParameterError& e) {
    throw gcmd::ConfigError(e.what());
  }
  return c;
}

std::string scene_name(const fs::path& manifest) {
  const std::string stem = manifest.stem().string();
  if (stem == "scene" && manifest.has_parent_path()) return manifest.parent_path().filename().string();
  return stem;
}

gcmd::RunRecord execute(const gcmd::ViewSet& views, const Configured& c, const std::string& scene,
                        const std::string& label, gcmd::RunResult* result_out = nullptr,
                        const gcmd::SolveCallback& extra = {}, const gcmd::SolveHooks* hooks = nullptr) {
  const auto start = std::chrono::steady_clock::now();
  gcmd::RunRecord rec;
  rec.scene = scene;
  rec.method = label;
  rec.alpha = c.solver.alpha;
  rec.epsilon = c.gcm.epsilon;
  auto on_solve = [&](const gcmd::TraceEntry& e, const gcmd::DisparityField& w) {
    rec.rmse_trace.push_back(e.rmse.value_or(std::numeric_limits<double>::quiet_NaN()));
    if (extra) extra(e, w);
  };
  gcmd::RunResult result = gcmd::run(views, c.strategy, c.solver, c.gcm, hooks, on_solve);
  rec.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  rec.final_rmse = rec.rmse_trace.empty() ? std::numeric_limits<double>::quiet_NaN() : rec.rmse_trace.back();
  if (result_out) *result_out = std::move(result);
  return rec;
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::vector<double> parse_doubles(const std::vector<std::string>& items, const char* what) {
  std::vector<double> out;
  for (const auto& s : items) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(s, &used));
      if (used != s.size()) throw std::invalid_argument(s);
    } catch (const std::exception&) {
      throw gcmd::ConfigError(std::string("bad ") + what + " '" + s + "'");
    }
  }
  return out;
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// --- subcommands -------------------------------------------------------------

int cmd_estimate(const fs::path& manifest_path, const RunOptions& o, const fs::path& out,
                 const std::optional<fs::path>& trace, int dump_every,
                 const std::optional<fs::path>& weights_dir, bool verbose) {
  const Configured c = configure(o, o.method, o.alpha, o.epsilon);
  const gcmd::ViewSet views = gcmd::load_scene(gcmd::read_manifest(manifest_path));
  if (trace && !views.ground_truth()) {
    std::cerr << "warning: scene has no ground truth; trace RMSE column will be nan\n";
  }

  auto dump = [&](const gcmd::TraceEntry& e, const gcmd::DisparityField& w) {
    if (verbose) {
      std::string scales;
      for (int q : e.scales) scales += (scales.empty() ? "" : ",") + std::to_string(q);
      std::fprintf(stderr, "solve %4d  scales %-6s views %2d  M %.3g  max|dw| %.3e%s  cg %4d  rmse %s\n",
                   e.report.solve_count, scales.c_str(), e.active_targets, e.limit, e.report.max_abs_dw,
                   e.report.clipped ? " (clipped)" : "", e.report.cg_iterations,
                   e.rmse ? num(*e.rmse).c_str() : "-");
    }
    if (dump_every > 0 && e.report.solve_count % dump_every == 0) {
      fs::path p = out;
      p.replace_filename(out.stem().string() + "_" + std::to_string(e.report.solve_count) + ".pfm");
      gcmd::write_pfm_file(p, w);
    }
  };
  // Weights are dumped on the solves selected by --dump-every (every solve when it is 0).
  gcmd::SolveHooks hooks;
  int solve = 0;
  if (weights_dir) {
    std::error_code ec;
    fs::create_directories(*weights_dir, ec);
    if (ec) throw gcmd::IoError("cannot create " + weights_dir->string());
    hooks.on_weights = [&](const gcmd::ScaleStack& stack, const gcmd::WeightField& wf) {
      ++solve;
      if (dump_every > 0 && solve % dump_every != 0) return;
      for (std::size_t l = 0; l < stack.levels.size(); ++l) {
        if (!stack.levels[l].active) continue;
        for (std::size_t t = 0; t < wf.weights[l].size(); ++t) {
          const std::string name = "w_s" + std::to_string(solve) + "_q" + std::to_string(stack.levels[l].q) +
                                   "_t" + std::to_string(t) + ".pfm";
          gcmd::write_pfm_file(*weights_dir / name, wf.weights[l][t]);
        }
      }
    };
  }
  gcmd::RunResult result;
  const auto rec = execute(views, c, scene_name(manifest_path), std::string(gcmd::to_string(c.strategy.kind)),
                           &result, dump, weights_dir ? &hooks : nullptr);
  gcmd::write_pfm_file(out, result.w);
  if (trace) gcmd::emit_trace({rec}, *trace, rec.scene);

  std::cout << "solves " << rec.rmse_trace.size() << (result.converged ? " (converged)" : "") << ", "
            << rec.wall_seconds << " s\n";
  if (views.ground_truth()) std::cout << "rmse " << num(rec.final_rmse) << '\n';
  return 0;
}

int cmd_eval(const fs::path& est, const fs::path& gt) {
  const auto a = gcmd::read_image(est);
  const auto b = gcmd::read_image(gt);
  std::cout << num(gcmd::rmse(a, b)) << '\n';
  return 0;
}

std::vector<fs::path> find_manifests(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw gcmd::LoadError(dir.string(), "not a directory");
  std::vector<fs::path> out;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_directory() && fs::exists(entry.path() / "scene.txt")) {
      out.push_back(entry.path() / "scene.txt");
    } else if (entry.is_regular_file() && entry.path().extension() == ".txt") {
      out.push_back(entry.path());
    }
  }
  std::sort(out.begin(), out.end());
  if (out.empty()) throw gcmd::LoadError(dir.string(), "no scene manifests found");
  return out;
}

int cmd_sweep(const fs::path& scenes_dir, const std::string& methods_arg, const std::string& alphas_arg,
              const std::string& epsilons_arg, int k, int jobs, const RunOptions& o, const fs::path& out) {
  const auto methods = split_list(methods_arg);
  const auto alphas = parse_doubles(split_list(alphas_arg), "alpha");
  const auto epsilons = parse_doubles(split_list(epsilons_arg), "epsilon");
  if (methods.empty() || alphas.empty() || epsilons.empty()) throw gcmd::ConfigError("empty sweep grid");
  for (const auto& m : methods) configure(o, m, alphas.front(), epsilons.front());

  const auto manifests = find_manifests(scenes_dir);
  if (k < 1 || static_cast<std::size_t>(k) > manifests.size()) {
    throw gcmd::ConfigError("--k must lie in [1, " + std::to_string(manifests.size()) + "]");
  }
  std::vector<gcmd::ViewSet> scenes;
  std::vector<std::string> names;
  for (const auto& m : manifests) {
    scenes.push_back(gcmd::load_scene(gcmd::read_manifest(m)));
    if (!scenes.back().ground_truth()) throw gcmd::LoadError(m.string(), "sweep needs ground truth");
    names.push_back(scene_name(m));
  }

  struct Job {
    std::size_t scene;
    std::string method;
    std::string label;
    double alpha;
    double epsilon;
  };
  std::vector<Job> work;
  for (std::size_t s = 0; s < scenes.size(); ++s) {
    for (const auto& m : methods) {
      const bool gcm_like = gcmd::parse_method(m) == gcmd::Method::gcm ||
                            gcmd::parse_method(m) == gcmd::Method::gcm_sliding;
      const std::size_t n_eps = gcm_like ? epsilons.size() : 1;
      for (std::size_t e = 0; e < n_eps; ++e) {
        const std::string label = gcm_like && epsilons.size() > 1 ? m + "@eps=" + num(epsilons[e]) : m;
        for (double a : alphas) work.push_back({s, m, label, a, epsilons[e]});
      }
    }
  }

  std::vector<gcmd::RunRecord> records(work.size());
  std::atomic<std::size_t> next{0};
  std::mutex io;
  std::exception_ptr failure;
  auto worker = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < work.size();) {
      try {
        const Job& j = work[i];
        records[i] = execute(scenes[j.scene], configure(o, j.method, j.alpha, j.epsilon), names[j.scene], j.label);
        std::lock_guard lock(io);
        std::cerr << names[j.scene] << ' ' << j.label << " alpha=" << j.alpha << " rmse=" << records[i].final_rmse
                  << " (" << records[i].wall_seconds << " s)\n";
      } catch (...) {
        std::lock_guard lock(io);
        if (!failure) failure = std::current_exception();
        next = work.size();
      }
    }
  };
  std::vector<std::thread> pool;
  for (int t = 0; t < std::max(1, jobs); ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);

  std::error_code ec;
  fs::create_directories(out, ec);
  if (ec) throw gcmd::IoError("cannot create " + out.string());

  gcmd::emit_trace(records, out / "runs.csv", "all runs");
  const auto table = gcmd::kfold_sweep(records, k);
  std::ostringstream summary;
  summary << "method,fold,alpha,held_out_rmse\n";
  std::vector<gcmd::RunRecord> selected;
  for (const auto& [method, res] : table) {
    for (const auto& f : res.folds) {
      summary << method << ',' << f.fold << ',' << num(f.alpha) << ',' << num(f.held_out_rmse) << '\n';
    }
    summary << method << ",mean,," << num(res.mean_rmse) << '\n';
    gcmd::RunRecord mean;
    mean.method = method;
    mean.scene = "kfold-mean";
    mean.rmse_trace = res.mean_trace;
    mean.final_rmse = res.mean_rmse;
    selected.push_back(std::move(mean));
    std::cout << method << ": mean held-out RMSE " << num(res.mean_rmse) << '\n';
  }
  gcmd::write_file(out / "summary.csv", summary.str());
  gcmd::emit_trace(selected, out / "kfold.csv", std::to_string(k) + "-fold validated RMSE");
  return 0;
}

int cmd_synth(const fs::path& spec_path, const fs::path& out) {
  const auto spec = gcmd::parse_synth_spec(gcmd::read_file(spec_path));
  try {
    spec.validate();
  } catch (const gcmd::ParameterError& e) {
    throw gcmd::LoadError(spec_path.string(), e.what());
  }
  const auto m = gcmd::write_scene(gcmd::synth_scene(spec), out);
  std::cout << (out / "scene.txt").string() << ": " << m.views.size() << " views\n";
  return 0;
}

int cmd_spectrum(const std::string& sigmas_arg, const std::string& models_arg, int grid,
                 const std::optional<fs::path>& out) {
  const auto sigmas = parse_doubles(split_list(sigmas_arg), "sigma");
  std::vector<gcmd::SpectrumModel> models;
  for (const auto& m : split_list(models_arg)) models.push_back(gcmd::parse_spectrum_model(m));
  if (sigmas.empty() || models.empty()) throw gcmd::ConfigError("empty sigma or model list");
  for (double s : sigmas) {
    if (!(s > 0.0)) throw gcmd::ConfigError("sigmas must be positive");
  }

  std::ostringstream csv;
  csv << "model,sigma,power_a,power_b,ratio\n";
  for (auto m : models) {
    for (double s : sigmas) {
      const auto p = gcmd::spectrum_powers(s, m, grid);
      csv << gcmd::to_string(m) << ',' << num(s) << ',' << num(p.power_a) << ',' << num(p.power_b) << ','
          << num(p.ratio()) << '\n';
    }
  }
  if (out) {
    gcmd::write_file(*out, csv.str());
  } else {
    std::cout << csv.str();
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-view disparity estimation with gradient-consistency weighting"};
  app.require_subcommand(1);

  RunOptions est_opts;
  std::string manifest;
  std::string est_out;
  std::optional<std::string> est_trace;
  int dump_every = 0;
  bool verbose = false;
  std::optional<std::string> dump_weights;
  auto* estimate = app.add_subcommand("estimate", "Estimate disparity for one scene");
  estimate->add_option("--manifest", manifest, "Scene manifest")->required()->check(CLI::ExistingFile);
  add_run_options(estimate, est_opts, true);
  estimate->add_option("--dump-every", dump_every, "Write the estimate every N solves")->check(CLI::NonNegativeNumber);
  estimate->add_option("--dump-weights", dump_weights, "Directory for per-view, per-scale weight maps (PFM)");
  estimate->add_flag("-v,--verbose", verbose, "Log every solve to stderr");
  estimate->add_option("--out", est_out, "Output disparity (PFM)")->required();
  estimate->add_option("--trace", est_trace, "Convergence trace CSV (an SVG is written alongside)");

  std::string eval_est;
  std::string eval_gt;
  auto* eval = app.add_subcommand("eval", "RMSE between two disparity maps");
  eval->add_option("--est", eval_est)->required()->check(CLI::ExistingFile);
  eval->add_option("--gt", eval_gt)->required()->check(CLI::ExistingFile);

  RunOptions sweep_opts;
  std::string scenes_dir;
  std::string methods = "naive,piv,c2f,gcm";
  std::string alphas = "0.125,0.25,0.5,1,2";
  std::string epsilons = "2e-4";
  int k = 6;
  int jobs = 1;
  std::string sweep_out;
  auto* sweep = app.add_subcommand("sweep", "Alpha/epsilon sweep with k-fold validation");
  sweep->add_option("--scenes", scenes_dir, "Directory of scene manifests")->required();
  sweep->add_option("--methods", methods)->capture_default_str();
  sweep->add_option("--alphas", alphas)->capture_default_str();
  sweep->add_option("--epsilons", epsilons, "GCM epsilon values")->capture_default_str();
  sweep->add_option("--k", k, "Folds")->capture_default_str();
  sweep->add_option("--jobs", jobs, "Concurrent runs")->capture_default_str()->check(CLI::PositiveNumber);
  add_run_options(sweep, sweep_opts, false);
  sweep->add_option("--out", sweep_out, "Output directory")->required();

  std::string spec_path;
  std::string synth_out;
  auto* synth = app.add_subcommand("synth", "Render a synthetic scene with ground truth");
  synth->add_option("--spec", spec_path, "Scene description")->required()->check(CLI::ExistingFile);
  synth->add_option("--out", synth_out, "Output directory")->required();

  std::string sigmas = "1,2,4,8";
  std::string models = "white,1/f,1/f2,1/f3";
  int grid = 1024;
  std::optional<std::string> spectrum_out;
  auto* spectrum = app.add_subcommand("analyze-spectrum", "Expected power ratio of the scale-inconsistency terms");
  spectrum->add_option("--sigmas", sigmas)->capture_default_str();
  spectrum->add_option("--models", models)->capture_default_str();
  spectrum->add_option("--grid", grid, "Quadrature points per axis")->capture_default_str();
  spectrum->add_option("--out", spectrum_out, "Output CSV (stdout if omitted)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kUsage;
  }

  try {
    if (*estimate) {
      std::optional<fs::path> trace;
      if (est_trace) trace = *est_trace;
      std::optional<fs::path> weights_dir;
      if (dump_weights) weights_dir = *dump_weights;
      return cmd_estimate(manifest, est_opts, est_out, trace, dump_every, weights_dir, verbose);
    }
    if (*eval) return cmd_eval(eval_est, eval_gt);
    if (*sweep) return cmd_sweep(scenes_dir, methods, alphas, epsilons, k, jobs, sweep_opts, sweep_out);
    if (*synth) return cmd_synth(spec_path, synth_out);
    if (*spectrum) {
      std::optional<fs::path> out;
      if (spectrum_out) out = *spectrum_out;
      return cmd_spectrum(sigmas, models, grid, out);
    }
  } catch (const gcmd::ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kData;
  }
  return kUsage;
}
