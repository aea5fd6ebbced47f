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

#include "gcmd/solver.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "gcmd/errors.hpp"

namespace gcmd {

void SolverConfig::validate() const {
  if (!(alpha >= 0.0) || !std::isfinite(alpha)) throw ParameterError("alpha must be >= 0");
  if (!(cg_tol > 0.0 && cg_tol < 1.0)) throw ParameterError("cg_tol must lie in (0, 1)");
  if (cg_max_iter < 1) throw ParameterError("cg_max_iter must be >= 1");
  if (!(irls_delta > 0.0)) throw ParameterError("irls_delta must be > 0");
  if (median_radius < 0) throw ParameterError("median_radius must be >= 0");
}

void LinearSystem::apply(std::span<const double> x, std::span<double> y) const {
  const int w = width();
  const int h = height();
  for (int r = 0; r < h; ++r) {
    const std::size_t row = static_cast<std::size_t>(r) * w;
    for (int c = 0; c < w; ++c) {
      const std::size_t i = row + c;
      double v = diag[i] * x[i];
      if (c > 0) v -= west[i] * x[i - 1];
      if (c + 1 < w) v -= east[i] * x[i + 1];
      if (r > 0) v -= north[i] * x[i - w];
      if (r + 1 < h) v -= south[i] * x[i + w];
      y[i] = v;
    }
  }
}

bool LinearSystem::is_symmetric() const {
  const int w = width();
  const int h = height();
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (x + 1 < w && east(x, y) != west(x + 1, y)) return false;
      if (y + 1 < h && south(x, y) != north(x, y + 1)) return false;
      if (x == 0 && west(x, y) != 0.0) return false;
      if (x + 1 == w && east(x, y) != 0.0) return false;
      if (y == 0 && north(x, y) != 0.0) return false;
      if (y + 1 == h && south(x, y) != 0.0) return false;
    }
  }
  return true;
}

bool LinearSystem::is_diagonally_dominant() const {
  for (std::size_t i = 0; i < diag.size(); ++i) {
    const double off = std::abs(north[i]) + std::abs(south[i]) + std::abs(east[i]) +
                       std::abs(west[i]);
    // Assembly adds the same couplings to the diagonal; allow for round-off.
    if (diag[i] < off * (1.0 - 1e-12)) return false;
  }
  return true;
}

ImageGrid warp_target(const ImageGrid& target, const ImageGrid& reference, const DisparityField& w,
                      const Baseline& baseline) {
  if (!target.same_shape(reference) || !target.same_shape(w)) {
    throw DimensionError("warp inputs differ in shape");
  }
  const int width = target.width();
  const int height = target.height();
  ImageGrid out(width, height);
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      const Vec2 d = displacement_of(baseline, w(x, y));
      const double px = x + d.s1;
      const double py = y + d.s2;
      if (!(px >= 0.0 && px <= width - 1 && py >= 0.0 && py <= height - 1)) {
        out(x, y) = reference(x, y);
        continue;
      }
      const int x0 = std::min(static_cast<int>(px), std::max(width - 2, 0));
      const int y0 = std::min(static_cast<int>(py), std::max(height - 2, 0));
      const int x1 = std::min(x0 + 1, width - 1);
      const int y1 = std::min(y0 + 1, height - 1);
      const double fx = px - x0;
      const double fy = py - y0;
      const double top = (1.0 - fx) * target(x0, y0) + fx * target(x1, y0);
      const double bottom = (1.0 - fx) * target(x0, y1) + fx * target(x1, y1);
      out(x, y) = (1.0 - fy) * top + fy * bottom;
    }
  }
  return out;
}

DisparityField closed_form_update(const WeightField& weights, const ScaleStack& stack) {
  ImageGrid num(stack.width, stack.height);
  ImageGrid den(stack.width, stack.height);
  for (std::size_t l = 0; l < stack.levels.size(); ++l) {
    const ScaleLevel& level = stack.levels[l];
    if (!level.active) continue;
    for (std::size_t t = 0; t < stack.target_count(); ++t) {
      const ImageGrid& W = weights.weights.at(l).at(t);
      for (std::size_t i = 0; i < num.size(); ++i) {
        num[i] += W[i] * level.g[t][i] * level.delta_I[t][i];
        den[i] += W[i] * level.g[t][i] * level.g[t][i];
      }
    }
  }
  DisparityField dw(stack.width, stack.height);
  for (std::size_t i = 0; i < dw.size(); ++i) dw[i] = -num[i] / std::max(den[i], 1e-12);
  return dw;
}

std::vector<std::vector<ImageGrid>> irls_data_weights(const ScaleStack& stack,
                                                      const DisparityField& dw, double delta) {
  if (!(delta > 0.0)) throw ParameterError("irls_delta must be > 0");
  if (dw.width() != stack.width || dw.height() != stack.height) {
    throw DimensionError("residual disparity shape differs from the scale stack");
  }
  const double d2 = delta * delta;
  std::vector<std::vector<ImageGrid>> out(stack.levels.size());
  for (std::size_t l = 0; l < stack.levels.size(); ++l) {
    const ScaleLevel& level = stack.levels[l];
    if (!level.active) continue;
    for (std::size_t t = 0; t < stack.target_count(); ++t) {
      ImageGrid r(stack.width, stack.height);
      for (std::size_t i = 0; i < r.size(); ++i) {
        const double res = level.g[t][i] * dw[i] + level.delta_I[t][i];
        r[i] = 1.0 / std::sqrt(res * res + d2);
      }
      out[l].push_back(std::move(r));
    }
  }
  return out;
}

namespace {

// Forward differences with a zero difference across the far borders.
inline double forward_dx(const ImageGrid& w, int x, int y) {
  return x + 1 < w.width() ? w(x + 1, y) - w(x, y) : 0.0;
}
inline double forward_dy(const ImageGrid& w, int x, int y) {
  return y + 1 < w.height() ? w(x, y + 1) - w(x, y) : 0.0;
}

}  // namespace

Couplings irls_reg_weights(const DisparityField& w, double delta) {
  if (!(delta > 0.0)) throw ParameterError("irls_delta must be > 0");
  const int width = w.width();
  const int height = w.height();
  Couplings c{ImageGrid(width, height), ImageGrid(width, height), ImageGrid(width, height),
              ImageGrid(width, height)};
  const double d2 = delta * delta;
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      const double dx = forward_dx(w, x, y);
      const double dy = forward_dy(w, x, y);
      const double d = 1.0 / std::sqrt(dx * dx + dy * dy + d2);
      if (x + 1 < width) {
        c.east(x, y) = d;
        c.west(x + 1, y) = d;
      }
      if (y + 1 < height) {
        c.south(x, y) = d;
        c.north(x, y + 1) = d;
      }
    }
  }
  return c;
}

double tv_energy(const DisparityField& w) {
  double e = 0.0;
  for (int y = 0; y < w.height(); ++y) {
    for (int x = 0; x < w.width(); ++x) e += std::hypot(forward_dx(w, x, y), forward_dy(w, x, y));
  }
  return e;
}

LinearSystem assemble(const WeightField& weights, const std::vector<std::vector<ImageGrid>>& irls,
                      const ScaleStack& stack, const Couplings& reg, double alpha,
                      const DisparityField* w) {
  const int width = stack.width;
  const int height = stack.height;
  if (!reg.east.same_shape(ImageGrid(width, height))) {
    throw DimensionError("regulariser couplings differ in shape from the stack");
  }
  if (w != nullptr && (w->width() != width || w->height() != height)) {
    throw DimensionError("disparity shape differs from the stack");
  }
  LinearSystem sys{ImageGrid(width, height), ImageGrid(width, height), ImageGrid(width, height),
                   ImageGrid(width, height), ImageGrid(width, height), ImageGrid(width, height)};

  for (std::size_t l = 0; l < stack.levels.size(); ++l) {
    const ScaleLevel& level = stack.levels[l];
    if (!level.active) continue;
    for (std::size_t t = 0; t < stack.target_count(); ++t) {
      const ImageGrid& W = weights.weights.at(l).at(t);
      const ImageGrid& R = irls.at(l).at(t);
      const ImageGrid& g = level.g[t];
      const ImageGrid& dI = level.delta_I[t];
      for (std::size_t i = 0; i < sys.diag.size(); ++i) {
        const double wr = W[i] * R[i];
        sys.diag[i] += wr * g[i] * g[i];
        sys.rhs[i] -= wr * g[i] * dI[i];
      }
    }
  }

  for (std::size_t i = 0; i < sys.diag.size(); ++i) {
    sys.north[i] = alpha * reg.north[i];
    sys.south[i] = alpha * reg.south[i];
    sys.east[i] = alpha * reg.east[i];
    sys.west[i] = alpha * reg.west[i];
    sys.diag[i] += sys.north[i] + sys.south[i] + sys.east[i] + sys.west[i];
  }

  if (w != nullptr && alpha > 0.0) {
    for (int y = 0; y < height; ++y) {
      for (int x = 0; x < width; ++x) {
        const double c = (*w)(x, y);
        double lw = 0.0;
        if (x > 0) lw += sys.west(x, y) * (c - (*w)(x - 1, y));
        if (x + 1 < width) lw += sys.east(x, y) * (c - (*w)(x + 1, y));
        if (y > 0) lw += sys.north(x, y) * (c - (*w)(x, y - 1));
        if (y + 1 < height) lw += sys.south(x, y) * (c - (*w)(x, y + 1));
        sys.rhs(x, y) -= lw;
      }
    }
  }
  return sys;
}

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

}  // namespace

CgResult cg_solve(const LinearSystem& system, double tol, int max_iter) {
  const std::size_t n = system.diag.size();
  CgResult result;
  result.x = DisparityField(system.width(), system.height());

  std::span<const double> b = system.rhs.samples();
  const double b_norm = std::sqrt(dot(b, b));
  if (!std::isfinite(b_norm)) throw NumericalError("non-finite right-hand side");
  result.residual_history.push_back(b_norm == 0.0 ? 0.0 : 1.0);
  result.energy_history.push_back(0.0);
  if (b_norm == 0.0) return result;

  std::vector<double> inv_diag(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double d = system.diag[i];
    if (!std::isfinite(d)) throw NumericalError("non-finite diagonal entry");
    inv_diag[i] = d > 0.0 ? 1.0 / d : 0.0;
  }

  std::span<double> x = result.x.samples();
  std::vector<double> r(b.begin(), b.end());
  std::vector<double> z(n);
  std::vector<double> p(n);
  std::vector<double> q(n);

  for (std::size_t i = 0; i < n; ++i) z[i] = inv_diag[i] * r[i];
  p = z;
  double rho = dot(r, z);
  double r_norm = b_norm;

  int k = 0;
  while (k < max_iter && r_norm > tol * b_norm) {
    system.apply(p, q);
    const double pq = dot(p, q);
    if (!std::isfinite(pq) || !std::isfinite(rho)) throw NumericalError("CG breakdown: non-finite");
    if (pq <= 0.0) break;  // direction carries no energy; x cannot improve
    const double step = rho / pq;
    for (std::size_t i = 0; i < n; ++i) {
      x[i] += step * p[i];
      r[i] -= step * q[i];
    }
    ++k;
    r_norm = std::sqrt(dot(r, r));
    if (!std::isfinite(r_norm)) throw NumericalError("CG breakdown: non-finite residual");
    // 0.5 x'Ax - b'x with Ax = b - r.
    double energy = 0.0;
    for (std::size_t i = 0; i < n; ++i) energy -= 0.5 * x[i] * (b[i] + r[i]);
    result.residual_history.push_back(r_norm / b_norm);
    result.energy_history.push_back(energy);

    for (std::size_t i = 0; i < n; ++i) z[i] = inv_diag[i] * r[i];
    const double rho_next = dot(r, z);
    const double beta = rho_next / rho;
    rho = rho_next;
    if (rho == 0.0) break;
    for (std::size_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
  }
  result.iterations = k;
  result.relative_residual = r_norm / b_norm;
  return result;
}

LimitResult limit_update(DisparityField dw, double M) {
  if (!(M > 0.0)) throw ParameterError("limit M must be > 0");
  LimitResult out{std::move(dw), false};
  for (double& v : out.dw.samples()) {
    if (v > M) {
      v = M;
      out.clipped = true;
    } else if (v < -M) {
      v = -M;
      out.clipped = true;
    }
  }
  return out;
}

DisparityField median_filter(const DisparityField& w, int radius) {
  if (radius < 0) throw ParameterError("median radius must be >= 0");
  if (radius == 0) return w;
  const int width = w.width();
  const int height = w.height();
  auto reflect = [](int i, int n) {
    // Half-sample symmetric, repeated for windows wider than the grid.
    const int period = 2 * n;
    i %= period;
    if (i < 0) i += period;
    return i < n ? i : period - i - 1;
  };
  DisparityField out(width, height);
  std::vector<double> window;
  window.reserve(static_cast<std::size_t>((2 * radius + 1) * (2 * radius + 1)));
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      window.clear();
      for (int dy = -radius; dy <= radius; ++dy) {
        const int yy = reflect(y + dy, height);
        for (int dx = -radius; dx <= radius; ++dx) window.push_back(w(reflect(x + dx, width), yy));
      }
      const auto mid = window.begin() + static_cast<std::ptrdiff_t>(window.size() / 2);
      std::nth_element(window.begin(), mid, window.end());
      out(x, y) = *mid;
    }
  }
  return out;
}

IterationReport solve_iteration(SolverState& state, const ViewSet& views, const ActiveSet& active,
                                const WeightProvider& weigh, const SolverConfig& cfg, double M,
                                const SolveHooks* hooks) {
  cfg.validate();
  if (!(M > 0.0)) throw ParameterError("limit M must be > 0");
  if (active.targets.empty()) throw ParameterError("no active targets");
  if (!state.w.same_shape(views.reference())) {
    throw DimensionError("disparity shape differs from the views");
  }

  std::vector<ImageGrid> warped;
  std::vector<Baseline> baselines;
  for (std::size_t idx : active.targets) {
    const TargetView& t = views.targets().at(idx);
    warped.push_back(warp_target(t.image, views.reference(), state.w, t.baseline));
    baselines.push_back(t.baseline);
  }
  const ScaleStack stack =
      build_scale_stack(views.reference(), warped, baselines, active.scales, active.with_base);

  const WeightField weights = weigh(stack, state.w);
  if (hooks && hooks->on_weights) hooks->on_weights(stack, weights);
  const DisparityField zero(stack.width, stack.height);
  const auto irls = irls_data_weights(stack, zero, cfg.irls_delta);
  const Couplings reg = irls_reg_weights(state.w, cfg.irls_delta);
  const LinearSystem system = assemble(weights, irls, stack, reg, cfg.alpha, &state.w);
  if (hooks && hooks->on_assembled) hooks->on_assembled(system);

  CgResult cg = cg_solve(system, cfg.cg_tol, cfg.cg_max_iter);
  ++state.solve_count;
  if (hooks && hooks->on_solved) hooks->on_solved(cg);

  IterationReport report;
  report.solve_count = state.solve_count;
  report.cg_iterations = cg.iterations;
  report.max_abs_dw = cg.x.max_abs();
  LimitResult limited = limit_update(std::move(cg.x), M);
  report.clipped = limited.clipped;

  DisparityField updated = state.w;
  for (std::size_t i = 0; i < updated.size(); ++i) updated[i] += limited.dw[i];

  double data = 0.0;
  for (std::size_t l = 0; l < stack.levels.size(); ++l) {
    const ScaleLevel& level = stack.levels[l];
    if (!level.active) continue;
    for (std::size_t t = 0; t < stack.target_count(); ++t) {
      const ImageGrid& W = weights.weights[l][t];
      for (std::size_t i = 0; i < updated.size(); ++i) {
        data += W[i] * std::abs(level.g[t][i] * limited.dw[i] + level.delta_I[t][i]);
      }
    }
  }
  report.linearised_energy = data + cfg.alpha * tv_energy(updated);

  state.w = median_filter(updated, cfg.median_radius);
  return report;
}

}  // namespace gcmd
