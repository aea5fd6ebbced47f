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

// One variational iteration: warp the targets by the current disparity,
// rebuild the scale stack, reweight (IRLS for the L1 data term and the TV
// regulariser), assemble the 5-point normal equations, solve them with
// Jacobi-preconditioned conjugate gradients, limit and median-filter.

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "gcmd/filtering.hpp"
#include "gcmd/gcm.hpp"
#include "gcmd/grid.hpp"

namespace gcmd {

struct SolverConfig {
  double alpha = 0.5;        // regularisation weight
  double cg_tol = 1e-6;      // relative residual
  int cg_max_iter = 2000;
  double irls_delta = 1e-3;  // Charbonnier constant for data and regulariser
  int median_radius = 2;     // 2 -> 5x5 window

  /// Throws ParameterError on alpha < 0, cg_tol outside (0,1), irls_delta <= 0, ...
  void validate() const;
};

/// Symmetric 5-point system. Off-diagonal entries are -coupling; a coupling
/// to a neighbour outside the grid is zero.
struct LinearSystem {
  ImageGrid diag;
  ImageGrid north;  // to (x, y-1)
  ImageGrid south;  // to (x, y+1)
  ImageGrid east;   // to (x+1, y)
  ImageGrid west;   // to (x-1, y)
  ImageGrid rhs;

  int width() const noexcept { return diag.width(); }
  int height() const noexcept { return diag.height(); }

  /// y = A x.
  void apply(std::span<const double> x, std::span<double> y) const;
  /// Mirror-matching couplings (east(x,y) == west(x+1,y), south(x,y) == north(x,y+1)).
  bool is_symmetric() const;
  /// diag >= sum of |off-diagonals| at every pixel.
  bool is_diagonally_dominant() const;
};

/// Neighbour weights of the lagged-diffusivity TV reweighting.
struct Couplings {
  ImageGrid north, south, east, west;
};

struct CgResult {
  DisparityField x;
  int iterations = 0;
  double relative_residual = 0.0;
  std::vector<double> residual_history;  // ||r_k|| / ||b||, k = 0..iterations
  std::vector<double> energy_history;    // 0.5 x'Ax - b'x, k = 0..iterations
};

struct IterationReport {
  int solve_count = 0;
  double linearised_energy = 0.0;
  double max_abs_dw = 0.0;  // before limiting
  bool clipped = false;
  int cg_iterations = 0;
};

/// target(s + B w(s)) by bilinear interpolation; samples whose source falls
/// outside the image rectangle are copied from the reference.
ImageGrid warp_target(const ImageGrid& target, const ImageGrid& reference, const DisparityField& w,
                      const Baseline& baseline);

/// Point-wise minimiser of the weighted data term with no regulariser:
/// -sum W g dI / sum W g^2 over the active levels (denominator floored at 1e-12).
DisparityField closed_form_update(const WeightField& weights, const ScaleStack& stack);

/// R_{t,q} = 1 / sqrt((g dw + dI)^2 + delta^2), per active level and target.
std::vector<std::vector<ImageGrid>> irls_data_weights(const ScaleStack& stack,
                                                      const DisparityField& dw, double delta);

/// Lagged-diffusivity weights d(s) = 1 / sqrt(|grad w|^2 + delta^2) from forward
/// differences; the edge (s, s+e) gets d(s), mirrored onto the neighbour.
Couplings irls_reg_weights(const DisparityField& w, double delta);

/// Discrete TV: sum_s |forward-difference gradient of w at s|.
double tv_energy(const DisparityField& w);

/// diag = sum W R g^2 + alpha * sum couplings, off-diagonals -alpha * couplings,
/// rhs = -sum W R g dI - alpha * L w, where L is the coupling-weighted Laplacian
/// acting on the current disparity `w` (omit `w` for a zero field).
LinearSystem assemble(const WeightField& weights, const std::vector<std::vector<ImageGrid>>& irls,
                      const ScaleStack& stack, const Couplings& reg, double alpha,
                      const DisparityField* w = nullptr);

/// Jacobi-preconditioned CG from a zero initial guess. Stops when
/// ||b - A x|| <= tol ||b|| or after max_iter iterations.
/// Throws NumericalError on non-finite values.
CgResult cg_solve(const LinearSystem& system, double tol, int max_iter);

struct LimitResult {
  DisparityField dw;
  bool clipped = false;
};

/// Clamps each value to [-M, M]. Throws ParameterError unless M > 0.
LimitResult limit_update(DisparityField dw, double M);

/// Median over the (2r+1)^2 window with half-sample symmetric extension.
DisparityField median_filter(const DisparityField& w, int radius = 2);

/// Which views and scales take part in a solve.
struct ActiveSet {
  std::vector<std::size_t> targets;  // indices into ViewSet::targets()
  std::vector<int> scales;
  bool with_base = false;  // also build an inactive q = 0 level (needed by the GCM weights)
};

using WeightProvider = std::function<WeightField(const ScaleStack&, const DisparityField&)>;

/// Optional observers, e.g. for instrumented tests.
struct SolveHooks {
  std::function<void(const ScaleStack&, const WeightField&)> on_weights;
  std::function<void(const LinearSystem&)> on_assembled;
  std::function<void(const CgResult&)> on_solved;
};

struct SolverState {
  DisparityField w;
  int solve_count = 0;
};

/// One counted solve: warp, rebuild the stack, weigh, reweight, assemble, CG,
/// limit to [-M, M], w += dw, median filter. Increments state.solve_count by one.
IterationReport solve_iteration(SolverState& state, const ViewSet& views, const ActiveSet& active,
                                const WeightProvider& weigh, const SolverConfig& cfg, double M,
                                const SolveHooks* hooks = nullptr);

}  // namespace gcmd
