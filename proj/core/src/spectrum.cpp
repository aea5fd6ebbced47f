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

#include "gcmd/spectrum.hpp"

#include <fftw3.h>

#include <cmath>
#include <complex>
#include <memory>
#include <numbers>
#include <vector>

#include "gcmd/errors.hpp"

namespace gcmd {

namespace {

constexpr double kGradientSigma = 0.70710678118654752440;

struct FftwFree {
  void operator()(void* p) const noexcept { fftw_free(p); }
};
using Buffer = std::unique_ptr<fftw_complex[], FftwFree>;

Buffer allocate(std::size_t count) {
  auto* p = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * count));
  if (!p) throw std::bad_alloc();
  return Buffer(p);
}

// Lag-domain values f(u) = (1/n^2) sum_j F(omega_j) exp(i omega_j . u) for
// signed lags u in [-n/2, n/2), returned in FFT order (index k <-> u = k or k - n).
std::vector<double> lag_values(const std::vector<double>& spectrum, int n) {
  const std::size_t total = static_cast<std::size_t>(n) * static_cast<std::size_t>(n);
  Buffer in = allocate(total);
  Buffer out = allocate(total);
  for (std::size_t i = 0; i < total; ++i) {
    in[i][0] = spectrum[i];
    in[i][1] = 0.0;
  }
  fftw_plan plan = fftw_plan_dft_2d(n, n, in.get(), out.get(), FFTW_BACKWARD, FFTW_ESTIMATE);
  fftw_execute(plan);
  fftw_destroy_plan(plan);

  // omega_j = 2 pi j / n + shift, so each lag picks up exp(i shift u).
  const double shift = -std::numbers::pi + std::numbers::pi / n;
  std::vector<std::complex<double>> phase(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) {
    const int u = k < n / 2 ? k : k - n;
    phase[static_cast<std::size_t>(k)] = std::polar(1.0, shift * u);
  }
  const double norm = 1.0 / static_cast<double>(total);
  std::vector<double> lags(total);
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) {
      const std::size_t i = static_cast<std::size_t>(r) * n + c;
      const std::complex<double> v(out[i][0], out[i][1]);
      lags[i] = (v * phase[static_cast<std::size_t>(r)] * phase[static_cast<std::size_t>(c)]).real() * norm;
    }
  }
  return lags;
}

}  // namespace

std::string_view to_string(SpectrumModel m) noexcept {
  switch (m) {
    case SpectrumModel::white: return "white";
    case SpectrumModel::inv_f: return "1/f";
    case SpectrumModel::inv_f2: return "1/f2";
    case SpectrumModel::inv_f3: return "1/f3";
  }
  return "?";
}

SpectrumModel parse_spectrum_model(std::string_view name) {
  if (name == "white") return SpectrumModel::white;
  if (name == "1/f" || name == "1/f1") return SpectrumModel::inv_f;
  if (name == "1/f2" || name == "1/f^2") return SpectrumModel::inv_f2;
  if (name == "1/f3" || name == "1/f^3") return SpectrumModel::inv_f3;
  throw ConfigError("unknown spectrum model '" + std::string(name) +
                    "' (expected white, 1/f, 1/f2, 1/f3)");
}

int spectrum_exponent(SpectrumModel m) noexcept {
  switch (m) {
    case SpectrumModel::white: return 0;
    case SpectrumModel::inv_f: return 1;
    case SpectrumModel::inv_f2: return 2;
    case SpectrumModel::inv_f3: return 3;
  }
  return 0;
}

SpectrumPowers spectrum_powers(double sigma, SpectrumModel model, int n) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) throw ParameterError("spectrum: sigma must be > 0");
  if (n < 16 || n % 2 != 0) throw ParameterError("spectrum: grid size must be even and >= 16");

  const std::size_t total = static_cast<std::size_t>(n) * static_cast<std::size_t>(n);
  const double step = 2.0 * std::numbers::pi / n;
  const int exponent = spectrum_exponent(model);
  const double s0sq = kGradientSigma * kGradientSigma;
  const double ssq = sigma * sigma;

  std::vector<double> grad_power(total);   // spectrum of g
  std::vector<double> smooth_power(total); // |G^|^2
  double var_g = 0.0;          // E[g^2]
  double var_smoothed = 0.0;   // E[(G*g)^2]
  double cross = 0.0;          // E[g (G*g)]
  for (int r = 0; r < n; ++r) {
    const double w2 = -std::numbers::pi + (r + 0.5) * step;
    for (int c = 0; c < n; ++c) {
      const double w1 = -std::numbers::pi + (c + 0.5) * step;
      const double rsq = w1 * w1 + w2 * w2;
      const double image = exponent == 0 ? 1.0 : std::pow(rsq, -0.5 * exponent);
      const double pg = w1 * w1 * std::exp(-s0sq * rsq) * image;
      const double gain = std::exp(-0.5 * ssq * rsq);
      const std::size_t i = static_cast<std::size_t>(r) * n + c;
      grad_power[i] = pg;
      smooth_power[i] = gain * gain;
      var_g += pg;
      var_smoothed += gain * gain * pg;
      cross += gain * pg;
    }
  }
  var_g /= static_cast<double>(total);
  var_smoothed /= static_cast<double>(total);
  cross /= static_cast<double>(total);

  // Gaussian moment identity: E[x^2 y^2] = E[x^2] E[y^2] + 2 E[xy]^2.
  const std::vector<double> cov = lag_values(grad_power, n);
  const std::vector<double> kern = lag_values(smooth_power, n);
  double lag_sum = 0.0;
  for (std::size_t i = 0; i < total; ++i) lag_sum += kern[i] * cov[i] * cov[i];

  SpectrumPowers p;
  p.power_a = var_g * var_g + 2.0 * lag_sum;
  p.power_b = var_g * var_smoothed + 2.0 * cross * cross;
  return p;
}

double spectrum_ratio(double sigma, SpectrumModel model, int n) {
  return spectrum_powers(sigma, model, n).ratio();
}

}  // namespace gcmd
