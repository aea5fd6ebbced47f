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

// Expected power of the two terms of the scale-inconsistency bound when the
// residual field is proportional to the gradient signal g:
//   A(s) = (G * g^2)(s)         B(s) = g(s) (G * g)(s)
// with g a stationary Gaussian field on the pixel lattice whose spectrum is a
// derivative-of-Gaussian response (sigma = 1/sqrt(2), along s1) applied to a
// model image spectrum. Frequencies are limited to [-pi, pi]^2.

#include <string>
#include <string_view>

namespace gcmd {

enum class SpectrumModel { white, inv_f, inv_f2, inv_f3 };

std::string_view to_string(SpectrumModel m) noexcept;
/// Accepts white, 1/f, 1/f2 (or 1/f^2), 1/f3 (or 1/f^3). Throws ConfigError.
SpectrumModel parse_spectrum_model(std::string_view name);
/// 0, 1, 2, 3: the image spectrum falls as 1/|omega|^exponent.
int spectrum_exponent(SpectrumModel m) noexcept;

struct SpectrumPowers {
  double power_a = 0.0;  // E[A^2]
  double power_b = 0.0;  // E[B^2]
  double ratio() const noexcept { return power_a / power_b; }
};

/// Midpoint rule on an n x n frequency grid; lag sums via FFT.
/// Throws ParameterError for sigma <= 0, odd n, or n < 16.
SpectrumPowers spectrum_powers(double sigma, SpectrumModel model, int n = 1024);
double spectrum_ratio(double sigma, SpectrumModel model, int n = 1024);

}  // namespace gcmd
