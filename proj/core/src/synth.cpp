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

#include "gcmd/synth.hpp"

#include <charconv>
#include <cmath>
#include <filesystem>
#include <iomanip>
#include <numbers>
#include <random>
#include <sstream>

#include "gcmd/errors.hpp"
#include "gcmd/pfm.hpp"

namespace gcmd {

namespace {

struct Wave {
  double kx;
  double ky;
  double phase;
};

std::vector<std::vector<Wave>> layer_textures(const SynthSpec& spec) {
  std::vector<std::vector<Wave>> out;
  out.reserve(spec.layers.size());
  const double log_lo = std::log(spec.lambda_min);
  const double log_hi = std::log(spec.lambda_max);
  for (const auto& layer : spec.layers) {
    std::mt19937_64 rng(layer.seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<Wave> waves;
    for (int k = 0; k < spec.components; ++k) {
      const double lambda = std::exp(log_lo + (log_hi - log_lo) * unit(rng));
      const double theta = std::numbers::pi * unit(rng);
      const double phase = 2.0 * std::numbers::pi * unit(rng);
      const double freq = 2.0 * std::numbers::pi / lambda;
      waves.push_back({freq * std::cos(theta), freq * std::sin(theta), phase});
    }
    out.push_back(std::move(waves));
  }
  return out;
}

double texture(const std::vector<Wave>& waves, double x, double y) {
  double v = 0.0;
  for (const auto& w : waves) v += std::sin(w.kx * x + w.ky * y + w.phase);
  return 0.5 + 0.3 / std::sqrt(static_cast<double>(waves.size())) * v;
}

// Index of the nearest layer covering reference-plane point p seen through baseline B.
int visible_layer(const SynthSpec& spec, const Baseline& b, double x, double y) {
  for (int l = static_cast<int>(spec.layers.size()) - 1; l > 0; --l) {
    const auto& layer = spec.layers[static_cast<std::size_t>(l)];
    if (layer.rect.contains(x - b.b1 * layer.disparity, y - b.b2 * layer.disparity)) return l;
  }
  return 0;
}

ImageGrid render(const SynthSpec& spec, const std::vector<std::vector<Wave>>& tex,
                 const Baseline& b, std::vector<int>* layer_ids) {
  ImageGrid img(spec.width, spec.height);
  if (layer_ids) layer_ids->assign(img.size(), 0);
  for (int y = 0; y < spec.height; ++y) {
    for (int x = 0; x < spec.width; ++x) {
      const int l = visible_layer(spec, b, x, y);
      const double w = spec.layers[static_cast<std::size_t>(l)].disparity;
      img(x, y) = texture(tex[static_cast<std::size_t>(l)], x - b.b1 * w, y - b.b2 * w);
      if (layer_ids) (*layer_ids)[static_cast<std::size_t>(y) * spec.width + x] = l;
    }
  }
  return img;
}

void add_noise(ImageGrid& img, double sigma, std::uint64_t seed, std::uint64_t stream) {
  if (sigma <= 0.0) return;
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream)};
  std::mt19937_64 rng(seq);
  std::normal_distribution<double> noise(0.0, sigma);
  for (double& v : img.samples()) v += noise(rng);
}

double number(std::string_view tok, std::size_t offset) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc{} || ptr != tok.data() + tok.size() || !std::isfinite(v)) {
    throw FormatError("expected a finite number, got '" + std::string(tok) + "'", offset);
  }
  return v;
}

std::uint64_t unsigned_number(std::string_view tok, std::size_t offset) {
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc{} || ptr != tok.data() + tok.size()) {
    throw FormatError("expected an unsigned integer, got '" + std::string(tok) + "'", offset);
  }
  return v;
}

int integer(std::string_view tok, std::size_t offset) {
  int v = 0;
  const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc{} || ptr != tok.data() + tok.size()) {
    throw FormatError("expected an integer, got '" + std::string(tok) + "'", offset);
  }
  return v;
}

}  // namespace

void SynthSpec::validate() const {
  if (width < 1 || height < 1) throw ParameterError("synthetic scene size must be positive");
  if (layers.empty()) throw ParameterError("synthetic scene needs at least one layer");
  for (const auto& l : layers) {
    const Rect& r = l.rect;
    if (!(r.x0 >= 0 && r.y0 >= 0 && r.x1 <= width && r.y1 <= height && r.x0 < r.x1 && r.y0 < r.y1)) {
      throw ParameterError("layer rectangle outside the frame or empty");
    }
    if (!std::isfinite(l.disparity)) throw ParameterError("layer disparity must be finite");
  }
  if (!(lambda_min >= 2.0 && lambda_max >= lambda_min) || components < 1) {
    throw ParameterError("texture band needs 2 <= lambda_min <= lambda_max and >= 1 component");
  }
  if (!(noise_sigma >= 0.0)) throw ParameterError("noise sigma must be >= 0");
  if (baselines.empty()) throw ParameterError("synthetic scene needs at least one view");
}

SynthSpec parse_synth_spec(std::string_view text) {
  SynthSpec spec;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    const std::size_t offset = pos;
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);

    std::vector<std::string_view> f;
    for (std::size_t i = 0; i < line.size();) {
      while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
      const std::size_t s = i;
      while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
      if (i > s) f.push_back(line.substr(s, i - s));
    }
    if (f.empty()) continue;

    auto want = [&](std::size_t lo, std::size_t hi) {
      if (f.size() - 1 < lo || f.size() - 1 > hi) {
        throw FormatError("wrong number of fields for '" + std::string(f[0]) + "'", offset);
      }
    };
    if (f[0] == "size") {
      want(2, 2);
      spec.width = integer(f[1], offset);
      spec.height = integer(f[2], offset);
    } else if (f[0] == "texture") {
      want(3, 3);
      spec.lambda_min = number(f[1], offset);
      spec.lambda_max = number(f[2], offset);
      spec.components = integer(f[3], offset);
    } else if (f[0] == "noise") {
      want(1, 2);
      spec.noise_sigma = number(f[1], offset);
      if (f.size() == 3) spec.noise_seed = unsigned_number(f[2], offset);
    } else if (f[0] == "layer") {
      want(6, 6);
      spec.layers.push_back({{number(f[1], offset), number(f[2], offset), number(f[3], offset),
                              number(f[4], offset)},
                             number(f[5], offset),
                             unsigned_number(f[6], offset)});
    } else if (f[0] == "view") {
      want(2, 2);
      spec.baselines.push_back({number(f[1], offset), number(f[2], offset)});
    } else {
      throw FormatError("unknown directive '" + std::string(f[0]) + "'", offset);
    }
  }
  return spec;
}

std::string format_synth_spec(const SynthSpec& spec) {
  std::ostringstream out;
  out << std::setprecision(17);
  out << "size " << spec.width << ' ' << spec.height << '\n';
  out << "texture " << spec.lambda_min << ' ' << spec.lambda_max << ' ' << spec.components << '\n';
  out << "noise " << spec.noise_sigma << ' ' << spec.noise_seed << '\n';
  for (const auto& l : spec.layers) {
    out << "layer " << l.rect.x0 << ' ' << l.rect.y0 << ' ' << l.rect.x1 << ' ' << l.rect.y1 << ' '
        << l.disparity << ' ' << l.seed << '\n';
  }
  for (const auto& b : spec.baselines) out << "view " << b.b1 << ' ' << b.b2 << '\n';
  return out.str();
}

ImageGrid render_view(const SynthSpec& spec, const Baseline& baseline, std::vector<int>* layer_ids) {
  spec.validate();
  return render(spec, layer_textures(spec), baseline, layer_ids);
}

DisparityField ground_truth(const SynthSpec& spec) {
  spec.validate();
  DisparityField gt(spec.width, spec.height);
  for (int y = 0; y < spec.height; ++y) {
    for (int x = 0; x < spec.width; ++x) {
      gt(x, y) = spec.layers[static_cast<std::size_t>(visible_layer(spec, {}, x, y))].disparity;
    }
  }
  return gt;
}

ViewSet synth_scene(const SynthSpec& spec) {
  spec.validate();
  const auto tex = layer_textures(spec);
  ImageGrid reference = render(spec, tex, {}, nullptr);
  add_noise(reference, spec.noise_sigma, spec.noise_seed, 0);
  std::vector<TargetView> targets;
  for (std::size_t i = 0; i < spec.baselines.size(); ++i) {
    ImageGrid img = render(spec, tex, spec.baselines[i], nullptr);
    add_noise(img, spec.noise_sigma, spec.noise_seed, i + 1);
    targets.push_back({"view_" + std::to_string(i), std::move(img), spec.baselines[i]});
  }
  return ViewSet(std::move(reference), std::move(targets), ground_truth(spec));
}

SceneManifest write_scene(const ViewSet& views, const std::filesystem::path& dir,
                          const std::string& dataset) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());

  SceneManifest m;
  m.dataset = dataset;
  m.base_dir = dir;
  m.reference = "ref.pfm";
  write_pfm_file(dir / m.reference, views.reference());
  for (std::size_t i = 0; i < views.targets().size(); ++i) {
    const auto& t = views.targets()[i];
    std::filesystem::path name = "view_" + std::to_string(i) + ".pfm";
    write_pfm_file(dir / name, t.image);
    m.views.push_back({name, t.baseline});
  }
  if (views.ground_truth()) {
    m.ground_truth = "gt.pfm";
    write_pfm_file(dir / *m.ground_truth, *views.ground_truth());
  }
  write_file(dir / "scene.txt", format_manifest(m));
  return m;
}

std::vector<Baseline> cross_hair(int arm) {
  if (arm < 1) throw ParameterError("cross-hair arm length must be >= 1");
  std::vector<Baseline> out;
  for (int k = 1; k <= arm; ++k) {
    out.push_back({double(k), 0.0});
    out.push_back({0.0, double(k)});
    out.push_back({-double(k), 0.0});
    out.push_back({0.0, -double(k)});
  }
  return out;
}

SynthSpec two_plane_spec(int width, int height, double w_far, double w_near,
                         std::vector<Baseline> baselines, std::uint64_t seed) {
  SynthSpec spec;
  spec.width = width;
  spec.height = height;
  spec.layers.push_back({{0.0, 0.0, double(width), double(height)}, w_far, seed});
  spec.layers.push_back({{std::round(width * 0.3), std::round(height * 0.3), std::round(width * 0.7),
                          std::round(height * 0.7)},
                         w_near,
                         seed + 1});
  spec.baselines = std::move(baselines);
  spec.noise_seed = seed;
  return spec;
}

}  // namespace gcmd
