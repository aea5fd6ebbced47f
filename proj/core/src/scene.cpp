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

#include "gcmd/scene.hpp"

#include <charconv>
#include <cmath>
#include <iomanip>
#include <sstream>

#include "gcmd/errors.hpp"
#include "gcmd/pfm.hpp"
#include "gcmd/schedule.hpp"

namespace gcmd {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
    const std::size_t start = i;
    while (i < s.size() && s[i] != ' ' && s[i] != '\t') ++i;
    if (i > start) out.push_back(s.substr(start, i - start));
  }
  return out;
}

double number(std::string_view tok, std::size_t offset) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc{} || ptr != tok.data() + tok.size() || !std::isfinite(v)) {
    throw FormatError("expected a finite number, got '" + std::string(tok) + "'", offset);
  }
  return v;
}

std::filesystem::path resolve(const SceneManifest& m, const std::filesystem::path& p) {
  return p.is_absolute() || m.base_dir.empty() ? p : m.base_dir / p;
}

ImageGrid load(const std::filesystem::path& path) {
  try {
    return read_image(path);
  } catch (const Error& e) {
    throw LoadError(path.string(), e.what());
  }
}

}  // namespace

SceneManifest parse_manifest(std::string_view text, const std::filesystem::path& base_dir) {
  SceneManifest m;
  m.base_dir = base_dir;
  bool have_ref = false;
  bool have_scale = false;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    const std::size_t offset = pos;
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;

    const auto key_end = line.find_first_of(" \t");
    const std::string_view key = line.substr(0, key_end);
    const std::string_view rest =
        key_end == std::string_view::npos ? std::string_view{} : trim(line.substr(key_end));
    if (rest.empty()) throw FormatError("'" + std::string(key) + "' needs a value", offset);

    if (key == "ref") {
      if (have_ref) throw FormatError("duplicate 'ref'", offset);
      m.reference = std::string(rest);
      have_ref = true;
    } else if (key == "gt") {
      if (m.ground_truth) throw FormatError("duplicate 'gt'", offset);
      m.ground_truth = std::filesystem::path(std::string(rest));
    } else if (key == "scale") {
      if (have_scale) throw FormatError("duplicate 'scale'", offset);
      m.scale = number(rest, offset);
      have_scale = true;
    } else if (key == "dataset") {
      m.dataset = std::string(rest);
    } else if (key == "view") {
      const auto fields = split(rest);
      if (fields.size() < 3) throw FormatError("'view' needs <path> <b1> <b2>", offset);
      const std::string_view b1 = fields[fields.size() - 2];
      const std::string_view b2 = fields.back();
      const std::string_view path = trim(rest.substr(0, static_cast<std::size_t>(b1.data() - rest.data())));
      m.views.push_back({std::string(path), {number(b1, offset), number(b2, offset)}});
    } else {
      throw FormatError("unknown manifest key '" + std::string(key) + "'", offset);
    }
  }
  if (!have_ref) throw FormatError("manifest has no 'ref' line", text.size());
  return m;
}

SceneManifest read_manifest(const std::filesystem::path& path) {
  std::string text;
  try {
    text = read_file(path);
  } catch (const IoError& e) {
    throw LoadError(path.string(), e.what());
  }
  try {
    return parse_manifest(text, path.parent_path());
  } catch (const FormatError& e) {
    throw LoadError(path.string(), e.what());
  }
}

std::string format_manifest(const SceneManifest& m) {
  std::ostringstream out;
  out << std::setprecision(17);
  if (!m.dataset.empty()) out << "dataset " << m.dataset << '\n';
  out << "ref " << m.reference.string() << '\n';
  for (const auto& v : m.views) {
    out << "view " << v.path.string() << ' ' << v.baseline.b1 << ' ' << v.baseline.b2 << '\n';
  }
  if (m.ground_truth) out << "gt " << m.ground_truth->string() << '\n';
  if (m.scale != 1.0) out << "scale " << m.scale << '\n';
  return out.str();
}

ViewSet load_scene(const SceneManifest& m) {
  const auto ref_path = resolve(m, m.reference);
  ImageGrid reference = load(ref_path);

  std::vector<TargetView> targets;
  targets.reserve(m.views.size());
  for (const auto& v : m.views) {
    const auto path = resolve(m, v.path);
    ImageGrid image = load(path);
    if (!image.same_shape(reference)) {
      throw LoadError(path.string(), "size " + std::to_string(image.width()) + "x" +
                                         std::to_string(image.height()) +
                                         " differs from the reference");
    }
    targets.push_back({v.path.stem().string(), std::move(image), v.baseline});
  }

  std::optional<DisparityField> gt;
  if (m.ground_truth) {
    const auto path = resolve(m, *m.ground_truth);
    ImageGrid g = load(path);
    if (!g.same_shape(reference)) throw LoadError(path.string(), "ground truth size differs from the reference");
    for (double& x : g.samples()) x *= m.scale;
    gt = DisparityField(std::move(g));
  }

  try {
    return normalise_baselines(ViewSet(std::move(reference), std::move(targets), std::move(gt)));
  } catch (const ParameterError& e) {
    throw LoadError(ref_path.string(), e.what());
  }
}

}  // namespace gcmd
