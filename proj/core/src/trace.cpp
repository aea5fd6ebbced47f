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

#include "gcmd/trace.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>

#include "gcmd/errors.hpp"
#include "gcmd/pfm.hpp"

namespace gcmd {

namespace {

std::string exact(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fixed(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string escape_xml(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

const char* const kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                "#9467bd", "#8c564b", "#e377c2", "#17becf"};

}  // namespace

std::string format_trace_csv(const std::vector<RunRecord>& records) {
  std::string out = "solve,rmse,method,scene,alpha\n";
  for (const auto& r : records) {
    const std::string tail = "," + r.method + "," + r.scene + "," + exact(r.alpha) + "\n";
    for (std::size_t i = 0; i < r.rmse_trace.size(); ++i) {
      out += std::to_string(i + 1) + "," + exact(r.rmse_trace[i]) + tail;
    }
  }
  return out;
}

std::vector<RunRecord> parse_trace_csv(std::string_view text) {
  std::vector<RunRecord> out;
  std::size_t pos = 0;
  bool header = true;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    const std::size_t offset = pos;
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    if (header) {
      if (line != "solve,rmse,method,scene,alpha") throw FormatError("unexpected trace header", offset);
      header = false;
      continue;
    }
    std::vector<std::string_view> f;
    for (std::size_t i = 0;;) {
      const std::size_t comma = line.find(',', i);
      f.push_back(line.substr(i, comma == std::string_view::npos ? std::string_view::npos : comma - i));
      if (comma == std::string_view::npos) break;
      i = comma + 1;
    }
    if (f.size() != 5) throw FormatError("trace row needs 5 fields", offset);
    long solve = 0;
    double value = 0.0;
    double alpha = 0.0;
    auto parse = [&](std::string_view tok, auto& v) {
      const auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
      if (ec != std::errc{} || p != tok.data() + tok.size()) {
        throw FormatError("malformed trace field '" + std::string(tok) + "'", offset);
      }
    };
    parse(f[0], solve);
    parse(f[1], value);
    parse(f[4], alpha);
    const std::string method(f[2]);
    const std::string scene(f[3]);
    if (solve == 1 || out.empty() || out.back().method != method || out.back().scene != scene ||
        out.back().alpha != alpha) {
      if (solve != 1) throw FormatError("trace rows must start at solve 1", offset);
      RunRecord r;
      r.method = method;
      r.scene = scene;
      r.alpha = alpha;
      out.push_back(std::move(r));
    } else if (static_cast<std::size_t>(solve) != out.back().rmse_trace.size() + 1) {
      throw FormatError("trace solves must be consecutive", offset);
    }
    out.back().rmse_trace.push_back(value);
    out.back().final_rmse = value;
  }
  return out;
}

std::string format_trace_svg(const std::vector<RunRecord>& records, const std::string& title) {
  // Per-method mean curve.
  std::vector<std::string> order;
  std::map<std::string, std::vector<const RunRecord*>> groups;
  for (const auto& r : records) {
    if (r.rmse_trace.empty()) continue;
    if (!groups.count(r.method)) order.push_back(r.method);
    groups[r.method].push_back(&r);
  }
  std::vector<std::vector<double>> curves;
  std::size_t max_len = 1;
  double lo = INFINITY;
  double hi = -INFINITY;
  for (const auto& m : order) {
    const auto& g = groups[m];
    std::size_t len = 0;
    for (const auto* r : g) len = std::max(len, r->rmse_trace.size());
    std::vector<double> c(len, 0.0);
    for (const auto* r : g) {
      for (std::size_t i = 0; i < len; ++i) c[i] += r->rmse_trace[std::min(i, r->rmse_trace.size() - 1)];
    }
    for (double& v : c) {
      v /= static_cast<double>(g.size());
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    max_len = std::max(max_len, len);
    curves.push_back(std::move(c));
  }
  if (curves.empty()) {
    lo = 0.0;
    hi = 1.0;
  }
  if (hi - lo < 1e-12) {
    lo -= 0.5;
    hi += 0.5;
  }

  const double width = 640;
  const double height = 400;
  const double left = 70;
  const double right = 150;
  const double top = 40;
  const double bottom = 50;
  const double plot_w = width - left - right;
  const double plot_h = height - top - bottom;
  const double xmax = std::log10(static_cast<double>(std::max<std::size_t>(max_len, 2)));
  auto px = [&](std::size_t solve) { return left + plot_w * std::log10(static_cast<double>(solve)) / xmax; };
  auto py = [&](double v) { return top + plot_h * (hi - v) / (hi - lo); };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
      << "\" viewBox=\"0 0 " << width << ' ' << height << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  if (!title.empty()) {
    svg << "<text x=\"" << left + plot_w / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"14\">"
        << escape_xml(title) << "</text>\n";
  }
  svg << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << plot_w << "\" height=\"" << plot_h
      << "\" fill=\"none\" stroke=\"black\"/>\n";

  for (std::size_t decade = 1; decade <= max_len; decade *= 10) {
    const double x = px(decade);
    svg << "<line x1=\"" << fixed(x) << "\" y1=\"" << top << "\" x2=\"" << fixed(x) << "\" y2=\""
        << top + plot_h << "\" stroke=\"#ddd\"/>\n";
    svg << "<text x=\"" << fixed(x) << "\" y=\"" << top + plot_h + 16 << "\" text-anchor=\"middle\">"
        << decade << "</text>\n";
  }
  for (int k = 0; k <= 4; ++k) {
    const double v = lo + (hi - lo) * k / 4.0;
    svg << "<text x=\"" << left - 6 << "\" y=\"" << fixed(py(v) + 4) << "\" text-anchor=\"end\">"
        << exact(std::round(v * 1e4) / 1e4) << "</text>\n";
  }
  svg << "<text x=\"" << left + plot_w / 2 << "\" y=\"" << height - 12
      << "\" text-anchor=\"middle\">solves (log scale)</text>\n";
  svg << "<text x=\"16\" y=\"" << top + plot_h / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
      << top + plot_h / 2 << ")\">RMSE</text>\n";

  for (std::size_t m = 0; m < curves.size(); ++m) {
    const char* colour = kPalette[m % std::size(kPalette)];
    svg << "<polyline fill=\"none\" stroke=\"" << colour << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < curves[m].size(); ++i) {
      if (i) svg << ' ';
      svg << fixed(px(i + 1)) << ',' << fixed(py(curves[m][i]));
    }
    svg << "\"/>\n";
    const double ly = top + 16 + 18 * static_cast<double>(m);
    svg << "<line x1=\"" << left + plot_w + 10 << "\" y1=\"" << ly << "\" x2=\"" << left + plot_w + 30
        << "\" y2=\"" << ly << "\" stroke=\"" << colour << "\" stroke-width=\"2\"/>\n";
    svg << "<text x=\"" << left + plot_w + 36 << "\" y=\"" << ly + 4 << "\">" << escape_xml(order[m])
        << "</text>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

void emit_trace(const std::vector<RunRecord>& records, const std::filesystem::path& csv_path,
                const std::string& title) {
  if (records.empty()) throw ConfigError("emit_trace: no records");
  write_file(csv_path, format_trace_csv(records));
  std::filesystem::path svg_path = csv_path;
  svg_path.replace_extension(".svg");
  write_file(svg_path, format_trace_svg(records, title));
}

}  // namespace gcmd
