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

// Convergence traces: CSV (one row per solve) and a self-contained SVG chart
// of RMSE against solve count on a log-scaled x axis, one line per method.

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "gcmd/metrics.hpp"

namespace gcmd {

/// Header `solve,rmse,method,scene,alpha`; solves count from 1; 17 significant digits.
std::string format_trace_csv(const std::vector<RunRecord>& records);
/// Rebuilds records (scene, method, alpha, rmse_trace, final_rmse) from CSV text.
/// Throws FormatError on a bad header or row.
std::vector<RunRecord> parse_trace_csv(std::string_view text);

/// Records of one method are averaged per solve (shorter traces padded with
/// their final value) into a single polyline.
std::string format_trace_svg(const std::vector<RunRecord>& records, const std::string& title = {});

/// Writes `csv_path` and the same path with extension .svg.
/// Throws ConfigError for empty records, IoError if a file cannot be written.
void emit_trace(const std::vector<RunRecord>& records, const std::filesystem::path& csv_path,
                const std::string& title = {});

}  // namespace gcmd
