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

// Raster codecs: Portable Float Map (read/write) and 8/16-bit binary PGM/PPM (read).
//
// PFM layout: "Pf" (1 channel) or "PF" (3 channels), whitespace, "width height",
// whitespace, scale, one whitespace byte, then 32-bit floats. A negative scale
// means little-endian samples, a positive one big-endian. Rows are stored
// bottom-to-top. Colour inputs are reduced to BT.601 luminance.

#include <filesystem>
#include <string>
#include <string_view>

#include "gcmd/grid.hpp"

namespace gcmd {

/// Throws FormatError (with the byte offset) on a bad magic, bad dimensions,
/// zero scale, truncated payload or non-finite sample.
ImageGrid read_pfm(std::string_view bytes);

/// Single-channel PFM, scale -1.0 (little-endian).
std::string write_pfm(const ImageGrid& grid);

/// Binary P5 (grey) or P6 (colour) with maxval up to 65535, scaled to [0, 1].
ImageGrid read_pnm(std::string_view bytes);

/// Whole file as bytes. Throws IoError.
std::string read_file(const std::filesystem::path& path);
/// Throws IoError.
void write_file(const std::filesystem::path& path, std::string_view bytes);

/// Dispatches on the magic: PFM, PGM or PPM.
ImageGrid read_image(const std::filesystem::path& path);
void write_pfm_file(const std::filesystem::path& path, const ImageGrid& grid);

}  // namespace gcmd
