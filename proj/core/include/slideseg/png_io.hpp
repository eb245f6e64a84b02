// Copyright 2026 The slideseg Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#pragma once

#include <filesystem>

#include "slideseg/raster.hpp"

namespace slideseg {

/// Default zlib level for PNG output.
inline constexpr int kDefaultPngLevel = 6;

/// Writes an 8-bit gray (1 channel) or RGB (3 channel) PNG.
void write_png(const std::filesystem::path& path, const Image& img,
               int compression_level = kDefaultPngLevel);

/// Reads an 8-bit PNG. Palette and low-bit-depth images are expanded; gray
/// stays 1 channel, RGB stays 3 channels; alpha is stripped.
Image read_png(const std::filesystem::path& path);

}  // namespace slideseg
