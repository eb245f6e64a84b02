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
#include <map>
#include <string>

#include "slideseg/raster.hpp"

namespace slideseg {

/// Parses UTF-8 "key=value" lines. Blank lines and lines starting with '#'
/// are ignored; whitespace around keys and values is trimmed.
std::map<std::string, std::string> parse_key_values(const std::string& text);
std::map<std::string, std::string> read_key_values(const std::filesystem::path& path);

/// Sidecar metadata path: the slide path with its extension replaced by ".meta".
std::filesystem::path sidecar_path(const std::filesystem::path& slide);

struct LoadedSlide {
  Image raster40;
  double mpp40 = 0.25;
};

/// Loads a single-level 40x RGB slide from PNG or an array file (u8, H x W x 3).
/// mpp40 comes from the sidecar when present.
LoadedSlide load_slide(const std::filesystem::path& path);

/// Writes the raster (format chosen by extension: .png or .npy) plus sidecar.
void save_slide(const std::filesystem::path& path, const Image& raster40,
                double mpp40 = 0.25);

/// Loads an 8-bit single-channel mask from .npy or .png.
Image load_mask(const std::filesystem::path& path);

}  // namespace slideseg
