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
#include <string>
#include <vector>

#include "slideseg/backend.hpp"
#include "slideseg/raster.hpp"
#include "slideseg/tissue_detector.hpp"

namespace slideseg {

enum class ImageFormat { kArray, kPng };

std::string_view format_name(ImageFormat f) noexcept;
ImageFormat parse_format(std::string_view name);
std::string_view format_extension(ImageFormat f) noexcept;

/// Per-channel mean of the 2x2 top-left block, rounded half-up.
Rgb padding_color(const Image& raster40);

/// The 40x slide surrounded by pad pixels of pad_color on every side. The
/// padded raster is virtual: pixels are synthesised on crop.
class PaddedSlide {
 public:
  PaddedSlide(const SlidePyramid& base, int pad, Rgb pad_color);

  const SlidePyramid& base() const noexcept { return *base_; }
  int pad() const noexcept { return pad_; }
  Rgb pad_color() const noexcept { return pad_color_; }
  int width() const noexcept { return base_->width() + 2 * pad_; }
  int height() const noexcept { return base_->height() + 2 * pad_; }

  Rgb pixel(int x, int y) const;
  /// Copies a size x size RGB region with padded-space origin (x, y).
  Image crop(int x, int y, int width, int height) const;

 private:
  const SlidePyramid* base_;
  int pad_;
  Rgb pad_color_;
};

PaddedSlide pad_slide(const SlidePyramid& slide, int pad);
PaddedSlide pad_slide(const SlidePyramid& slide, int pad, Rgb color);

/// Origins along one axis: 0, stride, 2*stride, ... with the last origin
/// clamped to extent - window so it appears exactly once. Shared by patch
/// extraction and tile planning.
std::vector<int> axis_origins(int extent, int window, int stride);

struct PatchSite {
  int i = 0, j = 0;  // grid column, row
  int x = 0, y = 0;  // origin in padded 40x coordinates
};

struct Patch {
  PatchSite site;
  int size = 0;
  Image pixels;
};

struct ExtractParams {
  int size = 4096;
  int stride = 2048;
  double min_fraction = 0.01;
};

/// Grid sites whose footprint passes region_is_tissue, in row-major order.
std::vector<PatchSite> select_patch_sites(const PaddedSlide& padded, const ForegroundMask& mask,
                                          const ExtractParams& params);

/// select_patch_sites plus the pixel crops.
std::vector<Patch> extract_patches(const PaddedSlide& padded, const ForegroundMask& mask,
                                   const ExtractParams& params);

/// "patch_IIII_JJJJ_xX_yY" with the format's extension.
std::string patch_filename(const PatchSite& site, ImageFormat format);

std::filesystem::path persist_patch(const Patch& patch, const std::filesystem::path& dir,
                                    ImageFormat format = ImageFormat::kArray,
                                    int png_level = 6);

/// Loads an RGB or gray raster saved by persist_patch / persist_image.
Image load_image(const std::filesystem::path& path);
void persist_image(const Image& img, const std::filesystem::path& path, ImageFormat format,
                   int png_level = 6);

}  // namespace slideseg
