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
#include "slideseg/patch_extractor.hpp"

#include <algorithm>
#include <cstdio>
#include <cstring>

#include "slideseg/array_file.hpp"
#include "slideseg/png_io.hpp"

namespace slideseg {

std::string_view format_name(ImageFormat f) noexcept {
  return f == ImageFormat::kArray ? "array" : "png";
}

ImageFormat parse_format(std::string_view name) {
  if (name == "array" || name == "npy") return ImageFormat::kArray;
  if (name == "png") return ImageFormat::kPng;
  throw ParameterError("unknown intermediate format '" + std::string(name) + "'");
}

std::string_view format_extension(ImageFormat f) noexcept {
  return f == ImageFormat::kArray ? ".npy" : ".png";
}

Rgb padding_color(const Image& raster40) {
  if (raster40.width() < 2 || raster40.height() < 2 || raster40.channels() != 3) {
    throw ParameterError("padding_color needs an RGB slide of at least 2x2");
  }
  std::array<int, 3> mean{};
  for (int c = 0; c < 3; ++c) {
    const int sum = raster40.at(0, 0, c) + raster40.at(1, 0, c) + raster40.at(0, 1, c) +
                    raster40.at(1, 1, c);
    mean[c] = (sum + 2) / 4;
  }
  return Rgb{static_cast<std::uint8_t>(mean[0]), static_cast<std::uint8_t>(mean[1]),
             static_cast<std::uint8_t>(mean[2])};
}

PaddedSlide::PaddedSlide(const SlidePyramid& base, int pad, Rgb pad_color)
    : base_(&base), pad_(pad), pad_color_(pad_color) {
  if (pad < 0) throw ParameterError("pad must be non-negative");
}

Rgb PaddedSlide::pixel(int x, int y) const {
  const int sx = x - pad_;
  const int sy = y - pad_;
  const Image& b = base_->base();
  if (sx < 0 || sy < 0 || sx >= b.width() || sy >= b.height()) return pad_color_;
  return Rgb{b.at(sx, sy, 0), b.at(sx, sy, 1), b.at(sx, sy, 2)};
}

Image PaddedSlide::crop(int x, int y, int width, int height) const {
  Image out(width, height, 3);
  const Image& b = base_->base();
  // Columns of the crop that land inside the slide.
  const int sx0 = std::clamp(x - pad_, 0, b.width());
  const int sx1 = std::clamp(x - pad_ + width, 0, b.width());
  for (int row = 0; row < height; ++row) {
    std::uint8_t* dst = out.row(row);
    for (int col = 0; col < width; ++col) {
      dst[3 * col] = pad_color_.r;
      dst[3 * col + 1] = pad_color_.g;
      dst[3 * col + 2] = pad_color_.b;
    }
    const int sy = y - pad_ + row;
    if (sy < 0 || sy >= b.height() || sx0 >= sx1) continue;
    std::memcpy(dst + 3 * (sx0 - (x - pad_)), b.row(sy) + 3 * sx0,
                static_cast<std::size_t>(sx1 - sx0) * 3);
  }
  return out;
}

PaddedSlide pad_slide(const SlidePyramid& slide, int pad) {
  return PaddedSlide(slide, pad, padding_color(slide.base()));
}

PaddedSlide pad_slide(const SlidePyramid& slide, int pad, Rgb color) {
  return PaddedSlide(slide, pad, color);
}

std::vector<int> axis_origins(int extent, int window, int stride) {
  if (window <= 0 || stride <= 0) throw ParameterError("window and stride must be positive");
  if (stride > window) {
    throw ParameterError("stride " + std::to_string(stride) + " exceeds window " +
                         std::to_string(window) + " and would leave gaps");
  }
  if (window > extent) {
    throw ParameterError("window " + std::to_string(window) + " exceeds extent " +
                         std::to_string(extent));
  }
  std::vector<int> origins;
  const int last = extent - window;
  for (int o = 0; o < last; o += stride) origins.push_back(o);
  origins.push_back(last);
  return origins;
}

std::vector<PatchSite> select_patch_sites(const PaddedSlide& padded, const ForegroundMask& mask,
                                          const ExtractParams& params) {
  if (params.size <= 0 || params.stride <= 0) {
    throw ParameterError("patch size and stride must be positive");
  }
  if (params.stride > params.size) {
    throw ParameterError("patch stride exceeds patch size and would leave gaps");
  }
  if (params.size % params.stride != 0) {
    throw ParameterError("patch size must be a multiple of the patch stride");
  }
  const auto xs = axis_origins(padded.width(), params.size, params.stride);
  const auto ys = axis_origins(padded.height(), params.size, params.stride);
  std::vector<PatchSite> sites;
  for (std::size_t j = 0; j < ys.size(); ++j) {
    for (std::size_t i = 0; i < xs.size(); ++i) {
      const SlideRect rect{xs[i] - padded.pad(), ys[j] - padded.pad(), params.size,
                           params.size};
      if (region_is_tissue(mask, rect, params.min_fraction)) {
        sites.push_back(PatchSite{static_cast<int>(i), static_cast<int>(j), xs[i], ys[j]});
      }
    }
  }
  return sites;
}

std::vector<Patch> extract_patches(const PaddedSlide& padded, const ForegroundMask& mask,
                                   const ExtractParams& params) {
  std::vector<Patch> patches;
  for (const auto& site : select_patch_sites(padded, mask, params)) {
    patches.push_back(
        Patch{site, params.size, padded.crop(site.x, site.y, params.size, params.size)});
  }
  return patches;
}

std::string patch_filename(const PatchSite& site, ImageFormat format) {
  char buf[96];
  std::snprintf(buf, sizeof(buf), "patch_%04d_%04d_x%d_y%d", site.i, site.j, site.x, site.y);
  return std::string(buf) + std::string(format_extension(format));
}

void persist_image(const Image& img, const std::filesystem::path& path, ImageFormat format,
                   int png_level) {
  if (format == ImageFormat::kPng) {
    write_png(path, img, png_level);
  } else {
    write_array(path, to_array(img));
  }
}

Image load_image(const std::filesystem::path& path) {
  if (path.extension() == ".png") return read_png(path);
  return image_from_array(read_array(path));
}

std::filesystem::path persist_patch(const Patch& patch, const std::filesystem::path& dir,
                                    ImageFormat format, int png_level) {
  const auto path = dir / patch_filename(patch.site, format);
  try {
    persist_image(patch.pixels, path, format, png_level);
  } catch (const std::exception& e) {
    throw IoError("persist_patch '" + path.string() + "': " + e.what());
  }
  return path;
}

}  // namespace slideseg
