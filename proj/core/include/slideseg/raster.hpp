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

#include <array>
#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "slideseg/error.hpp"

namespace slideseg {

class Backend;

/// Interleaved row-major raster. Channels are innermost, so an RGB pixel at
/// (x, y) occupies data()[(y * width + x) * 3 + c].
template <typename T>
class Raster {
 public:
  using value_type = T;

  Raster() = default;
  Raster(int width, int height, int channels = 1, T fill = T{})
      : width_(width), height_(height), channels_(channels) {
    if (width < 0 || height < 0 || channels <= 0) {
      throw ParameterError("raster dimensions must be non-negative");
    }
    data_.assign(static_cast<std::size_t>(width) * height * channels, fill);
  }

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  int channels() const noexcept { return channels_; }
  bool empty() const noexcept { return data_.empty(); }
  std::size_t pixel_count() const noexcept {
    return static_cast<std::size_t>(width_) * height_;
  }
  std::size_t row_elems() const noexcept {
    return static_cast<std::size_t>(width_) * channels_;
  }

  T* row(int y) noexcept { return data_.data() + y * row_elems(); }
  const T* row(int y) const noexcept { return data_.data() + y * row_elems(); }

  T& at(int x, int y, int c = 0) noexcept {
    return data_[(static_cast<std::size_t>(y) * width_ + x) * channels_ + c];
  }
  const T& at(int x, int y, int c = 0) const noexcept {
    return data_[(static_cast<std::size_t>(y) * width_ + x) * channels_ + c];
  }

  std::span<T> data() noexcept { return data_; }
  std::span<const T> data() const noexcept { return data_; }
  std::vector<T>& storage() noexcept { return data_; }

  bool operator==(const Raster&) const = default;

 private:
  int width_ = 0;
  int height_ = 0;
  int channels_ = 1;
  std::vector<T> data_;
};

using Image = Raster<std::uint8_t>;       // 8-bit, 1 or 3 channels
using Counter = Raster<std::uint16_t>;    // vote/coverage counters

/// Non-owning window into an 8-bit raster. stride is in elements.
struct ImageView {
  const std::uint8_t* data = nullptr;
  int width = 0;
  int height = 0;
  int channels = 1;
  std::ptrdiff_t stride = 0;

  const std::uint8_t* row(int y) const noexcept { return data + y * stride; }
};

ImageView view(const Image& img);
ImageView view(const Image& img, int x, int y, int width, int height);
Image copy_view(const ImageView& v);

struct Rgb {
  std::uint8_t r = 0, g = 0, b = 0;
  bool operator==(const Rgb&) const = default;
};

// --- magnification -----------------------------------------------------------

enum class Magnification : std::uint8_t { k40 = 40, k10 = 10, k5 = 5 };

inline constexpr std::array<Magnification, 3> kMagnifications = {
    Magnification::k40, Magnification::k10, Magnification::k5};

/// Linear downsample factor relative to 40x: 1, 4 or 8.
constexpr int scale_factor(Magnification m) noexcept {
  switch (m) {
    case Magnification::k40: return 1;
    case Magnification::k10: return 4;
    case Magnification::k5: return 8;
  }
  return 1;
}
constexpr int mag_value(Magnification m) noexcept { return static_cast<int>(m); }
Magnification parse_magnification(int value);

constexpr int ceil_div(int a, int b) noexcept { return (a + b - 1) / b; }

// --- tissue classes ----------------------------------------------------------

enum class TissueClass : std::uint8_t { TUFT = 0, CAP, PT, DT, PTC, VES };

inline constexpr std::array<TissueClass, 6> kTissueClasses = {
    TissueClass::TUFT, TissueClass::CAP, TissueClass::PT,
    TissueClass::DT,   TissueClass::PTC, TissueClass::VES};

constexpr int class_index(TissueClass c) noexcept { return static_cast<int>(c); }
std::string_view class_name(TissueClass c) noexcept;
TissueClass parse_class(std::string_view name);

// --- pyramid -----------------------------------------------------------------

/// Multi-resolution RGB slide. All levels derive from the 40x raster.
struct SlidePyramid {
  std::map<Magnification, Image> levels;
  double mpp40 = 0.25;

  const Image& level(Magnification m) const;
  const Image& base() const { return level(Magnification::k40); }
  int width() const { return base().width(); }
  int height() const { return base().height(); }
};

/// Binary (0/1) per-class masks at 40x extent.
struct GroundTruth {
  std::map<TissueClass, Image> masks;
};

/// Area-average downsample by an integer factor. Output is ceil(dim / factor);
/// partial edge blocks average over the pixels they contain. Each channel mean
/// is rounded half-up.
Image downsample_area(const Image& src, int factor);
Image downsample_area(const Image& src, int factor, const Backend& backend);

/// Nearest-neighbour upsample by an integer factor (pixel replication).
Image upsample_nearest(const Image& src, int factor);

SlidePyramid build_pyramid(Image raster40, double mpp40 = 0.25);
SlidePyramid build_pyramid(Image raster40, double mpp40, const Backend& backend);

}  // namespace slideseg
