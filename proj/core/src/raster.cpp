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
#include "slideseg/raster.hpp"

#include <algorithm>
#include <cstring>

#include "slideseg/backend.hpp"

namespace slideseg {

ImageView view(const Image& img) {
  return view(img, 0, 0, img.width(), img.height());
}

ImageView view(const Image& img, int x, int y, int width, int height) {
  if (x < 0 || y < 0 || width < 0 || height < 0 || x + width > img.width() ||
      y + height > img.height()) {
    throw ParameterError("view out of raster bounds");
  }
  ImageView v;
  v.data = img.data().data() +
           (static_cast<std::size_t>(y) * img.width() + x) * img.channels();
  v.width = width;
  v.height = height;
  v.channels = img.channels();
  v.stride = static_cast<std::ptrdiff_t>(img.row_elems());
  return v;
}

Image copy_view(const ImageView& v) {
  Image out(v.width, v.height, v.channels);
  const std::size_t row_bytes = static_cast<std::size_t>(v.width) * v.channels;
  for (int y = 0; y < v.height; ++y) {
    std::memcpy(out.row(y), v.row(y), row_bytes);
  }
  return out;
}

Magnification parse_magnification(int value) {
  switch (value) {
    case 40: return Magnification::k40;
    case 10: return Magnification::k10;
    case 5: return Magnification::k5;
    default:
      throw ParameterError("magnification must be one of 40, 10, 5; got " +
                           std::to_string(value));
  }
}

std::string_view class_name(TissueClass c) noexcept {
  static constexpr std::array<std::string_view, 6> kNames = {
      "TUFT", "CAP", "PT", "DT", "PTC", "VES"};
  return kNames[class_index(c)];
}

TissueClass parse_class(std::string_view name) {
  for (TissueClass c : kTissueClasses) {
    if (class_name(c) == name) return c;
  }
  throw ParameterError("unknown tissue class '" + std::string(name) + "'");
}

const Image& SlidePyramid::level(Magnification m) const {
  auto it = levels.find(m);
  if (it == levels.end()) {
    throw ParameterError("pyramid has no " + std::to_string(mag_value(m)) +
                         "x level");
  }
  return it->second;
}

namespace {

void downsample_rows(const Image& src, Image& dst, int factor, int y0, int y1) {
  const int channels = src.channels();
  std::vector<std::uint32_t> sums(static_cast<std::size_t>(dst.width()) * channels);
  for (int oy = y0; oy < y1; ++oy) {
    std::fill(sums.begin(), sums.end(), 0u);
    const int sy0 = oy * factor;
    const int sy1 = std::min(sy0 + factor, src.height());
    for (int sy = sy0; sy < sy1; ++sy) {
      const std::uint8_t* in = src.row(sy);
      for (int sx = 0; sx < src.width(); ++sx) {
        std::uint32_t* acc = &sums[static_cast<std::size_t>(sx / factor) * channels];
        for (int c = 0; c < channels; ++c) acc[c] += in[sx * channels + c];
      }
    }
    const std::uint32_t rows = static_cast<std::uint32_t>(sy1 - sy0);
    std::uint8_t* out = dst.row(oy);
    for (int ox = 0; ox < dst.width(); ++ox) {
      const int sx0 = ox * factor;
      const std::uint32_t cols =
          static_cast<std::uint32_t>(std::min(sx0 + factor, src.width()) - sx0);
      const std::uint32_t n = rows * cols;
      for (int c = 0; c < channels; ++c) {
        const std::uint32_t s = sums[static_cast<std::size_t>(ox) * channels + c];
        out[ox * channels + c] = static_cast<std::uint8_t>((2 * s + n) / (2 * n));
      }
    }
  }
}

}  // namespace

Image downsample_area(const Image& src, int factor) {
  return downsample_area(src, factor, Backend::serial());
}

Image downsample_area(const Image& src, int factor, const Backend& backend) {
  if (factor < 1) throw ParameterError("downsample factor must be >= 1");
  if (src.empty()) throw ParameterError("cannot downsample an empty raster");
  if (factor == 1) return src;
  Image dst(ceil_div(src.width(), factor), ceil_div(src.height(), factor),
            src.channels());
  backend.for_chunks(dst.height(), [&](std::size_t b, std::size_t e, int) {
    downsample_rows(src, dst, factor, static_cast<int>(b), static_cast<int>(e));
  });
  return dst;
}

Image upsample_nearest(const Image& src, int factor) {
  if (factor < 1) throw ParameterError("upsample factor must be >= 1");
  if (factor == 1) return src;
  Image dst(src.width() * factor, src.height() * factor, src.channels());
  const int ch = src.channels();
  for (int y = 0; y < dst.height(); ++y) {
    const std::uint8_t* in = src.row(y / factor);
    std::uint8_t* out = dst.row(y);
    for (int x = 0; x < dst.width(); ++x) {
      for (int c = 0; c < ch; ++c) out[x * ch + c] = in[(x / factor) * ch + c];
    }
  }
  return dst;
}

SlidePyramid build_pyramid(Image raster40, double mpp40) {
  return build_pyramid(std::move(raster40), mpp40, Backend::serial());
}

SlidePyramid build_pyramid(Image raster40, double mpp40, const Backend& backend) {
  if (raster40.empty() || raster40.width() == 0 || raster40.height() == 0) {
    throw ParameterError("build_pyramid: raster has zero size");
  }
  if (raster40.channels() != 3) {
    throw ParameterError("build_pyramid: expected an RGB raster");
  }
  SlidePyramid p;
  p.mpp40 = mpp40;
  p.levels[Magnification::k10] = downsample_area(raster40, 4, backend);
  p.levels[Magnification::k5] = downsample_area(raster40, 8, backend);
  p.levels[Magnification::k40] = std::move(raster40);
  return p;
}

}  // namespace slideseg
