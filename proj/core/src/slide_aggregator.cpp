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
#include "slideseg/slide_aggregator.hpp"

#include <algorithm>
#include <cmath>

namespace slideseg {

SlideAccumulator::SlideAccumulator(TissueClass cls, int width40, int height40, int patch_size,
                                   Magnification target)
    : patch_size_(patch_size) {
  const int f = scale_factor(target);
  if (patch_size <= 0 || patch_size % 8 != 0) {
    throw ParameterError("patch size must be a positive multiple of 8");
  }
  out_.tissue_class = cls;
  out_.level = target;
  const int w = ceil_div(width40, f);
  const int h = ceil_div(height40, f);
  out_.votes = Counter(w, h, 1);
  out_.coverage = Counter(w, h, 1);
}

namespace {

int floor_div(int a, int b) noexcept { return a >= 0 ? a / b : -((-a + b - 1) / b); }

}  // namespace

void SlideAccumulator::add(const PatchMap& patch, const Backend& backend) {
  const int fm = scale_factor(patch.magnification);
  const int ft = scale_factor(out_.level);
  const int expected = patch_size_ / fm;
  if (patch.map.width() != expected || patch.map.height() != expected ||
      patch.map.channels() != 1) {
    throw ParameterError("patch map '" + patch.label + "' is " +
                         std::to_string(patch.map.width()) + "x" +
                         std::to_string(patch.map.height()) + ", expected " +
                         std::to_string(expected) + "x" + std::to_string(expected));
  }
  // Target pixel X samples the 40x point X * ft + ft / 2; it belongs to the
  // patch when that point lies in [origin, origin + size).
  const int half = ft / 2;
  const int x0 = std::max(0, floor_div(patch.x - half + ft - 1, ft));
  const int y0 = std::max(0, floor_div(patch.y - half + ft - 1, ft));
  const int x1 = std::min(out_.votes.width(), floor_div(patch.x + patch_size_ - 1 - half, ft) + 1);
  const int y1 = std::min(out_.votes.height(), floor_div(patch.y + patch_size_ - 1 - half, ft) + 1);
  if (x0 >= x1 || y0 >= y1) return;

  std::vector<int> col(static_cast<std::size_t>(x1 - x0));
  for (int x = x0; x < x1; ++x) {
    col[static_cast<std::size_t>(x - x0)] = (x * ft + half - patch.x) / fm;
  }
  backend.for_chunks(static_cast<std::size_t>(y1 - y0),
                     [&](std::size_t b, std::size_t e, int) {
    for (int y = y0 + static_cast<int>(b); y < y0 + static_cast<int>(e); ++y) {
      const std::uint8_t* src = patch.map.row((y * ft + half - patch.y) / fm);
      std::uint16_t* votes = out_.votes.row(y) + x0;
      std::uint16_t* cov = out_.coverage.row(y) + x0;
      const int n = x1 - x0;
      for (int i = 0; i < n; ++i) {
        votes[i] = static_cast<std::uint16_t>(votes[i] + (src[col[static_cast<std::size_t>(i)]] != 0));
        cov[i] = static_cast<std::uint16_t>(cov[i] + 1);
      }
    }
  });
}

SlideClassMap SlideAccumulator::finish() && {
  out_.map = Image(out_.votes.width(), out_.votes.height(), 1);
  auto v = out_.votes.data();
  auto c = out_.coverage.data();
  auto m = out_.map.data();
  for (std::size_t i = 0; i < m.size(); ++i) {
    m[i] = (c[i] > 0 && v[i] >= (c[i] + 1) / 2) ? 1 : 0;
  }
  return std::move(out_);
}

SlideClassMap merge_patch_maps(std::span<const PatchMap> maps, int width40, int height40,
                               int patch_size, const Backend& backend, Magnification target,
                               TissueClass cls) {
  SlideAccumulator acc(cls, width40, height40, patch_size, target);
  for (const auto& m : maps) acc.add(m, backend);
  return std::move(acc).finish();
}

namespace kernels {

Image mask_and(const Image& map, const Image& mask, const Backend& backend) {
  if (map.width() != mask.width() || map.height() != mask.height() ||
      map.channels() != mask.channels()) {
    throw ParameterError("mask_and: raster sizes differ");
  }
  Image out(map.width(), map.height(), map.channels());
  auto a = map.data();
  auto b = mask.data();
  auto o = out.data();
  backend.for_chunks(o.size(), [&](std::size_t begin, std::size_t end, int) {
    for (std::size_t i = begin; i < end; ++i) o[i] = (a[i] && b[i]) ? 1 : 0;
  });
  return out;
}

}  // namespace kernels

SlideClassMap filter_by_foreground(SlideClassMap map, const Image& mask_at_level,
                                   const Backend& backend) {
  map.map = kernels::mask_and(map.map, mask_at_level, backend);
  return map;
}

Image render_overlay(const Image& base, const std::map<TissueClass, Image>& maps,
                     const Palette& palette, double alpha, const Backend& backend) {
  if (base.channels() != 3) throw ParameterError("overlay base must be RGB");
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw ParameterError("overlay alpha must be in [0, 1]");
  const int a = static_cast<int>(std::lround(alpha * 1000.0));
  std::vector<std::pair<const Image*, Rgb>> layers;  // precedence order
  for (TissueClass c : kTissueClasses) {
    auto it = maps.find(c);
    if (it == maps.end()) continue;
    if (it->second.width() != base.width() || it->second.height() != base.height()) {
      throw ParameterError("class map " + std::string(class_name(c)) +
                           " does not match the overlay base size");
    }
    layers.emplace_back(&it->second, palette[c]);
  }
  Image out = base;
  auto blend = [a](int color, int b) {
    return static_cast<std::uint8_t>((a * color + (1000 - a) * b + 500) / 1000);
  };
  backend.for_chunks(static_cast<std::size_t>(base.height()),
                     [&](std::size_t y0, std::size_t y1, int) {
    for (int y = static_cast<int>(y0); y < static_cast<int>(y1); ++y) {
      std::uint8_t* px = out.row(y);
      for (int x = 0; x < base.width(); ++x) {
        for (const auto& [map, color] : layers) {
          if (!map->row(y)[x]) continue;
          px[3 * x] = blend(color.r, px[3 * x]);
          px[3 * x + 1] = blend(color.g, px[3 * x + 1]);
          px[3 * x + 2] = blend(color.b, px[3 * x + 2]);
          break;
        }
      }
    }
  });
  return out;
}

Image downsample_overlay(const Image& overlay40, const Backend& backend) {
  return downsample_area(overlay40, 4, backend);
}

std::uint64_t count_positive(const Image& map) {
  return static_cast<std::uint64_t>(
      std::count_if(map.data().begin(), map.data().end(), [](std::uint8_t v) { return v != 0; }));
}

double dice(const Image& a, const Image& b) {
  if (a.width() != b.width() || a.height() != b.height()) {
    throw ParameterError("dice: raster sizes differ");
  }
  std::uint64_t inter = 0, na = 0, nb = 0;
  auto da = a.data();
  auto db = b.data();
  for (std::size_t i = 0; i < da.size(); ++i) {
    const bool pa = da[i] != 0;
    const bool pb = db[i] != 0;
    na += pa;
    nb += pb;
    inter += pa && pb;
  }
  if (na + nb == 0) return 1.0;
  return 2.0 * static_cast<double>(inter) / static_cast<double>(na + nb);
}

}  // namespace slideseg
