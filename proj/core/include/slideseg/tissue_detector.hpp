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
#include <cstdint>
#include <span>
#include <vector>

#include "slideseg/backend.hpp"
#include "slideseg/raster.hpp"

namespace slideseg {

struct Component {
  std::uint32_t id = 0;  // 1-based, raster order of first pixel
  std::uint64_t area = 0;
  int x0 = 0, y0 = 0, x1 = 0, y1 = 0;  // bounding box, exclusive max
};

/// Binary tissue mask at one pyramid level.
struct ForegroundMask {
  Magnification level = Magnification::k5;
  Image mask;                         // {0, 1}
  Raster<std::uint32_t> labels;       // 0 background, else Component::id
  std::vector<Component> components;  // retained components only
  int otsu_threshold = 0;
  int width40 = 0;   // 40x extent the mask describes; 0 means mask size x factor
  int height40 = 0;

  int factor() const noexcept { return scale_factor(level); }
  int extent40_width() const noexcept { return width40 ? width40 : mask.width() * factor(); }
  int extent40_height() const noexcept { return height40 ? height40 : mask.height() * factor(); }
};

struct DetectorParams {
  int aperture = 59;
  double min_component_area = 0.0001;  // fraction of the level's pixel count
  Magnification level = Magnification::k5;
};

/// Integer luma: (77 R + 150 G + 29 B) >> 8.
Image to_gray(const Image& rgb);

/// Median over an aperture x aperture window with edge-replicated borders.
/// Uses a sliding 256-bin histogram per row band; each band is independent,
/// so output does not depend on backend width.
Image median_blur(const Image& gray, int aperture);
Image median_blur(const Image& gray, int aperture, const Backend& backend);

std::array<std::uint64_t, 256> histogram(const Image& gray);

/// Otsu threshold over a 256-bin histogram: the smallest t maximising the
/// between-class variance of {v <= t} vs {v > t}, compared in exact integer
/// arithmetic. A single-valued histogram returns that value.
int otsu_threshold(std::span<const std::uint64_t, 256> hist);

/// 4-connected labelling of a {0,1} mask. Ids follow raster order.
std::vector<Component> label_components(const Image& mask,
                                        Raster<std::uint32_t>& labels);

/// Gray -> median blur -> Otsu -> keep the darker side -> components -> drop
/// components smaller than min_component_area x level area.
ForegroundMask detect_foreground(const SlidePyramid& slide, const DetectorParams& params);
ForegroundMask detect_foreground(const SlidePyramid& slide, const DetectorParams& params,
                                 const Backend& backend);

/// Axis-aligned rectangle in unpadded 40x slide coordinates; may extend past
/// the slide.
struct SlideRect {
  std::int64_t x = 0, y = 0, w = 0, h = 0;
};

/// Number of 40x pixels inside rect whose nearest-neighbour mask pixel is
/// foreground. Out-of-bounds area counts as background.
std::uint64_t foreground_area(const ForegroundMask& mask, const SlideRect& rect);

bool region_is_tissue(const ForegroundMask& mask, const SlideRect& rect, double min_fraction);

/// Mask rescaled to 40x extent (width x height) by nearest neighbour.
Image mask_at_40x(const ForegroundMask& mask, int width, int height);

/// Mask resampled to another pyramid level covering the same 40x extent: a
/// target pixel reads the mask at its 40x block centre.
Image mask_at_level(const ForegroundMask& mask, Magnification target);

}  // namespace slideseg
