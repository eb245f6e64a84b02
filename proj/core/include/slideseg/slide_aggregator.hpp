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
#include <map>
#include <span>
#include <string>
#include <vector>

#include "slideseg/backend.hpp"
#include "slideseg/raster.hpp"

namespace slideseg {

/// One patch's binary prediction for a class, at the class magnification.
struct PatchMap {
  int x = 0;  // patch origin in unpadded 40x slide coordinates (may be negative)
  int y = 0;
  Magnification magnification = Magnification::k40;
  Image map;
  std::string label;  // for error messages
};

struct SlideClassMap {
  TissueClass tissue_class = TissueClass::TUFT;
  Magnification level = Magnification::k40;
  Image map;          // {0, 1}
  Counter votes;      // positive patch predictions per pixel
  Counter coverage;   // covering extracted patches per pixel
};

/// Streaming patch merge for one class. Patch maps are resampled by nearest
/// neighbour to the target level (40x by default) and accumulated; a pixel is
/// positive iff votes >= ceil(coverage / 2) with coverage > 0.
class SlideAccumulator {
 public:
  SlideAccumulator(TissueClass cls, int width40, int height40, int patch_size,
                   Magnification target = Magnification::k40);

  /// Rows of one patch are split across the backend; a single patch never
  /// overlaps itself, so the additions are race-free.
  void add(const PatchMap& patch, const Backend& backend);
  SlideClassMap finish() &&;

 private:
  SlideClassMap out_;
  int patch_size_;
};

SlideClassMap merge_patch_maps(std::span<const PatchMap> maps, int width40, int height40,
                               int patch_size, const Backend& backend,
                               Magnification target = Magnification::k40,
                               TissueClass cls = TissueClass::TUFT);

namespace kernels {
/// Per-pixel AND of two {0,1} rasters of identical size.
Image mask_and(const Image& map, const Image& mask, const Backend& backend);
}  // namespace kernels

/// map AND mask; mask is the foreground already at the map's resolution.
SlideClassMap filter_by_foreground(SlideClassMap map, const Image& mask_at_level,
                                   const Backend& backend);

struct Palette {
  std::array<Rgb, 6> colors = {{
      {255, 0, 0},    // TUFT
      {255, 128, 0},  // CAP
      {0, 255, 0},    // PT
      {0, 128, 255},  // DT
      {255, 0, 255},  // PTC
      {128, 0, 128},  // VES
  }};
  Rgb operator[](TissueClass c) const noexcept { return colors[class_index(c)]; }
};

/// Blends round(alpha * color + (1 - alpha) * base) where a class is
/// predicted; TUFT > CAP > PT > DT > PTC > VES resolves multi-class pixels.
/// alpha is quantised to 1/1000 so the blend is exact integer arithmetic.
Image render_overlay(const Image& base, const std::map<TissueClass, Image>& maps,
                     const Palette& palette, double alpha, const Backend& backend);

/// Factor-4 area average of a 40x overlay.
Image downsample_overlay(const Image& overlay40, const Backend& backend);

/// 2|A and B| / (|A| + |B|); 1 when both are empty.
double dice(const Image& a, const Image& b);

std::uint64_t count_positive(const Image& map);

}  // namespace slideseg
