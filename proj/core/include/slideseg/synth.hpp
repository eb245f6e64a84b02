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

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "slideseg/raster.hpp"

namespace slideseg {

struct Disk {
  int cx, cy, r;
};
struct Ellipse {
  int cx, cy, rx, ry;
};
struct Rect {
  int x, y, w, h;
};
using Geometry = std::variant<Disk, Ellipse, Rect>;

/// What a painted shape represents: generic tissue section (no class label),
/// a labelled structure, or a small dark artefact that is not tissue.
enum class ShapeRole { kTissue, kClass, kDebris };

struct SynthShape {
  ShapeRole role = ShapeRole::kTissue;
  TissueClass tissue_class = TissueClass::TUFT;  // meaningful for kClass only
  Geometry geometry;
};

struct SynthSpec {
  int width = 0;
  int height = 0;
  Rgb background{240, 240, 240};
  std::vector<SynthShape> shapes;
};

/// True when pixel (x, y) lies inside the shape. Disks and ellipses use the
/// integer inequality (dx*ry)^2 + (dy*rx)^2 <= (rx*ry)^2 on pixel indices;
/// rectangles are half-open [x, x+w) x [y, y+h).
bool contains(const Geometry& g, int x, int y) noexcept;

/// Inclusive-exclusive bounding box {x0, y0, x1, y1}.
std::array<int, 4> bounds(const Geometry& g) noexcept;

/// Base colour painted for each role/class before noise.
Rgb paint_color(const SynthShape& shape) noexcept;

/// Parses the geometry file used by "slideseg synth --spec":
///   background R G B
///   tissue ellipse CX CY RX RY
///   TUFT disk CX CY R
///   PT rect X Y W H
///   debris disk CX CY R
/// '#' starts a comment. Canvas size comes from the caller.
std::vector<SynthShape> parse_synth_shapes(const std::string& text,
                                           Rgb* background = nullptr);

/// Default layout: one large tissue section with every class placed inside it
/// plus a debris speck in the blank margin. Scales with the canvas.
SynthSpec standard_layout(int width, int height);

struct SynthSlide {
  Image raster40;
  GroundTruth truth;
};

/// Paints the shapes with per-pixel noise drawn from a generator seeded by
/// seed. Class shapes must not overlap each other; any shape extending past
/// the canvas is rejected.
SynthSlide synth_slide(std::uint64_t seed, const SynthSpec& spec);

}  // namespace slideseg
