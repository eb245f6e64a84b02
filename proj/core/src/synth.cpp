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
#include "slideseg/synth.hpp"

#include <algorithm>
#include <random>
#include <sstream>

namespace slideseg {

namespace {

constexpr int kBackgroundNoise = 3;
constexpr int kTissueNoise = 6;

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

bool ellipse_contains(std::int64_t dx, std::int64_t dy, std::int64_t rx,
                      std::int64_t ry) noexcept {
  return dx * dx * ry * ry + dy * dy * rx * rx <= rx * rx * ry * ry;
}

std::uint8_t clamp_u8(int v) noexcept {
  return static_cast<std::uint8_t>(std::clamp(v, 0, 255));
}

int noise_term(std::uint64_t bits, int amplitude) noexcept {
  return static_cast<int>(bits % static_cast<std::uint64_t>(2 * amplitude + 1)) - amplitude;
}

}  // namespace

bool contains(const Geometry& g, int x, int y) noexcept {
  return std::visit(
      Overloaded{
          [&](const Disk& d) { return ellipse_contains(x - d.cx, y - d.cy, d.r, d.r); },
          [&](const Ellipse& e) { return ellipse_contains(x - e.cx, y - e.cy, e.rx, e.ry); },
          [&](const Rect& r) {
            return x >= r.x && x < r.x + r.w && y >= r.y && y < r.y + r.h;
          }},
      g);
}

std::array<int, 4> bounds(const Geometry& g) noexcept {
  return std::visit(
      Overloaded{
          [](const Disk& d) {
            return std::array<int, 4>{d.cx - d.r, d.cy - d.r, d.cx + d.r + 1, d.cy + d.r + 1};
          },
          [](const Ellipse& e) {
            return std::array<int, 4>{e.cx - e.rx, e.cy - e.ry, e.cx + e.rx + 1,
                                      e.cy + e.ry + 1};
          },
          [](const Rect& r) { return std::array<int, 4>{r.x, r.y, r.x + r.w, r.y + r.h}; }},
      g);
}

Rgb paint_color(const SynthShape& shape) noexcept {
  switch (shape.role) {
    case ShapeRole::kTissue: return {214, 168, 200};
    case ShapeRole::kDebris: return {60, 60, 60};
    case ShapeRole::kClass: break;
  }
  static constexpr std::array<Rgb, 6> kClassColors = {{
      {120, 50, 120},   // TUFT
      {150, 80, 150},   // CAP
      {170, 110, 160},  // PT
      {150, 120, 190},  // DT
      {190, 130, 180},  // PTC
      {130, 60, 90},    // VES
  }};
  return kClassColors[class_index(shape.tissue_class)];
}

std::vector<SynthShape> parse_synth_shapes(const std::string& text, Rgb* background) {
  std::vector<SynthShape> shapes;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string head;
    if (!(ls >> head)) continue;
    auto fail = [&](const std::string& why) -> ParameterError {
      return ParameterError("synth spec line " + std::to_string(lineno) + ": " + why);
    };
    if (head == "background") {
      int r, g, b;
      if (!(ls >> r >> g >> b)) throw fail("expected 'background R G B'");
      if (background) *background = Rgb{clamp_u8(r), clamp_u8(g), clamp_u8(b)};
      continue;
    }
    SynthShape s;
    if (head == "tissue") {
      s.role = ShapeRole::kTissue;
    } else if (head == "debris") {
      s.role = ShapeRole::kDebris;
    } else {
      s.role = ShapeRole::kClass;
      try {
        s.tissue_class = parse_class(head);
      } catch (const ParameterError&) {
        throw fail("unknown shape owner '" + head + "'");
      }
    }
    std::string kind;
    if (!(ls >> kind)) throw fail("missing geometry kind");
    if (kind == "disk") {
      Disk d{};
      if (!(ls >> d.cx >> d.cy >> d.r) || d.r < 0) throw fail("expected 'disk CX CY R'");
      s.geometry = d;
    } else if (kind == "ellipse") {
      Ellipse e{};
      if (!(ls >> e.cx >> e.cy >> e.rx >> e.ry) || e.rx <= 0 || e.ry <= 0) {
        throw fail("expected 'ellipse CX CY RX RY'");
      }
      s.geometry = e;
    } else if (kind == "rect") {
      Rect r{};
      if (!(ls >> r.x >> r.y >> r.w >> r.h) || r.w <= 0 || r.h <= 0) {
        throw fail("expected 'rect X Y W H'");
      }
      s.geometry = r;
    } else {
      throw fail("unknown geometry '" + kind + "'");
    }
    shapes.push_back(s);
  }
  return shapes;
}

SynthSpec standard_layout(int width, int height) {
  SynthSpec spec;
  spec.width = width;
  spec.height = height;
  const int s = std::min(width, height);
  auto at = [](int extent, double frac) { return static_cast<int>(extent * frac); };
  auto add = [&](ShapeRole role, TissueClass c, Geometry g) {
    spec.shapes.push_back(SynthShape{role, c, g});
  };
  add(ShapeRole::kTissue, TissueClass::TUFT,
      Ellipse{width / 2, height / 2, at(width, 0.4), at(height, 0.4)});
  add(ShapeRole::kClass, TissueClass::TUFT, Disk{at(width, 0.35), at(height, 0.35), s / 16});
  add(ShapeRole::kClass, TissueClass::CAP,
      Ellipse{at(width, 0.65), at(height, 0.35), s / 14, s / 18});
  add(ShapeRole::kClass, TissueClass::PT,
      Rect{at(width, 0.35) - s / 16, at(height, 0.65) - s / 24, s / 8, s / 12});
  add(ShapeRole::kClass, TissueClass::DT,
      Rect{at(width, 0.65) - s / 24, at(height, 0.65) - s / 16, s / 12, s / 8});
  add(ShapeRole::kClass, TissueClass::PTC, Disk{width / 2, height / 2, s / 40});
  add(ShapeRole::kClass, TissueClass::PTC, Disk{width / 2, at(height, 0.25), s / 48});
  add(ShapeRole::kClass, TissueClass::VES,
      Ellipse{width / 2, at(height, 0.75), s / 20, s / 10});
  const int speck = std::max(2, s / 2048);
  add(ShapeRole::kDebris, TissueClass::TUFT,
      Disk{at(width, 0.04) + speck, at(height, 0.04) + speck, speck});
  return spec;
}

SynthSlide synth_slide(std::uint64_t seed, const SynthSpec& spec) {
  if (spec.width <= 0 || spec.height <= 0) {
    throw ParameterError("synth canvas must be non-empty");
  }
  for (const auto& shape : spec.shapes) {
    const auto b = bounds(shape.geometry);
    if (b[0] < 0 || b[1] < 0 || b[2] > spec.width || b[3] > spec.height) {
      throw ParameterError("synth shape exceeds the " + std::to_string(spec.width) + "x" +
                           std::to_string(spec.height) + " canvas");
    }
  }

  const int w = spec.width;
  const int h = spec.height;
  // Per-pixel paint colour and noise amplitude, resolved before noise so that
  // the random stream is consumed in a fixed raster order.
  Image color(w, h, 3);
  std::vector<std::uint8_t> amplitude(static_cast<std::size_t>(w) * h,
                                      static_cast<std::uint8_t>(kBackgroundNoise));
  for (int y = 0; y < h; ++y) {
    std::uint8_t* row = color.row(y);
    for (int x = 0; x < w; ++x) {
      row[3 * x] = spec.background.r;
      row[3 * x + 1] = spec.background.g;
      row[3 * x + 2] = spec.background.b;
    }
  }

  SynthSlide out;
  for (TissueClass c : kTissueClasses) out.truth.masks[c] = Image(w, h, 1);
  Image owner(w, h, 1);  // 1 where some class shape already painted

  auto paint = [&](const SynthShape& shape) {
    const Rgb rgb = paint_color(shape);
    const auto b = bounds(shape.geometry);
    Image* mask = shape.role == ShapeRole::kClass ? &out.truth.masks[shape.tissue_class]
                                                  : nullptr;
    for (int y = b[1]; y < b[3]; ++y) {
      for (int x = b[0]; x < b[2]; ++x) {
        if (!contains(shape.geometry, x, y)) continue;
        if (mask) {
          if (owner.at(x, y)) {
            throw ParameterError("synth class shapes overlap at (" + std::to_string(x) +
                                 ", " + std::to_string(y) + ")");
          }
          owner.at(x, y) = 1;
          mask->at(x, y) = 1;
        }
        color.at(x, y, 0) = rgb.r;
        color.at(x, y, 1) = rgb.g;
        color.at(x, y, 2) = rgb.b;
        amplitude[static_cast<std::size_t>(y) * w + x] = kTissueNoise;
      }
    }
  };
  for (ShapeRole role : {ShapeRole::kTissue, ShapeRole::kClass, ShapeRole::kDebris}) {
    for (const auto& shape : spec.shapes) {
      if (shape.role == role) paint(shape);
    }
  }

  std::mt19937_64 rng(seed);
  out.raster40 = std::move(color);
  auto px = out.raster40.data();
  for (std::size_t i = 0; i < amplitude.size(); ++i) {
    const std::uint64_t bits = rng();
    const int a = amplitude[i];
    for (int c = 0; c < 3; ++c) {
      const int v = px[3 * i + c] + noise_term(bits >> (16 * c), a);
      px[3 * i + c] = clamp_u8(v);
    }
  }
  return out;
}

}  // namespace slideseg
