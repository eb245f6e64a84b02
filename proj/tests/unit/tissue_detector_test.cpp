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
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "slideseg/backend.hpp"
#include "slideseg/tissue_detector.hpp"

using namespace slideseg;

namespace {

Image random_gray(std::mt19937& rng, int w, int h, int levels) {
  Image img(w, h, 1);
  for (auto& v : img.data()) v = static_cast<std::uint8_t>(rng() % levels);
  return img;
}

std::vector<std::uint8_t> bytes(const Image& img) {
  return {img.data().begin(), img.data().end()};
}

}  // namespace

TEST_CASE("luma weights") {
  Image rgb(2, 1, 3);
  rgb.at(0, 0, 0) = 255;
  rgb.at(1, 0, 0) = 100;
  rgb.at(1, 0, 1) = 150;
  rgb.at(1, 0, 2) = 200;
  const Image g = to_gray(rgb);
  CHECK(g.at(0, 0) == (77 * 255) >> 8);
  CHECK(g.at(1, 0) == (77 * 100 + 150 * 150 + 29 * 200) >> 8);
}

TEST_CASE("median blur equals naive sort on small images") {
  std::mt19937 rng(21);
  for (int ap : {1, 3, 5, 7}) {
    for (int trial = 0; trial < 4; ++trial) {
      const int w = 1 + static_cast<int>(rng() % 23);
      const int h = 1 + static_cast<int>(rng() % 23);
      const Image img = random_gray(rng, w, h, trial % 2 ? 4 : 256);
      const Image out = median_blur(img, ap, Backend::parallel(3));
      CHECK(bytes(out) == oracle::median(bytes(img), w, h, ap));
    }
  }
  CHECK_THROWS_AS(median_blur(Image(4, 4, 1), 4), ParameterError);
  CHECK_THROWS_AS(median_blur(Image(4, 4, 3), 3), ParameterError);
}

TEST_CASE("otsu on a two-level checkerboard") {
  Image img(8, 8, 1);
  for (int y = 0; y < 8; ++y) {
    for (int x = 0; x < 8; ++x) img.at(x, y) = ((x + y) % 2) ? 255 : 0;
  }
  const auto h = histogram(img);
  CHECK(otsu_threshold(h) == 0);
  CHECK(oracle::otsu(h) == 0);
}

TEST_CASE("otsu degenerate and sparse histograms") {
  std::array<std::uint64_t, 256> h{};
  h[77] = 10;
  CHECK(otsu_threshold(h) == 77);
  h[77] = 0;
  CHECK_THROWS_AS(otsu_threshold(h), ParameterError);
  h[10] = 1;
  h[200] = 1;
  CHECK(otsu_threshold(h) == oracle::otsu(h));
  CHECK(otsu_threshold(h) == 10);
}

TEST_CASE("components are 4-connected in raster order") {
  Image m(5, 3, 1);
  // two diagonal pixels are separate components
  m.at(0, 0) = 1;
  m.at(1, 1) = 1;
  m.at(3, 0) = 1;
  m.at(3, 1) = 1;
  m.at(4, 1) = 1;
  Raster<std::uint32_t> labels;
  const auto comps = label_components(m, labels);
  REQUIRE(comps.size() == 3);
  CHECK(comps[0].area == 1);
  CHECK(comps[1].area == 3);
  CHECK(comps[1].x0 == 3);
  CHECK(comps[1].x1 == 5);
  CHECK(comps[1].y1 == 2);
  CHECK(comps[2].area == 1);
  CHECK(labels.at(1, 1) == 3);
  CHECK(labels.at(4, 1) == 2);
}

namespace {

SlidePyramid dark_square_slide(int size, int x0, int y0, int side) {
  Image img(size, size, 3, 235);
  for (int y = y0; y < y0 + side; ++y) {
    for (int x = x0; x < x0 + side; ++x) {
      img.at(x, y, 0) = 150;
      img.at(x, y, 1) = 100;
      img.at(x, y, 2) = 160;
    }
  }
  return build_pyramid(std::move(img));
}

}  // namespace

TEST_CASE("detect_foreground finds a dark square and drops specks") {
  auto pyr = dark_square_slide(512, 128, 128, 256);
  // a 24x24 speck at 40x is a 3x3 block at 5x; a plus shape survives the
  // 3x3 median and must be removed by the area filter
  for (int y = 16; y < 40; ++y) {
    for (int x = 16; x < 40; ++x) {
      for (int c = 0; c < 3; ++c) pyr.levels[Magnification::k40].at(x, y, c) = 20;
    }
  }
  pyr = build_pyramid(pyr.base());
  DetectorParams p;
  p.aperture = 3;
  p.min_component_area = 0.01;
  const auto fg = detect_foreground(pyr, p);
  CHECK(fg.level == Magnification::k5);
  CHECK(fg.mask.width() == 64);
  REQUIRE(fg.components.size() == 1);
  CHECK(fg.components[0].area == 32 * 32 - 4);  // the median clips the corners
  CHECK(fg.mask.at(20, 20) == 1);
  CHECK(fg.mask.at(16, 16) == 0);
  CHECK(fg.mask.at(3, 3) == 0);
  CHECK(fg.labels.at(3, 3) == 0);
}

TEST_CASE("uniform slide gives an empty mask") {
  const auto pyr = build_pyramid(Image(256, 256, 3, 200));
  const auto fg = detect_foreground(pyr, DetectorParams{});
  CHECK(fg.components.empty());
  for (auto v : fg.mask.data()) CHECK(v == 0);
}

TEST_CASE("foreground_area uses nearest-neighbour cells and clips") {
  ForegroundMask fg;
  fg.level = Magnification::k5;
  fg.mask = Image(4, 4, 1);
  fg.mask.at(1, 1) = 1;  // covers 40x [8, 16) x [8, 16)
  CHECK(foreground_area(fg, {0, 0, 32, 32}) == 64);
  CHECK(foreground_area(fg, {12, 12, 100, 100}) == 16);
  CHECK(foreground_area(fg, {-50, -50, 60, 60}) == 4);
  CHECK(foreground_area(fg, {40, 40, 10, 10}) == 0);
  CHECK(region_is_tissue(fg, {0, 0, 32, 32}, 64.0 / 1024.0));
  CHECK_FALSE(region_is_tissue(fg, {0, 0, 32, 32}, 65.0 / 1024.0));
}

TEST_CASE("mask resampling") {
  ForegroundMask fg;
  fg.level = Magnification::k5;
  fg.mask = Image(2, 1, 1);
  fg.mask.at(1, 0) = 1;
  fg.width40 = 13;
  fg.height40 = 5;
  const Image m40 = mask_at_40x(fg, 13, 5);
  CHECK(m40.at(7, 0) == 0);
  CHECK(m40.at(8, 4) == 1);
  CHECK(m40.at(12, 0) == 1);
  const Image m10 = mask_at_level(fg, Magnification::k10);
  REQUIRE(m10.width() == 4);
  CHECK(m10.at(1, 0) == 0);  // 40x centre 6 -> 5x cell 0
  CHECK(m10.at(2, 0) == 1);  // 40x centre 10 -> 5x cell 1
}

TEST_CASE("otsu stays exact with counts near 2^40") {
  std::mt19937_64 rng(4);
  for (int k = 0; k < 40; ++k) {
    std::array<std::uint64_t, 256> h{};
    for (auto& c : h) c = rng() % (1ull << 40);
    CHECK(otsu_threshold(h) == oracle::otsu(h));
  }
}
