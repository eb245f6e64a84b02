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
#include "doctest.h"
#include "oracles.hpp"
#include "slideseg/patch_extractor.hpp"
#include "tempdir.hpp"

using namespace slideseg;

TEST_CASE("padding colour is the rounded 2x2 corner mean") {
  Image img(4, 4, 3, 50);
  const int corner[4] = {0, 0, 255, 255};
  for (int i = 0; i < 4; ++i) {
    for (int c = 0; c < 3; ++c) img.at(i % 2, i / 2, c) = static_cast<std::uint8_t>(corner[i]);
  }
  CHECK(padding_color(img) == Rgb{128, 128, 128});
  img.at(0, 0, 2) = 1;  // (1 + 0 + 255 + 255) / 4 = 127.75
  CHECK(padding_color(img).b == 128);
  img.at(0, 0, 2) = 0;
  img.at(1, 1, 2) = 253;  // 508 / 4 = 127
  CHECK(padding_color(img).b == 127);
}

TEST_CASE("padded crop mixes border and slide") {
  Image img(4, 3, 3, 10);
  img.at(0, 0, 0) = 99;
  const auto pyr = build_pyramid(img);
  const auto padded = pad_slide(pyr, 2, Rgb{1, 2, 3});
  CHECK(padded.width() == 8);
  CHECK(padded.height() == 7);
  CHECK(padded.pixel(0, 0) == Rgb{1, 2, 3});
  CHECK(padded.pixel(2, 2) == Rgb{99, 10, 10});
  const Image c = padded.crop(1, 1, 3, 3);
  CHECK(c.at(0, 0, 2) == 3);
  CHECK(c.at(1, 1, 0) == 99);
  CHECK(c.at(2, 2, 0) == 10);
  CHECK(pad_slide(pyr, 2).pad_color() == padding_color(img));
}

TEST_CASE("axis origins match the walking oracle") {
  CHECK(axis_origins(10, 4, 4) == std::vector<int>{0, 4, 6});
  CHECK(axis_origins(8, 4, 4) == std::vector<int>{0, 4});
  CHECK(axis_origins(4, 4, 1) == std::vector<int>{0});
  for (int e = 1; e < 60; ++e) {
    for (int w = 1; w <= e; w += 3) {
      for (int s = 1; s <= w; s += 2) CHECK(axis_origins(e, w, s) == oracle::tile_axis(e, w, s));
    }
  }
  CHECK_THROWS_AS(axis_origins(10, 4, 5), ParameterError);
  CHECK_THROWS_AS(axis_origins(3, 4, 2), ParameterError);
}

TEST_CASE("patch sites follow the tissue") {
  // 64x64 slide, tissue mask covering 40x [32, 64) x [0, 64)
  const auto pyr = build_pyramid(Image(64, 64, 3, 200));
  ForegroundMask fg;
  fg.level = Magnification::k5;
  fg.mask = Image(8, 8, 1);
  for (int y = 0; y < 8; ++y) {
    for (int x = 4; x < 8; ++x) fg.mask.at(x, y) = 1;
  }
  const auto padded = pad_slide(pyr, 16, Rgb{255, 255, 255});
  ExtractParams p{32, 16, 0.25};
  const auto sites = select_patch_sites(padded, fg, p);
  // padded extent 96 -> origins 0,16,32,48,64; slide x = origin - 16
  // column fractions: x in {-16, 0, 16, 32, 48} -> {0, 0, .5, 1, .5}
  std::vector<int> xs;
  for (const auto& s : sites) {
    if (s.j == 2) xs.push_back(s.x);
  }
  CHECK(xs == std::vector<int>{32, 48, 64});
  for (const auto& s : sites) CHECK(s.x == s.i * 16);
  const auto patches = extract_patches(padded, fg, p);
  REQUIRE(patches.size() == sites.size());
  CHECK(patches[0].pixels.width() == 32);
  CHECK_THROWS_AS(select_patch_sites(padded, fg, ExtractParams{32, 12, 0.1}), ParameterError);
}

TEST_CASE("patch files are named by grid and origin") {
  Patch p;
  p.site = {3, 12, 6144, 24576};
  p.size = 4;
  p.pixels = Image(4, 4, 3, 7);
  CHECK(patch_filename(p.site, ImageFormat::kArray) == "patch_0003_0012_x6144_y24576.npy");
  CHECK(patch_filename(p.site, ImageFormat::kPng) == "patch_0003_0012_x6144_y24576.png");
  testing_support::TempDir dir("patch");
  for (auto f : {ImageFormat::kArray, ImageFormat::kPng}) {
    const auto path = persist_patch(p, dir.path(), f);
    CHECK(load_image(path) == p.pixels);
  }
  CHECK(parse_format("png") == ImageFormat::kPng);
  CHECK_THROWS_AS(parse_format("tiff"), ParameterError);
}
