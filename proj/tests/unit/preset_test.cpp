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
#include "slideseg/preset.hpp"

using namespace slideseg;

TEST_CASE("named presets") {
  const auto ap = preset_by_name("accelerated_plus");
  CHECK(ap.pad == 4096);
  CHECK(ap.patch_size == 4096);
  CHECK(ap.patch_stride == 2048);
  CHECK(ap.window == 512);
  CHECK(ap.padding_color_mode == PaddingColorMode::kAdaptive);
  CHECK(ap.intermediate_format == ImageFormat::kArray);
  CHECK(ap.vote_config(Magnification::k10).stride == 64);
  CHECK(ap.vote_config(Magnification::k40).vote_threshold == 1);
  const auto o = preset_by_name("oracle");
  CHECK(o.patch_size == 2048);
  CHECK(o.window == 256);
  CHECK(o.backend == BackendKind::kSerial);
  CHECK(o.intermediate_format == ImageFormat::kPng);
  CHECK(o.dual_merge);
  const auto a = preset_by_name("accelerated");
  CHECK(a.patch_size == o.patch_size);
  CHECK(a.backend == BackendKind::kParallel);
  CHECK(preset_by_name("accelerated+").name == "accelerated_plus");
  CHECK_THROWS_AS(preset_by_name("turbo"), ParameterError);
  for (const auto& n : preset_names()) CHECK_NOTHROW(preset_by_name(n).validate());
}

TEST_CASE("tiles per patch from per-scale closed forms") {
  for (const auto& name : preset_names()) {
    const auto p = preset_by_name(name);
    long long want = 0;
    for (TissueClass c : kTissueClasses) {
      const Magnification m = p.class_scale[c];
      const int f = scale_factor(m);
      const auto n = oracle::tile_axis_count(p.patch_size / f, p.window,
                                             p.vote_config(m).stride);
      want += n * n;
    }
    CHECK(tiles_per_patch(p) == static_cast<std::uint64_t>(want));
  }
  CHECK(tiles_per_patch(accelerated_plus_preset()) == 614);
  CHECK(tiles_per_patch(oracle_preset()) == 470);
}

TEST_CASE("overrides") {
  auto p = accelerated_plus_preset();
  apply_override(p, "stride_10=128");
  apply_override(p, "threshold_5", "2");
  apply_override(p, "pad_color=1,2,3");
  apply_override(p, "scale_VES=10");
  apply_override(p, "intermediate_format=png");
  apply_override(p, "dual_merge=true");
  apply_override(p, "color_TUFT=9,8,7");
  CHECK(p.stride[1] == 128);
  CHECK(p.vote_threshold[2] == 2);
  CHECK(p.fixed_pad_color == Rgb{1, 2, 3});
  CHECK(p.class_scale[TissueClass::VES] == Magnification::k10);
  CHECK(p.intermediate_format == ImageFormat::kPng);
  CHECK(p.dual_merge);
  CHECK(p.palette[TissueClass::TUFT] == Rgb{9, 8, 7});
  CHECK_THROWS_AS(apply_override(p, "bogus=1"), ParameterError);
  CHECK_THROWS_AS(apply_override(p, "pad"), ParameterError);
  CHECK_THROWS_AS(apply_override(p, "pad=abc"), ParameterError);
  CHECK_THROWS_AS(apply_override(p, "scale_PT=20"), ParameterError);
}

TEST_CASE("validation names the bad field") {
  auto p = accelerated_plus_preset();
  p.patch_stride = 3000;
  CHECK_THROWS_WITH_AS(p.validate(), doctest::Contains("patch_stride"), ParameterError);
  p = accelerated_plus_preset();
  p.stride[0] = 600;
  CHECK_THROWS_AS(p.validate(), ParameterError);
  p = accelerated_plus_preset();
  p.window = 1024;  // larger than a 5x patch (512)
  CHECK_THROWS_AS(p.validate(), ParameterError);
}
