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
#include <map>
#include <string>
#include <vector>

#include "slideseg/backend.hpp"
#include "slideseg/patch_extractor.hpp"
#include "slideseg/slide_aggregator.hpp"
#include "slideseg/tile_inference.hpp"

namespace slideseg {

enum class PaddingColorMode { kFixed, kAdaptive };

/// Every tunable of a pipeline run. The three named presets model the three
/// pipeline generations; any field can be overridden with key=value.
struct PipelinePreset {
  std::string name = "accelerated_plus";

  // detection
  int aperture = 59;
  double min_component_area = 0.0001;
  Magnification detect_level = Magnification::k5;

  // padding + extraction
  int pad = 4096;
  PaddingColorMode padding_color_mode = PaddingColorMode::kAdaptive;
  Rgb fixed_pad_color{255, 255, 255};
  int patch_size = 4096;
  int patch_stride = 2048;
  double min_fraction = 0.01;

  // inference; arrays are indexed 0 = 40x, 1 = 10x, 2 = 5x
  int window = 512;
  std::array<int, 3> stride = {256, 64, 64};
  std::array<int, 3> vote_threshold = {1, 4, 4};
  ClassScaleMap class_scale;

  // storage + aggregation
  ImageFormat intermediate_format = ImageFormat::kArray;
  int png_level = 6;          // intermediate PNGs
  int overlay_png_level = 1;  // final overlays
  bool dual_merge = false;
  double alpha = 0.4;
  Palette palette;
  bool keep_intermediates = true;

  BackendKind backend = BackendKind::kParallel;

  ScaleVoteConfig vote_config(Magnification m) const;
  /// Throws ParameterError naming the first inconsistent field.
  void validate() const;
};

int scale_slot(Magnification m) noexcept;

PipelinePreset oracle_preset();
PipelinePreset accelerated_preset();
PipelinePreset accelerated_plus_preset();
PipelinePreset preset_by_name(const std::string& name);
std::vector<std::string> preset_names();

/// Keys: pad, patch_size, patch_stride, window, stride_40, stride_10, stride_5,
/// threshold_40, threshold_10, threshold_5, intermediate_format, png_level,
/// overlay_png_level,
/// dual_merge, backend, padding_color_mode, pad_color (R,G,B), aperture,
/// min_component_area, min_fraction, detect_level, alpha, keep_intermediates,
/// scale_<CLASS> (40|10|5), color_<CLASS> (R,G,B).
void apply_override(PipelinePreset& preset, const std::string& key, const std::string& value);
/// Parses "key=value".
void apply_override(PipelinePreset& preset, const std::string& assignment);
void apply_overrides(PipelinePreset& preset, const std::map<std::string, std::string>& kv);

/// Predictor calls per extracted patch: sum over classes of the squared
/// per-axis tile count at the class magnification.
std::uint64_t tiles_per_patch(const PipelinePreset& preset);

}  // namespace slideseg
