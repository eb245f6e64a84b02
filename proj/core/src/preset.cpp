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
#include "slideseg/preset.hpp"

#include <charconv>
#include <sstream>

namespace slideseg {

namespace {

int parse_int(const std::string& key, const std::string& v) {
  int out = 0;
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || p != v.data() + v.size()) {
    throw ParameterError("override " + key + ": '" + v + "' is not an integer");
  }
  return out;
}

double parse_double(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const double d = std::stod(v, &used);
    if (used == v.size()) return d;
  } catch (const std::exception&) {
  }
  throw ParameterError("override " + key + ": '" + v + "' is not a number");
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ParameterError("override " + key + ": '" + v + "' is not a boolean");
}

Rgb parse_rgb(const std::string& key, const std::string& v) {
  std::istringstream in(v);
  std::string part;
  std::array<int, 3> c{};
  for (int i = 0; i < 3; ++i) {
    if (!std::getline(in, part, ',')) throw ParameterError("override " + key + ": expected R,G,B");
    c[i] = parse_int(key, part);
    if (c[i] < 0 || c[i] > 255) throw ParameterError("override " + key + ": channel out of range");
  }
  return Rgb{static_cast<std::uint8_t>(c[0]), static_cast<std::uint8_t>(c[1]),
             static_cast<std::uint8_t>(c[2])};
}

}  // namespace

int scale_slot(Magnification m) noexcept {
  switch (m) {
    case Magnification::k40: return 0;
    case Magnification::k10: return 1;
    case Magnification::k5: return 2;
  }
  return 0;
}

ScaleVoteConfig PipelinePreset::vote_config(Magnification m) const {
  return ScaleVoteConfig{stride[scale_slot(m)], vote_threshold[scale_slot(m)]};
}

void PipelinePreset::validate() const {
  auto fail = [](const std::string& why) { throw ParameterError("preset: " + why); };
  if (aperture < 1 || aperture % 2 == 0) fail("aperture must be a positive odd integer");
  if (min_component_area < 0 || min_fraction < 0) fail("area fractions must be >= 0");
  if (pad < 0 || pad % 8 != 0) fail("pad must be a non-negative multiple of 8");
  if (patch_size <= 0 || patch_size % 8 != 0) fail("patch_size must be a positive multiple of 8");
  if (patch_stride <= 0 || patch_stride > patch_size) {
    fail("patch_stride must lie in [1, patch_size]");
  }
  if (patch_size % patch_stride != 0) fail("patch_size must be a multiple of patch_stride");
  if (window <= 0) fail("window must be positive");
  for (TissueClass c : kTissueClasses) {
    const Magnification m = class_scale[c];
    const int extent = patch_size / scale_factor(m);
    if (window > extent) {
      fail("window " + std::to_string(window) + " exceeds the " +
           std::to_string(mag_value(m)) + "x patch extent " + std::to_string(extent));
    }
  }
  for (int s = 0; s < 3; ++s) {
    if (stride[s] < 1 || stride[s] > window) fail("tile strides must lie in [1, window]");
    if (vote_threshold[s] < 1) fail("vote thresholds must be >= 1");
    const long depth = (window + stride[s] - 1) / stride[s];
    if (depth * depth > 0xFFFF) fail("tile stride too small for u16 vote counters");
  }
  if ((patch_size / patch_stride) * (patch_size / patch_stride) > 0xFFFF) {
    fail("patch_stride too small for u16 merge counters");
  }
  if (png_level < 0 || png_level > 9) fail("png_level must lie in [0, 9]");
  if (overlay_png_level < 0 || overlay_png_level > 9) {
    fail("overlay_png_level must lie in [0, 9]");
  }
  if (!(alpha >= 0.0 && alpha <= 1.0)) fail("alpha must lie in [0, 1]");
}

PipelinePreset accelerated_plus_preset() { return PipelinePreset{}; }

PipelinePreset oracle_preset() {
  PipelinePreset p;
  p.name = "oracle";
  p.pad = 2048;
  p.padding_color_mode = PaddingColorMode::kFixed;
  p.patch_size = 2048;
  p.patch_stride = 1024;
  p.window = 256;
  p.stride = {128, 128, 128};
  p.vote_threshold = {2, 2, 2};
  p.intermediate_format = ImageFormat::kPng;
  p.dual_merge = true;
  p.backend = BackendKind::kSerial;
  return p;
}

PipelinePreset accelerated_preset() {
  PipelinePreset p = oracle_preset();
  p.name = "accelerated";
  p.backend = BackendKind::kParallel;
  return p;
}

PipelinePreset preset_by_name(const std::string& name) {
  if (name == "oracle") return oracle_preset();
  if (name == "accelerated") return accelerated_preset();
  if (name == "accelerated_plus" || name == "accelerated+") return accelerated_plus_preset();
  throw ParameterError("unknown preset '" + name + "'");
}

std::vector<std::string> preset_names() { return {"oracle", "accelerated", "accelerated_plus"}; }

void apply_override(PipelinePreset& p, const std::string& key, const std::string& value) {
  if (key == "pad") p.pad = parse_int(key, value);
  else if (key == "patch_size") p.patch_size = parse_int(key, value);
  else if (key == "patch_stride") p.patch_stride = parse_int(key, value);
  else if (key == "window") p.window = parse_int(key, value);
  else if (key == "stride_40") p.stride[0] = parse_int(key, value);
  else if (key == "stride_10") p.stride[1] = parse_int(key, value);
  else if (key == "stride_5") p.stride[2] = parse_int(key, value);
  else if (key == "threshold_40") p.vote_threshold[0] = parse_int(key, value);
  else if (key == "threshold_10") p.vote_threshold[1] = parse_int(key, value);
  else if (key == "threshold_5") p.vote_threshold[2] = parse_int(key, value);
  else if (key == "intermediate_format") p.intermediate_format = parse_format(value);
  else if (key == "png_level") p.png_level = parse_int(key, value);
  else if (key == "overlay_png_level") p.overlay_png_level = parse_int(key, value);
  else if (key == "dual_merge") p.dual_merge = parse_bool(key, value);
  else if (key == "backend") p.backend = parse_backend(value);
  else if (key == "padding_color_mode") {
    if (value == "fixed") p.padding_color_mode = PaddingColorMode::kFixed;
    else if (value == "adaptive") p.padding_color_mode = PaddingColorMode::kAdaptive;
    else throw ParameterError("padding_color_mode must be fixed or adaptive");
  } else if (key == "pad_color") p.fixed_pad_color = parse_rgb(key, value);
  else if (key == "aperture") p.aperture = parse_int(key, value);
  else if (key == "min_component_area") p.min_component_area = parse_double(key, value);
  else if (key == "min_fraction") p.min_fraction = parse_double(key, value);
  else if (key == "detect_level") p.detect_level = parse_magnification(parse_int(key, value));
  else if (key == "alpha") p.alpha = parse_double(key, value);
  else if (key == "keep_intermediates") p.keep_intermediates = parse_bool(key, value);
  else if (key == "name") p.name = value;
  else if (key.rfind("scale_", 0) == 0) {
    p.class_scale[parse_class(key.substr(6))] = parse_magnification(parse_int(key, value));
  } else if (key.rfind("color_", 0) == 0) {
    p.palette.colors[class_index(parse_class(key.substr(6)))] = parse_rgb(key, value);
  } else {
    throw ParameterError("unknown preset key '" + key + "'");
  }
}

void apply_override(PipelinePreset& preset, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw ParameterError("override must be key=value; got '" + assignment + "'");
  }
  apply_override(preset, assignment.substr(0, eq), assignment.substr(eq + 1));
}

void apply_overrides(PipelinePreset& preset, const std::map<std::string, std::string>& kv) {
  for (const auto& [k, v] : kv) apply_override(preset, k, v);
}

std::uint64_t tiles_per_patch(const PipelinePreset& preset) {
  std::uint64_t total = 0;
  for (TissueClass c : kTissueClasses) {
    const Magnification m = preset.class_scale[c];
    const TilePlan plan = plan_tiles(preset.patch_size / scale_factor(m), preset.window,
                                     preset.stride[scale_slot(m)]);
    total += plan.tile_count();
  }
  return total;
}

}  // namespace slideseg
