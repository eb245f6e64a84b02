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
#include "slideseg/pipeline.hpp"

#include <chrono>
#include <cmath>
#include <fstream>

#include "json.hpp"
#include "slideseg/array_file.hpp"
#include "slideseg/patch_extractor.hpp"
#include "slideseg/png_io.hpp"
#include "slideseg/slide_io.hpp"
#include "slideseg/tissue_detector.hpp"
#include "slideseg/wire_protocol.hpp"

namespace slideseg {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  const auto ms =
      std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() - t0).count();
  return static_cast<double>(ms) / 1000.0;
}

json rgb_json(Rgb c) { return json::array({c.r, c.g, c.b}); }

json preset_json(const PipelinePreset& p) {
  json scales = json::object();
  for (TissueClass c : kTissueClasses) scales[std::string(class_name(c))] = mag_value(p.class_scale[c]);
  return json{
      {"name", p.name},
      {"aperture", p.aperture},
      {"min_component_area", p.min_component_area},
      {"detect_level", mag_value(p.detect_level)},
      {"pad", p.pad},
      {"padding_color_mode", p.padding_color_mode == PaddingColorMode::kFixed ? "fixed" : "adaptive"},
      {"patch_size", p.patch_size},
      {"patch_stride", p.patch_stride},
      {"min_fraction", p.min_fraction},
      {"window", p.window},
      {"stride_per_scale", {{"40", p.stride[0]}, {"10", p.stride[1]}, {"5", p.stride[2]}}},
      {"vote_threshold_per_scale",
       {{"40", p.vote_threshold[0]}, {"10", p.vote_threshold[1]}, {"5", p.vote_threshold[2]}}},
      {"class_scale", scales},
      {"intermediate_format", std::string(format_name(p.intermediate_format))},
      {"png_level", p.png_level},
      {"overlay_png_level", p.overlay_png_level},
      {"dual_merge", p.dual_merge},
      {"backend", std::string(backend_name(p.backend))},
  };
}

json timings_json(const StageTimings& t) {
  return json{{"detection_extraction_s", t.detection_extraction_s},
              {"inference_s", t.inference_s},
              {"aggregation_s", t.aggregation_s},
              {"total_s", t.total_s},
              {"patch_count", t.patch_count},
              {"tile_count", t.tile_count},
              {"predictor_calls", t.predictor_calls},
              {"time_per_patch_s", t.time_per_patch_s()}};
}

void write_json(const fs::path& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  out << j.dump(2) << "\n";
}

void write_timing_row(const fs::path& path, const std::string& preset, const StageTimings& t) {
  BenchReport r;
  r.rows.push_back(BenchRow{preset, t, 0});
  std::ofstream out(path);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  out << r.to_csv();
}

std::string pred_filename(TissueClass c, const std::string& patch_stem, ImageFormat f) {
  return "pred_" + std::string(class_name(c)) + "_" + patch_stem + std::string(format_extension(f));
}

}  // namespace

GroundTruth load_ground_truth(const fs::path& dir) {
  GroundTruth gt;
  for (TissueClass c : kTissueClasses) {
    const fs::path p = dir / ("truth_" + std::string(class_name(c)) + ".npy");
    gt.masks[c] = load_mask(p);
  }
  return gt;
}

void save_ground_truth(const fs::path& dir, const GroundTruth& truth) {
  fs::create_directories(dir);
  for (const auto& [c, mask] : truth.masks) {
    write_array(dir / ("truth_" + std::string(class_name(c)) + ".npy"), to_array(mask));
  }
}

PredictorHandle make_predictor(const std::string& spec) {
  PredictorHandle h;
  h.spec = spec;
  if (spec == "stub") {
    h.predictor = std::make_unique<StubPredictor>();
  } else if (spec.rfind("oracle:", 0) == 0) {
    h.truth = std::make_shared<GroundTruth>(load_ground_truth(spec.substr(7)));
    h.predictor = std::make_unique<OraclePredictor>(*h.truth);
  } else if (spec.rfind("external:", 0) == 0) {
    h.predictor = std::make_unique<ExternalPredictor>(spec.substr(9));
  } else {
    throw ParameterError("predictor must be stub, oracle:<dir> or external:<endpoint>; got '" +
                         spec + "'");
  }
  return h;
}

RunResult run_pipeline(const RunRequest& request) {
  PredictorHandle handle = make_predictor(request.predictor_spec);
  return run_pipeline(request, *handle.predictor);
}

RunResult run_pipeline(const RunRequest& request, Predictor& predictor) {
  const PipelinePreset& preset = request.preset;
  preset.validate();
  if (request.jobs < 1) throw ParameterError("jobs must be >= 1");
  if (!fs::exists(request.slide)) {
    throw ParameterError("slide not found: '" + request.slide.string() + "'");
  }
  const Backend backend = preset.backend == BackendKind::kSerial
                              ? Backend::serial()
                              : Backend::parallel(request.jobs);
  const ImageFormat fmt = preset.intermediate_format;

  const fs::path out = request.out_dir;
  const fs::path patch_dir = out / "patches";
  const fs::path pred_dir = out / "predictions";
  const fs::path map_dir = out / "maps";
  for (const auto& d : {patch_dir, pred_dir, map_dir}) {
    fs::remove_all(d);
    fs::create_directories(d);
  }

  RunResult result;
  result.manifest = out / "manifest.json";
  StageTimings& timings = result.timings;
  json manifest;
  manifest["status"] = "running";
  manifest["preset"] = preset_json(preset);
  manifest["predictor"] = predictor.name();
  manifest["backend_width"] = backend.width();

  std::string stage = "detect_extract";
  const auto run_start = Clock::now();
  try {
    // Stage 1: tissue detection and patch extraction.
    auto t0 = Clock::now();
    LoadedSlide loaded = load_slide(request.slide);
    const SlidePyramid pyramid = build_pyramid(std::move(loaded.raster40), loaded.mpp40, backend);
    const int width = pyramid.width();
    const int height = pyramid.height();
    manifest["slide"] = {{"path", request.slide.string()},
                         {"width", width},
                         {"height", height},
                         {"mpp40", pyramid.mpp40}};

    const ForegroundMask fg = detect_foreground(
        pyramid, DetectorParams{preset.aperture, preset.min_component_area, preset.detect_level},
        backend);
    write_array(out / "foreground_mask.npy", to_array(fg.mask));
    json comps = json::array();
    for (const auto& c : fg.components) {
      comps.push_back({{"id", c.id}, {"area", c.area}, {"bbox", {c.x0, c.y0, c.x1, c.y1}}});
    }
    manifest["foreground"] = {{"level", mag_value(fg.level)},
                              {"otsu_threshold", fg.otsu_threshold},
                              {"mask", "foreground_mask.npy"},
                              {"components", comps}};

    const Rgb pad_color = preset.padding_color_mode == PaddingColorMode::kAdaptive
                              ? padding_color(pyramid.base())
                              : preset.fixed_pad_color;
    const PaddedSlide padded(pyramid, preset.pad, pad_color);
    manifest["padding"] = {{"pad", preset.pad},
                           {"color", rgb_json(pad_color)},
                           {"padded_width", padded.width()},
                           {"padded_height", padded.height()}};

    const auto sites = select_patch_sites(
        padded, fg, ExtractParams{preset.patch_size, preset.patch_stride, preset.min_fraction});
    std::vector<fs::path> patch_files(sites.size());
    backend.for_chunks(sites.size(), [&](std::size_t b, std::size_t e, int) {
      for (std::size_t i = b; i < e; ++i) {
        Patch p{sites[i], preset.patch_size,
                padded.crop(sites[i].x, sites[i].y, preset.patch_size, preset.patch_size)};
        patch_files[i] = persist_patch(p, patch_dir, fmt, preset.png_level);
      }
    });
    json patches = json::array();
    for (std::size_t i = 0; i < sites.size(); ++i) {
      patches.push_back({{"file", "patches/" + patch_files[i].filename().string()},
                         {"grid", {sites[i].i, sites[i].j}},
                         {"origin", {sites[i].x, sites[i].y}}});
    }
    manifest["patches"] = patches;
    timings.patch_count = sites.size();
    timings.detection_extraction_s = seconds_since(t0);

    // Stage 2: multi-scale overlap-tiled inference.
    stage = "inference";
    t0 = Clock::now();
    InferStats stats;
    for (std::size_t i = 0; i < sites.size(); ++i) {
      const std::string stem = patch_files[i].stem().string();
      try {
        const Image patch40 = load_image(patch_files[i]);
        std::map<Magnification, Image> levels;
        for (TissueClass c : kTissueClasses) {
          const Magnification m = preset.class_scale[c];
          if (m != Magnification::k40 && !levels.count(m)) {
            levels[m] = downsample_area(patch40, scale_factor(m), backend);
          }
        }
        for (TissueClass c : kTissueClasses) {
          const Magnification m = preset.class_scale[c];
          const Image& at_mag = m == Magnification::k40 ? patch40 : levels.at(m);
          const Image map = infer_patch_class(
              at_mag, c, m, predictor, preset.window, preset.vote_config(m), backend,
              sites[i].x - preset.pad, sites[i].y - preset.pad, nullptr, &stats);
          timings.tile_count +=
              plan_tiles(at_mag.width(), preset.window, preset.stride[scale_slot(m)]).tile_count();
          persist_image(map, pred_dir / pred_filename(c, stem, fmt), fmt, preset.png_level);
        }
      } catch (const TransportError& e) {
        throw TransportError("patch " + stem + ": " + e.what());
      } catch (const std::exception& e) {
        throw std::runtime_error("patch " + stem + ": " + e.what());
      }
    }
    timings.predictor_calls = stats.predictor_calls;
    timings.inference_s = seconds_since(t0);

    // Stage 3: slide-wise aggregation.
    stage = "aggregate";
    t0 = Clock::now();
    auto merge_class = [&](TissueClass c, Magnification target) {
      SlideAccumulator acc(c, width, height, preset.patch_size, target);
      for (std::size_t i = 0; i < sites.size(); ++i) {
        const std::string stem = patch_files[i].stem().string();
        PatchMap pm;
        pm.x = sites[i].x - preset.pad;
        pm.y = sites[i].y - preset.pad;
        pm.magnification = preset.class_scale[c];
        pm.map = load_image(pred_dir / pred_filename(c, stem, fmt));
        pm.label = stem;
        acc.add(pm, backend);
      }
      return std::move(acc).finish();
    };

    const Image mask40 = mask_at_level(fg, Magnification::k40);
    std::map<TissueClass, Image> maps40;
    json class_maps = json::array();
    for (TissueClass c : kTissueClasses) {
      SlideClassMap merged = filter_by_foreground(merge_class(c, Magnification::k40), mask40, backend);
      const std::string name =
          "class_" + std::string(class_name(c)) + std::string(format_extension(fmt));
      persist_image(merged.map, map_dir / name, fmt, preset.png_level);
      result.class_maps.push_back(map_dir / name);
      class_maps.push_back({{"class", std::string(class_name(c))},
                            {"magnification", 40},
                            {"predicted_at", mag_value(preset.class_scale[c])},
                            {"file", "maps/" + name},
                            {"positive_pixels", count_positive(merged.map)}});
      maps40[c] = std::move(merged.map);
    }

    const Image overlay40 =
        render_overlay(pyramid.base(), maps40, preset.palette, preset.alpha, backend);
    result.overlay40 = out / "overlay_40x.png";
    write_png(result.overlay40, overlay40, preset.overlay_png_level);
    maps40.clear();

    result.overlay10 = out / "overlay_10x.png";
    json overlays = json::array();
    overlays.push_back({{"level", 40}, {"file", "overlay_40x.png"}, {"source", "merged_40x"}});
    if (!preset.dual_merge) {
      write_png(result.overlay10, downsample_overlay(overlay40, backend),
                preset.overlay_png_level);
      overlays.push_back({{"level", 10}, {"file", "overlay_10x.png"}, {"source", "resized_40x"}});
    } else {
      const Image mask10 = mask_at_level(fg, Magnification::k10);
      std::map<TissueClass, Image> maps10;
      for (std::size_t k = 0; k < kTissueClasses.size(); ++k) {
        const TissueClass c = kTissueClasses[k];
        SlideClassMap merged =
            filter_by_foreground(merge_class(c, Magnification::k10), mask10, backend);
        const std::string name =
            "class_" + std::string(class_name(c)) + "_10x" + std::string(format_extension(fmt));
        persist_image(merged.map, map_dir / name, fmt, preset.png_level);
        class_maps[k]["file_10x"] = "maps/" + name;
        maps10[c] = std::move(merged.map);
      }
      write_png(result.overlay10,
                render_overlay(pyramid.level(Magnification::k10), maps10, preset.palette,
                               preset.alpha, backend),
                preset.overlay_png_level);
      overlays.push_back({{"level", 10}, {"file", "overlay_10x.png"}, {"source", "merged_10x"}});
    }
    manifest["class_maps"] = class_maps;
    manifest["overlays"] = overlays;
    json palette = json::object();
    for (TissueClass c : kTissueClasses) palette[std::string(class_name(c))] = rgb_json(preset.palette[c]);
    manifest["palette"] = palette;
    manifest["alpha"] = preset.alpha;
    timings.aggregation_s = seconds_since(t0);
    timings.total_s = seconds_since(run_start);
  } catch (const std::exception& e) {
    timings.total_s = seconds_since(run_start);
    manifest["status"] = "incomplete";
    manifest["failed_stage"] = stage;
    manifest["error"] = e.what();
    manifest["timings"] = timings_json(timings);
    try {
      write_json(result.manifest, manifest);
    } catch (const std::exception&) {
    }
    if (dynamic_cast<const TransportError*>(&e)) {
      throw TransportError(stage + ": " + e.what());
    }
    throw StageError(stage, e.what());
  }

  manifest["status"] = "complete";
  manifest["timings"] = timings_json(timings);
  write_json(result.manifest, manifest);
  write_timing_row(out / "timings.csv", preset.name, timings);
  if (!preset.keep_intermediates) {
    fs::remove_all(patch_dir);
    fs::remove_all(pred_dir);
  }
  return result;
}

BenchReport compare_presets(const fs::path& slide, const std::vector<PipelinePreset>& presets,
                            const std::string& predictor_spec, const fs::path& out_root,
                            int jobs) {
  if (presets.size() < 2) throw ParameterError("compare_presets needs at least two presets");
  BenchReport report;
  for (std::size_t i = 0; i < presets.size(); ++i) {
    const auto& p = presets[i];
    RunRequest req;
    req.slide = slide;
    req.preset = p;
    req.predictor_spec = predictor_spec;
    // Same-named presets still get separate directories.
    req.out_dir = out_root / (std::to_string(i) + "_" + p.name);
    req.jobs = jobs;
    RunResult r = run_pipeline(req);
    report.rows.push_back(BenchRow{p.name, r.timings, r.timings.patch_count * tiles_per_patch(p)});
  }
  return report;
}

}  // namespace slideseg
