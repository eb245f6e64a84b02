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
// slideseg: whole-slide segmentation pipeline driver.
//
//   slideseg segment <slide> --preset P --predictor SPEC --out DIR [--jobs N]
//                            [--config FILE] [--override key=value ...]
//   slideseg bench <slide> --presets a,b,c --predictor SPEC --out DIR [--jobs N]
//   slideseg synth --seed N --size W,H [--spec FILE] --out DIR [--format npy|png]
//
// Exit codes: 0 ok, 2 parameter error, 3 stage failure, 4 predictor transport
// failure.

#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "slideseg/pipeline.hpp"
#include "slideseg/slide_io.hpp"
#include "slideseg/synth.hpp"

namespace {

constexpr int kExitParameter = 2;
constexpr int kExitStage = 3;
constexpr int kExitTransport = 4;

slideseg::PipelinePreset resolve_preset(const std::string& name, const std::string& config,
                                        const std::vector<std::string>& overrides) {
  auto preset = slideseg::preset_by_name(name);
  if (!config.empty()) slideseg::apply_overrides(preset, slideseg::read_key_values(config));
  for (const auto& o : overrides) slideseg::apply_override(preset, o);
  preset.validate();
  return preset;
}

std::vector<std::string> split_csv(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  std::string part;
  while (std::getline(in, part, ',')) {
    if (!part.empty()) out.push_back(part);
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"slideseg - stage-timed whole-slide multi-class segmentation"};
  app.require_subcommand(1);

  std::string slide, preset_name = "accelerated_plus", predictor = "stub", out_dir, config;
  std::vector<std::string> overrides;
  int jobs = 1;

  auto* segment = app.add_subcommand("segment", "Run the pipeline on one slide");
  segment->add_option("slide", slide, "40x slide (.npy or .png)")->required();
  segment->add_option("--preset", preset_name, "oracle | accelerated | accelerated_plus");
  segment->add_option("--predictor", predictor, "stub | oracle:<dir> | external:<endpoint>");
  segment->add_option("--out", out_dir, "Output directory")->required();
  segment->add_option("--jobs", jobs, "Worker threads for the parallel backend");
  segment->add_option("--config", config, "key=value file overriding preset fields");
  segment->add_option("--override", overrides, "key=value preset override (repeatable)");

  std::string presets_csv = "oracle,accelerated,accelerated_plus";
  auto* bench = app.add_subcommand("bench", "Run several presets and report stage timings");
  bench->add_option("slide", slide, "40x slide (.npy or .png)")->required();
  bench->add_option("--presets", presets_csv, "Comma-separated preset names");
  bench->add_option("--predictor", predictor, "stub | oracle:<dir> | external:<endpoint>");
  bench->add_option("--out", out_dir, "Output root directory")->required();
  bench->add_option("--jobs", jobs, "Worker threads for the parallel backend");
  bench->add_option("--config", config, "key=value file applied to every preset");
  bench->add_option("--override", overrides, "key=value override applied to every preset");

  std::uint64_t seed = 0;
  std::string size, spec_file, format = "npy";
  auto* synth = app.add_subcommand("synth", "Generate a synthetic slide with ground truth");
  synth->add_option("--seed", seed, "Noise seed")->required();
  synth->add_option("--size", size, "Canvas W,H at 40x")->required();
  synth->add_option("--spec", spec_file, "Geometry file (default: built-in layout)");
  synth->add_option("--out", out_dir, "Output directory")->required();
  synth->add_option("--format", format, "Slide format: npy or png")
      ->check(CLI::IsMember({"npy", "png"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitParameter;
  }

  try {
    if (*segment) {
      slideseg::RunRequest req;
      req.slide = slide;
      req.preset = resolve_preset(preset_name, config, overrides);
      req.predictor_spec = predictor;
      req.out_dir = out_dir;
      req.jobs = jobs;
      const auto result = slideseg::run_pipeline(req);
      slideseg::BenchReport report;
      report.rows.push_back({req.preset.name, result.timings,
                             result.timings.patch_count * slideseg::tiles_per_patch(req.preset)});
      std::cout << report.to_text() << "manifest: " << result.manifest.string() << "\n";
    } else if (*bench) {
      std::vector<slideseg::PipelinePreset> presets;
      for (const auto& name : split_csv(presets_csv)) {
        presets.push_back(resolve_preset(name, config, overrides));
      }
      const auto report = slideseg::compare_presets(slide, presets, predictor, out_dir, jobs);
      std::cout << report.to_text();
      std::filesystem::create_directories(out_dir);
      std::ofstream csv(std::filesystem::path(out_dir) / "bench.csv");
      csv << report.to_csv();
      std::cout << "csv: " << (std::filesystem::path(out_dir) / "bench.csv").string() << "\n";
    } else if (*synth) {
      const auto dims = split_csv(size);
      if (dims.size() != 2) throw slideseg::ParameterError("--size must be W,H");
      const int w = std::stoi(dims[0]);
      const int h = std::stoi(dims[1]);
      slideseg::SynthSpec spec;
      if (spec_file.empty()) {
        spec = slideseg::standard_layout(w, h);
      } else {
        std::ifstream in(spec_file);
        if (!in) throw slideseg::ParameterError("cannot read spec file '" + spec_file + "'");
        std::stringstream ss;
        ss << in.rdbuf();
        spec.width = w;
        spec.height = h;
        spec.shapes = slideseg::parse_synth_shapes(ss.str(), &spec.background);
      }
      const auto slide_out = slideseg::synth_slide(seed, spec);
      std::filesystem::create_directories(out_dir);
      const auto slide_path = std::filesystem::path(out_dir) / ("slide." + format);
      slideseg::save_slide(slide_path, slide_out.raster40);
      slideseg::save_ground_truth(out_dir, slide_out.truth);
      std::cout << "slide: " << slide_path.string() << "\n"
                << "truth: " << out_dir << "/truth_<CLASS>.npy\n";
    }
  } catch (const slideseg::ParameterError& e) {
    std::cerr << "parameter error: " << e.what() << "\n";
    return kExitParameter;
  } catch (const std::invalid_argument& e) {
    std::cerr << "parameter error: " << e.what() << "\n";
    return kExitParameter;
  } catch (const slideseg::TransportError& e) {
    std::cerr << "predictor transport failure: " << e.what() << "\n";
    return kExitTransport;
  } catch (const std::exception& e) {
    std::cerr << "stage failure: " << e.what() << "\n";
    return kExitStage;
  }
  return 0;
}
