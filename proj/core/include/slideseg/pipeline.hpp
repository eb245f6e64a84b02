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
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "slideseg/preset.hpp"
#include "slideseg/tile_inference.hpp"

namespace slideseg {

/// One benchmark row: wall-clock seconds per stage (monotonic clock) and the
/// work counters behind them.
struct StageTimings {
  double detection_extraction_s = 0;
  double inference_s = 0;
  double aggregation_s = 0;
  double total_s = 0;
  std::uint64_t patch_count = 0;
  std::uint64_t tile_count = 0;
  std::uint64_t predictor_calls = 0;

  double time_per_patch_s() const noexcept {
    return patch_count ? total_s / static_cast<double>(patch_count) : 0.0;
  }
};

/// A predictor plus whatever it borrows (ground truth for the oracle).
struct PredictorHandle {
  std::unique_ptr<Predictor> predictor;
  std::shared_ptr<GroundTruth> truth;
  std::string spec;
};

/// "stub", "oracle:<dir with truth_<CLASS>.npy>", or "external:<endpoint>".
PredictorHandle make_predictor(const std::string& spec);

/// Reads truth_<CLASS>.npy for every class from dir.
GroundTruth load_ground_truth(const std::filesystem::path& dir);
void save_ground_truth(const std::filesystem::path& dir, const GroundTruth& truth);

struct RunRequest {
  std::filesystem::path slide;
  PipelinePreset preset;
  std::string predictor_spec = "stub";
  std::filesystem::path out_dir;
  int jobs = 1;
};

struct RunResult {
  std::filesystem::path manifest;
  StageTimings timings;
  std::vector<std::filesystem::path> class_maps;  // 40x, kTissueClasses order
  std::filesystem::path overlay40;
  std::filesystem::path overlay10;
};

/// detect -> extract -> infer -> aggregate. Writes patches/, predictions/,
/// maps/, overlays, foreground_mask.npy, manifest.json and timings.csv under
/// out_dir. On failure the manifest is written with status "incomplete" and
/// the error is rethrown: TransportError as is, everything else wrapped in
/// StageError.
RunResult run_pipeline(const RunRequest& request);
/// Same, with an already constructed predictor.
RunResult run_pipeline(const RunRequest& request, Predictor& predictor);

struct BenchRow {
  std::string preset;
  StageTimings timings;
  std::uint64_t expected_predictor_calls = 0;  // patches x tiles_per_patch
};

struct BenchReport {
  std::vector<BenchRow> rows;

  std::string to_text() const;
  std::string to_csv() const;
};

/// Runs every preset on the same slide into out_root/<preset>/.
BenchReport compare_presets(const std::filesystem::path& slide,
                            const std::vector<PipelinePreset>& presets,
                            const std::string& predictor_spec,
                            const std::filesystem::path& out_root, int jobs);

}  // namespace slideseg
