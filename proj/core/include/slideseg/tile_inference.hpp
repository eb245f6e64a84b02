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
#include <atomic>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "slideseg/backend.hpp"
#include "slideseg/raster.hpp"

namespace slideseg {

/// Magnification at which each tissue class is predicted.
struct ClassScaleMap {
  std::array<Magnification, 6> scale = {Magnification::k5,  Magnification::k5,
                                        Magnification::k10, Magnification::k10,
                                        Magnification::k40, Magnification::k40};

  Magnification operator[](TissueClass c) const noexcept { return scale[class_index(c)]; }
  Magnification& operator[](TissueClass c) noexcept { return scale[class_index(c)]; }
};

/// Square sliding-window plan over an extent x extent raster.
struct TilePlan {
  int extent = 0;
  int window = 0;
  int stride = 0;
  std::vector<int> axis;  // origins along each axis

  std::size_t tile_count() const noexcept { return axis.size() * axis.size(); }
  /// Tile origins (x, y), row-major.
  std::vector<std::pair<int, int>> origins() const;
};

/// Origins 0, stride, ... with the final origin extent - window included once.
TilePlan plan_tiles(int extent, int window, int stride);

struct VoteGrid {
  Counter positive;
  Counter coverage;
  TissueClass tissue_class = TissueClass::TUFT;
  Magnification magnification = Magnification::k40;
};

/// Location of a tile, for predictors that need it (the ground-truth oracle).
struct TileContext {
  int patch_x = 0;  // patch origin in unpadded 40x slide coordinates
  int patch_y = 0;
  int tile_x = 0;   // tile origin inside the patch, at the class magnification
  int tile_y = 0;
};

/// Binary segmentation model for one tile. Implementations must be
/// deterministic and safe to call concurrently.
class Predictor {
 public:
  virtual ~Predictor() = default;

  /// Writes a tile.width x tile.height map of {0, 1} into out (pre-sized,
  /// single channel).
  virtual void predict(const ImageView& tile, TissueClass cls, Magnification mag,
                       const TileContext& ctx, Image& out) = 0;

  virtual std::string name() const = 0;
};

/// Thresholds the green channel: positive iff G < 100 + 20 * class_index.
class StubPredictor final : public Predictor {
 public:
  static int cutoff(TissueClass c) noexcept { return 100 + 20 * class_index(c); }

  void predict(const ImageView& tile, TissueClass cls, Magnification mag,
               const TileContext& ctx, Image& out) override;
  std::string name() const override { return "stub"; }
};

/// Answers with the ground-truth mask sampled at the tile's slide footprint.
/// A class-magnification pixel (u, v) reads the 40x mask at its block centre;
/// outside the slide the answer is 0.
class OraclePredictor final : public Predictor {
 public:
  explicit OraclePredictor(const GroundTruth& truth) : truth_(&truth) {}

  void predict(const ImageView& tile, TissueClass cls, Magnification mag,
               const TileContext& ctx, Image& out) override;
  std::string name() const override { return "oracle"; }

 private:
  const GroundTruth* truth_;
};

/// Returns a constant map; handy for tests and the echo server.
class ConstantPredictor final : public Predictor {
 public:
  explicit ConstantPredictor(std::uint8_t value) : value_(value ? 1 : 0) {}
  void predict(const ImageView& tile, TissueClass cls, Magnification mag,
               const TileContext& ctx, Image& out) override;
  std::string name() const override { return value_ ? "ones" : "zeros"; }

 private:
  std::uint8_t value_;
};

struct ScaleVoteConfig {
  int stride = 256;
  int vote_threshold = 1;
};

struct InferStats {
  std::uint64_t predictor_calls = 0;
};

/// Pixel is 1 iff positive >= min(threshold, coverage) and coverage > 0.
Image resolve_votes(const VoteGrid& grid, int vote_threshold);

/// Sliding-window prediction of one class over a patch already resampled to
/// the class magnification (square, extent x extent). Tile predictions are
/// accumulated into a VoteGrid; per-worker grids are merged by summation so
/// the result is independent of backend width and tile order.
Image infer_patch_class(const Image& patch_at_mag, TissueClass cls, Magnification mag,
                        Predictor& predictor, int window, const ScaleVoteConfig& config,
                        const Backend& backend, int patch_x = 0, int patch_y = 0,
                        VoteGrid* grid_out = nullptr, InferStats* stats = nullptr);

namespace kernels {

struct TileVote {
  int x = 0;
  int y = 0;
  Image prediction;  // single channel {0, 1}
};

/// Adds every tile's prediction into positive and 1 into coverage over its
/// footprint.
VoteGrid vote_accumulate(std::span<const TileVote> tiles, int extent, const Backend& backend);

}  // namespace kernels

}  // namespace slideseg
