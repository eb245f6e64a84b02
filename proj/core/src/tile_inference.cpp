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
#include "slideseg/tile_inference.hpp"

#include <algorithm>

#include "slideseg/patch_extractor.hpp"

namespace slideseg {

namespace {

void add_tile(Counter& positive, Counter& coverage, const Image& pred, int ox, int oy) {
  const int w = pred.width();
  for (int y = 0; y < pred.height(); ++y) {
    const std::uint8_t* p = pred.row(y);
    std::uint16_t* pos = positive.row(oy + y) + ox;
    std::uint16_t* cov = coverage.row(oy + y) + ox;
    for (int x = 0; x < w; ++x) {
      pos[x] = static_cast<std::uint16_t>(pos[x] + (p[x] != 0));
      cov[x] = static_cast<std::uint16_t>(cov[x] + 1);
    }
  }
}

void add_into(Counter& dst, const Counter& src) {
  auto d = dst.data();
  auto s = src.data();
  for (std::size_t i = 0; i < d.size(); ++i) d[i] = static_cast<std::uint16_t>(d[i] + s[i]);
}

void check_overlap_depth(int window, int stride) {
  const long per_axis = (window + stride - 1) / stride;
  if (per_axis * per_axis > 0xFFFF) {
    throw ParameterError("stride " + std::to_string(stride) +
                         " gives more overlapping tiles than a u16 vote counter can hold");
  }
}

}  // namespace

std::vector<std::pair<int, int>> TilePlan::origins() const {
  std::vector<std::pair<int, int>> out;
  out.reserve(tile_count());
  for (int y : axis) {
    for (int x : axis) out.emplace_back(x, y);
  }
  return out;
}

TilePlan plan_tiles(int extent, int window, int stride) {
  if (stride < 1 || stride > window) {
    throw ParameterError("tile stride must lie in [1, window]; got " + std::to_string(stride));
  }
  TilePlan plan;
  plan.extent = extent;
  plan.window = window;
  plan.stride = stride;
  plan.axis = axis_origins(extent, window, stride);
  return plan;
}

void StubPredictor::predict(const ImageView& tile, TissueClass cls, Magnification,
                            const TileContext&, Image& out) {
  const int cut = cutoff(cls);
  for (int y = 0; y < tile.height; ++y) {
    const std::uint8_t* in = tile.row(y);
    std::uint8_t* dst = out.row(y);
    for (int x = 0; x < tile.width; ++x) dst[x] = in[3 * x + 1] < cut ? 1 : 0;
  }
}

void OraclePredictor::predict(const ImageView& tile, TissueClass cls, Magnification mag,
                              const TileContext& ctx, Image& out) {
  const Image& mask = truth_->masks.at(cls);
  const int f = scale_factor(mag);
  const int half = f / 2;
  for (int v = 0; v < tile.height; ++v) {
    const int sy = ctx.patch_y + (ctx.tile_y + v) * f + half;
    std::uint8_t* dst = out.row(v);
    if (sy < 0 || sy >= mask.height()) {
      std::fill(dst, dst + tile.width, std::uint8_t{0});
      continue;
    }
    const std::uint8_t* row = mask.row(sy);
    for (int u = 0; u < tile.width; ++u) {
      const int sx = ctx.patch_x + (ctx.tile_x + u) * f + half;
      dst[u] = (sx >= 0 && sx < mask.width()) ? row[sx] : 0;
    }
  }
}

void ConstantPredictor::predict(const ImageView&, TissueClass, Magnification,
                                const TileContext&, Image& out) {
  std::fill(out.data().begin(), out.data().end(), value_);
}

Image resolve_votes(const VoteGrid& grid, int vote_threshold) {
  if (vote_threshold < 1) throw ParameterError("vote threshold must be >= 1");
  Image out(grid.positive.width(), grid.positive.height(), 1);
  auto pos = grid.positive.data();
  auto cov = grid.coverage.data();
  auto dst = out.data();
  const auto t = static_cast<std::uint16_t>(std::min(vote_threshold, 0xFFFF));
  for (std::size_t i = 0; i < dst.size(); ++i) {
    const std::uint16_t effective = std::min(t, cov[i]);
    dst[i] = (cov[i] > 0 && pos[i] >= effective) ? 1 : 0;
  }
  return out;
}

Image infer_patch_class(const Image& patch_at_mag, TissueClass cls, Magnification mag,
                        Predictor& predictor, int window, const ScaleVoteConfig& config,
                        const Backend& backend, int patch_x, int patch_y, VoteGrid* grid_out,
                        InferStats* stats) {
  if (patch_at_mag.width() != patch_at_mag.height()) {
    throw ParameterError("patch must be square");
  }
  if (config.vote_threshold < 1) throw ParameterError("vote threshold must be >= 1");
  const int extent = patch_at_mag.width();
  const TilePlan plan = plan_tiles(extent, window, config.stride);
  check_overlap_depth(window, config.stride);
  const auto origins = plan.origins();

  const int chunks = backend.chunks_for(origins.size());
  std::vector<Counter> positive(static_cast<std::size_t>(chunks));
  std::vector<Counter> coverage(static_cast<std::size_t>(chunks));
  std::atomic<std::uint64_t> calls{0};

  backend.for_chunks(origins.size(), [&](std::size_t begin, std::size_t end, int chunk) {
    Counter& pos = positive[static_cast<std::size_t>(chunk)];
    Counter& cov = coverage[static_cast<std::size_t>(chunk)];
    pos = Counter(extent, extent, 1);
    cov = Counter(extent, extent, 1);
    Image pred(window, window, 1);
    for (std::size_t t = begin; t < end; ++t) {
      const auto [tx, ty] = origins[t];
      const TileContext ctx{patch_x, patch_y, tx, ty};
      auto where = [&, tx = tx, ty = ty] {
        return "tile (" + std::to_string(tx) + ", " + std::to_string(ty) + ") class " +
               std::string(class_name(cls)) + " at " + std::to_string(mag_value(mag)) + "x";
      };
      try {
        predictor.predict(view(patch_at_mag, tx, ty, window, window), cls, mag, ctx, pred);
      } catch (const TransportError& e) {
        throw TransportError(where() + ": " + e.what());
      } catch (const std::exception& e) {
        throw PredictionError(where() + ": " + e.what());
      }
      calls.fetch_add(1, std::memory_order_relaxed);
      add_tile(pos, cov, pred, tx, ty);
    }
  });

  VoteGrid grid;
  grid.tissue_class = cls;
  grid.magnification = mag;
  grid.positive = std::move(positive[0]);
  grid.coverage = std::move(coverage[0]);
  for (int c = 1; c < chunks; ++c) {
    add_into(grid.positive, positive[static_cast<std::size_t>(c)]);
    add_into(grid.coverage, coverage[static_cast<std::size_t>(c)]);
  }
  if (stats) stats->predictor_calls += calls.load();
  Image out = resolve_votes(grid, config.vote_threshold);
  if (grid_out) *grid_out = std::move(grid);
  return out;
}

namespace kernels {

VoteGrid vote_accumulate(std::span<const TileVote> tiles, int extent, const Backend& backend) {
  for (const auto& t : tiles) {
    if (t.x < 0 || t.y < 0 || t.x + t.prediction.width() > extent ||
        t.y + t.prediction.height() > extent) {
      throw ParameterError("tile footprint outside the vote grid");
    }
  }
  VoteGrid grid;
  grid.positive = Counter(extent, extent, 1);
  grid.coverage = Counter(extent, extent, 1);
  const int chunks = backend.chunks_for(tiles.size());
  std::vector<Counter> positive(static_cast<std::size_t>(chunks));
  std::vector<Counter> coverage(static_cast<std::size_t>(chunks));
  backend.for_chunks(tiles.size(), [&](std::size_t begin, std::size_t end, int chunk) {
    Counter& pos = positive[static_cast<std::size_t>(chunk)];
    Counter& cov = coverage[static_cast<std::size_t>(chunk)];
    pos = Counter(extent, extent, 1);
    cov = Counter(extent, extent, 1);
    for (std::size_t t = begin; t < end; ++t) {
      add_tile(pos, cov, tiles[t].prediction, tiles[t].x, tiles[t].y);
    }
  });
  for (int c = 0; c < chunks; ++c) {
    add_into(grid.positive, positive[static_cast<std::size_t>(c)]);
    add_into(grid.coverage, coverage[static_cast<std::size_t>(c)]);
  }
  return grid;
}

}  // namespace kernels

}  // namespace slideseg
