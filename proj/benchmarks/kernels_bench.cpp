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
// Microbenchmarks for the hot kernels, serial vs parallel backend.

#include <benchmark/benchmark.h>

#include <random>

#include "slideseg/slide_aggregator.hpp"
#include "slideseg/tile_inference.hpp"
#include "slideseg/tissue_detector.hpp"

namespace {

using namespace slideseg;

Image noise(int w, int h, int channels, unsigned seed) {
  std::mt19937 rng(seed);
  Image img(w, h, channels);
  for (auto& v : img.data()) v = static_cast<std::uint8_t>(rng());
  return img;
}

Backend backend_for(const benchmark::State& state) {
  return state.range(0) <= 1 ? Backend::serial() : Backend::parallel(static_cast<int>(state.range(0)));
}

void BM_MedianBlur59(benchmark::State& state) {
  const Image gray = noise(1024, 1024, 1, 1);
  const Backend be = backend_for(state);
  for (auto _ : state) benchmark::DoNotOptimize(median_blur(gray, 59, be));
  state.SetItemsProcessed(state.iterations() * gray.pixel_count());
}
BENCHMARK(BM_MedianBlur59)->Arg(1)->Arg(4)->UseRealTime()->Unit(benchmark::kMillisecond);

void BM_Otsu(benchmark::State& state) {
  const auto hist = histogram(noise(512, 512, 1, 2));
  for (auto _ : state) benchmark::DoNotOptimize(otsu_threshold(hist));
}
BENCHMARK(BM_Otsu);

void BM_DownsampleArea(benchmark::State& state) {
  const Image rgb = noise(4096, 4096, 3, 3);
  const Backend be = backend_for(state);
  for (auto _ : state) benchmark::DoNotOptimize(downsample_area(rgb, 4, be));
  state.SetBytesProcessed(state.iterations() * static_cast<std::int64_t>(rgb.data().size()));
}
BENCHMARK(BM_DownsampleArea)->Arg(1)->Arg(4)->UseRealTime()->Unit(benchmark::kMillisecond);

void BM_InferPatchStub(benchmark::State& state) {
  const Image patch = noise(1024, 1024, 3, 4);
  const Backend be = backend_for(state);
  StubPredictor stub;
  for (auto _ : state) {
    benchmark::DoNotOptimize(infer_patch_class(patch, TissueClass::PT, Magnification::k10, stub,
                                               512, {64, 4}, be));
  }
}
BENCHMARK(BM_InferPatchStub)->Arg(1)->Arg(4)->UseRealTime()->Unit(benchmark::kMillisecond);

void BM_SlideMerge(benchmark::State& state) {
  const Backend be = backend_for(state);
  std::vector<PatchMap> maps;
  for (int j = 0; j < 3; ++j) {
    for (int i = 0; i < 3; ++i) {
      Image m = noise(512, 512, 1, static_cast<unsigned>(10 + i + 3 * j));
      for (auto& v : m.data()) v &= 1;
      maps.push_back({i * 2048 - 2048, j * 2048 - 2048, Magnification::k5, std::move(m), "p"});
    }
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(merge_patch_maps(maps, 4096, 4096, 4096, be));
  }
}
BENCHMARK(BM_SlideMerge)->Arg(1)->Arg(4)->UseRealTime()->Unit(benchmark::kMillisecond);

void BM_Overlay(benchmark::State& state) {
  const Backend be = backend_for(state);
  const Image base = noise(2048, 2048, 3, 20);
  std::map<TissueClass, Image> maps;
  for (TissueClass c : kTissueClasses) {
    Image m = noise(2048, 2048, 1, 30 + static_cast<unsigned>(class_index(c)));
    for (auto& v : m.data()) v = v < 40;
    maps[c] = std::move(m);
  }
  for (auto _ : state) benchmark::DoNotOptimize(render_overlay(base, maps, Palette{}, 0.4, be));
}
BENCHMARK(BM_Overlay)->Arg(1)->Arg(4)->UseRealTime()->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
