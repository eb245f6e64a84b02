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
// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// non-zero if any fails.
//
//   slideseg_acceptance --work DIR [--only N]

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <iterator>
#include <random>
#include <sstream>
#include <thread>

#include "oracles.hpp"
#include "slideseg/array_file.hpp"
#include "slideseg/patch_extractor.hpp"
#include "slideseg/pipeline.hpp"
#include "slideseg/slide_io.hpp"
#include "slideseg/synth.hpp"
#include "slideseg/tissue_detector.hpp"

using namespace slideseg;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

int desk_jobs() { return static_cast<int>(std::max(1u, std::thread::hardware_concurrency())); }

std::vector<std::uint8_t> file_bytes(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// Standard synthetic slide of the given size, cached under work/.
fs::path synth_dir(const fs::path& work, int size, std::uint64_t seed) {
  const fs::path dir = work / ("synth_" + std::to_string(size) + "_" + std::to_string(seed));
  if (!fs::exists(dir / "slide.npy")) {
    const auto s = synth_slide(seed, standard_layout(size, size));
    fs::create_directories(dir);
    save_slide(dir / "slide.npy", s.raster40);
    save_ground_truth(dir, s.truth);
  }
  return dir;
}

std::string fmt(double v, int prec = 3) {
  std::ostringstream o;
  o.setf(std::ios::fixed);
  o.precision(prec);
  o << v;
  return o.str();
}

// Calls per patch from the per-axis closed form at each class magnification.
std::uint64_t closed_form_calls_per_patch(const PipelinePreset& p) {
  std::uint64_t total = 0;
  for (TissueClass c : kTissueClasses) {
    const Magnification m = p.class_scale[c];
    const long long n = oracle::tile_axis_count(p.patch_size / scale_factor(m), p.window,
                                                p.stride[static_cast<std::size_t>(scale_slot(m))]);
    total += static_cast<std::uint64_t>(n * n);
  }
  return total;
}

// --- 1: preset speed ordering and predictor-call arithmetic -------------------

Outcome criterion_speed(const fs::path& work) {
  const auto t0 = Clock::now();
  const fs::path data = synth_dir(work, 8192, 7);
  const std::vector<PipelinePreset> presets = {oracle_preset(), accelerated_plus_preset()};
  const auto report = compare_presets(data / "slide.npy", presets, "stub", work / "bench",
                                      desk_jobs());
  const double elapsed = seconds_since(t0);
  std::cout << report.to_text();
  const auto& o = report.rows[0];
  const auto& ap = report.rows[1];
  const std::uint64_t want_o = o.timings.patch_count * closed_form_calls_per_patch(presets[0]);
  const std::uint64_t want_ap = ap.timings.patch_count * closed_form_calls_per_patch(presets[1]);
  const double ratio = ap.timings.total_s / o.timings.total_s;
  const bool calls_exact = o.timings.predictor_calls == want_o &&
                           ap.timings.predictor_calls == want_ap;
  const bool fewer_calls = ap.timings.predictor_calls < o.timings.predictor_calls;
  Outcome out;
  out.pass = ratio < 0.5 && calls_exact && fewer_calls && elapsed < 600;
  out.detail = "total " + fmt(ap.timings.total_s) + "s vs " + fmt(o.timings.total_s) +
               "s (ratio " + fmt(ratio) + ", need < 0.5); calls " +
               std::to_string(ap.timings.predictor_calls) + " = " +
               std::to_string(ap.timings.patch_count) + "x" +
               std::to_string(closed_form_calls_per_patch(presets[1])) + " vs " +
               std::to_string(o.timings.predictor_calls) + " = " +
               std::to_string(o.timings.patch_count) + "x" +
               std::to_string(closed_form_calls_per_patch(presets[0])) +
               (calls_exact ? " (exact)" : " (MISMATCH)") + "; wall " + fmt(elapsed, 1) + "s";
  return out;
}

// --- 2: end-to-end Dice with the ground-truth predictor -----------------------

Outcome criterion_dice(const fs::path& work) {
  const auto t0 = Clock::now();
  const fs::path data = synth_dir(work, 8192, 7);
  RunRequest req;
  req.slide = data / "slide.npy";
  req.preset = accelerated_plus_preset();
  req.preset.keep_intermediates = false;
  req.predictor_spec = "oracle:" + data.string();
  req.out_dir = work / "dice";
  req.jobs = desk_jobs();
  const auto result = run_pipeline(req);
  const double elapsed = seconds_since(t0);
  const GroundTruth truth = load_ground_truth(data);
  Outcome out;
  out.pass = elapsed < 300;
  std::string scores;
  for (std::size_t i = 0; i < kTissueClasses.size(); ++i) {
    const TissueClass c = kTissueClasses[i];
    const double d = dice(load_image(result.class_maps[i]), truth.masks.at(c));
    out.pass = out.pass && d >= 0.99;
    scores += std::string(class_name(c)) + "=" + fmt(d, 4) + " ";
  }
  out.detail = scores + "(need >= 0.99); runtime " + fmt(elapsed, 1) + "s (need < 300s)";
  return out;
}

// --- 3: vote engine vs brute-force simulator ----------------------------------

// Prediction depends on pixel content and tile origin, so overlapping tiles
// disagree and every pixel's vote count matters.
std::uint8_t tile_rule(const std::uint8_t* rgb, int tx, int ty, int x, int y) {
  const unsigned h = rgb[0] * 3u + rgb[1] * 5u + rgb[2] * 7u +
                     static_cast<unsigned>(tx) * 11u + static_cast<unsigned>(ty) * 13u +
                     static_cast<unsigned>((x ^ y) & 3);
  return (h % 5u) < 2u ? 1 : 0;
}

class TileRulePredictor final : public Predictor {
 public:
  void predict(const ImageView& tile, TissueClass, Magnification, const TileContext& ctx,
               Image& out) override {
    for (int y = 0; y < tile.height; ++y) {
      for (int x = 0; x < tile.width; ++x) {
        out.at(x, y) = tile_rule(tile.row(y) + 3 * x, ctx.tile_x, ctx.tile_y, x, y);
      }
    }
  }
  std::string name() const override { return "tile-rule"; }
};

Outcome criterion_votes() {
  const auto preset = accelerated_plus_preset();
  const int extent = 1024;
  const int window = preset.window;
  std::mt19937 rng(1234);
  int checked = 0, equal = 0;
  const Backend backend = Backend::parallel(4);
  TileRulePredictor pred;
  for (int k = 0; k < 21; ++k) {
    const Magnification m = kMagnifications[static_cast<std::size_t>(k % 3)];
    const auto cfg = preset.vote_config(m);
    Image patch(extent, extent, 3);
    // smooth blobs plus noise: realistic runs of equal predictions
    const int cx = static_cast<int>(rng() % extent), cy = static_cast<int>(rng() % extent);
    for (int y = 0; y < extent; ++y) {
      for (int x = 0; x < extent; ++x) {
        const int d = ((x - cx) * (x - cx) + (y - cy) * (y - cy)) >> 12;
        for (int c = 0; c < 3; ++c) {
          patch.at(x, y, c) = static_cast<std::uint8_t>((d + static_cast<int>(rng() % 4)) & 255);
        }
      }
    }
    const Image got = infer_patch_class(patch, TissueClass::PT, m, pred, window, cfg, backend);
    const std::vector<std::uint8_t> rgb(patch.data().begin(), patch.data().end());
    const auto want = oracle::vote(rgb, extent, window, cfg.stride, cfg.vote_threshold,
                                   [&](int tx, int ty, const std::vector<std::uint8_t>& t) {
      std::vector<std::uint8_t> p(static_cast<std::size_t>(window) * window);
      for (int y = 0; y < window; ++y) {
        for (int x = 0; x < window; ++x) {
          p[static_cast<std::size_t>(y) * window + x] =
              tile_rule(&t[(static_cast<std::size_t>(y) * window + x) * 3], tx, ty, x, y);
        }
      }
      return p;
    });
    ++checked;
    equal += std::equal(want.begin(), want.end(), got.data().begin(), got.data().end());
  }
  return {equal == checked, std::to_string(equal) + "/" + std::to_string(checked) +
                                " random 1024-extent patches identical across strides "
                                "256/64/64 and thresholds 1/4/4"};
}

// --- 4: Otsu vs brute force ---------------------------------------------------

Outcome criterion_otsu() {
  std::mt19937_64 rng(99);
  int agree = 0;
  const int total = 1200;
  for (int k = 0; k < total; ++k) {
    std::array<std::uint64_t, 256> h{};
    switch (k % 6) {
      case 0:  // dense small counts: many exact ties
        for (auto& c : h) c = rng() % 3;
        break;
      case 1:  // few occupied bins
        for (int i = 0; i < 2 + static_cast<int>(rng() % 4); ++i) h[rng() % 256] += 1 + rng() % 5;
        break;
      case 2:  // bimodal with large counts
        for (int v = 0; v < 256; ++v) {
          const int a = v - 60, b = v - 190;
          h[static_cast<std::size_t>(v)] =
              (rng() % 1000) + 4000000000ull / (1 + static_cast<std::uint64_t>(a * a)) +
              9000000000ull / (1 + static_cast<std::uint64_t>(b * b));
        }
        break;
      case 3:  // huge counts near the 64-bit sum bound
        for (auto& c : h) c = rng() % (1ull << 40);
        break;
      case 4:  // symmetric pair: the tie must go to the smaller threshold
        h[rng() % 128] = 7;
        h[128 + rng() % 128] = 7;
        break;
      default:  // single value
        h[rng() % 256] = 1 + rng() % 100;
        break;
    }
    agree += otsu_threshold(h) == oracle::otsu(h);
  }
  return {agree == total, std::to_string(agree) + "/" + std::to_string(total) +
                              " random histograms agree with the exact brute-force argmax"};
}

// --- 5: median blur vs naive sort ---------------------------------------------

Outcome criterion_median() {
  std::mt19937 rng(5);
  int agree = 0, total = 0;
  const Backend backend = Backend::parallel(4);
  for (int ap : {3, 5, 9}) {
    for (int k = 0; k < 50; ++k) {
      Image img(64, 64, 1);
      const unsigned levels = (k % 3 == 0) ? 3 : 256;
      for (auto& v : img.data()) v = static_cast<std::uint8_t>(rng() % levels);
      const Image got = median_blur(img, ap, backend);
      const auto want = oracle::median({img.data().begin(), img.data().end()}, 64, 64, ap);
      ++total;
      agree += std::equal(want.begin(), want.end(), got.data().begin(), got.data().end());
    }
  }
  Image big(128, 128, 1);
  for (auto& v : big.data()) v = static_cast<std::uint8_t>(rng());
  const auto t0 = Clock::now();
  const Image smoke = median_blur(big, 59, backend);
  const double dt = seconds_since(t0);
  const auto want = oracle::median({big.data().begin(), big.data().end()}, 128, 128, 59);
  const bool smoke_ok = std::equal(want.begin(), want.end(), smoke.data().begin());
  return {agree == total && smoke_ok,
          std::to_string(agree) + "/" + std::to_string(total) +
              " images exact at apertures 3/5/9; aperture 59 on 128x128 in " + fmt(dt * 1000, 1) +
              " ms" + (smoke_ok ? " (also exact)" : " (MISMATCH)")};
}

// --- 6: tiling arithmetic -----------------------------------------------------

Outcome criterion_tiling() {
  const bool a = plan_tiles(4096, 512, 256).tile_count() == 225;
  const bool b = plan_tiles(4096, 512, 64).tile_count() == 3249;
  std::mt19937 rng(77);
  int agree = 0;
  const int total = 500;
  for (int k = 0; k < total; ++k) {
    const int extent = 512 + static_cast<int>(rng() % 7681);
    const int stride = 1 + static_cast<int>(rng() % 512);
    const auto plan = plan_tiles(extent, 512, stride);
    const auto xs = oracle::tile_axis(extent, 512, stride);
    const auto n = static_cast<std::size_t>(oracle::tile_axis_count(extent, 512, stride));
    agree += plan.axis == xs && plan.tile_count() == xs.size() * xs.size() && xs.size() == n;
  }
  return {a && b && agree == total,
          std::string("(4096,512,256)->") + std::to_string(plan_tiles(4096, 512, 256).tile_count()) +
              ", (4096,512,64)->" + std::to_string(plan_tiles(4096, 512, 64).tile_count()) + "; " +
              std::to_string(agree) + "/" + std::to_string(total) +
              " random (extent, stride) plans match the loop oracle"};
}

// --- 7: backend determinism ---------------------------------------------------

std::vector<std::vector<std::uint8_t>> run_outputs(const RunRequest& req) {
  const auto r = run_pipeline(req);
  std::vector<std::vector<std::uint8_t>> out;
  for (const auto& p : r.class_maps) out.push_back(file_bytes(p));
  out.push_back(file_bytes(r.overlay40));
  out.push_back(file_bytes(r.overlay10));
  return out;
}

Outcome criterion_determinism(const fs::path& work) {
  const fs::path data = synth_dir(work, 4096, 11);
  RunRequest req;
  req.slide = data / "slide.npy";
  req.preset = accelerated_plus_preset();
  req.preset.keep_intermediates = false;
  req.out_dir = work / "det";

  req.preset.backend = BackendKind::kSerial;
  req.jobs = 1;
  const auto serial = run_outputs(req);
  req.preset.backend = BackendKind::kParallel;
  const auto par1 = run_outputs(req);
  req.jobs = 4;
  const auto par4 = run_outputs(req);
  const auto par4_again = run_outputs(req);
  // the png-intermediate path as well
  req.preset = oracle_preset();
  req.preset.keep_intermediates = false;
  req.preset.backend = BackendKind::kSerial;
  req.jobs = 1;
  const auto oracle_serial = run_outputs(req);
  req.preset.backend = BackendKind::kParallel;
  req.jobs = 4;
  const auto oracle_par4 = run_outputs(req);

  const bool ok = serial == par1 && serial == par4 && par4 == par4_again &&
                  oracle_serial == oracle_par4;
  return {ok, std::string("6 class maps + 2 overlays: serial vs parallel j1 ") +
                  (serial == par1 ? "equal" : "DIFFER") + ", vs j4 " +
                  (serial == par4 ? "equal" : "DIFFER") + ", repeat j4 " +
                  (par4 == par4_again ? "equal" : "DIFFER") + "; oracle preset serial vs j4 " +
                  (oracle_serial == oracle_par4 ? "equal" : "DIFFER")};
}

// --- 8: array container fidelity and external predictor loopback --------------

std::string run_capture(const std::string& cmd) {
  std::string out;
  FILE* p = ::popen(cmd.c_str(), "r");
  if (!p) return out;
  char buf[512];
  while (std::fgets(buf, sizeof buf, p)) out += buf;
  if (::pclose(p) != 0) out += "<exit-nonzero>";
  return out;
}

Outcome criterion_formats(const fs::path& work) {
  fs::create_directories(work / "npy");
  std::mt19937 rng(8);
  bool roundtrip = true;
  bool reference_reader = true;
  std::vector<std::pair<fs::path, ArrayFile>> written;
  const std::vector<std::pair<DType, std::vector<std::size_t>>> cases = {
      {DType::kU8, {37, 53}},     {DType::kU8, {19, 23, 3}}, {DType::kU16, {64, 31}},
      {DType::kU32, {5, 7}},      {DType::kU8, {1, 1}},      {DType::kU16, {300, 2}},
  };
  for (std::size_t i = 0; i < cases.size(); ++i) {
    ArrayFile a;
    a.dtype = cases[i].first;
    a.shape = cases[i].second;
    a.payload.resize(a.element_count() * dtype_width(a.dtype));
    for (auto& b : a.payload) b = static_cast<std::uint8_t>(rng());
    const fs::path p = work / "npy" / ("case" + std::to_string(i) + ".npy");
    write_array(p, a);
    const auto bytes = file_bytes(p);
    roundtrip = roundtrip && read_array(p) == a && encode_npy(read_array(p)) == bytes;
    const auto ref = oracle::parse_npy(bytes);
    reference_reader = reference_reader && ref.descr == dtype_descr(a.dtype) && !ref.fortran &&
                       ref.shape == a.shape && ref.payload == a.payload &&
                       ref.header_total % 64 == 0;
    written.emplace_back(p, std::move(a));
  }

  // numpy, when present, must read our files and produce the same bytes when
  // re-saving them.
  std::string numpy_note = "numpy unavailable";
  bool numpy_ok = true;
  const std::string python = SLIDESEG_PYTHON;
  if (!python.empty() &&
      run_capture("'" + python + "' -c 'import numpy' 2>/dev/null && echo ok") == "ok\n") {
    int same = 0;
    for (const auto& [p, a] : written) {
      const fs::path resaved = p.string() + ".np.npy";
      run_capture("'" + python + "' -c \"import numpy,sys; numpy.save(sys.argv[2], "
                  "numpy.load(sys.argv[1]))\" '" + p.string() + "' '" + resaved.string() + "'");
      same += fs::exists(resaved) && file_bytes(resaved) == file_bytes(p);
    }
    numpy_ok = same == static_cast<int>(written.size());
    numpy_note = "numpy load+save byte-identical " + std::to_string(same) + "/" +
                 std::to_string(written.size());
  }

  // external predictor loopback
  const fs::path data = synth_dir(work, 4096, 11);
  RunRequest req;
  req.slide = data / "slide.npy";
  req.preset = accelerated_plus_preset();
  req.preset.keep_intermediates = false;
  req.jobs = desk_jobs();
  req.out_dir = work / "loop_stub";
  req.predictor_spec = "stub";
  const auto in_process = run_pipeline(req);
  req.out_dir = work / "loop_ext";
  req.predictor_spec = std::string("external:'") + SLIDESEG_PREDICTOR_BIN + "' --mode stub";
  const auto external = run_pipeline(req);
  bool loop_ok = in_process.class_maps.size() == external.class_maps.size();
  for (std::size_t i = 0; loop_ok && i < in_process.class_maps.size(); ++i) {
    loop_ok = file_bytes(in_process.class_maps[i]) == file_bytes(external.class_maps[i]);
  }
  loop_ok = loop_ok && external.timings.predictor_calls == in_process.timings.predictor_calls;

  return {roundtrip && reference_reader && numpy_ok && loop_ok,
          std::string("round trip ") + (roundtrip ? "byte-exact" : "BROKEN") +
              ", reference reader " + (reference_reader ? "agrees" : "DISAGREES") + ", " +
              numpy_note + "; external loopback maps " + (loop_ok ? "bitwise equal" : "DIFFER") +
              " (" + std::to_string(external.timings.predictor_calls) + " calls)"};
}

}  // namespace

int main(int argc, char** argv) {
  fs::path work = fs::temp_directory_path() / "slideseg_acceptance";
  int only = 0;
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--work" && i + 1 < argc) work = argv[++i];
    else if (a == "--only" && i + 1 < argc) only = std::stoi(argv[++i]);
    else {
      std::cerr << "usage: slideseg_acceptance [--work DIR] [--only N]\n";
      return 2;
    }
  }
  fs::create_directories(work);

  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"preset speed and call arithmetic", [&] { return criterion_speed(work); }},
      {"end-to-end dice", [&] { return criterion_dice(work); }},
      {"vote engine vs simulator", [] { return criterion_votes(); }},
      {"otsu vs brute force", [] { return criterion_otsu(); }},
      {"median blur vs naive sort", [] { return criterion_median(); }},
      {"tiling arithmetic", [] { return criterion_tiling(); }},
      {"backend determinism", [&] { return criterion_determinism(work); }},
      {"format fidelity", [&] { return criterion_formats(work); }},
  };

  std::vector<std::string> lines;
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int n = static_cast<int>(i) + 1;
    if (only && only != n) continue;
    Outcome o;
    const auto t0 = Clock::now();
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const std::string line = "criterion " + std::to_string(n) + " (" + criteria[i].first +
                             "): " + (o.pass ? "PASS" : "FAIL") + " - " + o.detail + " [" +
                             fmt(seconds_since(t0), 1) + "s]";
    std::cout << line << std::endl;
    lines.push_back(line);
    failures += !o.pass;
  }
  // keep only the cached synthetic slides
  for (const auto& entry : fs::directory_iterator(work)) {
    if (entry.path().filename().string().rfind("synth_", 0) != 0) fs::remove_all(entry.path());
  }

  std::cout << "\nsummary\n";
  for (const auto& l : lines) std::cout << l << "\n";
  return failures ? 1 : 0;
}
