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
#include "slideseg/tissue_detector.hpp"

#include <algorithm>
#include <boost/multiprecision/cpp_int.hpp>

namespace slideseg {

Image to_gray(const Image& rgb) {
  if (rgb.channels() != 3) throw ParameterError("to_gray expects an RGB raster");
  Image gray(rgb.width(), rgb.height(), 1);
  const auto in = rgb.data();
  auto out = gray.data();
  for (std::size_t i = 0; i < out.size(); ++i) {
    const unsigned v = 77u * in[3 * i] + 150u * in[3 * i + 1] + 29u * in[3 * i + 2];
    out[i] = static_cast<std::uint8_t>(v >> 8);
  }
  return gray;
}

namespace {

void median_rows(const Image& gray, Image& out, int aperture, int y0, int y1) {
  const int w = gray.width();
  const int h = gray.height();
  const int r = aperture / 2;
  const int n = aperture * aperture;
  const int k = (n - 1) / 2;  // 0-based rank of the median
  std::vector<const std::uint8_t*> rows(static_cast<std::size_t>(aperture));
  std::array<int, 256> hist{};

  for (int y = y0; y < y1; ++y) {
    for (int dy = -r; dy <= r; ++dy) {
      rows[static_cast<std::size_t>(dy + r)] = gray.row(std::clamp(y + dy, 0, h - 1));
    }
    hist.fill(0);
    for (const std::uint8_t* row : rows) {
      for (int dx = -r; dx <= r; ++dx) ++hist[row[std::clamp(dx, 0, w - 1)]];
    }
    // m is the current median, lt the number of window values below it.
    int m = 0;
    int lt = 0;
    while (lt + hist[m] <= k) lt += hist[m++];

    std::uint8_t* dst = out.row(y);
    dst[0] = static_cast<std::uint8_t>(m);
    for (int x = 1; x < w; ++x) {
      const int gone = std::clamp(x - r - 1, 0, w - 1);
      const int come = std::clamp(x + r, 0, w - 1);
      if (gone != come) {
        for (const std::uint8_t* row : rows) {
          const int a = row[gone];
          const int b = row[come];
          --hist[a];
          if (a < m) --lt;
          ++hist[b];
          if (b < m) ++lt;
        }
        while (lt > k) lt -= hist[--m];
        while (lt + hist[m] <= k) lt += hist[m++];
      }
      dst[x] = static_cast<std::uint8_t>(m);
    }
  }
}

}  // namespace

Image median_blur(const Image& gray, int aperture) {
  return median_blur(gray, aperture, Backend::serial());
}

Image median_blur(const Image& gray, int aperture, const Backend& backend) {
  if (aperture < 1 || aperture % 2 == 0) {
    throw ParameterError("median aperture must be a positive odd integer; got " +
                         std::to_string(aperture));
  }
  if (gray.channels() != 1) throw ParameterError("median_blur expects a gray raster");
  if (aperture == 1 || gray.empty()) return gray;
  Image out(gray.width(), gray.height(), 1);
  backend.for_chunks(gray.height(), [&](std::size_t b, std::size_t e, int) {
    median_rows(gray, out, aperture, static_cast<int>(b), static_cast<int>(e));
  });
  return out;
}

std::array<std::uint64_t, 256> histogram(const Image& gray) {
  std::array<std::uint64_t, 256> h{};
  for (std::uint8_t v : gray.data()) ++h[v];
  return h;
}

int otsu_threshold(std::span<const std::uint64_t, 256> hist) {
  // With u64 counts N < 2^72 and S < 2^80, so (N*s0 - n0*S)^2 * n0 * n1 stays
  // below 2^448.
  using boost::multiprecision::int512_t;
  int512_t n_total = 0;
  int512_t s_total = 0;
  int nonzero_bins = 0;
  int last_value = 0;
  for (int v = 0; v < 256; ++v) {
    n_total += hist[v];
    s_total += int512_t(hist[v]) * v;
    if (hist[v]) {
      ++nonzero_bins;
      last_value = v;
    }
  }
  if (n_total == 0) throw ParameterError("otsu_threshold: empty histogram");
  if (nonzero_bins == 1) return last_value;

  // Between-class variance is proportional to (N*s0 - n0*S)^2 / (n0*n1);
  // candidates are compared by cross-multiplication.
  int best_t = 0;
  int512_t best_num = 0;
  int512_t best_den = 1;
  int512_t n0 = 0;
  int512_t s0 = 0;
  for (int t = 0; t < 255; ++t) {
    n0 += hist[t];
    s0 += int512_t(hist[t]) * t;
    const int512_t n1 = n_total - n0;
    if (n0 == 0 || n1 == 0) continue;
    const int512_t diff = n_total * s0 - n0 * s_total;
    const int512_t num = diff * diff;
    const int512_t den = n0 * n1;
    if (num * best_den > best_num * den) {
      best_num = num;
      best_den = den;
      best_t = t;
    }
  }
  return best_t;
}

std::vector<Component> label_components(const Image& mask, Raster<std::uint32_t>& labels) {
  const int w = mask.width();
  const int h = mask.height();
  labels = Raster<std::uint32_t>(w, h, 1);
  std::vector<Component> comps;
  std::vector<std::pair<int, int>> stack;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (!mask.at(x, y) || labels.at(x, y)) continue;
      Component c;
      c.id = static_cast<std::uint32_t>(comps.size() + 1);
      c.x0 = c.x1 = x;
      c.y0 = c.y1 = y;
      labels.at(x, y) = c.id;
      stack.emplace_back(x, y);
      while (!stack.empty()) {
        auto [px, py] = stack.back();
        stack.pop_back();
        ++c.area;
        c.x0 = std::min(c.x0, px);
        c.x1 = std::max(c.x1, px);
        c.y0 = std::min(c.y0, py);
        c.y1 = std::max(c.y1, py);
        constexpr int kDx[] = {1, -1, 0, 0};
        constexpr int kDy[] = {0, 0, 1, -1};
        for (int d = 0; d < 4; ++d) {
          const int nx = px + kDx[d];
          const int ny = py + kDy[d];
          if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
          if (mask.at(nx, ny) && !labels.at(nx, ny)) {
            labels.at(nx, ny) = c.id;
            stack.emplace_back(nx, ny);
          }
        }
      }
      ++c.x1;
      ++c.y1;
      comps.push_back(c);
    }
  }
  return comps;
}

ForegroundMask detect_foreground(const SlidePyramid& slide, const DetectorParams& params) {
  return detect_foreground(slide, params, Backend::serial());
}

ForegroundMask detect_foreground(const SlidePyramid& slide, const DetectorParams& params,
                                 const Backend& backend) {
  if (params.min_component_area < 0.0) {
    throw ParameterError("min_component_area must be non-negative");
  }
  const Image& level = slide.level(params.level);
  const Image blurred = median_blur(to_gray(level), params.aperture, backend);
  const auto hist = histogram(blurred);
  const int nonzero = static_cast<int>(
      std::count_if(hist.begin(), hist.end(), [](std::uint64_t c) { return c != 0; }));

  ForegroundMask fg;
  fg.level = params.level;
  fg.width40 = slide.width();
  fg.height40 = slide.height();
  fg.otsu_threshold = otsu_threshold(hist);
  Image raw(blurred.width(), blurred.height(), 1);
  if (nonzero > 1) {
    const auto in = blurred.data();
    auto out = raw.data();
    for (std::size_t i = 0; i < in.size(); ++i) out[i] = in[i] <= fg.otsu_threshold ? 1 : 0;
  }

  Raster<std::uint32_t> labels;
  const auto all = label_components(raw, labels);
  const double min_area = params.min_component_area * static_cast<double>(raw.pixel_count());
  std::vector<std::uint32_t> remap(all.size() + 1, 0);
  for (const auto& c : all) {
    if (static_cast<double>(c.area) < min_area) continue;
    Component kept = c;
    kept.id = static_cast<std::uint32_t>(fg.components.size() + 1);
    remap[c.id] = kept.id;
    fg.components.push_back(kept);
  }
  fg.mask = Image(raw.width(), raw.height(), 1);
  auto lab = labels.data();
  auto m = fg.mask.data();
  for (std::size_t i = 0; i < lab.size(); ++i) {
    lab[i] = remap[lab[i]];
    m[i] = lab[i] ? 1 : 0;
  }
  fg.labels = std::move(labels);
  return fg;
}

std::uint64_t foreground_area(const ForegroundMask& fg, const SlideRect& rect) {
  const std::int64_t f = fg.factor();
  const std::int64_t x0 = std::max<std::int64_t>(rect.x, 0);
  const std::int64_t y0 = std::max<std::int64_t>(rect.y, 0);
  const std::int64_t x1 = std::min<std::int64_t>(rect.x + rect.w, fg.extent40_width());
  const std::int64_t y1 = std::min<std::int64_t>(rect.y + rect.h, fg.extent40_height());
  if (x0 >= x1 || y0 >= y1) return 0;

  std::uint64_t area = 0;
  const std::int64_t v0 = y0 / f, v1 = (y1 - 1) / f;
  const std::int64_t u0 = x0 / f, u1 = (x1 - 1) / f;
  for (std::int64_t v = v0; v <= v1 && v < fg.mask.height(); ++v) {
    const std::int64_t wy = std::min(y1, (v + 1) * f) - std::max(y0, v * f);
    const std::uint8_t* row = fg.mask.row(static_cast<int>(v));
    std::uint64_t row_area = 0;
    for (std::int64_t u = u0; u <= u1 && u < fg.mask.width(); ++u) {
      if (!row[u]) continue;
      row_area += static_cast<std::uint64_t>(std::min(x1, (u + 1) * f) - std::max(x0, u * f));
    }
    area += row_area * static_cast<std::uint64_t>(wy);
  }
  return area;
}

bool region_is_tissue(const ForegroundMask& mask, const SlideRect& rect, double min_fraction) {
  if (rect.w <= 0 || rect.h <= 0) return false;
  const double needed = min_fraction * static_cast<double>(rect.w) * static_cast<double>(rect.h);
  return static_cast<double>(foreground_area(mask, rect)) >= needed;
}

Image mask_at_40x(const ForegroundMask& fg, int width, int height) {
  const int f = fg.factor();
  Image out(width, height, 1);
  if (fg.mask.empty()) return out;
  for (int y = 0; y < height; ++y) {
    const int v = std::min(y / f, fg.mask.height() - 1);
    const std::uint8_t* in = fg.mask.row(v);
    std::uint8_t* dst = out.row(y);
    for (int x = 0; x < width; ++x) dst[x] = in[std::min(x / f, fg.mask.width() - 1)];
  }
  return out;
}

Image mask_at_level(const ForegroundMask& fg, Magnification target) {
  const int ft = scale_factor(target);
  if (ft == 1) return mask_at_40x(fg, fg.extent40_width(), fg.extent40_height());
  const int fm = fg.factor();
  const int w = ceil_div(fg.extent40_width(), ft);
  const int h = ceil_div(fg.extent40_height(), ft);
  Image out(w, h, 1);
  if (fg.mask.empty()) return out;
  for (int y = 0; y < h; ++y) {
    const int v = std::min((y * ft + ft / 2) / fm, fg.mask.height() - 1);
    const std::uint8_t* in = fg.mask.row(v);
    std::uint8_t* dst = out.row(y);
    for (int x = 0; x < w; ++x) dst[x] = in[std::min((x * ft + ft / 2) / fm, fg.mask.width() - 1)];
  }
  return out;
}

}  // namespace slideseg
