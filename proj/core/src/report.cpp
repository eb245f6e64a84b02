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
#include <cstdio>
#include <sstream>

#include "slideseg/pipeline.hpp"

namespace slideseg {

namespace {

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

}  // namespace

std::string BenchReport::to_text() const {
  std::ostringstream out;
  char line[256];
  std::snprintf(line, sizeof(line), "%-18s %14s %12s %12s %10s %8s %12s %12s %10s\n",
                "preset", "detect+extr(s)", "infer(s)", "aggreg(s)", "total(s)", "patches",
                "time/patch(s)", "pred_calls", "calls/base");
  out << line;
  const double base =
      rows.empty() ? 0.0 : static_cast<double>(rows.front().timings.predictor_calls);
  for (const auto& r : rows) {
    const auto& t = r.timings;
    const double ratio = base > 0 ? static_cast<double>(t.predictor_calls) / base : 0.0;
    std::snprintf(line, sizeof(line),
                  "%-18s %14.3f %12.3f %12.3f %10.3f %8llu %12.3f %12llu %10.4f\n",
                  r.preset.c_str(), t.detection_extraction_s, t.inference_s, t.aggregation_s,
                  t.total_s, static_cast<unsigned long long>(t.patch_count),
                  t.time_per_patch_s(), static_cast<unsigned long long>(t.predictor_calls),
                  ratio);
    out << line;
  }
  return out.str();
}

std::string BenchReport::to_csv() const {
  std::ostringstream out;
  out << "preset,detection_extraction_s,inference_s,aggregation_s,total_s,patches,"
         "time_per_patch_s,tiles,predictor_calls,expected_predictor_calls\n";
  for (const auto& r : rows) {
    const auto& t = r.timings;
    out << r.preset << ',' << fixed(t.detection_extraction_s, 3) << ','
        << fixed(t.inference_s, 3) << ',' << fixed(t.aggregation_s, 3) << ','
        << fixed(t.total_s, 3) << ',' << t.patch_count << ',' << fixed(t.time_per_patch_s(), 3)
        << ',' << t.tile_count << ',' << t.predictor_calls << ',' << r.expected_predictor_calls
        << '\n';
  }
  return out.str();
}

}  // namespace slideseg
