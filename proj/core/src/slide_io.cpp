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
#include "slideseg/slide_io.hpp"

#include <fstream>
#include <sstream>

#include "slideseg/array_file.hpp"
#include "slideseg/png_io.hpp"

namespace slideseg {

namespace {

std::string trim_copy(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

bool is_png(const std::filesystem::path& p) {
  auto ext = p.extension().string();
  return ext == ".png" || ext == ".PNG";
}

}  // namespace

std::map<std::string, std::string> parse_key_values(const std::string& text) {
  std::map<std::string, std::string> kv;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim_copy(line);
    if (t.empty() || t.front() == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      throw FormatError("line " + std::to_string(lineno) + ": expected key=value");
    }
    const std::string key = trim_copy(t.substr(0, eq));
    if (key.empty()) throw FormatError("line " + std::to_string(lineno) + ": empty key");
    kv[key] = trim_copy(t.substr(eq + 1));
  }
  return kv;
}

std::map<std::string, std::string> read_key_values(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return parse_key_values(ss.str());
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

std::filesystem::path sidecar_path(const std::filesystem::path& slide) {
  auto p = slide;
  p.replace_extension(".meta");
  return p;
}

LoadedSlide load_slide(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) {
    throw IoError("slide not found: '" + path.string() + "'");
  }
  LoadedSlide s;
  s.raster40 = is_png(path) ? read_png(path) : image_from_array(read_array(path));
  if (s.raster40.channels() != 3) {
    throw FormatError("slide '" + path.string() + "' is not an RGB raster");
  }
  if (s.raster40.width() < 2 || s.raster40.height() < 2) {
    throw ParameterError("slide must be at least 2x2 pixels");
  }
  const auto meta = sidecar_path(path);
  if (std::filesystem::exists(meta)) {
    const auto kv = read_key_values(meta);
    if (auto it = kv.find("mpp40"); it != kv.end()) {
      try {
        s.mpp40 = std::stod(it->second);
      } catch (const std::exception&) {
        throw FormatError(meta.string() + ": mpp40 is not a number");
      }
    }
  }
  return s;
}

void save_slide(const std::filesystem::path& path, const Image& raster40, double mpp40) {
  if (is_png(path)) {
    write_png(path, raster40);
  } else {
    write_array(path, to_array(raster40));
  }
  std::ofstream meta(sidecar_path(path));
  if (!meta) throw IoError("cannot write sidecar for '" + path.string() + "'");
  meta << "mpp40=" << mpp40 << "\n";
}

Image load_mask(const std::filesystem::path& path) {
  Image m = is_png(path) ? read_png(path) : image_from_array(read_array(path));
  if (m.channels() != 1) throw FormatError("mask '" + path.string() + "' must be single-channel");
  return m;
}

}  // namespace slideseg
