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
#include "slideseg/array_file.hpp"

#include <charconv>
#include <cstring>
#include <fstream>
#include <functional>
#include <numeric>
#include <string>

namespace slideseg {

namespace {

constexpr std::uint8_t kMagic[] = {0x93, 'N', 'U', 'M', 'P', 'Y'};
constexpr std::size_t kPreambleSize = 10;  // magic + version + header length
constexpr std::size_t kAlignment = 64;

std::string shape_tuple(const std::vector<std::size_t>& shape) {
  std::string s = "(";
  for (std::size_t i = 0; i < shape.size(); ++i) {
    s += std::to_string(shape[i]);
    if (shape.size() == 1 || i + 1 < shape.size()) s += ",";
    if (i + 1 < shape.size()) s += " ";
  }
  return s + ")";
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\n')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\n')) s.remove_suffix(1);
  return s;
}

// Minimal parser for the header dict written by numpy and by encode_npy:
// {'descr': '<u2', 'fortran_order': False, 'shape': (3, 4), }
struct Header {
  std::string descr;
  bool fortran_order = true;
  bool has_shape = false;
  std::vector<std::size_t> shape;
};

std::size_t find_value(std::string_view dict, std::string_view key) {
  const std::string quoted = "'" + std::string(key) + "'";
  std::size_t pos = dict.find(quoted);
  if (pos == std::string_view::npos) {
    throw FormatError("npy header missing key " + quoted);
  }
  pos = dict.find(':', pos + quoted.size());
  if (pos == std::string_view::npos) throw FormatError("npy header: expected ':'");
  ++pos;
  while (pos < dict.size() && dict[pos] == ' ') ++pos;
  return pos;
}

Header parse_header(std::string_view text) {
  std::string_view dict = trim(text);
  if (dict.size() < 2 || dict.front() != '{' || dict.back() != '}') {
    throw FormatError("npy header is not a dict literal");
  }
  Header h;

  std::size_t p = find_value(dict, "descr");
  if (p >= dict.size() || dict[p] != '\'') throw FormatError("npy header: bad descr");
  const std::size_t close = dict.find('\'', p + 1);
  if (close == std::string_view::npos) throw FormatError("npy header: bad descr");
  h.descr = std::string(dict.substr(p + 1, close - p - 1));

  p = find_value(dict, "fortran_order");
  if (dict.substr(p, 5) == "False") {
    h.fortran_order = false;
  } else if (dict.substr(p, 4) == "True") {
    h.fortran_order = true;
  } else {
    throw FormatError("npy header: bad fortran_order");
  }

  p = find_value(dict, "shape");
  if (p >= dict.size() || dict[p] != '(') throw FormatError("npy header: bad shape");
  const std::size_t end = dict.find(')', p);
  if (end == std::string_view::npos) throw FormatError("npy header: bad shape");
  std::string_view items = dict.substr(p + 1, end - p - 1);
  while (!items.empty()) {
    items = trim(items);
    if (items.empty()) break;
    std::size_t value = 0;
    auto [ptr, ec] = std::from_chars(items.data(), items.data() + items.size(), value);
    if (ec != std::errc{}) throw FormatError("npy header: bad shape entry");
    h.shape.push_back(value);
    items.remove_prefix(static_cast<std::size_t>(ptr - items.data()));
    items = trim(items);
    if (!items.empty()) {
      if (items.front() != ',') throw FormatError("npy header: bad shape separator");
      items.remove_prefix(1);
    }
  }
  h.has_shape = true;
  return h;
}

DType dtype_from_descr(std::string_view descr) {
  if (descr == "|u1" || descr == "<u1") return DType::kU8;
  if (descr == "<u2") return DType::kU16;
  if (descr == "<u4") return DType::kU32;
  throw FormatError("unsupported npy dtype '" + std::string(descr) + "'");
}

}  // namespace

std::size_t dtype_width(DType t) noexcept {
  switch (t) {
    case DType::kU8: return 1;
    case DType::kU16: return 2;
    case DType::kU32: return 4;
  }
  return 1;
}

std::string_view dtype_descr(DType t) noexcept {
  switch (t) {
    case DType::kU8: return "|u1";
    case DType::kU16: return "<u2";
    case DType::kU32: return "<u4";
  }
  return "|u1";
}

std::size_t ArrayFile::element_count() const noexcept {
  return std::accumulate(shape.begin(), shape.end(), std::size_t{1},
                         std::multiplies<>());
}

std::vector<std::uint8_t> encode_npy(const ArrayFile& array) {
  if (array.payload.size() != array.element_count() * dtype_width(array.dtype)) {
    throw ParameterError("array payload length does not match shape x dtype");
  }
  std::string header = "{'descr': '" + std::string(dtype_descr(array.dtype)) +
                       "', 'fortran_order': False, 'shape': " +
                       shape_tuple(array.shape) + ", }";
  // Pad with spaces so the payload starts on a 64-byte boundary; the header
  // ends with a newline.
  const std::size_t unpadded = kPreambleSize + header.size() + 1;
  const std::size_t padding = (kAlignment - unpadded % kAlignment) % kAlignment;
  header.append(padding, ' ');
  header.push_back('\n');
  if (header.size() > 0xFFFF) throw ParameterError("npy header too long for v1.0");

  std::vector<std::uint8_t> out(kPreambleSize + header.size() + array.payload.size());
  std::memcpy(out.data(), kMagic, sizeof(kMagic));
  out[6] = 1;
  out[7] = 0;
  const auto len = static_cast<std::uint16_t>(header.size());
  out[8] = static_cast<std::uint8_t>(len & 0xFF);
  out[9] = static_cast<std::uint8_t>(len >> 8);
  std::memcpy(out.data() + kPreambleSize, header.data(), header.size());
  if (!array.payload.empty()) {
    std::memcpy(out.data() + kPreambleSize + header.size(), array.payload.data(),
                array.payload.size());
  }
  return out;
}

ArrayFile decode_npy(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < kPreambleSize ||
      std::memcmp(bytes.data(), kMagic, sizeof(kMagic)) != 0) {
    throw FormatError("not an npy file: bad magic");
  }
  if (bytes[6] != 1 || bytes[7] != 0) {
    throw FormatError("unsupported npy version " + std::to_string(bytes[6]) + "." +
                      std::to_string(bytes[7]));
  }
  const std::size_t header_len = bytes[8] | (static_cast<std::size_t>(bytes[9]) << 8);
  if (bytes.size() < kPreambleSize + header_len) {
    throw FormatError("npy header truncated");
  }
  const Header h = parse_header(std::string_view(
      reinterpret_cast<const char*>(bytes.data() + kPreambleSize), header_len));
  if (h.fortran_order) throw FormatError("fortran-order npy arrays are not supported");

  ArrayFile a;
  a.dtype = dtype_from_descr(h.descr);
  a.shape = h.shape;
  const std::size_t expected = a.element_count() * dtype_width(a.dtype);
  const std::size_t available = bytes.size() - kPreambleSize - header_len;
  if (available != expected) {
    throw FormatError("npy payload has " + std::to_string(available) +
                      " bytes; header declares " + std::to_string(expected));
  }
  const auto* first = bytes.data() + kPreambleSize + header_len;
  a.payload.assign(first, first + expected);
  return a;
}

void write_array(const std::filesystem::path& path, const ArrayFile& array) {
  const std::vector<std::uint8_t> bytes = encode_npy(array);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write failed: '" + path.string() + "'");
}

ArrayFile read_array(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary | std::ios::ate);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  const auto size = static_cast<std::size_t>(in.tellg());
  in.seekg(0);
  std::vector<std::uint8_t> bytes(size);
  in.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(size));
  if (!in) throw IoError("read failed: '" + path.string() + "'");
  try {
    return decode_npy(bytes);
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

ArrayFile to_array(const Image& img) {
  ArrayFile a;
  a.dtype = DType::kU8;
  a.shape = {static_cast<std::size_t>(img.height()), static_cast<std::size_t>(img.width())};
  if (img.channels() != 1) a.shape.push_back(static_cast<std::size_t>(img.channels()));
  a.payload.assign(img.data().begin(), img.data().end());
  return a;
}

Image image_from_array(ArrayFile array) {
  if (array.dtype != DType::kU8) throw FormatError("image arrays must be u8");
  if (array.shape.size() != 2 && array.shape.size() != 3) {
    throw FormatError("image arrays must be 2-D or 3-D");
  }
  const int h = static_cast<int>(array.shape[0]);
  const int w = static_cast<int>(array.shape[1]);
  const int c = array.shape.size() == 3 ? static_cast<int>(array.shape[2]) : 1;
  if (array.payload.size() != static_cast<std::size_t>(w) * h * c) {
    throw FormatError("image array payload does not match its shape");
  }
  Image img(w, h, c);
  img.storage() = std::move(array.payload);
  return img;
}

ArrayFile to_array(const Counter& counter) {
  ArrayFile a;
  a.dtype = DType::kU16;
  a.shape = {static_cast<std::size_t>(counter.height()),
             static_cast<std::size_t>(counter.width())};
  if (counter.channels() != 1) a.shape.push_back(static_cast<std::size_t>(counter.channels()));
  a.payload.resize(counter.data().size() * 2);
  std::size_t i = 0;
  for (std::uint16_t v : counter.data()) {
    a.payload[i++] = static_cast<std::uint8_t>(v & 0xFF);
    a.payload[i++] = static_cast<std::uint8_t>(v >> 8);
  }
  return a;
}

}  // namespace slideseg
