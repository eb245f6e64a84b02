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

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string_view>
#include <vector>

#include "slideseg/raster.hpp"

namespace slideseg {

enum class DType : std::uint8_t { kU8, kU16, kU32 };

std::size_t dtype_width(DType t) noexcept;
/// NPY descr string: '|u1', '<u2', '<u4'.
std::string_view dtype_descr(DType t) noexcept;

/// In-memory array container: a dtype, a shape and row-major little-endian
/// payload bytes. Persisted as NPY v1.0.
struct ArrayFile {
  DType dtype = DType::kU8;
  std::vector<std::size_t> shape;
  std::vector<std::uint8_t> payload;

  std::size_t element_count() const noexcept;
  bool operator==(const ArrayFile&) const = default;
};

std::vector<std::uint8_t> encode_npy(const ArrayFile& array);
ArrayFile decode_npy(std::span<const std::uint8_t> bytes);

void write_array(const std::filesystem::path& path, const ArrayFile& array);
ArrayFile read_array(const std::filesystem::path& path);

/// Image <-> array. Single-channel images map to shape (H, W), multi-channel
/// to (H, W, C).
ArrayFile to_array(const Image& img);
Image image_from_array(ArrayFile array);

ArrayFile to_array(const Counter& counter);

}  // namespace slideseg
