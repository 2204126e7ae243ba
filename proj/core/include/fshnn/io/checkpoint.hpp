// Copyright 2026 The FSHNN Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "fshnn/numerics/tensor.hpp"

namespace fshnn {

inline constexpr std::uint16_t kCheckpointVersion = 1;

struct NamedTensor {
  std::string name;
  Tensor tensor;
};

// Layout (little-endian):
//   "FSNC" | u16 version | u32 entry count
//   per entry: u16 name_len | name | u8 rank | u32 dims[rank] | u8 dtype (0 =
//              f32) | payload (4 * prod(dims) bytes) | u32 CRC32 of payload
//   u32 metadata length | metadata (UTF-8 JSON)
struct Checkpoint {
  std::vector<NamedTensor> entries;
  std::string metadata = "{}";
  // Filled by decode: names whose stored CRC32 does not match the payload.
  std::vector<std::string> crc_mismatches;

  const Tensor* find(const std::string& name) const;
};

// Bitwise equality of entries (names, shapes, payload bits) and metadata.
bool bitwise_equal(const Checkpoint& a, const Checkpoint& b);

std::vector<std::uint8_t> encode_checkpoint(const Checkpoint& ckpt);
// Structural problems raise FormatError; CRC mismatches are recorded in
// crc_mismatches instead.
Checkpoint decode_checkpoint(const std::vector<std::uint8_t>& bytes);

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::filesystem::path& path);

// Standard CRC-32 (zlib polynomial).
std::uint32_t crc32_of(const std::uint8_t* data, std::size_t size);

}  // namespace fshnn
