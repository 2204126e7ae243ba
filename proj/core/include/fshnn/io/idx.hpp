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

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <vector>

#include "fshnn/numerics/tensor.hpp"

namespace fshnn {

inline constexpr std::uint32_t kIdxImageMagic = 0x00000803;
inline constexpr std::uint32_t kIdxLabelMagic = 0x00000801;

// Images as one [H, W] tensor per image with pixels scaled by 1/255.
std::vector<Tensor> read_idx_images(const std::filesystem::path& path);
std::vector<std::size_t> read_idx_labels(const std::filesystem::path& path);

// Same, from an in-memory byte buffer. Errors name the byte offset.
std::vector<Tensor> parse_idx_images(const std::vector<std::uint8_t>& bytes);
std::vector<std::size_t> parse_idx_labels(const std::vector<std::uint8_t>& bytes);

// Pixels are rounded to the nearest of 256 levels; [H,W] or [1,H,W] images.
void write_idx_images(const std::filesystem::path& path,
                      const std::vector<Tensor>& images);
void write_idx_labels(const std::filesystem::path& path,
                      const std::vector<std::size_t>& labels);

struct LabeledDataset {
  std::vector<Tensor> images;  // [1, size, size]
  std::vector<std::size_t> labels;
};

// Three classes (0 horizontal bar, 1 vertical bar, 2 diagonal bar) with
// additive Gaussian pixel noise, clipped to [0,1]. Class-interleaved order.
LabeledDataset generate_synthetic_patterns(std::size_t n_per_class,
                                           std::size_t size, double noise_sigma,
                                           std::uint64_t seed);

// Adds a leading channel axis to [H,W] images.
std::vector<Tensor> as_single_channel(const std::vector<Tensor>& images);

// Writes `bytes` to a sibling temp file and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path,
                       const std::vector<std::uint8_t>& bytes);
std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path);

}  // namespace fshnn
