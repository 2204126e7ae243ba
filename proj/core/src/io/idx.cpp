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

#include "fshnn/io/idx.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <string>

#include "fshnn/error.hpp"
#include "fshnn/numerics/rng.hpp"

namespace fshnn {

namespace {

std::uint32_t read_be32(const std::vector<std::uint8_t>& b, std::size_t offset) {
  if (offset + 4 > b.size()) {
    throw FormatError("IDX header truncated at byte offset " +
                      std::to_string(offset));
  }
  return (std::uint32_t{b[offset]} << 24) | (std::uint32_t{b[offset + 1]} << 16) |
         (std::uint32_t{b[offset + 2]} << 8) | std::uint32_t{b[offset + 3]};
}

void put_be32(std::vector<std::uint8_t>& b, std::uint32_t v) {
  for (int shift = 24; shift >= 0; shift -= 8) {
    b.push_back(static_cast<std::uint8_t>(v >> shift));
  }
}

void require_magic(std::uint32_t magic, std::uint32_t expected) {
  if (magic != expected) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "bad IDX magic 0x%08x at byte offset 0", magic);
    throw FormatError(buf);
  }
}

void require_payload(const std::vector<std::uint8_t>& b, std::size_t offset,
                     std::size_t count) {
  if (b.size() < offset + count) {
    throw FormatError("IDX payload truncated: expected " + std::to_string(count) +
                      " bytes from byte offset " + std::to_string(offset) +
                      ", file ends at " + std::to_string(b.size()));
  }
}

}  // namespace

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file_atomic(const std::filesystem::path& path,
                       const std::vector<std::uint8_t>& bytes) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw InputError("cannot write " + tmp.string());
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    if (!out) throw InputError("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

std::vector<Tensor> parse_idx_images(const std::vector<std::uint8_t>& bytes) {
  require_magic(read_be32(bytes, 0), kIdxImageMagic);
  const std::size_t n = read_be32(bytes, 4);
  const std::size_t h = read_be32(bytes, 8);
  const std::size_t w = read_be32(bytes, 12);
  if (h == 0 || w == 0) throw FormatError("IDX image extent is zero at byte offset 8");
  require_payload(bytes, 16, n * h * w);
  std::vector<Tensor> images;
  images.reserve(n);
  std::size_t offset = 16;
  for (std::size_t i = 0; i < n; ++i) {
    Tensor img({h, w});
    for (std::size_t p = 0; p < h * w; ++p) {
      img[p] = static_cast<float>(bytes[offset++]) / 255.0f;
    }
    images.push_back(std::move(img));
  }
  return images;
}

std::vector<std::size_t> parse_idx_labels(const std::vector<std::uint8_t>& bytes) {
  require_magic(read_be32(bytes, 0), kIdxLabelMagic);
  const std::size_t n = read_be32(bytes, 4);
  require_payload(bytes, 8, n);
  return {bytes.begin() + 8, bytes.begin() + 8 + static_cast<std::ptrdiff_t>(n)};
}

std::vector<Tensor> read_idx_images(const std::filesystem::path& path) {
  return parse_idx_images(read_file_bytes(path));
}

std::vector<std::size_t> read_idx_labels(const std::filesystem::path& path) {
  return parse_idx_labels(read_file_bytes(path));
}

void write_idx_images(const std::filesystem::path& path,
                      const std::vector<Tensor>& images) {
  std::size_t h = 1, w = 1;
  if (!images.empty()) {
    const auto& s = images.front().shape();
    if (s.size() == 2) {
      h = s[0];
      w = s[1];
    } else if (s.size() == 3 && s[0] == 1) {
      h = s[1];
      w = s[2];
    } else {
      throw DimensionError("IDX images must be [H,W] or [1,H,W]");
    }
  }
  std::vector<std::uint8_t> bytes;
  put_be32(bytes, kIdxImageMagic);
  put_be32(bytes, static_cast<std::uint32_t>(images.size()));
  put_be32(bytes, static_cast<std::uint32_t>(h));
  put_be32(bytes, static_cast<std::uint32_t>(w));
  for (const auto& img : images) {
    if (img.size() != h * w) throw DimensionError("IDX images differ in size");
    for (const float v : img.data()) {
      const float c = std::clamp(v, 0.0f, 1.0f);
      bytes.push_back(static_cast<std::uint8_t>(std::lround(c * 255.0f)));
    }
  }
  write_file_atomic(path, bytes);
}

void write_idx_labels(const std::filesystem::path& path,
                      const std::vector<std::size_t>& labels) {
  std::vector<std::uint8_t> bytes;
  put_be32(bytes, kIdxLabelMagic);
  put_be32(bytes, static_cast<std::uint32_t>(labels.size()));
  for (const std::size_t l : labels) {
    if (l > 255) throw InputError("IDX labels must fit in one byte");
    bytes.push_back(static_cast<std::uint8_t>(l));
  }
  write_file_atomic(path, bytes);
}

LabeledDataset generate_synthetic_patterns(std::size_t n_per_class,
                                           std::size_t size, double noise_sigma,
                                           std::uint64_t seed) {
  if (size < 8) throw ParameterError("pattern size must be >= 8");
  if (!(noise_sigma >= 0.0)) throw ParameterError("noise sigma must be >= 0");
  Rng rng(seed, 0x9a77e7);
  LabeledDataset ds;
  // Bars are 2 pixels thick through the image center.
  const std::size_t lo = size / 2 - 1, hi = size / 2;
  for (std::size_t i = 0; i < n_per_class; ++i) {
    for (std::size_t cls = 0; cls < 3; ++cls) {
      Tensor img({1, size, size});
      for (std::size_t y = 0; y < size; ++y) {
        for (std::size_t x = 0; x < size; ++x) {
          bool on = false;
          if (cls == 0) on = y == lo || y == hi;
          if (cls == 1) on = x == lo || x == hi;
          if (cls == 2) on = x == y || x + 1 == y;
          double v = on ? 1.0 : 0.0;
          if (noise_sigma > 0.0) v += noise_sigma * rng.normal();
          img.at(0, y, x) = static_cast<float>(std::clamp(v, 0.0, 1.0));
        }
      }
      ds.images.push_back(std::move(img));
      ds.labels.push_back(cls);
    }
  }
  return ds;
}

std::vector<Tensor> as_single_channel(const std::vector<Tensor>& images) {
  std::vector<Tensor> out;
  out.reserve(images.size());
  for (const auto& img : images) {
    if (img.rank() == 3) {
      out.push_back(img);
      continue;
    }
    if (img.rank() != 2) throw DimensionError("expected [H,W] images");
    out.push_back(img.reshaped({1, img.dim(0), img.dim(1)}));
  }
  return out;
}

}  // namespace fshnn
