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

#include "fshnn/io/checkpoint.hpp"

#include <algorithm>
#include <cstring>
#include <set>

#include <zlib.h>

#include "fshnn/error.hpp"
#include "fshnn/io/idx.hpp"

namespace fshnn {

namespace {

constexpr char kMagic[4] = {'F', 'S', 'N', 'C'};

class Writer {
 public:
  void u8(std::uint8_t v) { bytes_.push_back(v); }
  void u16(std::uint16_t v) {
    for (int i = 0; i < 2; ++i) bytes_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) bytes_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void raw(const void* data, std::size_t n) {
    const auto* p = static_cast<const std::uint8_t*>(data);
    bytes_.insert(bytes_.end(), p, p + n);
  }
  std::vector<std::uint8_t>& bytes() { return bytes_; }

 private:
  std::vector<std::uint8_t> bytes_;
};

class Reader {
 public:
  explicit Reader(const std::vector<std::uint8_t>& b) : b_(b) {}
  std::size_t offset() const { return pos_; }
  const std::uint8_t* take(std::size_t n, const char* what) {
    if (pos_ + n > b_.size()) {
      throw FormatError(std::string("checkpoint truncated reading ") + what +
                        " at byte offset " + std::to_string(pos_));
    }
    const std::uint8_t* p = b_.data() + pos_;
    pos_ += n;
    return p;
  }
  std::uint8_t u8(const char* what) { return *take(1, what); }
  std::uint16_t u16(const char* what) {
    const auto* p = take(2, what);
    return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
  }
  std::uint32_t u32(const char* what) {
    const auto* p = take(4, what);
    return std::uint32_t{p[0]} | (std::uint32_t{p[1]} << 8) |
           (std::uint32_t{p[2]} << 16) | (std::uint32_t{p[3]} << 24);
  }
  bool done() const { return pos_ == b_.size(); }

 private:
  const std::vector<std::uint8_t>& b_;
  std::size_t pos_ = 0;
};

std::vector<std::uint8_t> payload_bytes(const Tensor& t) {
  std::vector<std::uint8_t> out;
  out.reserve(t.size() * 4);
  for (const float v : t.data()) {
    std::uint32_t bits;
    std::memcpy(&bits, &v, 4);
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(bits >> (8 * i)));
  }
  return out;
}

}  // namespace

std::uint32_t crc32_of(const std::uint8_t* data, std::size_t size) {
  uLong crc = crc32(0L, Z_NULL, 0);
  while (size > 0) {
    const auto chunk = static_cast<uInt>(std::min<std::size_t>(size, 1u << 30));
    crc = crc32(crc, data, chunk);
    data += chunk;
    size -= chunk;
  }
  return static_cast<std::uint32_t>(crc);
}

const Tensor* Checkpoint::find(const std::string& name) const {
  for (const auto& e : entries) {
    if (e.name == name) return &e.tensor;
  }
  return nullptr;
}

bool bitwise_equal(const Checkpoint& a, const Checkpoint& b) {
  if (a.metadata != b.metadata || a.entries.size() != b.entries.size()) return false;
  for (std::size_t i = 0; i < a.entries.size(); ++i) {
    const auto& x = a.entries[i];
    const auto& y = b.entries[i];
    if (x.name != y.name || x.tensor.shape() != y.tensor.shape()) return false;
    if (std::memcmp(x.tensor.data().data(), y.tensor.data().data(),
                    x.tensor.size() * sizeof(float)) != 0) {
      return false;
    }
  }
  return true;
}

std::vector<std::uint8_t> encode_checkpoint(const Checkpoint& ckpt) {
  Writer w;
  w.raw(kMagic, 4);
  w.u16(kCheckpointVersion);
  w.u32(static_cast<std::uint32_t>(ckpt.entries.size()));
  std::set<std::string> names;
  for (const auto& e : ckpt.entries) {
    if (!names.insert(e.name).second) {
      throw StructuralError("duplicate checkpoint entry '" + e.name + "'");
    }
    if (e.name.size() > 0xffff) throw StructuralError("entry name too long");
    if (e.tensor.rank() > 0xff) throw StructuralError("tensor rank too large");
    w.u16(static_cast<std::uint16_t>(e.name.size()));
    w.raw(e.name.data(), e.name.size());
    w.u8(static_cast<std::uint8_t>(e.tensor.rank()));
    for (const std::size_t d : e.tensor.shape()) w.u32(static_cast<std::uint32_t>(d));
    w.u8(0);
    const auto payload = payload_bytes(e.tensor);
    w.raw(payload.data(), payload.size());
    w.u32(crc32_of(payload.data(), payload.size()));
  }
  w.u32(static_cast<std::uint32_t>(ckpt.metadata.size()));
  w.raw(ckpt.metadata.data(), ckpt.metadata.size());
  return std::move(w.bytes());
}

Checkpoint decode_checkpoint(const std::vector<std::uint8_t>& bytes) {
  Reader r(bytes);
  const auto* magic = r.take(4, "magic");
  if (std::memcmp(magic, kMagic, 4) != 0) {
    throw FormatError("not an FSNC checkpoint (bad magic at byte offset 0)");
  }
  const std::uint16_t version = r.u16("version");
  if (version != kCheckpointVersion) {
    throw FormatError("unsupported checkpoint version " + std::to_string(version) +
                      " at byte offset 4");
  }
  const std::uint32_t count = r.u32("entry count");
  Checkpoint ckpt;
  std::set<std::string> names;
  for (std::uint32_t i = 0; i < count; ++i) {
    const std::size_t entry_offset = r.offset();
    const std::uint16_t len = r.u16("name length");
    const auto* name_bytes = r.take(len, "name");
    std::string name(reinterpret_cast<const char*>(name_bytes), len);
    if (!names.insert(name).second) {
      throw FormatError("duplicate entry '" + name + "' at byte offset " +
                        std::to_string(entry_offset));
    }
    const std::uint8_t rank = r.u8("rank");
    if (rank == 0) {
      throw FormatError("entry '" + name + "' has rank 0 at byte offset " +
                        std::to_string(entry_offset));
    }
    Shape shape;
    std::size_t elements = 1;
    for (std::uint8_t k = 0; k < rank; ++k) {
      const std::uint32_t d = r.u32("dims");
      if (d == 0) throw FormatError("entry '" + name + "' has a zero dimension");
      shape.push_back(d);
      elements *= d;
    }
    const std::size_t dtype_offset = r.offset();
    if (r.u8("dtype") != 0) {
      throw FormatError("entry '" + name + "' has unsupported dtype at byte offset " +
                        std::to_string(dtype_offset));
    }
    const auto* payload = r.take(elements * 4, "payload");
    const std::uint32_t stored = r.u32("crc32");
    if (stored != crc32_of(payload, elements * 4)) ckpt.crc_mismatches.push_back(name);
    Tensor t(shape);
    for (std::size_t k = 0; k < elements; ++k) {
      const std::uint32_t bits =
          std::uint32_t{payload[4 * k]} | (std::uint32_t{payload[4 * k + 1]} << 8) |
          (std::uint32_t{payload[4 * k + 2]} << 16) |
          (std::uint32_t{payload[4 * k + 3]} << 24);
      std::memcpy(&t[k], &bits, 4);
    }
    ckpt.entries.push_back({std::move(name), std::move(t)});
  }
  const std::uint32_t meta_len = r.u32("metadata length");
  const auto* meta = r.take(meta_len, "metadata");
  ckpt.metadata.assign(reinterpret_cast<const char*>(meta), meta_len);
  if (!r.done()) {
    throw FormatError("trailing bytes after metadata at byte offset " +
                      std::to_string(r.offset()));
  }
  return ckpt;
}

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt) {
  write_file_atomic(path, encode_checkpoint(ckpt));
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  return decode_checkpoint(read_file_bytes(path));
}

}  // namespace fshnn
