/*
 * Copyright 2026 The Grasplab Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef GRASPLAB_IO_UTIL_H_
#define GRASPLAB_IO_UTIL_H_

#include <bit>
#include <cstdint>
#include <cstring>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

namespace grasplab {

static_assert(std::endian::native == std::endian::little,
              "binary formats assume a little-endian host");

// Malformed or unreadable input file.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A file that parses but whose contents break a documented invariant.
class InvariantViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string ReadFileBytes(const std::string& path);
void WriteFileBytes(const std::string& path, const std::string& bytes);

template <typename T>
void AppendPod(std::string& out, const T& value) {
  const char* p = reinterpret_cast<const char*>(&value);
  out.append(p, sizeof(T));
}

template <typename T>
void AppendPodArray(std::string& out, std::span<const T> values) {
  out.append(reinterpret_cast<const char*>(values.data()),
             values.size_bytes());
}

// Sequential reader over an in-memory byte buffer.
class ByteReader {
 public:
  explicit ByteReader(std::string_view bytes) : bytes_(bytes) {}

  template <typename T>
  T Read() {
    T value;
    Take(&value, sizeof(T));
    return value;
  }
  template <typename T>
  std::vector<T> ReadArray(std::size_t count) {
    std::vector<T> out(count);
    Take(out.data(), count * sizeof(T));
    return out;
  }
  std::string_view ReadBytes(std::size_t n) {
    Require(n);
    const std::string_view out = bytes_.substr(pos_, n);
    pos_ += n;
    return out;
  }
  std::size_t position() const { return pos_; }
  std::size_t remaining() const { return bytes_.size() - pos_; }

 private:
  void Require(std::size_t n) const {
    if (n > remaining()) throw FormatError("unexpected end of data");
  }
  void Take(void* dst, std::size_t n) {
    Require(n);
    std::memcpy(dst, bytes_.data() + pos_, n);
    pos_ += n;
  }

  std::string_view bytes_;
  std::size_t pos_ = 0;
};

// Binary container shared by the annotation and bank formats:
//   4-byte magic | uint32 version | uint64 header size | JSON header |
//   payload blocks in the order listed under header["blocks"].
// Each block entry records name, dtype, shape, offset and byte size.
struct ContainerBlock {
  std::string name;
  std::string dtype;  // "float32" or "uint32"
  std::vector<std::uint64_t> shape;
  std::string data;
};

std::string WriteContainer(std::string_view magic, std::uint32_t version,
                           nlohmann::json header,
                           const std::vector<ContainerBlock>& blocks);

struct Container {
  nlohmann::json header;
  std::vector<ContainerBlock> blocks;
  const ContainerBlock& Block(const std::string& name) const;
};

Container ReadContainer(std::string_view bytes, std::string_view magic,
                        std::uint32_t version);

template <typename T>
std::vector<T> BlockValues(const ContainerBlock& block) {
  if (block.data.size() % sizeof(T) != 0) {
    throw FormatError("block '" + block.name + "' has a ragged size");
  }
  std::vector<T> out(block.data.size() / sizeof(T));
  std::memcpy(out.data(), block.data.data(), block.data.size());
  return out;
}

}  // namespace grasplab

#endif  // GRASPLAB_IO_UTIL_H_
