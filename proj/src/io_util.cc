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

#include "grasplab/io_util.h"

#include <fstream>
#include <iterator>
#include <sstream>

namespace grasplab {
namespace {

std::size_t DtypeSize(const std::string& dtype) {
  if (dtype == "float32" || dtype == "uint32") return 4;
  throw FormatError("unsupported dtype '" + dtype + "'");
}

}  // namespace

std::string ReadFileBytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void WriteFileBytes(const std::string& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw FormatError("cannot write '" + path + "'");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw FormatError("short write to '" + path + "'");
}

std::string WriteContainer(std::string_view magic, std::uint32_t version,
                           nlohmann::json header,
                           const std::vector<ContainerBlock>& blocks) {
  nlohmann::json entries = nlohmann::json::array();
  std::uint64_t offset = 0;
  for (const ContainerBlock& b : blocks) {
    std::uint64_t count = 1;
    for (const std::uint64_t s : b.shape) count *= s;
    if (count * DtypeSize(b.dtype) != b.data.size()) {
      throw std::invalid_argument("block '" + b.name + "' shape/size mismatch");
    }
    entries.push_back({{"name", b.name},
                       {"dtype", b.dtype},
                       {"shape", b.shape},
                       {"offset", offset},
                       {"bytes", b.data.size()}});
    offset += b.data.size();
  }
  header["blocks"] = std::move(entries);
  header["endianness"] = "little";
  const std::string text = header.dump();

  std::string out(magic);
  AppendPod(out, version);
  AppendPod(out, static_cast<std::uint64_t>(text.size()));
  out += text;
  for (const ContainerBlock& b : blocks) out += b.data;
  return out;
}

const ContainerBlock& Container::Block(const std::string& name) const {
  for (const ContainerBlock& b : blocks) {
    if (b.name == name) return b;
  }
  throw FormatError("missing block '" + name + "'");
}

Container ReadContainer(std::string_view bytes, std::string_view magic,
                        std::uint32_t version) {
  ByteReader reader(bytes);
  if (reader.ReadBytes(magic.size()) != magic) {
    throw FormatError("bad magic, expected '" + std::string(magic) + "'");
  }
  const auto got_version = reader.Read<std::uint32_t>();
  if (got_version != version) {
    throw FormatError("unsupported version " + std::to_string(got_version));
  }
  const auto header_size = reader.Read<std::uint64_t>();
  if (header_size > reader.remaining()) throw FormatError("truncated header");
  Container c;
  try {
    c.header = nlohmann::json::parse(reader.ReadBytes(header_size));
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("bad header: ") + e.what());
  }
  if (c.header.value("endianness", "") != "little") {
    throw FormatError("only little-endian payloads are supported");
  }
  try {
    std::uint64_t expected_offset = 0;
    for (const auto& entry : c.header.at("blocks")) {
      ContainerBlock b;
      b.name = entry.at("name").get<std::string>();
      b.dtype = entry.at("dtype").get<std::string>();
      b.shape = entry.at("shape").get<std::vector<std::uint64_t>>();
      const auto offset = entry.at("offset").get<std::uint64_t>();
      const auto size = entry.at("bytes").get<std::uint64_t>();
      std::uint64_t count = 1;
      for (const std::uint64_t s : b.shape) count *= s;
      if (offset != expected_offset || count * DtypeSize(b.dtype) != size) {
        throw FormatError("inconsistent block table at '" + b.name + "'");
      }
      b.data = std::string(reader.ReadBytes(size));
      expected_offset += size;
      c.blocks.push_back(std::move(b));
    }
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("bad block table: ") + e.what());
  }
  if (reader.remaining() != 0) throw FormatError("trailing bytes after payload");
  return c;
}

}  // namespace grasplab
