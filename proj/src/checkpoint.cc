// Copyright 2026 The Cner Authors.
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

#include "cner/checkpoint.h"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>

#include "cner/errors.h"

namespace cner {
namespace {

void PutU32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

void PutU64(std::string& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

void PutString(std::string& out, std::string_view s) {
  PutU32(out, static_cast<std::uint32_t>(s.size()));
  out.append(s);
}

class Reader {
 public:
  explicit Reader(std::string_view bytes) : bytes_(bytes) {}

  std::string_view Take(std::size_t n) {
    if (pos_ + n > bytes_.size()) throw InputError("checkpoint truncated");
    std::string_view out = bytes_.substr(pos_, n);
    pos_ += n;
    return out;
  }

  std::uint64_t Uint(int width) {
    std::string_view raw = Take(width);
    std::uint64_t v = 0;
    for (int i = width - 1; i >= 0; --i) {
      v = (v << 8) | static_cast<unsigned char>(raw[i]);
    }
    return v;
  }

  std::string String() {
    const auto n = static_cast<std::size_t>(Uint(4));
    return std::string(Take(n));
  }

  bool done() const { return pos_ == bytes_.size(); }

 private:
  std::string_view bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

const Tensor& Checkpoint::Find(const std::string& name) const {
  for (const auto& [n, t] : tensors) {
    if (n == name) return t;
  }
  throw InputError("checkpoint has no tensor named '" + name + "'");
}

const std::string& Checkpoint::Meta(const std::string& key) const {
  auto it = metadata.find(key);
  if (it == metadata.end()) {
    throw InputError("checkpoint has no metadata key '" + key + "'");
  }
  return it->second;
}

std::string SerializeCheckpoint(const Checkpoint& checkpoint) {
  std::string out(kCheckpointMagic, 5);
  PutU32(out, kCheckpointVersion);
  PutU32(out, static_cast<std::uint32_t>(checkpoint.metadata.size()));
  for (const auto& [key, value] : checkpoint.metadata) {
    PutString(out, key);
    PutString(out, value);
  }
  PutU32(out, static_cast<std::uint32_t>(checkpoint.tensors.size()));
  for (const auto& [name, tensor] : checkpoint.tensors) {
    PutString(out, name);
    PutU32(out, static_cast<std::uint32_t>(tensor.rank()));
    for (std::size_t d : tensor.shape()) PutU64(out, d);
    for (double v : tensor.values()) PutU64(out, std::bit_cast<std::uint64_t>(v));
  }
  return out;
}

Checkpoint ParseCheckpoint(std::string_view bytes) {
  Reader in(bytes);
  if (in.Take(5) != std::string_view(kCheckpointMagic, 5)) {
    throw InputError("not a checkpoint (bad magic)");
  }
  const auto version = in.Uint(4);
  if (version != kCheckpointVersion) {
    throw InputError("unsupported checkpoint version " +
                     std::to_string(version));
  }
  Checkpoint checkpoint;
  const auto n_meta = in.Uint(4);
  for (std::uint64_t i = 0; i < n_meta; ++i) {
    std::string key = in.String();
    checkpoint.metadata[key] = in.String();
  }
  const auto n_tensors = in.Uint(4);
  for (std::uint64_t i = 0; i < n_tensors; ++i) {
    std::string name = in.String();
    const auto rank = in.Uint(4);
    if (rank > 8) throw InputError("checkpoint tensor rank too large");
    Shape shape;
    for (std::uint64_t d = 0; d < rank; ++d) {
      shape.push_back(static_cast<std::size_t>(in.Uint(8)));
    }
    std::vector<double> values(ShapeSize(shape));
    for (double& v : values) v = std::bit_cast<double>(in.Uint(8));
    checkpoint.tensors.emplace_back(std::move(name),
                                    Tensor(std::move(shape), std::move(values)));
  }
  if (!in.done()) throw InputError("trailing bytes after checkpoint");
  return checkpoint;
}

void WriteCheckpoint(const std::string& path, const Checkpoint& checkpoint) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InputError("cannot open '" + path + "' for writing");
  const std::string bytes = SerializeCheckpoint(checkpoint);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw InputError("failed writing '" + path + "'");
}

Checkpoint ReadCheckpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open checkpoint '" + path + "'");
  std::string bytes((std::istreambuf_iterator<char>(in)),
                    std::istreambuf_iterator<char>());
  return ParseCheckpoint(bytes);
}

}  // namespace cner
