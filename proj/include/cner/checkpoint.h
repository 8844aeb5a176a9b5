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

// Binary checkpoint container.
//
// Layout (all integers little-endian):
//   "STFC1"                      5-byte magic
//   u32 version                  currently 1
//   u32 n_meta, then n_meta x    (u32 len, key bytes, u32 len, value bytes)
//   u32 n_tensors, then n_tensors x
//       u32 len, name bytes, u32 rank, rank x u64 dims,
//       prod(dims) x f64 values (IEEE-754, row-major)
//
// Metadata keys are written in sorted order; tensors in insertion order.

#ifndef CNER_CHECKPOINT_H_
#define CNER_CHECKPOINT_H_

#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "cner/tensor.h"

namespace cner {

inline constexpr char kCheckpointMagic[] = "STFC1";
inline constexpr unsigned kCheckpointVersion = 1;

struct Checkpoint {
  std::map<std::string, std::string> metadata;
  std::vector<std::pair<std::string, Tensor>> tensors;

  const Tensor& Find(const std::string& name) const;
  const std::string& Meta(const std::string& key) const;
};

std::string SerializeCheckpoint(const Checkpoint& checkpoint);
// Throws InputError on bad magic, unknown version or truncation.
Checkpoint ParseCheckpoint(std::string_view bytes);

void WriteCheckpoint(const std::string& path, const Checkpoint& checkpoint);
Checkpoint ReadCheckpoint(const std::string& path);

}  // namespace cner

#endif  // CNER_CHECKPOINT_H_
