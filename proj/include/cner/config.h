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

// Training configuration and its flat "key = value" text form.

#ifndef CNER_CONFIG_H_
#define CNER_CONFIG_H_

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace cner {

struct TrainingConfig {
  double lambda = 0.4;
  double dropout = 0.2;
  double learning_rate = 0.001;
  double rms_decay = 0.9;
  double epsilon = 1e-8;
  std::size_t batch_size = 32;
  std::size_t max_epochs = 100;
  std::size_t patience = 10;
  std::uint64_t seed = 0;
  std::size_t embed_dim = 200;
  std::size_t filters = 400;
  std::vector<std::size_t> windows = {2, 3, 4, 5};
  std::size_t hidden = 200;

  // Throws InputError naming the first field out of range.
  void Validate() const;
};

// Every key accepted by SetConfigValue, in canonical order.
const std::vector<std::string>& ConfigKeys();

// Assigns one field from text. Throws InputError for an unknown key or an
// unparseable value. Windows are comma-separated ("2,3,4,5").
void SetConfigValue(TrainingConfig& config, std::string_view key,
                    std::string_view value);
std::string GetConfigValue(const TrainingConfig& config, std::string_view key);

// Applies "key = value" lines on top of `config`. Blank lines and lines
// starting with '#' are skipped. Errors carry the line number.
void ApplyConfigText(TrainingConfig& config, std::string_view text,
                     const std::string& source_name);
void ApplyConfigFile(TrainingConfig& config, const std::string& path);

// One "key = value" line per field, in ConfigKeys() order.
std::string FormatConfig(const TrainingConfig& config);

}  // namespace cner

#endif  // CNER_CONFIG_H_
