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

#include "cner/config.h"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "cner/errors.h"

namespace cner {
namespace {

std::string_view Trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

[[noreturn]] void BadValue(std::string_view key, std::string_view value) {
  throw InputError("invalid value '" + std::string(value) + "' for " +
                   std::string(key));
}

double ParseDouble(std::string_view key, std::string_view value) {
  double out = 0.0;
  const auto [ptr, ec] =
      std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || ptr != value.data() + value.size() ||
      !std::isfinite(out)) {
    BadValue(key, value);
  }
  return out;
}

std::uint64_t ParseUnsigned(std::string_view key, std::string_view value) {
  std::uint64_t out = 0;
  const auto [ptr, ec] =
      std::from_chars(value.data(), value.data() + value.size(), out);
  if (value.empty() || ec != std::errc() ||
      ptr != value.data() + value.size()) {
    BadValue(key, value);
  }
  return out;
}

std::string FormatDouble(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

void TrainingConfig::Validate() const {
  auto fail = [](const std::string& what) {
    throw InputError("config: " + what);
  };
  if (!(lambda >= 0.0 && lambda < 1.0)) fail("lambda must be in [0, 1)");
  if (!(dropout >= 0.0 && dropout < 1.0)) fail("dropout must be in [0, 1)");
  if (!(learning_rate > 0.0)) fail("learning_rate must be positive");
  if (!(rms_decay >= 0.0 && rms_decay < 1.0)) {
    fail("rms_decay must be in [0, 1)");
  }
  if (!(epsilon > 0.0)) fail("epsilon must be positive");
  if (batch_size == 0) fail("batch_size must be positive");
  if (max_epochs == 0) fail("max_epochs must be positive");
  if (embed_dim == 0) fail("embed_dim must be positive");
  if (hidden == 0) fail("hidden must be positive");
  if (windows.empty()) fail("windows must not be empty");
  for (std::size_t k : windows) {
    if (k == 0) fail("window sizes must be positive");
  }
  if (filters == 0 || filters % windows.size() != 0) {
    fail("filters must be a positive multiple of the number of windows");
  }
}

const std::vector<std::string>& ConfigKeys() {
  static const std::vector<std::string> keys = {
      "lambda",     "dropout",  "learning_rate", "rms_decay", "epsilon",
      "batch_size", "max_epochs", "patience",    "seed",      "embed_dim",
      "filters",    "windows",  "hidden"};
  return keys;
}

void SetConfigValue(TrainingConfig& config, std::string_view key,
                    std::string_view value) {
  value = Trim(value);
  if (key == "lambda") {
    config.lambda = ParseDouble(key, value);
  } else if (key == "dropout") {
    config.dropout = ParseDouble(key, value);
  } else if (key == "learning_rate") {
    config.learning_rate = ParseDouble(key, value);
  } else if (key == "rms_decay") {
    config.rms_decay = ParseDouble(key, value);
  } else if (key == "epsilon") {
    config.epsilon = ParseDouble(key, value);
  } else if (key == "batch_size") {
    config.batch_size = ParseUnsigned(key, value);
  } else if (key == "max_epochs") {
    config.max_epochs = ParseUnsigned(key, value);
  } else if (key == "patience") {
    config.patience = ParseUnsigned(key, value);
  } else if (key == "seed") {
    config.seed = ParseUnsigned(key, value);
  } else if (key == "embed_dim") {
    config.embed_dim = ParseUnsigned(key, value);
  } else if (key == "filters") {
    config.filters = ParseUnsigned(key, value);
  } else if (key == "hidden") {
    config.hidden = ParseUnsigned(key, value);
  } else if (key == "windows") {
    std::vector<std::size_t> windows;
    std::size_t pos = 0;
    while (pos <= value.size()) {
      const std::size_t comma = std::min(value.find(',', pos), value.size());
      windows.push_back(ParseUnsigned(key, Trim(value.substr(pos, comma - pos))));
      pos = comma + 1;
    }
    config.windows = std::move(windows);
  } else {
    throw InputError("unknown config key '" + std::string(key) + "'");
  }
}

std::string GetConfigValue(const TrainingConfig& config,
                           std::string_view key) {
  if (key == "lambda") return FormatDouble(config.lambda);
  if (key == "dropout") return FormatDouble(config.dropout);
  if (key == "learning_rate") return FormatDouble(config.learning_rate);
  if (key == "rms_decay") return FormatDouble(config.rms_decay);
  if (key == "epsilon") return FormatDouble(config.epsilon);
  if (key == "batch_size") return std::to_string(config.batch_size);
  if (key == "max_epochs") return std::to_string(config.max_epochs);
  if (key == "patience") return std::to_string(config.patience);
  if (key == "seed") return std::to_string(config.seed);
  if (key == "embed_dim") return std::to_string(config.embed_dim);
  if (key == "filters") return std::to_string(config.filters);
  if (key == "hidden") return std::to_string(config.hidden);
  if (key == "windows") {
    std::string out;
    for (std::size_t i = 0; i < config.windows.size(); ++i) {
      if (i > 0) out += ',';
      out += std::to_string(config.windows[i]);
    }
    return out;
  }
  throw InputError("unknown config key '" + std::string(key) + "'");
}

void ApplyConfigText(TrainingConfig& config, std::string_view text,
                     const std::string& source_name) {
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const std::size_t eol = std::min(text.find('\n', pos), text.size());
    const std::string_view line = Trim(text.substr(pos, eol - pos));
    pos = eol + 1;
    ++line_no;
    if (line.empty() || line.front() == '#') continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ParseError(source_name, line_no, "expected 'key = value'");
    }
    try {
      SetConfigValue(config, Trim(line.substr(0, eq)), line.substr(eq + 1));
    } catch (const InputError& e) {
      throw ParseError(source_name, line_no, e.what());
    }
  }
}

void ApplyConfigFile(TrainingConfig& config, const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open config file " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  ApplyConfigText(config, buffer.str(), path);
}

std::string FormatConfig(const TrainingConfig& config) {
  std::string out;
  for (const std::string& key : ConfigKeys()) {
    out += key + " = " + GetConfigValue(config, key) + "\n";
  }
  return out;
}

}  // namespace cner
