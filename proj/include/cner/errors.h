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

#ifndef CNER_ERRORS_H_
#define CNER_ERRORS_H_

#include <stdexcept>
#include <string>

namespace cner {

// Bad input from the caller: malformed files, invalid labels, inconsistent
// shapes handed to a public function. Maps to CLI exit code 1.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A parse failure that can be pinned to a line in a text file.
class ParseError : public InputError {
 public:
  ParseError(const std::string& path, std::size_t line,
             const std::string& what)
      : InputError(path + ":" + std::to_string(line) + ": " + what),
        line_(line) {}

  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// Internal numeric contract violation (non-finite values, failed gradient
// check, misuse of the tape). Maps to CLI exit code 2.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace cner

#endif  // CNER_ERRORS_H_
