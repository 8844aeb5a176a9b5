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

// Command-line entry point: train, predict, eval, augment, gradcheck.

#ifndef CNER_CLI_H_
#define CNER_CLI_H_

#include <iosfwd>
#include <string>
#include <vector>

namespace cner {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUserError = 1;
inline constexpr int kExitCheckFailed = 2;

// args excludes the program name. Results go to `out`, logs and
// diagnostics to `err`.
int RunCli(const std::vector<std::string>& args, std::ostream& out,
           std::ostream& err);

int RunCli(int argc, char** argv);

}  // namespace cner

#endif  // CNER_CLI_H_
