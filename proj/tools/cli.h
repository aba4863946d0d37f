// Copyright 2026 The X-Claim Toolkit Authors
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

#ifndef XCLAIM_TOOLS_CLI_H_
#define XCLAIM_TOOLS_CLI_H_

#include <iosfwd>

namespace xclaim::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;  // bad input, config or usage
inline constexpr int kExitIo = 2;          // file system or network failure

// Parses argv and runs one subcommand. Primary output and --json reports go
// to `out`, diagnostics to `err`.
int Run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace xclaim::cli

#endif  // XCLAIM_TOOLS_CLI_H_
