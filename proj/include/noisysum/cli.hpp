// Copyright 2026 The noisysum Authors
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

#ifndef NOISYSUM_CLI_HPP
#define NOISYSUM_CLI_HPP

#include <ostream>

namespace noisysum {

/// Process exit codes.
enum ExitCode : int {
  kExitOk = 0,
  kExitPropertyViolation = 1,
  kExitUsage = 2,
  kExitInfeasible = 3,
};

/// Entry point of the `noisysum` tool. Results go to --output when given
/// (written atomically), otherwise to `out`; diagnostics go to `err`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace noisysum

#endif  // NOISYSUM_CLI_HPP
