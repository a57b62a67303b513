// Copyright 2026 The psro-girl Authors.
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

#ifndef GIRL_CLI_H_
#define GIRL_CLI_H_

// Command-line front end. Subcommands:
//
//   train    --config FILE --run-dir DIR [--resume] [--stop-after N]
//   eval     --run-dir DIR --config FILE [--out DIR]
//   solve    --payoff CSV [--lower L] [--upper U] [solver flags]
//   compare  --config FILE --out DIR
//   inspect  --run-dir DIR
//
// All subcommands accept --jobs N (worker threads for rollouts; results do
// not depend on it).

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "girl/eval.h"

namespace girl::cli {

enum ExitCode : int {
  kOk = 0,
  kUsage = 2,
  kConfig = 3,
  kData = 4,
  kInternal = 5,
};

// `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// Report writers shared by eval and compare.
std::string comparison_to_csv(const ComparisonTable& table);
std::string comparison_to_long_csv(const ComparisonTable& table);
std::string comparison_to_text(const ComparisonTable& table);

}  // namespace girl::cli

#endif  // GIRL_CLI_H_
