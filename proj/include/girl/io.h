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

#ifndef GIRL_IO_H_
#define GIRL_IO_H_

// File formats.
//
// payoff.csv      header "policy,task_<id>,...", then one row per policy:
//                 policy index followed by its per-task returns.
// strategies.csv  header "loop,player,index,probability"; player is "pi"
//                 (over policies) or "p1" (over tasks).
// policy_NNN.txt  first line "girl-mlp 1 <obs_dim> <act_dim> <n_hidden>
//                 <h_1> ... <h_n> <param_count>", then one C99 hex-float per
//                 line. Round trips are bit-exact.
// tasks.json      {"kind": ..., "contexts": [{"id", "params"}], "p0": [...]}
//
// Reals in CSV files are written with 17 significant digits so they parse
// back to the same double.

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "girl/env.h"
#include "girl/metagame.h"
#include "girl/policy.h"

namespace girl {

std::string format_real(double v);
// Throws DataError.
double parse_real(std::string_view text, std::string_view what);

std::string read_text(const std::filesystem::path& path);
// Writes via a temporary file and rename.
void write_text_atomic(const std::filesystem::path& path, std::string_view text);

std::string payoff_to_csv(const PayoffTable& table, std::span<const int> task_ids);
// DataError messages carry the 1-based line number.
PayoffTable payoff_from_csv(std::string_view text);

std::string strategies_to_csv(std::span<const MetaStrategyPair> strategies);
std::vector<MetaStrategyPair> strategies_from_csv(std::string_view text);

std::string policy_to_text(const MlpParams& params);
MlpParams policy_from_text(std::string_view text);

std::string task_set_to_json(const TaskSet& tasks);
TaskSet task_set_from_json(std::string_view text);

// Splits on `sep`, no quoting.
std::vector<std::string> split(std::string_view text, char sep);
std::string_view trim(std::string_view text);

}  // namespace girl

#endif  // GIRL_IO_H_
