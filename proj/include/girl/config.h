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

#ifndef GIRL_CONFIG_H_
#define GIRL_CONFIG_H_

// Flat "dotted.key = value" run configuration. Lines starting with '#' are
// comments; lists are comma separated. Unknown keys are rejected, and
// validation reports every offending field at once.
//
//   tasks.kind            pointvel | pointpos
//   tasks.count           number of tasks
//   tasks.vmin/vmax       PointVel target velocity range
//   tasks.radius          PointPos circle radius
//   env.*                 gamma, horizon, action_clip, dt
//   maml.*                inner_lr, outer_lr, traj_per_task, tasks_per_batch,
//                         meta_iterations, first_order, hidden_size, baseline,
//                         entropy_bonus, normalize_advantages, max_grad_norm
//   solver.*              eta, explore_eps, max_iters, tol, average_window,
//                         normalize_payoffs
//   psro.*                max_loops, max_policies, train_min, train_max, mode,
//                         seed, payoff_episodes
//   eval.*                shots, shot_weights, test_min, test_max, beta,
//                         finetune_lr, episodes, seeds
//   compare.*             train_max, test_max, shots, seeds, maml_iterations

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "girl/env.h"
#include "girl/eval.h"
#include "girl/maml.h"
#include "girl/metagame.h"
#include "girl/psro.h"

namespace girl {

struct RunConfig {
  EnvKind task_kind = EnvKind::kPointVel;
  int task_count = 5;
  double vmin = 0.0;
  double vmax = 3.0;
  double radius = 2.0;

  EnvConfig env;
  MamlConfig maml;
  SolverConfig solver;
  PsroConfig psro;
  EvalConfig eval;
  CompareConfig compare;

  TaskSet make_tasks() const;
  PsroSetup setup() const;
  // Every violated constraint, one message per field.
  std::vector<std::string> problems() const;
};

// Throws ConfigError on syntax errors, unknown keys, or failed validation.
RunConfig parse_config(std::string_view text);
// Throws DataError when the file cannot be read.
RunConfig load_config(const std::filesystem::path& path);
// Canonical text form; parse_config(format_config(c)) reproduces c exactly.
std::string format_config(const RunConfig& config);

}  // namespace girl

#endif  // GIRL_CONFIG_H_
