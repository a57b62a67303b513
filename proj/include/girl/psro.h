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

#ifndef GIRL_PSRO_H_
#define GIRL_PSRO_H_

// Policy-space response oracle loop for the agent-vs-adversary game:
//   best response (MAML) -> augment payoff table -> solve restricted game.
// With a run directory every loop is persisted, and an interrupted run can
// be resumed; loop k draws from the stream mix_seed(seed, k), so a resumed
// run reproduces the uninterrupted one.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "girl/env.h"
#include "girl/maml.h"
#include "girl/metagame.h"
#include "girl/policy.h"

namespace girl {

// kGirl continues training from the previous loop's policy; kStarGirl
// reinitializes the policy at every loop.
enum class PsroMode { kGirl, kStarGirl };

std::string_view psro_mode_name(PsroMode mode);
PsroMode parse_psro_mode(std::string_view name);

struct PsroConfig {
  int max_loops = 5;
  int max_policies = 1000;
  double train_min = 0.0;
  double train_max = 1.0;
  PsroMode mode = PsroMode::kGirl;
  std::uint64_t seed = 0;
  // Rollouts per task when scoring a new policy for the payoff table.
  int payoff_episodes = 10;

  RestrictedSimplex train_simplex(std::size_t n) const {
    return {n, train_min, train_max};
  }
  std::vector<std::string> problems() const;
};

struct LoopDiagnostics {
  int loop = 0;
  // min over the train simplex of pi^T U p
  double restricted_value = 0.0;
  double exploitability = 0.0;
  int solver_iterations = 0;
  double mean_post_adaptation_return = 0.0;
  double wall_seconds = 0.0;
};

struct RunArtifacts {
  std::vector<MlpParams> policies;
  PayoffTable payoff;
  // strategies[k] is the meta-strategy pair solved after loop k.
  std::vector<MetaStrategyPair> strategies;
  std::vector<LoopDiagnostics> diagnostics;

  std::size_t loops_completed() const { return policies.size(); }
};

struct PsroSetup {
  TaskSet tasks;
  PsroConfig psro;
  MamlConfig maml;
  EnvConfig env;
  SolverConfig solver;
};

// Runs loops until psro.max_loops or psro.max_policies is reached, starting
// from `resume_from` when given. When `run_dir` is set, artifacts are
// written after every loop. `stop_after` caps the number of loops executed
// by this call (used to simulate interruption).
RunArtifacts run_psro(const PsroSetup& setup,
                      const std::optional<std::filesystem::path>& run_dir = std::nullopt,
                      RunArtifacts resume_from = {},
                      std::optional<int> stop_after = std::nullopt);

// Writes manifest, policies/, payoff.csv, strategies.csv, diagnostics.csv.
void save_run(const std::filesystem::path& run_dir, const PsroSetup& setup,
              const RunArtifacts& artifacts);

struct LoadedRun {
  PsroSetup setup;
  RunArtifacts artifacts;
  bool complete = false;
};

// Throws DataError (naming the loop index where relevant) on missing or
// inconsistent files.
LoadedRun load_run(const std::filesystem::path& run_dir);

// Continues an interrupted run from its last completed loop.
RunArtifacts resume(const std::filesystem::path& run_dir);

}  // namespace girl

#endif  // GIRL_PSRO_H_
