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

#ifndef GIRL_MAML_H_
#define GIRL_MAML_H_

// First-order MAML used as the agent's best-response oracle: meta-train a
// single policy so that one policy-gradient step adapts it well to tasks
// drawn from a given task distribution.

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "girl/env.h"
#include "girl/policy.h"
#include "girl/rng.h"

namespace girl {

struct MamlConfig {
  double inner_lr = 0.1;
  double outer_lr = 0.01;
  // Trajectories sampled per task, both before and after adaptation.
  int traj_per_task = 10;
  int tasks_per_batch = 5;
  int meta_iterations = 200;
  bool first_order = true;
  // Width of each of the two hidden layers of freshly initialized policies.
  int hidden_size = 32;
  Baseline baseline = Baseline::kMeanReturn;
  double entropy_bonus = 0.0;
  bool normalize_advantages = true;
  // Rescale inner and outer gradients to at most this Euclidean norm;
  // 0 disables.
  double max_grad_norm = 0.5;

  PgConfig inner_pg() const;
  PgConfig outer_pg() const;
  std::vector<std::string> problems() const;
  void validate() const;
};

// Per meta-iteration diagnostics.
struct MetaTrace {
  // Mean undiscounted return of the pre-adaptation trajectories.
  std::vector<double> pre_adaptation_return;
  // Mean undiscounted return of the post-adaptation trajectories.
  std::vector<double> post_adaptation_return;
};

// Throws InvalidArgument unless p is a probability vector of size n
// (sum within 1e-9).
void check_distribution(std::span<const double> p, std::size_t n, const char* what);

// Draws `count` task indices i.i.d. from p (with replacement).
std::vector<std::size_t> sample_tasks(std::span<const double> p, std::size_t count,
                                      Rng& rng);

// One policy-gradient step on `context` using traj_per_task fresh rollouts.
MlpParams inner_adapt(const MlpParams& params, const TaskContext& context,
                      const MamlConfig& cfg, const EnvConfig& env_cfg, Rng& rng,
                      double* pre_return = nullptr);

// One outer update. The gradient is averaged over the sampled tasks.
MlpParams meta_step(const MlpParams& params, std::span<const double> p1,
                    const TaskSet& tasks, const MamlConfig& cfg,
                    const EnvConfig& env_cfg, Rng& rng, MetaTrace* trace = nullptr);

// Runs cfg.meta_iterations meta-steps from `init`, or from a freshly
// initialized policy when `init` is empty.
MlpParams best_response(std::span<const double> p1, const TaskSet& tasks,
                        const MamlConfig& cfg, const EnvConfig& env_cfg,
                        const std::optional<MlpParams>& init, Rng& rng,
                        MetaTrace* trace = nullptr);

}  // namespace girl

#endif  // GIRL_MAML_H_
