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

#ifndef GIRL_ENV_H_
#define GIRL_ENV_H_

// Point-mass multi-task environments. A task family is a finite set of
// contexts that share dynamics and differ in the reward target; the context
// is hidden from the agent, so one policy must serve every task.
//
//   PointVel  state (pos, vel), action 1-D acceleration, reward -|v - goal|
//   PointPos  state (x, y),     action 2-D velocity,     reward -|pos - goal|_1
//   Bandit    state (1),        action 1-D,              reward -(a - goal)^2,
//             always a single step (test fixture for the learners)

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "girl/rng.h"

namespace girl {

template <class Tag>
class ParamVector;
struct ParamsTag;
using MlpParams = ParamVector<ParamsTag>;

enum class EnvKind { kPointVel, kPointPos, kBandit };

std::string_view env_kind_name(EnvKind kind);
// Throws InvalidArgument for unknown names.
EnvKind parse_env_kind(std::string_view name);

int observation_dim(EnvKind kind);
int action_dim(EnvKind kind);

struct TaskContext {
  int id = 0;
  EnvKind kind = EnvKind::kPointVel;
  // PointVel: {target velocity}; PointPos: {x, y}; Bandit: {target action}.
  std::vector<double> params;
};

struct TaskSet {
  EnvKind kind = EnvKind::kPointVel;
  std::vector<TaskContext> contexts;
  // Base training distribution over contexts.
  std::vector<double> p0;

  std::size_t size() const { return contexts.size(); }
  // Throws InvalidArgument when any invariant is broken.
  void validate() const;
};

struct EnvConfig {
  double gamma = 0.99;
  int horizon = 100;
  double action_clip = 1.0;
  double dt = 0.1;

  std::vector<std::string> problems() const;
  void validate() const;
};

TaskSet make_pointvel_tasks(int n, double vmin, double vmax);
TaskSet make_pointpos_tasks(int n, double radius);
TaskSet make_bandit_tasks(const std::vector<double>& targets);

using State = std::vector<double>;

State reset(const TaskContext& context, Rng& rng);

struct StepResult {
  State state;
  double reward = 0.0;
  bool done = false;
};

// `steps_taken` counts transitions already made in this episode; the
// episode ends once it reaches the horizon. Bandit episodes always end after
// one step.
StepResult step(std::span<const double> state, std::span<const double> action,
                const TaskContext& context, const EnvConfig& cfg,
                int steps_taken);

// Flat storage: state t occupies [t * obs_dim, (t + 1) * obs_dim).
struct Trajectory {
  int obs_dim = 0;
  int act_dim = 0;
  std::vector<double> states;
  std::vector<double> actions;
  std::vector<double> rewards;
  std::vector<double> logprobs;

  std::size_t length() const { return rewards.size(); }
  std::span<const double> state(std::size_t t) const {
    return {states.data() + t * obs_dim, static_cast<std::size_t>(obs_dim)};
  }
  std::span<const double> action(std::size_t t) const {
    return {actions.data() + t * act_dim, static_cast<std::size_t>(act_dim)};
  }
  double total_return() const;
  double discounted_return(double gamma) const;
};

enum class ActionMode { kSample, kMean };

// Runs one episode. kMean plays the policy mean (logprob is then the
// density at the mode).
Trajectory rollout(const MlpParams& policy, const TaskContext& context,
                   const EnvConfig& cfg, Rng& rng,
                   ActionMode mode = ActionMode::kSample);

}  // namespace girl

#endif  // GIRL_ENV_H_
