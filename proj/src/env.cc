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

#include "girl/env.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "girl/errors.h"
#include "girl/policy.h"

namespace girl {

std::string_view env_kind_name(EnvKind kind) {
  switch (kind) {
    case EnvKind::kPointVel:
      return "pointvel";
    case EnvKind::kPointPos:
      return "pointpos";
    case EnvKind::kBandit:
      return "bandit";
  }
  return "unknown";
}

EnvKind parse_env_kind(std::string_view name) {
  if (name == "pointvel") return EnvKind::kPointVel;
  if (name == "pointpos") return EnvKind::kPointPos;
  if (name == "bandit") return EnvKind::kBandit;
  throw InvalidArgument("unknown environment kind '" + std::string(name) + "'");
}

int observation_dim(EnvKind kind) {
  switch (kind) {
    case EnvKind::kPointVel:
    case EnvKind::kPointPos:
      return 2;
    case EnvKind::kBandit:
      return 1;
  }
  return 0;
}

int action_dim(EnvKind kind) { return kind == EnvKind::kPointPos ? 2 : 1; }

namespace {

std::size_t param_dim(EnvKind kind) { return kind == EnvKind::kPointPos ? 2 : 1; }

std::vector<double> uniform_distribution(std::size_t n) {
  return std::vector<double>(n, 1.0 / static_cast<double>(n));
}

}  // namespace

void TaskSet::validate() const {
  if (contexts.empty()) throw InvalidArgument("task set is empty");
  if (p0.size() != contexts.size()) {
    throw InvalidArgument("task set: |p0| differs from the number of contexts");
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < contexts.size(); ++i) {
    const TaskContext& c = contexts[i];
    if (c.kind != kind) throw InvalidArgument("task set: mixed environment kinds");
    if (c.params.size() != param_dim(kind)) {
      throw InvalidArgument("task set: context " + std::to_string(c.id) +
                            " has the wrong parameter count");
    }
    for (double v : c.params) {
      if (!std::isfinite(v)) {
        throw InvalidArgument("task set: non-finite parameter in context " +
                              std::to_string(c.id));
      }
    }
    for (std::size_t j = 0; j < i; ++j) {
      if (contexts[j].id == c.id) {
        throw InvalidArgument("task set: duplicate context id " + std::to_string(c.id));
      }
    }
    if (!(p0[i] >= 0.0)) throw InvalidArgument("task set: negative p0 entry");
    sum += p0[i];
  }
  if (std::abs(sum - 1.0) > 1e-12) throw InvalidArgument("task set: p0 does not sum to 1");
}

std::vector<std::string> EnvConfig::problems() const {
  std::vector<std::string> out;
  if (!(gamma > 0.0 && gamma <= 1.0)) out.push_back("env.gamma must lie in (0, 1]");
  if (horizon < 1) out.push_back("env.horizon must be >= 1");
  if (!(action_clip > 0.0)) out.push_back("env.action_clip must be > 0");
  if (!(dt > 0.0)) out.push_back("env.dt must be > 0");
  return out;
}

void EnvConfig::validate() const {
  auto p = problems();
  if (!p.empty()) throw InvalidArgument(p.front());
}

TaskSet make_pointvel_tasks(int n, double vmin, double vmax) {
  if (n < 2) throw InvalidArgument("make_pointvel_tasks: n must be >= 2");
  if (!(vmin < vmax)) throw InvalidArgument("make_pointvel_tasks: need vmin < vmax");
  TaskSet set;
  set.kind = EnvKind::kPointVel;
  for (int k = 0; k < n; ++k) {
    const double v = vmin + (vmax - vmin) * static_cast<double>(k) / (n - 1);
    set.contexts.push_back({k, EnvKind::kPointVel, {k == n - 1 ? vmax : v}});
  }
  set.p0 = uniform_distribution(static_cast<std::size_t>(n));
  return set;
}

TaskSet make_pointpos_tasks(int n, double radius) {
  if (n < 1) throw InvalidArgument("make_pointpos_tasks: n must be >= 1");
  if (!(radius > 0.0)) throw InvalidArgument("make_pointpos_tasks: radius must be > 0");
  TaskSet set;
  set.kind = EnvKind::kPointPos;
  for (int k = 0; k < n; ++k) {
    const double angle = 2.0 * std::numbers::pi * k / n;
    set.contexts.push_back(
        {k, EnvKind::kPointPos, {radius * std::cos(angle), radius * std::sin(angle)}});
  }
  set.p0 = uniform_distribution(static_cast<std::size_t>(n));
  return set;
}

TaskSet make_bandit_tasks(const std::vector<double>& targets) {
  if (targets.empty()) throw InvalidArgument("make_bandit_tasks: no targets");
  TaskSet set;
  set.kind = EnvKind::kBandit;
  for (std::size_t k = 0; k < targets.size(); ++k) {
    set.contexts.push_back({static_cast<int>(k), EnvKind::kBandit, {targets[k]}});
  }
  set.p0 = uniform_distribution(targets.size());
  return set;
}

State reset(const TaskContext& context, Rng& rng) {
  switch (context.kind) {
    case EnvKind::kPointVel:
      return {0.0, 0.0};
    case EnvKind::kPointPos: {
      const double x = rng.uniform(-0.1, 0.1);
      const double y = rng.uniform(-0.1, 0.1);
      return {x, y};
    }
    case EnvKind::kBandit:
      return {1.0};
  }
  throw InternalError("reset: unknown environment kind");
}

StepResult step(std::span<const double> state, std::span<const double> action,
                const TaskContext& context, const EnvConfig& cfg,
                int steps_taken) {
  if (static_cast<int>(state.size()) != observation_dim(context.kind) ||
      static_cast<int>(action.size()) != action_dim(context.kind)) {
    throw InvalidArgument("step: state or action has the wrong dimension");
  }
  for (double s : state) {
    if (!std::isfinite(s)) throw InternalError("step: non-finite state");
  }
  for (double a : action) {
    if (!std::isfinite(a)) throw InvalidArgument("step: non-finite action");
  }
  auto clip = [&](double a) { return std::clamp(a, -cfg.action_clip, cfg.action_clip); };

  StepResult out;
  out.done = steps_taken + 1 >= cfg.horizon;
  switch (context.kind) {
    case EnvKind::kPointVel: {
      const double v = state[1] + clip(action[0]) * cfg.dt;
      const double pos = state[0] + v * cfg.dt;
      out.state = {pos, v};
      out.reward = -std::abs(v - context.params[0]);
      break;
    }
    case EnvKind::kPointPos: {
      const double x = state[0] + clip(action[0]) * cfg.dt;
      const double y = state[1] + clip(action[1]) * cfg.dt;
      out.state = {x, y};
      out.reward = -(std::abs(x - context.params[0]) + std::abs(y - context.params[1]));
      break;
    }
    case EnvKind::kBandit: {
      const double d = clip(action[0]) - context.params[0];
      out.state = {state[0]};
      out.reward = -d * d;
      out.done = true;
      break;
    }
  }
  for (double s : out.state) {
    if (!std::isfinite(s)) throw InternalError("step: dynamics produced a non-finite state");
  }
  return out;
}

double Trajectory::total_return() const {
  return std::accumulate(rewards.begin(), rewards.end(), 0.0);
}

double Trajectory::discounted_return(double gamma) const {
  double g = 0.0;
  for (std::size_t t = rewards.size(); t-- > 0;) g = rewards[t] + gamma * g;
  return g;
}

Trajectory rollout(const MlpParams& policy, const TaskContext& context,
                   const EnvConfig& cfg, Rng& rng, ActionMode mode) {
  const int obs_dim = observation_dim(context.kind);
  const int act_dim = action_dim(context.kind);
  if (policy.shape().obs_dim != obs_dim || policy.shape().act_dim != act_dim) {
    throw InvalidArgument("rollout: policy dimensions do not match the environment");
  }
  Trajectory traj;
  traj.obs_dim = obs_dim;
  traj.act_dim = act_dim;
  const std::size_t cap = static_cast<std::size_t>(
      context.kind == EnvKind::kBandit ? 1 : cfg.horizon);
  traj.states.reserve((cap + 1) * obs_dim);
  traj.actions.reserve(cap * act_dim);
  traj.rewards.reserve(cap);
  traj.logprobs.reserve(cap);

  State state = reset(context, rng);
  traj.states.insert(traj.states.end(), state.begin(), state.end());
  for (int t = 0;; ++t) {
    ActionSample sample;
    if (mode == ActionMode::kSample) {
      sample = sample_action(policy, state, rng);
    } else {
      sample.action = forward(policy, state);
      sample.logprob = log_density(policy, state, sample.action);
    }
    StepResult next = step(state, sample.action, context, cfg, t);
    traj.actions.insert(traj.actions.end(), sample.action.begin(), sample.action.end());
    traj.rewards.push_back(next.reward);
    traj.logprobs.push_back(sample.logprob);
    state = std::move(next.state);
    traj.states.insert(traj.states.end(), state.begin(), state.end());
    if (next.done) break;
  }
  return traj;
}

}  // namespace girl
