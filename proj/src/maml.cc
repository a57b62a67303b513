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

#include "girl/maml.h"

#include <algorithm>
#include <cmath>

#include "girl/errors.h"
#include "girl/parallel.h"

namespace girl {

PgConfig MamlConfig::inner_pg() const {
  return {inner_lr, baseline, entropy_bonus, normalize_advantages};
}

PgConfig MamlConfig::outer_pg() const {
  return {outer_lr, baseline, entropy_bonus, normalize_advantages};
}

std::vector<std::string> MamlConfig::problems() const {
  std::vector<std::string> out;
  if (!(inner_lr > 0.0)) out.push_back("maml.inner_lr must be > 0");
  if (!(outer_lr > 0.0)) out.push_back("maml.outer_lr must be > 0");
  if (traj_per_task < 1) out.push_back("maml.traj_per_task must be >= 1");
  if (tasks_per_batch < 1) out.push_back("maml.tasks_per_batch must be >= 1");
  if (!(max_grad_norm >= 0.0)) out.push_back("maml.max_grad_norm must be >= 0");
  if (meta_iterations < 0) out.push_back("maml.meta_iterations must be >= 0");
  if (hidden_size < 1) out.push_back("maml.hidden_size must be >= 1");
  if (!(entropy_bonus >= 0.0)) out.push_back("maml.entropy_bonus must be >= 0");
  if (!first_order) out.push_back("maml.first_order=false is not supported");
  return out;
}

void MamlConfig::validate() const {
  auto p = problems();
  if (!p.empty()) throw InvalidArgument(p.front());
}

void check_distribution(std::span<const double> p, std::size_t n, const char* what) {
  if (p.size() != n) {
    throw InvalidArgument(std::string(what) + ": distribution has size " +
                          std::to_string(p.size()) + ", expected " + std::to_string(n));
  }
  double sum = 0.0;
  for (double v : p) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
      throw InvalidArgument(std::string(what) + ": distribution has a negative entry");
    }
    sum += v;
  }
  if (std::abs(sum - 1.0) > 1e-9) {
    throw InvalidArgument(std::string(what) + ": distribution does not sum to 1");
  }
}

std::vector<std::size_t> sample_tasks(std::span<const double> p, std::size_t count,
                                      Rng& rng) {
  std::vector<double> cdf(p.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) cdf[i] = (acc += p[i]);
  std::size_t last_positive = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] > 0.0) last_positive = i;
  }
  std::vector<std::size_t> out(count);
  for (auto& idx : out) {
    const double u = rng.uniform(0.0, acc);
    // First index whose cumulative mass exceeds u; never a zero-mass task.
    const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    idx = std::min(static_cast<std::size_t>(it - cdf.begin()), last_positive);
  }
  return out;
}

namespace {

std::vector<Trajectory> sample_batch(const MlpParams& params, const TaskContext& context,
                                     int count, const EnvConfig& env_cfg, Rng& rng) {
  std::vector<Trajectory> batch;
  batch.reserve(static_cast<std::size_t>(count));
  for (int k = 0; k < count; ++k) batch.push_back(rollout(params, context, env_cfg, rng));
  return batch;
}

double mean_return(const std::vector<Trajectory>& batch) {
  double s = 0.0;
  for (const auto& t : batch) s += t.total_return();
  return s / static_cast<double>(batch.size());
}

void clip_norm(Gradient& g, double max_norm) {
  if (max_norm <= 0.0) return;
  const double norm = std::sqrt(kernels::dot(g.values(), g.values()));
  if (norm > max_norm) {
    const double scale = max_norm / norm;
    for (double& v : g.values()) v *= scale;
  }
}

}  // namespace

MlpParams inner_adapt(const MlpParams& params, const TaskContext& context,
                      const MamlConfig& cfg, const EnvConfig& env_cfg, Rng& rng,
                      double* pre_return) {
  if (!(cfg.inner_lr >= 0.0)) throw InvalidArgument("inner_adapt: inner_lr must be >= 0");
  const auto batch = sample_batch(params, context, cfg.traj_per_task, env_cfg, rng);
  if (pre_return != nullptr) *pre_return = mean_return(batch);
  Gradient g = pg_gradient(params, batch, cfg.inner_pg(), env_cfg.gamma);
  clip_norm(g, cfg.max_grad_norm);
  return apply_gradient(params, g, cfg.inner_lr);
}

MlpParams meta_step(const MlpParams& params, std::span<const double> p1,
                    const TaskSet& tasks, const MamlConfig& cfg,
                    const EnvConfig& env_cfg, Rng& rng, MetaTrace* trace) {
  check_distribution(p1, tasks.size(), "meta_step");
  if (!cfg.first_order) {
    throw InvalidArgument("meta_step: second-order MAML is not implemented");
  }
  const std::size_t batch = static_cast<std::size_t>(cfg.tasks_per_batch);
  const auto sampled = sample_tasks(p1, batch, rng);
  const std::uint64_t stream_base = rng.next_u64();

  std::vector<Gradient> grads(batch);
  std::vector<double> pre(batch), post(batch);
  parallel_for(batch, [&](std::size_t b) {
    Rng task_rng = Rng(stream_base).fork(b);
    const TaskContext& ctx = tasks.contexts[sampled[b]];
    const MlpParams adapted = inner_adapt(params, ctx, cfg, env_cfg, task_rng, &pre[b]);
    const auto post_batch = sample_batch(adapted, ctx, cfg.traj_per_task, env_cfg, task_rng);
    post[b] = mean_return(post_batch);
    // First-order: the post-adaptation gradient is taken at the adapted
    // parameters and applied to the original ones.
    grads[b] = pg_gradient(adapted, post_batch, cfg.outer_pg(), env_cfg.gamma);
  });

  Gradient total(params.shape());
  const double inv_batch = 1.0 / static_cast<double>(batch);
  for (const auto& g : grads) kernels::axpy(inv_batch, g.values(), total.values());
  clip_norm(total, cfg.max_grad_norm);
  MlpParams out = apply_gradient(params, total, cfg.outer_lr);

  if (trace != nullptr) {
    double pre_sum = 0.0, post_sum = 0.0;
    for (std::size_t b = 0; b < batch; ++b) {
      pre_sum += pre[b];
      post_sum += post[b];
    }
    trace->pre_adaptation_return.push_back(pre_sum / static_cast<double>(batch));
    trace->post_adaptation_return.push_back(post_sum / static_cast<double>(batch));
  }
  if (!out.all_finite()) throw InternalError("meta_step: parameters became non-finite");
  return out;
}

MlpParams best_response(std::span<const double> p1, const TaskSet& tasks,
                        const MamlConfig& cfg, const EnvConfig& env_cfg,
                        const std::optional<MlpParams>& init, Rng& rng,
                        MetaTrace* trace) {
  check_distribution(p1, tasks.size(), "best_response");
  cfg.validate();
  MlpParams params = init ? *init
                          : init_policy(observation_dim(tasks.kind), action_dim(tasks.kind),
                                        cfg.hidden_size, rng);
  for (int it = 0; it < cfg.meta_iterations; ++it) {
    params = meta_step(params, p1, tasks, cfg, env_cfg, rng, trace);
  }
  return params;
}

}  // namespace girl
