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

#include "girl/policy.h"

#include <cmath>
#include <numbers>

#include "girl/errors.h"

namespace girl {

namespace {
constexpr double kHalfLog2Pi = 0.91893853320467274178;  // 0.5 * log(2 pi)
}  // namespace

std::size_t MlpShape::layer_inputs(std::size_t layer) const {
  return static_cast<std::size_t>(layer == 0 ? obs_dim : hidden[layer - 1]);
}

std::size_t MlpShape::layer_outputs(std::size_t layer) const {
  return static_cast<std::size_t>(layer == hidden.size() ? act_dim : hidden[layer]);
}

std::size_t MlpShape::weight_offset(std::size_t layer) const {
  std::size_t off = 0;
  for (std::size_t l = 0; l < layer; ++l) {
    off += layer_outputs(l) * layer_inputs(l) + layer_outputs(l);
  }
  return off;
}

std::size_t MlpShape::bias_offset(std::size_t layer) const {
  return weight_offset(layer) + layer_outputs(layer) * layer_inputs(layer);
}

std::size_t MlpShape::log_std_offset() const { return weight_offset(num_layers()); }

std::size_t MlpShape::param_count() const {
  return log_std_offset() + static_cast<std::size_t>(act_dim);
}

std::size_t MlpShape::max_width() const {
  std::size_t w = static_cast<std::size_t>(std::max(obs_dim, act_dim));
  for (int h : hidden) w = std::max(w, static_cast<std::size_t>(h));
  return w;
}

template <class Tag>
ParamVector<Tag>::ParamVector(MlpShape shape, std::vector<double> values)
    : shape_(std::move(shape)), values_(std::move(values)) {
  if (values_.size() != shape_.param_count()) {
    throw InvalidArgument("parameter buffer size does not match the network shape");
  }
}

template <class Tag>
bool ParamVector<Tag>::all_finite() const {
  for (double v : values_) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

template class ParamVector<ParamsTag>;
template class ParamVector<GradientTag>;

std::string_view baseline_name(Baseline b) {
  switch (b) {
    case Baseline::kNone:
      return "none";
    case Baseline::kMeanReturn:
      return "mean-return";
    case Baseline::kPerStep:
      return "per-step";
  }
  return "unknown";
}

Baseline parse_baseline(std::string_view name) {
  if (name == "none") return Baseline::kNone;
  if (name == "mean-return") return Baseline::kMeanReturn;
  if (name == "per-step") return Baseline::kPerStep;
  throw InvalidArgument("unknown baseline '" + std::string(name) + "'");
}

std::vector<std::string> PgConfig::problems() const {
  std::vector<std::string> out;
  if (!(learning_rate > 0.0)) out.push_back("learning_rate must be > 0");
  if (!(entropy_bonus >= 0.0)) out.push_back("entropy_bonus must be >= 0");
  return out;
}

void PgConfig::validate() const {
  auto p = problems();
  if (!p.empty()) throw InvalidArgument("PgConfig: " + p.front());
}

MlpParams init_policy(const MlpShape& shape, Rng& rng) {
  if (shape.obs_dim < 1 || shape.act_dim < 1) {
    throw InvalidArgument("init_policy: dimensions must be >= 1");
  }
  for (int h : shape.hidden) {
    if (h < 1) throw InvalidArgument("init_policy: hidden widths must be >= 1");
  }
  MlpParams params(shape);
  for (std::size_t l = 0; l < shape.num_layers(); ++l) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(shape.layer_inputs(l)));
    for (double& w : params.weight(l).data) w = rng.uniform(-bound, bound);
  }
  // biases stay zero, log_std = log(1)
  return params;
}

MlpParams init_policy(int obs_dim, int act_dim, int hidden, Rng& rng) {
  return init_policy(MlpShape{obs_dim, act_dim, {hidden, hidden}}, rng);
}

namespace {

// Activations of one forward pass. inputs[l] is the input of layer l;
// pre[l] its pre-activation.
struct ForwardPass {
  std::vector<std::vector<double>> inputs;
  std::vector<std::vector<double>> pre;

  explicit ForwardPass(const MlpShape& shape)
      : inputs(shape.num_layers()), pre(shape.num_layers()) {
    for (std::size_t l = 0; l < shape.num_layers(); ++l) {
      inputs[l].resize(shape.layer_inputs(l));
      pre[l].resize(shape.layer_outputs(l));
    }
  }

  std::span<const double> mean() const { return pre.back(); }
};

void run_forward(const MlpParams& params, std::span<const double> obs,
                 ForwardPass& pass) {
  const MlpShape& shape = params.shape();
  if (obs.size() != static_cast<std::size_t>(shape.obs_dim)) {
    throw InvalidArgument("forward: observation has the wrong dimension");
  }
  std::copy(obs.begin(), obs.end(), pass.inputs[0].begin());
  const std::size_t layers = shape.num_layers();
  for (std::size_t l = 0; l < layers; ++l) {
    kernels::gemv(params.weight(l), pass.inputs[l], params.bias(l), pass.pre[l]);
    if (l + 1 < layers) {
      auto& next = pass.inputs[l + 1];
      for (std::size_t k = 0; k < next.size(); ++k) {
        next[k] = pass.pre[l][k] > 0.0 ? pass.pre[l][k] : 0.0;
      }
    }
  }
}

// Accumulates d(loss)/d(theta) for one sample given d(loss)/d(mean).
void backprop(const MlpParams& params, const ForwardPass& pass,
              std::span<const double> dmean, Gradient& grad,
              std::vector<double>& delta, std::vector<double>& scratch) {
  const MlpShape& shape = params.shape();
  delta.assign(dmean.begin(), dmean.end());
  for (std::size_t l = shape.num_layers(); l-- > 0;) {
    kernels::axpy(1.0, delta, grad.bias(l));
    kernels::ger(1.0, delta, pass.inputs[l], grad.weight(l));
    if (l == 0) break;
    scratch.assign(shape.layer_inputs(l), 0.0);
    kernels::gemv_t(params.weight(l), delta, scratch);
    const auto& z = pass.pre[l - 1];
    for (std::size_t k = 0; k < scratch.size(); ++k) {
      if (!(z[k] > 0.0)) scratch[k] = 0.0;
    }
    std::swap(delta, scratch);
  }
}

double gaussian_logprob(std::span<const double> mean, std::span<const double> log_std,
                        std::span<const double> action) {
  double lp = 0.0;
  for (std::size_t d = 0; d < mean.size(); ++d) {
    const double z = (action[d] - mean[d]) * std::exp(-log_std[d]);
    lp += -0.5 * z * z - log_std[d] - kHalfLog2Pi;
  }
  return lp;
}

void check_batch(const MlpParams& params, std::span<const Trajectory> trajectories) {
  if (trajectories.empty()) throw InvalidArgument("pg_gradient: empty trajectory batch");
  for (const auto& tr : trajectories) {
    if (tr.obs_dim != params.shape().obs_dim || tr.act_dim != params.shape().act_dim) {
      throw InvalidArgument("pg_gradient: trajectory dimensions do not match the policy");
    }
  }
}

}  // namespace

std::vector<double> forward(const MlpParams& params, std::span<const double> obs) {
  ForwardPass pass(params.shape());
  run_forward(params, obs, pass);
  return {pass.mean().begin(), pass.mean().end()};
}

ActionSample sample_action(const MlpParams& params, std::span<const double> obs,
                           Rng& rng) {
  ForwardPass pass(params.shape());
  run_forward(params, obs, pass);
  const auto mean = pass.mean();
  const auto log_std = params.log_std();
  ActionSample out;
  out.action.resize(mean.size());
  for (std::size_t d = 0; d < mean.size(); ++d) {
    const double eps = rng.normal();
    out.action[d] = mean[d] + std::exp(log_std[d]) * eps;
    out.logprob += -0.5 * eps * eps - log_std[d] - kHalfLog2Pi;
  }
  return out;
}

double log_density(const MlpParams& params, std::span<const double> obs,
                   std::span<const double> action) {
  if (action.size() != static_cast<std::size_t>(params.shape().act_dim)) {
    throw InvalidArgument("log_density: action has the wrong dimension");
  }
  ForwardPass pass(params.shape());
  run_forward(params, obs, pass);
  return gaussian_logprob(pass.mean(), params.log_std(), action);
}

std::vector<std::vector<double>> compute_advantages(
    std::span<const Trajectory> trajectories, const PgConfig& cfg, double gamma) {
  std::vector<std::vector<double>> adv(trajectories.size());
  std::size_t longest = 0;
  for (std::size_t i = 0; i < trajectories.size(); ++i) {
    const auto& r = trajectories[i].rewards;
    adv[i].resize(r.size());
    double g = 0.0;
    for (std::size_t t = r.size(); t-- > 0;) {
      g = r[t] + gamma * g;
      adv[i][t] = g;
    }
    longest = std::max(longest, r.size());
  }

  switch (cfg.baseline) {
    case Baseline::kNone:
      break;
    case Baseline::kMeanReturn: {
      double b = 0.0;
      for (const auto& a : adv) b += a.empty() ? 0.0 : a[0];
      b /= static_cast<double>(adv.size());
      for (auto& a : adv) {
        for (double& v : a) v -= b;
      }
      break;
    }
    case Baseline::kPerStep: {
      std::vector<double> sum(longest, 0.0);
      std::vector<double> count(longest, 0.0);
      for (const auto& a : adv) {
        for (std::size_t t = 0; t < a.size(); ++t) {
          sum[t] += a[t];
          count[t] += 1.0;
        }
      }
      for (auto& a : adv) {
        for (std::size_t t = 0; t < a.size(); ++t) a[t] -= sum[t] / count[t];
      }
      break;
    }
  }

  if (cfg.normalize_advantages) {
    double n = 0.0, mean = 0.0, sq = 0.0;
    for (const auto& a : adv) {
      for (double v : a) {
        n += 1.0;
        mean += v;
      }
    }
    if (n > 0.0) {
      mean /= n;
      for (const auto& a : adv) {
        for (double v : a) sq += (v - mean) * (v - mean);
      }
      const double sd = std::sqrt(sq / n);
      const double inv = 1.0 / (sd + 1e-8);
      for (auto& a : adv) {
        for (double& v : a) v = (v - mean) * inv;
      }
    }
  }
  return adv;
}

double surrogate_loss(const MlpParams& params, std::span<const Trajectory> trajectories,
                      const PgConfig& cfg, double gamma) {
  check_batch(params, trajectories);
  const auto adv = compute_advantages(trajectories, cfg, gamma);
  const auto log_std = params.log_std();
  double entropy_per_step = 0.0;
  for (double ls : log_std) entropy_per_step += ls + kHalfLog2Pi + 0.5;

  ForwardPass pass(params.shape());
  double total = 0.0;
  for (std::size_t i = 0; i < trajectories.size(); ++i) {
    const Trajectory& tr = trajectories[i];
    for (std::size_t t = 0; t < tr.length(); ++t) {
      run_forward(params, tr.state(t), pass);
      const double lp = gaussian_logprob(pass.mean(), log_std, tr.action(t));
      total += lp * adv[i][t] + cfg.entropy_bonus * entropy_per_step;
    }
  }
  return -total / static_cast<double>(trajectories.size());
}

Gradient pg_gradient(const MlpParams& params, std::span<const Trajectory> trajectories,
                     const PgConfig& cfg, double gamma) {
  check_batch(params, trajectories);
  const auto adv = compute_advantages(trajectories, cfg, gamma);
  const MlpShape& shape = params.shape();
  const auto log_std = params.log_std();
  const double inv_n = 1.0 / static_cast<double>(trajectories.size());
  const std::size_t act = static_cast<std::size_t>(shape.act_dim);

  std::vector<double> inv_std(act);
  for (std::size_t d = 0; d < act; ++d) inv_std[d] = std::exp(-log_std[d]);

  Gradient grad(shape);
  auto grad_log_std = grad.log_std();
  ForwardPass pass(shape);
  std::vector<double> dmean(act), delta, scratch;
  delta.reserve(shape.max_width());
  scratch.reserve(shape.max_width());
  std::size_t steps = 0;

  for (std::size_t i = 0; i < trajectories.size(); ++i) {
    const Trajectory& tr = trajectories[i];
    for (std::size_t t = 0; t < tr.length(); ++t) {
      run_forward(params, tr.state(t), pass);
      const auto mean = pass.mean();
      const auto action = tr.action(t);
      // loss term: -w * log pi, w = A / N
      const double w = adv[i][t] * inv_n;
      for (std::size_t d = 0; d < act; ++d) {
        const double z = (action[d] - mean[d]) * inv_std[d];
        dmean[d] = -w * z * inv_std[d];
        grad_log_std[d] += -w * (z * z - 1.0);
      }
      backprop(params, pass, dmean, grad, delta, scratch);
      ++steps;
    }
  }
  if (cfg.entropy_bonus != 0.0) {
    const double ent = cfg.entropy_bonus * static_cast<double>(steps) * inv_n;
    for (std::size_t d = 0; d < act; ++d) grad_log_std[d] -= ent;
  }
  if (!grad.all_finite()) throw InternalError("pg_gradient: non-finite gradient");
  return grad;
}

MlpParams apply_gradient(const MlpParams& params, const Gradient& grad, double lr) {
  if (params.shape() != grad.shape()) {
    throw InvalidArgument("apply_gradient: gradient shape does not match parameters");
  }
  MlpParams out = params;
  kernels::axpy(-lr, grad.values(), out.values());
  return out;
}

Gradient operator+(const Gradient& a, const Gradient& b) {
  if (a.shape() != b.shape()) throw InvalidArgument("gradient shapes differ");
  Gradient out = a;
  kernels::axpy(1.0, b.values(), out.values());
  return out;
}

}  // namespace girl
