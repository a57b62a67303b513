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

#ifndef GIRL_POLICY_H_
#define GIRL_POLICY_H_

// Diagonal-Gaussian MLP policy with hand-written backprop and a REINFORCE
// gradient. Parameters live in one flat buffer:
//
//   [W_0 (out x in, row-major), b_0, W_1, b_1, ..., W_L, b_L, log_std]
//
// Hidden layers use ReLU; the output head is linear and produces the action
// mean. log_std is state-independent.

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "girl/env.h"
#include "girl/kernels.h"
#include "girl/rng.h"

namespace girl {

struct MlpShape {
  int obs_dim = 0;
  int act_dim = 0;
  std::vector<int> hidden;

  std::size_t num_layers() const { return hidden.size() + 1; }
  std::size_t layer_inputs(std::size_t layer) const;
  std::size_t layer_outputs(std::size_t layer) const;
  std::size_t weight_offset(std::size_t layer) const;
  std::size_t bias_offset(std::size_t layer) const;
  std::size_t log_std_offset() const;
  std::size_t param_count() const;
  std::size_t max_width() const;

  bool operator==(const MlpShape&) const = default;
};

struct ParamsTag {};
struct GradientTag {};

// Flat parameter-shaped vector. MlpParams and Gradient share the layout but
// are distinct types so a gradient is never used as a policy by accident.
template <class Tag>
class ParamVector {
 public:
  ParamVector() = default;
  explicit ParamVector(MlpShape shape)
      : shape_(std::move(shape)), values_(shape_.param_count(), 0.0) {}
  ParamVector(MlpShape shape, std::vector<double> values);

  const MlpShape& shape() const { return shape_; }
  std::size_t size() const { return values_.size(); }
  std::span<const double> values() const { return values_; }
  std::span<double> values() { return values_; }

  kernels::ConstMatrix weight(std::size_t layer) const {
    return {std::span<const double>(values_).subspan(
                shape_.weight_offset(layer),
                shape_.layer_outputs(layer) * shape_.layer_inputs(layer)),
            shape_.layer_outputs(layer), shape_.layer_inputs(layer)};
  }
  kernels::MutableMatrix weight(std::size_t layer) {
    return {std::span<double>(values_).subspan(
                shape_.weight_offset(layer),
                shape_.layer_outputs(layer) * shape_.layer_inputs(layer)),
            shape_.layer_outputs(layer), shape_.layer_inputs(layer)};
  }
  std::span<const double> bias(std::size_t layer) const {
    return std::span<const double>(values_).subspan(
        shape_.bias_offset(layer), shape_.layer_outputs(layer));
  }
  std::span<double> bias(std::size_t layer) {
    return std::span<double>(values_).subspan(shape_.bias_offset(layer),
                                              shape_.layer_outputs(layer));
  }
  std::span<const double> log_std() const {
    return std::span<const double>(values_).subspan(
        shape_.log_std_offset(), static_cast<std::size_t>(shape_.act_dim));
  }
  std::span<double> log_std() {
    return std::span<double>(values_).subspan(
        shape_.log_std_offset(), static_cast<std::size_t>(shape_.act_dim));
  }

  bool all_finite() const;
  bool operator==(const ParamVector&) const = default;

 private:
  MlpShape shape_;
  std::vector<double> values_;
};

using MlpParams = ParamVector<ParamsTag>;
using Gradient = ParamVector<GradientTag>;

// kMeanReturn subtracts the batch mean of episode returns from every
// return-to-go; kPerStep subtracts the batch mean of the return-to-go at the
// same time index.
enum class Baseline { kNone, kMeanReturn, kPerStep };

std::string_view baseline_name(Baseline b);
Baseline parse_baseline(std::string_view name);

struct PgConfig {
  double learning_rate = 0.1;
  Baseline baseline = Baseline::kMeanReturn;
  double entropy_bonus = 0.0;
  // Standardize advantages over the batch before weighting log-probs.
  bool normalize_advantages = true;

  std::vector<std::string> problems() const;
  void validate() const;
};

// Two hidden layers of `hidden` units.
MlpParams init_policy(int obs_dim, int act_dim, int hidden, Rng& rng);
MlpParams init_policy(const MlpShape& shape, Rng& rng);

std::vector<double> forward(const MlpParams& params, std::span<const double> obs);

struct ActionSample {
  std::vector<double> action;
  double logprob = 0.0;
};

ActionSample sample_action(const MlpParams& params, std::span<const double> obs,
                           Rng& rng);

// Log-density of `action` under the policy at `obs`.
double log_density(const MlpParams& params, std::span<const double> obs,
                   std::span<const double> action);

// Per-step advantages (one vector per trajectory) used as constant weights
// by the surrogate loss.
std::vector<std::vector<double>> compute_advantages(
    std::span<const Trajectory> trajectories, const PgConfig& cfg,
    double gamma);

// Surrogate whose gradient is the REINFORCE estimate:
//   L = -(1/N) sum_i sum_t [log pi(a_t|s_t) A_t + entropy_bonus * H]
double surrogate_loss(const MlpParams& params,
                      std::span<const Trajectory> trajectories,
                      const PgConfig& cfg, double gamma);

Gradient pg_gradient(const MlpParams& params,
                     std::span<const Trajectory> trajectories,
                     const PgConfig& cfg, double gamma);

MlpParams apply_gradient(const MlpParams& params, const Gradient& grad,
                         double lr);

Gradient operator+(const Gradient& a, const Gradient& b);

}  // namespace girl

#endif  // GIRL_POLICY_H_
