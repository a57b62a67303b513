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

#ifndef GIRL_METAGAME_H_
#define GIRL_METAGAME_H_

// The agent-vs-adversary meta-game: rows are trained agent policies,
// columns are tasks, entries are average returns. The adversary picks a task
// distribution inside a box-restricted simplex and is zero-sum with the
// agent (B = -A). Solved with restricted projected replicator dynamics.

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "girl/env.h"
#include "girl/kernels.h"
#include "girl/policy.h"
#include "girl/rng.h"

namespace girl {

class PayoffTable {
 public:
  PayoffTable() = default;
  explicit PayoffTable(std::size_t cols) : cols_(cols) {}
  PayoffTable(std::size_t rows, std::size_t cols, std::vector<double> values);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return rows_ == 0; }
  double at(std::size_t r, std::size_t c) const { return values_[r * cols_ + c]; }
  std::span<const double> row(std::size_t r) const {
    return std::span<const double>(values_).subspan(r * cols_, cols_);
  }
  std::span<const double> values() const { return values_; }
  kernels::ConstMatrix matrix() const { return {values_, rows_, cols_}; }

  void append_row(std::span<const double> row);
  double min_value() const;
  double max_value() const;

  bool operator==(const PayoffTable&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> values_;
};

// The infinity-norm ball around the base distribution: every coordinate in
// [lower, upper] and coordinates summing to one.
struct RestrictedSimplex {
  std::size_t n = 0;
  double lower = 0.0;
  double upper = 1.0;

  bool feasible() const;
  bool contains(std::span<const double> x, double tol = 1e-9) const;
  // Throws InvalidArgument naming `what` when infeasible.
  void require_feasible(const char* what) const;
};

struct MetaStrategyPair {
  std::vector<double> pi;
  std::vector<double> p1;

  bool operator==(const MetaStrategyPair&) const = default;
};

struct SolverConfig {
  double eta = 1e-2;
  double explore_eps = 1e-3;
  int max_iters = 100000;
  double tol = 1e-8;
  // Fraction of the final iterations that are time-averaged.
  double average_window = 0.5;
  // Divide eta by the payoff range (max A - min A) so the step size is
  // relative. Equilibria are unchanged by this rescaling.
  bool normalize_payoffs = true;

  std::vector<std::string> problems() const;
  void validate() const;
};

// Mean and sample standard deviation of episode returns on one task.
struct ReturnStats {
  double mean = 0.0;
  double stddev = 0.0;
  int episodes = 0;
};

ReturnStats estimate_return(const MlpParams& policy, const TaskContext& context,
                            const EnvConfig& env_cfg, int episodes, Rng& rng);

// Appends one row: the policy's mean undiscounted return on each task over
// `episodes` rollouts (no fine-tuning).
PayoffTable augment_payoff(const PayoffTable& table, const MlpParams& policy,
                           const TaskSet& tasks, const EnvConfig& env_cfg,
                           int episodes, Rng& rng);

// One Euler step of the two-population replicator dynamics with agent
// payoffs A and adversary payoffs B.
MetaStrategyPair rd_step(std::span<const double> pi, std::span<const double> p1,
                         kernels::ConstMatrix a, kernels::ConstMatrix b, double eta);
// Zero-sum form, B = -A.
MetaStrategyPair rd_step(std::span<const double> pi, std::span<const double> p1,
                         const PayoffTable& a, double eta);

// Clip-and-rescale until p lies in the box. The result is the
// saturate-then-proportional point clamp(c * p, lower, upper) with unit sum.
std::vector<double> clip_normalize(std::span<const double> p,
                                   const RestrictedSimplex& simplex);

// Exploration floor: clip_normalize with bounds [explore_eps, 1].
std::vector<double> proj_explore(std::span<const double> x, double explore_eps);

// argmin_{p in simplex} p . r. Greedy: fill lowest-r tasks first up to the
// upper bound, ties broken by lower index.
std::vector<double> adversary_best_response(std::span<const double> r,
                                            const RestrictedSimplex& simplex);

// min_{p in simplex} pi^T A p
double restricted_value(std::span<const double> pi, const PayoffTable& a,
                        const RestrictedSimplex& simplex);

// Sum of the agent's regret (over pure rows) and the adversary's regret
// (over the restricted simplex).
double restricted_exploitability(const MetaStrategyPair& pair, const PayoffTable& a,
                                 const RestrictedSimplex& task_simplex);

struct RprdResult {
  MetaStrategyPair average;
  MetaStrategyPair last;
  int iterations = 0;
  bool converged = false;
};

RprdResult rprd_solve_detailed(const PayoffTable& a,
                               const RestrictedSimplex& task_simplex,
                               const SolverConfig& cfg,
                               const std::optional<MetaStrategyPair>& init = std::nullopt);

MetaStrategyPair rprd_solve(const PayoffTable& a, const RestrictedSimplex& task_simplex,
                            const SolverConfig& cfg,
                            const std::optional<MetaStrategyPair>& init = std::nullopt);

}  // namespace girl

#endif  // GIRL_METAGAME_H_
