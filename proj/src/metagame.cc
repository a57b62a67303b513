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

#include "girl/metagame.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "girl/errors.h"
#include "girl/parallel.h"

namespace girl {

PayoffTable::PayoffTable(std::size_t rows, std::size_t cols, std::vector<double> values)
    : rows_(rows), cols_(cols), values_(std::move(values)) {
  if (values_.size() != rows_ * cols_) {
    throw InvalidArgument("PayoffTable: value count does not match the shape");
  }
  for (double v : values_) {
    if (!std::isfinite(v)) throw InvalidArgument("PayoffTable: non-finite entry");
  }
}

void PayoffTable::append_row(std::span<const double> row) {
  if (row.size() != cols_) throw InvalidArgument("PayoffTable: row has the wrong width");
  for (double v : row) {
    if (!std::isfinite(v)) throw InvalidArgument("PayoffTable: non-finite entry");
  }
  values_.insert(values_.end(), row.begin(), row.end());
  ++rows_;
}

double PayoffTable::min_value() const {
  return values_.empty() ? 0.0 : *std::min_element(values_.begin(), values_.end());
}

double PayoffTable::max_value() const {
  return values_.empty() ? 0.0 : *std::max_element(values_.begin(), values_.end());
}

bool RestrictedSimplex::feasible() const {
  constexpr double kSlack = 1e-12;
  return n >= 1 && lower >= 0.0 && upper <= 1.0 && lower <= upper &&
         static_cast<double>(n) * lower <= 1.0 + kSlack &&
         static_cast<double>(n) * upper >= 1.0 - kSlack;
}

bool RestrictedSimplex::contains(std::span<const double> x, double tol) const {
  if (x.size() != n) return false;
  double sum = 0.0;
  for (double v : x) {
    if (!(v >= lower - tol && v <= upper + tol)) return false;
    sum += v;
  }
  return std::abs(sum - 1.0) <= tol;
}

void RestrictedSimplex::require_feasible(const char* what) const {
  if (!feasible()) {
    throw InvalidArgument(std::string(what) + ": infeasible restricted simplex (n=" +
                          std::to_string(n) + ", lower=" + std::to_string(lower) +
                          ", upper=" + std::to_string(upper) + ")");
  }
}

std::vector<std::string> SolverConfig::problems() const {
  std::vector<std::string> out;
  if (!(eta > 0.0)) out.push_back("solver.eta must be > 0");
  if (!(explore_eps >= 0.0)) out.push_back("solver.explore_eps must be >= 0");
  if (max_iters < 1) out.push_back("solver.max_iters must be >= 1");
  if (!(tol > 0.0)) out.push_back("solver.tol must be > 0");
  if (!(average_window > 0.0 && average_window <= 1.0)) {
    out.push_back("solver.average_window must lie in (0, 1]");
  }
  return out;
}

void SolverConfig::validate() const {
  auto p = problems();
  if (!p.empty()) throw InvalidArgument(p.front());
}

ReturnStats estimate_return(const MlpParams& policy, const TaskContext& context,
                            const EnvConfig& env_cfg, int episodes, Rng& rng) {
  if (episodes < 1) throw InvalidArgument("estimate_return: episodes must be >= 1");
  std::vector<double> returns(static_cast<std::size_t>(episodes));
  for (auto& r : returns) r = rollout(policy, context, env_cfg, rng).total_return();
  ReturnStats stats;
  stats.episodes = episodes;
  stats.mean = std::accumulate(returns.begin(), returns.end(), 0.0) / episodes;
  if (episodes > 1) {
    double sq = 0.0;
    for (double r : returns) sq += (r - stats.mean) * (r - stats.mean);
    stats.stddev = std::sqrt(sq / (episodes - 1));
  }
  return stats;
}

PayoffTable augment_payoff(const PayoffTable& table, const MlpParams& policy,
                           const TaskSet& tasks, const EnvConfig& env_cfg, int episodes,
                           Rng& rng) {
  if (!table.empty() && table.cols() != tasks.size()) {
    throw InvalidArgument("augment_payoff: table width differs from the task count");
  }
  const Rng base = rng.fork(rng.next_u64());
  std::vector<double> row(tasks.size());
  parallel_for(tasks.size(), [&](std::size_t j) {
    Rng task_rng = base.fork(j);
    row[j] = estimate_return(policy, tasks.contexts[j], env_cfg, episodes, task_rng).mean;
  });
  PayoffTable out = table.empty() ? PayoffTable(tasks.size()) : table;
  out.append_row(row);
  return out;
}

MetaStrategyPair rd_step(std::span<const double> pi, std::span<const double> p1,
                         kernels::ConstMatrix a, kernels::ConstMatrix b, double eta) {
  if (pi.size() != a.rows || p1.size() != a.cols || b.rows != a.rows || b.cols != a.cols) {
    throw InvalidArgument("rd_step: strategy sizes do not match the payoff tables");
  }
  std::vector<double> ap1(a.rows);
  kernels::gemv(a, p1, {}, ap1);
  std::vector<double> pib(b.cols, 0.0);
  kernels::gemv_t(b, pi, pib);
  const double agent_avg = kernels::dot(pi, ap1);
  const double adv_avg = kernels::dot(pib, p1);

  MetaStrategyPair out{{pi.begin(), pi.end()}, {p1.begin(), p1.end()}};
  for (std::size_t i = 0; i < pi.size(); ++i) {
    out.pi[i] += eta * pi[i] * (ap1[i] - agent_avg);
  }
  for (std::size_t j = 0; j < p1.size(); ++j) {
    out.p1[j] += eta * p1[j] * (pib[j] - adv_avg);
  }
  return out;
}

MetaStrategyPair rd_step(std::span<const double> pi, std::span<const double> p1,
                         const PayoffTable& a, double eta) {
  std::vector<double> neg(a.values().begin(), a.values().end());
  for (double& v : neg) v = -v;
  return rd_step(pi, p1, a.matrix(), {neg, a.rows(), a.cols()}, eta);
}

namespace {

enum : signed char { kLow = -1, kFree = 0, kHigh = 1 };

// Finds clamp(c * p, lower, upper) with unit sum. The sum S(c) is
// nondecreasing and piecewise linear in c, so a Newton step on the current
// saturation pattern lands exactly on the answer once the pattern is right;
// a bisection bracket guards the steps in between. Writes into `out`.
void clip_rescale(std::span<const double> p, double lower, double upper,
                  std::span<double> out) {
  const std::size_t n = p.size();
  std::size_t positive = 0;
  double min_positive = std::numeric_limits<double>::infinity();
  for (double v : p) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
      throw InvalidArgument("clip_normalize: entries must be finite and nonnegative");
    }
    if (v > 0.0) {
      ++positive;
      min_positive = std::min(min_positive, v);
    }
  }
  const std::size_t zeros = n - positive;
  // Positive support cannot absorb the mass: zero entries share the rest.
  if (static_cast<double>(positive) * upper + static_cast<double>(zeros) * lower < 1.0) {
    const double share =
        (1.0 - static_cast<double>(positive) * upper) / static_cast<double>(zeros);
    for (std::size_t i = 0; i < n; ++i) out[i] = p[i] > 0.0 ? upper : share;
    return;
  }
  if (static_cast<double>(n) * lower >= 1.0) {
    std::fill(out.begin(), out.end(), lower);
    return;
  }

  auto evaluate = [&](double c, double& fixed, double& free_mass) {
    double sum = 0.0;
    fixed = 0.0;
    free_mass = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double v = c * p[i];
      if (v <= lower) {
        out[i] = lower;
        fixed += lower;
      } else if (v >= upper) {
        out[i] = upper;
        fixed += upper;
      } else {
        out[i] = v;
        free_mass += p[i];
      }
      sum += out[i];
    }
    return sum;
  };

  double c_lo = 0.0;
  double c_hi = upper / min_positive;
  double sum_total = 0.0;
  for (double v : p) sum_total += v;
  double c = std::clamp(1.0 / sum_total, c_lo, c_hi);
  constexpr int kMaxRounds = 1000;
  for (int round = 0; round < kMaxRounds; ++round) {
    double fixed = 0.0, free_mass = 0.0;
    const double sum = evaluate(c, fixed, free_mass);
    if (std::abs(sum - 1.0) <= 1e-15 * static_cast<double>(n)) return;
    (sum < 1.0 ? c_lo : c_hi) = c;
    if (free_mass > 0.0) {
      const double c_exact = (1.0 - fixed) / free_mass;
      bool consistent = true;
      for (std::size_t i = 0; i < n && consistent; ++i) {
        const double v = c * p[i];
        const double v_exact = c_exact * p[i];
        if (v <= lower) {
          consistent = v_exact <= lower;
        } else if (v >= upper) {
          consistent = v_exact >= upper;
        } else {
          consistent = v_exact >= lower && v_exact <= upper;
        }
      }
      if (consistent) {
        for (std::size_t i = 0; i < n; ++i) {
          const double v = c * p[i];
          if (v > lower && v < upper) out[i] = c_exact * p[i];
        }
        return;
      }
      if (c_exact > c_lo && c_exact < c_hi) {
        c = c_exact;
        continue;
      }
    }
    c = 0.5 * (c_lo + c_hi);
  }
  throw InternalError("clip_normalize: no convergence within 1000 rounds");
}

double max_abs_diff(std::span<const double> a, std::span<const double> b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

void renormalize(std::vector<double>& x) {
  double sum = 0.0;
  for (double& v : x) {
    if (v < 0.0) v = 0.0;
    sum += v;
  }
  if (sum > 0.0) {
    for (double& v : x) v /= sum;
  } else {
    std::fill(x.begin(), x.end(), 1.0 / static_cast<double>(x.size()));
  }
}

}  // namespace

std::vector<double> clip_normalize(std::span<const double> p,
                                   const RestrictedSimplex& simplex) {
  simplex.require_feasible("clip_normalize");
  if (p.size() != simplex.n) {
    throw InvalidArgument("clip_normalize: vector size differs from the simplex dimension");
  }
  std::vector<double> out(p.size());
  clip_rescale(p, simplex.lower, simplex.upper, out);
  return out;
}

std::vector<double> proj_explore(std::span<const double> x, double explore_eps) {
  if (explore_eps * static_cast<double>(x.size()) >= 1.0 && x.size() > 1) {
    throw InvalidArgument("proj_explore: explore_eps * n must be < 1");
  }
  return clip_normalize(x, RestrictedSimplex{x.size(), explore_eps, 1.0});
}

std::vector<double> adversary_best_response(std::span<const double> r,
                                            const RestrictedSimplex& simplex) {
  simplex.require_feasible("adversary_best_response");
  if (r.size() != simplex.n) {
    throw InvalidArgument("adversary_best_response: vector size differs from the simplex");
  }
  std::vector<std::size_t> order(r.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return r[a] < r[b]; });
  std::vector<double> p(r.size(), simplex.lower);
  double remaining = 1.0 - static_cast<double>(r.size()) * simplex.lower;
  const double room = simplex.upper - simplex.lower;
  for (std::size_t idx : order) {
    if (remaining <= 0.0) break;
    const double add = std::min(room, remaining);
    p[idx] += add;
    remaining -= add;
  }
  return p;
}

double restricted_value(std::span<const double> pi, const PayoffTable& a,
                        const RestrictedSimplex& simplex) {
  std::vector<double> r(a.cols(), 0.0);
  kernels::gemv_t(a.matrix(), pi, r);
  const auto p = adversary_best_response(r, simplex);
  return kernels::dot(r, p);
}

double restricted_exploitability(const MetaStrategyPair& pair, const PayoffTable& a,
                                 const RestrictedSimplex& task_simplex) {
  if (pair.pi.size() != a.rows() || pair.p1.size() != a.cols()) {
    throw InvalidArgument("restricted_exploitability: strategy sizes do not match");
  }
  std::vector<double> ap1(a.rows());
  kernels::gemv(a.matrix(), pair.p1, {}, ap1);
  const double value = kernels::dot(pair.pi, ap1);
  const double agent_regret = *std::max_element(ap1.begin(), ap1.end()) - value;
  const double adversary_regret = value - restricted_value(pair.pi, a, task_simplex);
  return agent_regret + adversary_regret;
}

RprdResult rprd_solve_detailed(const PayoffTable& a, const RestrictedSimplex& task_simplex,
                               const SolverConfig& cfg,
                               const std::optional<MetaStrategyPair>& init) {
  cfg.validate();
  if (a.empty() || a.cols() == 0) throw InvalidArgument("rprd_solve: empty payoff table");
  if (task_simplex.n != a.cols()) {
    throw InvalidArgument("rprd_solve: simplex dimension differs from the task count");
  }
  task_simplex.require_feasible("rprd_solve");
  for (double v : a.values()) {
    if (!std::isfinite(v)) throw InvalidArgument("rprd_solve: non-finite payoff");
  }
  const std::size_t m = a.rows();
  const std::size_t n = a.cols();
  const double eps = cfg.explore_eps;
  if ((m > 1 && eps * static_cast<double>(m) >= 1.0) ||
      (n > 1 && eps * static_cast<double>(n) >= 1.0)) {
    throw InvalidArgument("rprd_solve: explore_eps * n must be < 1");
  }

  std::vector<double> pi(m, 1.0 / static_cast<double>(m));
  std::vector<double> p1(n, 1.0 / static_cast<double>(n));
  if (init) {
    if (init->pi.size() != m || init->p1.size() != n) {
      throw InvalidArgument("rprd_solve: initial strategies have the wrong size");
    }
    pi = init->pi;
    renormalize(pi);
    p1 = clip_normalize(init->p1, task_simplex);
  }

  std::vector<double> neg(a.values().begin(), a.values().end());
  for (double& v : neg) v = -v;
  const kernels::ConstMatrix am = a.matrix();
  const kernels::ConstMatrix bm{neg, m, n};
  double eta = cfg.eta;
  if (cfg.normalize_payoffs) {
    const double range = a.max_value() - a.min_value();
    if (range > 0.0) eta /= range;
  }
  const RestrictedSimplex agent_floor{m, m > 1 ? eps : 0.0, 1.0};
  const RestrictedSimplex task_floor{n, n > 1 ? eps : 0.0, 1.0};

  std::vector<double> pi_next(m), p1_clip(n), p1_next(n);
  std::vector<double> sum_pi(m, 0.0), sum_p1(n, 0.0);
  std::size_t averaged = 0;
  const int average_from = static_cast<int>(
      std::floor(static_cast<double>(cfg.max_iters) * (1.0 - cfg.average_window)));

  RprdResult result;
  for (int it = 0; it < cfg.max_iters; ++it) {
    MetaStrategyPair step = rd_step(pi, p1, am, bm, eta);
    if (m == 1) step.pi = {1.0};
    renormalize(step.pi);
    renormalize(step.p1);
    clip_rescale(step.p1, task_simplex.lower, task_simplex.upper, p1_clip);
    clip_rescale(step.pi, agent_floor.lower, agent_floor.upper, pi_next);
    clip_rescale(p1_clip, task_floor.lower, task_floor.upper, p1_next);
    if (!task_simplex.contains(p1_next)) {
      clip_rescale(std::vector<double>(p1_next), task_simplex.lower, task_simplex.upper,
                   p1_next);
    }
    const double change =
        std::max(max_abs_diff(pi_next, pi), max_abs_diff(p1_next, p1));
    std::swap(pi, pi_next);
    std::swap(p1, p1_next);
    result.iterations = it + 1;
    if (it >= average_from) {
      kernels::axpy(1.0, pi, sum_pi);
      kernels::axpy(1.0, p1, sum_p1);
      ++averaged;
    }
    if (change < cfg.tol) {
      result.converged = true;
      break;
    }
  }

  result.last = {pi, p1};
  if (averaged == 0) {
    result.average = result.last;
  } else {
    for (double& v : sum_pi) v /= static_cast<double>(averaged);
    for (double& v : sum_p1) v /= static_cast<double>(averaged);
    renormalize(sum_pi);
    result.average = {sum_pi, clip_normalize(sum_p1, task_simplex)};
  }
  if (!task_simplex.contains(result.average.p1) || !task_simplex.contains(result.last.p1)) {
    throw InternalError("rprd_solve: task strategy left the restricted simplex");
  }
  return result;
}

MetaStrategyPair rprd_solve(const PayoffTable& a, const RestrictedSimplex& task_simplex,
                            const SolverConfig& cfg,
                            const std::optional<MetaStrategyPair>& init) {
  return rprd_solve_detailed(a, task_simplex, cfg, init).average;
}

}  // namespace girl
