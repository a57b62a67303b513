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

#ifndef GIRL_TESTS_TEST_SUPPORT_H_
#define GIRL_TESTS_TEST_SUPPORT_H_

// Independent oracles shared by the unit tests and the acceptance binary.

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <functional>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include "girl/env.h"
#include "girl/metagame.h"
#include "girl/policy.h"
#include "girl/rng.h"

namespace girl::testing {

// Random frozen batch of trajectories on PointVel, produced by the policy
// itself so logprobs are consistent.
inline std::vector<Trajectory> frozen_batch(const MlpParams& params, int count, int horizon,
                                            Rng& rng) {
  EnvConfig env;
  env.horizon = horizon;
  const auto tasks = make_pointvel_tasks(2, 0.0, 2.0);
  std::vector<Trajectory> out;
  for (int i = 0; i < count; ++i) {
    out.push_back(rollout(params, tasks.contexts[static_cast<std::size_t>(i) % 2], env, rng));
  }
  return out;
}

// Random weights and biases. Nonzero biases keep pre-activations away from
// the ReLU kink at the deterministic PointVel start state, where central
// differences would see a one-sided derivative.
inline MlpParams random_policy(int obs_dim, int act_dim, int hidden, Rng& rng) {
  MlpParams p = init_policy(obs_dim, act_dim, hidden, rng);
  for (std::size_t l = 0; l < p.shape().num_layers(); ++l) {
    for (double& b : p.bias(l)) b = rng.uniform(-0.5, 0.5);
  }
  for (double& s : p.log_std()) s = rng.uniform(-0.5, 0.5);
  return p;
}

// Max over coordinates of |analytic - numeric| / max(1, |analytic|, |numeric|)
// with central differences on surrogate_loss.
inline double fd_relative_error(const MlpParams& params, std::span<const Trajectory> batch,
                                const PgConfig& cfg, double gamma, double h = 1e-5) {
  const Gradient g = pg_gradient(params, batch, cfg, gamma);
  double worst = 0.0;
  for (std::size_t k = 0; k < params.size(); ++k) {
    MlpParams plus = params, minus = params;
    plus.values()[k] += h;
    minus.values()[k] -= h;
    const double numeric =
        (surrogate_loss(plus, batch, cfg, gamma) - surrogate_loss(minus, batch, cfg, gamma)) /
        (2.0 * h);
    const double analytic = g.values()[k];
    const double scale = std::max({1.0, std::abs(analytic), std::abs(numeric)});
    worst = std::max(worst, std::abs(analytic - numeric) / scale);
  }
  return worst;
}

// Exhaustive search over the grid {lower + k * step} restricted to the box
// and the simplex; returns min p.r. Intended for n <= 4.
inline double grid_min_value(std::span<const double> r, double lower, double upper,
                             double step) {
  const std::size_t n = r.size();
  const long units = std::lround(1.0 / step);
  const long lo = static_cast<long>(std::ceil(lower / step - 1e-9));
  const long hi = static_cast<long>(std::floor(upper / step + 1e-9));
  double best = std::numeric_limits<double>::infinity();
  // partial = sum_{j < i} k_j * step * r_j, carried down the recursion.
  std::function<void(std::size_t, long, double)> rec = [&](std::size_t i, long remaining,
                                                           double partial) {
    if (i + 1 == n) {
      if (remaining < lo || remaining > hi) return;
      best = std::min(best, partial + static_cast<double>(remaining) * step * r[i]);
      return;
    }
    for (long c = lo; c <= std::min(hi, remaining); ++c) {
      const double next = partial + static_cast<double>(c) * step * r[i];
      if (i + 2 == n) {
        const long last = remaining - c;
        if (last >= lo && last <= hi) {
          best = std::min(best, next + static_cast<double>(last) * step * r[i + 1]);
        }
      } else {
        rec(i + 1, remaining - c, next);
      }
    }
  };
  rec(0, units, 0.0);
  return best;
}

// Saturate-then-proportional closed form: the unique point
// clamp(c * p, lower, upper) with unit sum, found by bisection on c.
// Zero entries of p act as infinitesimally positive.
inline std::vector<double> clip_closed_form(std::span<const double> p, double lower,
                                            double upper) {
  const std::size_t n = p.size();
  std::size_t zeros = 0;
  for (double v : p) zeros += v == 0.0;
  auto at = [&](double c) {
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = std::clamp(c * p[i], lower, upper);
    return out;
  };
  auto total = [&](double c) {
    const auto v = at(c);
    return std::accumulate(v.begin(), v.end(), 0.0);
  };
  double lo = 0.0, hi = 1.0;
  while (total(hi) < 1.0 && hi < 1e300) hi *= 2.0;
  if (total(hi) < 1.0) {
    // Positive entries saturate at upper; zeros share the remainder.
    const double share =
        (1.0 - static_cast<double>(n - zeros) * upper) / static_cast<double>(zeros);
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = p[i] > 0.0 ? upper : share;
    return out;
  }
  for (int it = 0; it < 400; ++it) {
    const double mid = 0.5 * (lo + hi);
    (total(mid) < 1.0 ? lo : hi) = mid;
  }
  // The sum is continuous and piecewise linear in c; solve the final piece
  // exactly.
  auto out = at(hi);
  double fixed = 0.0, free_mass = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (out[i] <= lower || out[i] >= upper) {
      fixed += out[i];
    } else {
      free_mass += p[i];
    }
  }
  if (free_mass > 0.0) {
    const double c = (1.0 - fixed) / free_mass;
    for (std::size_t i = 0; i < n; ++i) {
      if (out[i] > lower && out[i] < upper) out[i] = c * p[i];
    }
  }
  return out;
}

// Agent regret: best pure row against p1 minus the value of pi.
inline double agent_regret(const MetaStrategyPair& s, const PayoffTable& a) {
  std::vector<double> ap(a.rows(), 0.0);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) ap[i] += a.at(i, j) * s.p1[j];
  }
  double value = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i) value += s.pi[i] * ap[i];
  return *std::max_element(ap.begin(), ap.end()) - value;
}

inline std::filesystem::path temp_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("girl_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace girl::testing

#endif  // GIRL_TESTS_TEST_SUPPORT_H_
