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

#include "doctest.h"
#include "girl/errors.h"
#include "girl/io.h"
#include "girl/policy.h"
#include "test_support.h"

namespace girl {
namespace {

TEST_CASE("init_policy shapes and parameter count") {
  Rng rng(3);
  const auto p = init_policy(2, 1, 100, rng);
  CHECK(p.weight(0).rows == 100);
  CHECK(p.weight(0).cols == 2);
  CHECK(p.weight(1).rows == 100);
  CHECK(p.weight(1).cols == 100);
  CHECK(p.weight(2).rows == 1);
  CHECK(p.weight(2).cols == 100);
  CHECK(p.bias(2).size() == 1);
  CHECK(p.log_std().size() == 1);

  Rng small(0);
  // 4 + 4 + 16 + 4 + 4 + 1 + 1
  CHECK(init_policy(1, 1, 4, small).size() == 34);
}

TEST_CASE("init_policy is seeded, biases zero, log_std zero, fan-in bounded") {
  Rng a(11), b(11);
  const auto p = init_policy(2, 1, 16, a);
  CHECK(p == init_policy(2, 1, 16, b));
  for (std::size_t l = 0; l < p.shape().num_layers(); ++l) {
    for (double v : p.bias(l)) CHECK(v == 0.0);
    const double bound = 1.0 / std::sqrt(static_cast<double>(p.weight(l).cols));
    for (double v : p.weight(l).data) CHECK(std::abs(v) <= bound);
  }
  CHECK(p.log_std()[0] == 0.0);
}

TEST_CASE("forward: zero weights give zero output, hand-computed tiny net") {
  MlpParams zero(MlpShape{2, 1, {3}});
  const std::vector<double> obs{0.3, -1.2};
  CHECK(forward(zero, obs)[0] == 0.0);

  // One hidden unit: h = relu(2*x0 - x1 + 0.5) ; y = 3*h - 1.
  MlpParams p(MlpShape{2, 1, {1}});
  p.weight(0).data[0] = 2.0;
  p.weight(0).data[1] = -1.0;
  p.bias(0)[0] = 0.5;
  p.weight(1).data[0] = 3.0;
  p.bias(1)[0] = -1.0;
  CHECK(forward(p, obs)[0] == doctest::Approx(3.0 * (0.6 + 1.2 + 0.5) - 1.0));
  const std::vector<double> neg{-2.0, 1.0};
  CHECK(forward(p, neg)[0] == doctest::Approx(-1.0));  // ReLU cuts off
}

TEST_CASE("forward rejects wrong observation size") {
  MlpParams p(MlpShape{2, 1, {3}});
  const std::vector<double> obs{1.0};
  CHECK_THROWS_AS(forward(p, obs), InvalidArgument);
}

TEST_CASE("sample_action logprob matches independent density") {
  Rng rng(5);
  auto p = init_policy(2, 2, 8, rng);
  p.log_std()[0] = -0.4;
  p.log_std()[1] = 0.3;
  const std::vector<double> obs{0.2, -0.7};
  const auto mean = forward(p, obs);
  for (int i = 0; i < 20; ++i) {
    const auto s = sample_action(p, obs, rng);
    double expect = 0.0;
    for (int d = 0; d < 2; ++d) {
      const double sd = std::exp(p.log_std()[d]);
      const double z = (s.action[d] - mean[d]) / sd;
      expect += -0.5 * z * z - std::log(sd) - 0.5 * std::log(2.0 * M_PI);
    }
    CHECK(std::abs(s.logprob - expect) <= 1e-12);
    CHECK(std::abs(log_density(p, obs, s.action) - expect) <= 1e-12);
  }
  // Density at the mode.
  CHECK(log_density(p, obs, mean) ==
        doctest::Approx(-(-0.4 + 0.3) - std::log(2.0 * M_PI)).epsilon(1e-12));
}

TEST_CASE("pg_gradient: zero rewards without baseline give zero gradient") {
  Rng rng(2);
  const auto p = init_policy(2, 1, 4, rng);
  auto batch = testing::frozen_batch(p, 3, 5, rng);
  for (auto& t : batch) std::fill(t.rewards.begin(), t.rewards.end(), 0.0);
  PgConfig cfg;
  cfg.baseline = Baseline::kNone;
  cfg.normalize_advantages = false;
  const auto g = pg_gradient(p, batch, cfg, 0.99);
  for (double v : g.values()) CHECK(v == 0.0);
}

TEST_CASE("pg_gradient: single transition on a one-parameter linear policy") {
  // Policy with no hidden layer: mean = w * obs[0] (obs_dim 1), log_std s.
  MlpParams p(MlpShape{1, 1, {}});
  p.weight(0).data[0] = 0.5;
  p.log_std()[0] = std::log(0.8);
  Trajectory t;
  t.obs_dim = 1;
  t.act_dim = 1;
  t.states = {2.0, 0.0};
  t.actions = {1.7};
  t.rewards = {-3.0};
  t.logprobs = {log_density(p, std::vector<double>{2.0}, std::vector<double>{1.7})};
  PgConfig cfg;
  cfg.baseline = Baseline::kNone;
  cfg.normalize_advantages = false;
  const std::vector<Trajectory> batch{t};
  const auto g = pg_gradient(p, batch, cfg, 1.0);
  // d log pi / dw = (a - w x) x / sigma^2 ; loss = -G log pi.
  const double sigma = 0.8, x = 2.0, a = 1.7, w = 0.5, G = -3.0;
  const double z = (a - w * x) / sigma;
  CHECK(g.values()[0] == doctest::Approx(-G * (a - w * x) * x / (sigma * sigma)));
  CHECK(g.log_std()[0] == doctest::Approx(-G * (z * z - 1.0)));
}

TEST_CASE("pg_gradient matches central finite differences") {
  for (std::uint64_t seed = 0; seed < 8; ++seed) {
    Rng rng(seed);
    const auto p = testing::random_policy(2, 1, 1 + static_cast<int>(seed % 8), rng);
    const auto batch = testing::frozen_batch(p, 3, 6, rng);
    for (Baseline b : {Baseline::kNone, Baseline::kMeanReturn, Baseline::kPerStep}) {
      PgConfig cfg;
      cfg.baseline = b;
      cfg.entropy_bonus = 0.01;
      cfg.normalize_advantages = seed % 2 == 0;
      CHECK(testing::fd_relative_error(p, batch, cfg, 0.95) <= 1e-4);
    }
  }
}

TEST_CASE("pg_gradient rejects an empty batch") {
  Rng rng(0);
  const auto p = init_policy(2, 1, 4, rng);
  CHECK_THROWS_AS(pg_gradient(p, std::vector<Trajectory>{}, PgConfig{}, 0.99),
                  InvalidArgument);
}

TEST_CASE("apply_gradient arithmetic and linearity") {
  MlpParams p(MlpShape{1, 1, {}});
  p.values()[0] = 1.0;
  Gradient g(p.shape());
  g.values()[0] = 2.0;
  CHECK(apply_gradient(p, g, 0.1).values()[0] == doctest::Approx(0.8));
  CHECK(apply_gradient(p, g, 0.0) == p);
  CHECK(apply_gradient(p, Gradient(p.shape()), 0.3) == p);

  Rng rng(9);
  const auto q = init_policy(2, 1, 5, rng);
  Gradient g1(q.shape()), g2(q.shape());
  for (auto& v : g1.values()) v = rng.uniform(-1, 1);
  for (auto& v : g2.values()) v = rng.uniform(-1, 1);
  const auto once = apply_gradient(q, g1 + g2, 0.05);
  const auto twice = apply_gradient(apply_gradient(q, g1, 0.05), g2, 0.05);
  for (std::size_t k = 0; k < q.size(); ++k) {
    CHECK(once.values()[k] == doctest::Approx(twice.values()[k]).epsilon(1e-12));
  }
  MlpParams other(MlpShape{2, 1, {}});
  CHECK_THROWS_AS(apply_gradient(other, g, 0.1), InvalidArgument);
}

TEST_CASE("REINFORCE drives the bandit mean to the target") {
  const double target = 0.7;
  const auto tasks = make_bandit_tasks({target});
  EnvConfig env;
  env.horizon = 1;
  int successes = 0;
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    Rng rng(seed);
    auto p = init_policy(observation_dim(EnvKind::kBandit), 1, 8, rng);
    PgConfig cfg;
    cfg.learning_rate = 0.05;
    bool reached = false;
    for (int it = 0; it < 5000 && !reached; ++it) {
      std::vector<Trajectory> batch;
      for (int k = 0; k < 10; ++k) batch.push_back(rollout(p, tasks.contexts[0], env, rng));
      p = apply_gradient(p, pg_gradient(p, batch, cfg, 1.0), cfg.learning_rate);
      const auto obs = reset(tasks.contexts[0], rng);
      reached = std::abs(forward(p, obs)[0] - target) < 0.1 && it > 50;
    }
    successes += reached;
  }
  CHECK(successes >= 2);
}

TEST_CASE("policy checkpoints round-trip bit-exactly") {
  Rng rng(21);
  auto p = init_policy(2, 2, 7, rng);
  p.log_std()[1] = -1.0 / 3.0;
  const auto text = policy_to_text(p);
  const auto back = policy_from_text(text);
  CHECK(back == p);
  CHECK(policy_to_text(back) == text);
  CHECK_THROWS_AS(policy_from_text("girl-mlp 1 2 1 1 4 99\n0x1p+0\n"), DataError);
}

}  // namespace
}  // namespace girl
