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

#include <algorithm>
#include <cmath>
#include <numeric>

#include "doctest.h"
#include "girl/errors.h"
#include "girl/metagame.h"
#include "test_support.h"

namespace girl {
namespace {

double sum(std::span<const double> v) { return std::accumulate(v.begin(), v.end(), 0.0); }

void check_vec(std::span<const double> got, std::vector<double> want, double tol) {
  REQUIRE(got.size() == want.size());
  for (std::size_t i = 0; i < want.size(); ++i) CHECK(std::abs(got[i] - want[i]) <= tol);
}

PayoffTable random_table(std::size_t m, std::size_t n, Rng& rng) {
  std::vector<double> v(m * n);
  for (double& x : v) x = rng.uniform(-1.0, 1.0);
  return PayoffTable(m, n, std::move(v));
}

RestrictedSimplex random_box(std::size_t n, Rng& rng) {
  const double inv = 1.0 / static_cast<double>(n);
  const double lower = rng.uniform(0.0, inv);
  const double upper = rng.uniform(inv, 1.0);
  return {n, lower, upper};
}

std::vector<double> random_dist(std::size_t n, Rng& rng) {
  std::vector<double> p(n);
  for (double& x : p) x = rng.uniform(0.0, 1.0);
  const double s = sum(p);
  for (double& x : p) x /= s;
  return p;
}

TEST_CASE("RestrictedSimplex feasibility and membership") {
  CHECK(RestrictedSimplex{4, 0.1, 0.4}.feasible());
  CHECK_FALSE(RestrictedSimplex{4, 0.3, 0.9}.feasible());
  CHECK_FALSE(RestrictedSimplex{4, 0.0, 0.2}.feasible());
  CHECK_FALSE(RestrictedSimplex{4, 0.5, 0.4}.feasible());
  CHECK_THROWS_AS(RestrictedSimplex({4, 0.3, 0.9}).require_feasible("box"), InvalidArgument);
  const RestrictedSimplex box{3, 0.1, 0.6};
  CHECK(box.contains(std::vector<double>{0.1, 0.6, 0.3}));
  CHECK(box.contains(std::vector<double>{0.1 - 5e-10, 0.6, 0.3 + 5e-10}));
  CHECK_FALSE(box.contains(std::vector<double>{0.05, 0.6, 0.35}));
  CHECK_FALSE(box.contains(std::vector<double>{0.2, 0.6, 0.3}));
}

TEST_CASE("rd_step worked examples") {
  const PayoffTable pennies(2, 2, {1, -1, -1, 1});
  const std::vector<double> half{0.5, 0.5};
  auto s = rd_step(half, half, pennies, 0.01);
  check_vec(s.pi, half, 0.0);
  check_vec(s.p1, half, 0.0);

  s = rd_step(std::vector<double>{0.6, 0.4}, half, pennies, 0.01);
  check_vec(s.pi, {0.6, 0.4}, 1e-15);
  check_vec(s.p1, {0.499, 0.501}, 1e-15);

  Rng rng(3);
  const auto a = random_table(3, 4, rng);
  const auto pi = random_dist(3, rng);
  const auto p1 = random_dist(4, rng);
  s = rd_step(pi, p1, a, 0.0);
  CHECK(s.pi == pi);
  CHECK(s.p1 == p1);

  CHECK_THROWS_AS(rd_step(half, std::vector<double>{1.0}, pennies, 0.1), InvalidArgument);
}

TEST_CASE("rd_step preserves the simplex sums") {
  Rng rng(8);
  for (int trial = 0; trial < 50; ++trial) {
    const auto a = random_table(5, 6, rng);
    const auto s = rd_step(random_dist(5, rng), random_dist(6, rng), a, 0.05);
    CHECK(std::abs(sum(s.pi) - 1.0) <= 1e-12);
    CHECK(std::abs(sum(s.p1) - 1.0) <= 1e-12);
  }
}

TEST_CASE("clip_normalize worked examples") {
  const std::vector<double> flat{0.25, 0.25, 0.25, 0.25};
  check_vec(clip_normalize(flat, {4, 0.1, 0.4}), flat, 0.0);
  check_vec(clip_normalize(std::vector<double>{0.7, 0.2, 0.1}, {3, 0.05, 0.5}),
            {0.5, 1.0 / 3.0, 1.0 / 6.0}, 1e-12);
  check_vec(clip_normalize(std::vector<double>{1, 0, 0}, {3, 0.1, 0.8}), {0.8, 0.1, 0.1},
            1e-12);
  // Saturate-then-proportional, not the path-dependent literal loop.
  check_vec(clip_normalize(std::vector<double>{0.5, 0.49, 0.01}, {3, 0.2, 0.45}),
            {0.8 * 0.5 / 0.99, 0.8 * 0.49 / 0.99, 0.2}, 1e-12);
  // Zero entries share what the positive support cannot take.
  check_vec(clip_normalize(std::vector<double>{1, 0, 0}, {3, 0.0, 0.5}), {0.5, 0.25, 0.25},
            1e-12);
  CHECK_THROWS_AS(clip_normalize(flat, {4, 0.3, 0.9}), InvalidArgument);
}

TEST_CASE("clip_normalize properties and closed-form agreement") {
  Rng rng(17);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = 2 + static_cast<std::size_t>(trial % 7);
    const auto box = random_box(n, rng);
    std::vector<double> p(n);
    for (double& x : p) x = rng.uniform(0.0, 1.0) < 0.1 ? 0.0 : rng.uniform(0.0, 3.0);
    if (sum(p) == 0.0) p[0] = 1.0;
    const auto out = clip_normalize(p, box);
    CHECK(box.contains(out));
    check_vec(out, testing::clip_closed_form(p, box.lower, box.upper), 1e-9);
    // Idempotent on its own output.
    check_vec(clip_normalize(out, box), out, 1e-12);
    // Permutation equivariance.
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng.engine());
    std::vector<double> q(n);
    for (std::size_t i = 0; i < n; ++i) q[i] = p[perm[i]];
    const auto out_q = clip_normalize(q, box);
    for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(out_q[i] - out[perm[i]]) <= 1e-12);
  }
}

TEST_CASE("proj_explore") {
  const std::vector<double> x{0.3, 0.7};
  CHECK(proj_explore(x, 0.0) == x);
  check_vec(proj_explore(std::vector<double>{1.0, 0.0}, 0.1), {0.9, 0.1}, 1e-12);
  Rng rng(4);
  for (int trial = 0; trial < 200; ++trial) {
    auto p = random_dist(6, rng);
    p[trial % 6] = 0.0;
    const double eps = rng.uniform(0.0, 0.15);
    const auto out = proj_explore(p, eps);
    CHECK(*std::min_element(out.begin(), out.end()) >= eps - 1e-9);
    CHECK(std::abs(sum(out) - 1.0) <= 1e-9);
  }
  CHECK_THROWS_AS(proj_explore(std::vector<double>{0.5, 0.5}, 0.6), InvalidArgument);
}

TEST_CASE("adversary_best_response worked examples") {
  const std::vector<double> r{3, 1, 2};
  auto p = adversary_best_response(r, {3, 0.0, 1.0});
  check_vec(p, {0, 1, 0}, 0.0);
  p = adversary_best_response(r, {3, 0.1, 0.6});
  check_vec(p, {0.1, 0.6, 0.3}, 1e-15);
  CHECK(std::inner_product(p.begin(), p.end(), r.begin(), 0.0) == doctest::Approx(1.5));
  CHECK(testing::grid_min_value(r, 0.1, 0.6, 1e-3) == doctest::Approx(1.5));

  const std::vector<double> flat{2, 2, 2, 2};
  p = adversary_best_response(flat, {4, 0.1, 0.5});
  check_vec(p, {0.5, 0.3, 0.1, 0.1}, 1e-15);
  CHECK_THROWS_AS(adversary_best_response(r, {3, 0.5, 0.9}), InvalidArgument);
}

TEST_CASE("adversary_best_response matches exhaustive grid search") {
  Rng rng(23);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + static_cast<std::size_t>(trial % 4);
    std::vector<double> r(n);
    for (double& x : r) x = rng.uniform(-5.0, 5.0);
    // Grid-aligned bounds so the grid contains the box vertices.
    const double inv = 1.0 / static_cast<double>(n);
    const double lower = std::floor(rng.uniform(0.0, inv) * 1000.0) / 1000.0;
    const double upper = std::ceil(rng.uniform(inv, 1.0) * 1000.0) / 1000.0;
    const RestrictedSimplex box{n, lower, upper};
    const auto p = adversary_best_response(r, box);
    CHECK(box.contains(p));
    const double value = std::inner_product(p.begin(), p.end(), r.begin(), 0.0);
    double norm = 0.0;
    for (double x : r) norm = std::max(norm, std::abs(x));
    CHECK(std::abs(value - testing::grid_min_value(r, lower, upper, 1e-3)) <= 1e-3 * norm);
  }
}

TEST_CASE("restricted_exploitability") {
  const PayoffTable one(1, 1, {4.0});
  CHECK(restricted_exploitability({{1.0}, {1.0}}, one, {1, 0.0, 1.0}) == 0.0);
  const PayoffTable diag(2, 2, {1, 0, 0, 1});
  CHECK(std::abs(restricted_exploitability({{0.5, 0.5}, {0.5, 0.5}}, diag, {2, 0.0, 1.0})) <=
        1e-9);
  CHECK(restricted_exploitability({{1.0, 0.0}, {1.0, 0.0}}, diag, {2, 0.0, 1.0}) ==
        doctest::Approx(1.0));
  Rng rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    const auto a = random_table(3, 4, rng);
    const auto box = random_box(4, rng);
    const MetaStrategyPair s{random_dist(3, rng), clip_normalize(random_dist(4, rng), box)};
    CHECK(restricted_exploitability(s, a, box) >= -1e-9);
  }
}

TEST_CASE("rprd_solve: degenerate and closed-form games") {
  SolverConfig cfg;
  const PayoffTable one(1, 1, {-3.0});
  auto s = rprd_solve(one, {1, 0.0, 1.0}, cfg);
  CHECK(s.pi == std::vector<double>{1.0});
  CHECK(s.p1 == std::vector<double>{1.0});

  const PayoffTable diag(2, 2, {1, 0, 0, 1});
  s = rprd_solve(diag, {2, 0.0, 1.0}, cfg);
  check_vec(s.pi, {0.5, 0.5}, 0.05);
  check_vec(s.p1, {0.5, 0.5}, 0.05);

  CHECK_THROWS_AS(rprd_solve(diag, {2, 0.6, 1.0}, cfg), InvalidArgument);
  CHECK_THROWS_AS(rprd_solve(PayoffTable(2), {2, 0.0, 1.0}, cfg), InvalidArgument);
}

TEST_CASE("rprd_solve: single policy against the restricted adversary") {
  // With one policy the adversary should settle on the greedy worst case.
  const PayoffTable row(1, 3, {3, 1, 2});
  SolverConfig cfg;
  cfg.explore_eps = 0.0;
  const RestrictedSimplex box{3, 0.1, 0.6};
  const auto s = rprd_solve(row, box, cfg);
  check_vec(s.p1, {0.1, 0.6, 0.3}, 1e-3);
}

TEST_CASE("rprd_solve: feasibility and quality on random games") {
  Rng rng(2024);
  SolverConfig cfg;
  cfg.max_iters = 20000;
  int good = 0;
  const int trials = 40;
  for (int trial = 0; trial < trials; ++trial) {
    const std::size_t m = 1 + static_cast<std::size_t>(rng.next_u64() % 8);
    const std::size_t n = 1 + static_cast<std::size_t>(rng.next_u64() % 8);
    const auto a = random_table(m, n, rng);
    const auto box = random_box(n, rng);
    const auto s = rprd_solve(a, box, cfg);
    CHECK(box.contains(s.p1));
    CHECK(std::abs(sum(s.pi) - 1.0) <= 1e-9);
    CHECK(*std::min_element(s.pi.begin(), s.pi.end()) >= -1e-12);
    const double range = a.max_value() - a.min_value();
    good += restricted_exploitability(s, a, box) <= 0.05 * range;
  }
  CHECK(good >= trials * 9 / 10);
}

TEST_CASE("rprd_solve: random 5x5 with bounds [0.05, 0.5]") {
  Rng rng(55);
  const auto a = random_table(5, 5, rng);
  const RestrictedSimplex box{5, 0.05, 0.5};
  const auto s = rprd_solve(a, box, SolverConfig{});
  CHECK(restricted_exploitability(s, a, box) <= 0.05 * (a.max_value() - a.min_value()));
}

TEST_CASE("rprd_solve: scale covariance with eta scaled by 1/c") {
  Rng rng(9);
  const auto a = random_table(4, 5, rng);
  const RestrictedSimplex box{5, 0.1, 0.4};
  SolverConfig cfg;
  cfg.max_iters = 5000;
  cfg.normalize_payoffs = false;
  for (double c : {0.5, 4.0, 100.0}) {
    std::vector<double> scaled(a.values().begin(), a.values().end());
    for (double& v : scaled) v *= c;
    SolverConfig scaled_cfg = cfg;
    scaled_cfg.eta = cfg.eta / c;
    const auto base = rprd_solve_detailed(a, box, cfg);
    const auto other = rprd_solve_detailed(PayoffTable(4, 5, scaled), box, scaled_cfg);
    CHECK(base.iterations == other.iterations);
    check_vec(other.average.pi, base.average.pi, 1e-9);
    check_vec(other.average.p1, base.average.p1, 1e-9);
  }
  // normalize_payoffs makes the solver invariant to the payoff scale itself.
  SolverConfig norm;
  norm.max_iters = 5000;
  std::vector<double> big(a.values().begin(), a.values().end());
  for (double& v : big) v = 250.0 * v - 40.0;
  const auto s1 = rprd_solve(a, box, norm);
  const auto s2 = rprd_solve(PayoffTable(4, 5, big), box, norm);
  check_vec(s2.pi, s1.pi, 1e-9);
  check_vec(s2.p1, s1.p1, 1e-9);
}

TEST_CASE("augment_payoff") {
  const auto tasks = make_pointvel_tasks(3, 0.0, 2.0);
  EnvConfig env;
  env.horizon = 20;
  Rng init(1);
  const auto policy = init_policy(2, 1, 8, init);
  Rng r1(5);
  const auto t1 = augment_payoff(PayoffTable(3), policy, tasks, env, 4, r1);
  CHECK(t1.rows() == 1);
  CHECK(t1.cols() == 3);
  Rng r2(5);
  const auto t2 = augment_payoff(t1, policy, tasks, env, 4, r2);
  REQUIRE(t2.rows() == 2);
  for (std::size_t j = 0; j < 3; ++j) CHECK(t2.at(0, j) == t2.at(1, j));
  CHECK(t2.row(0)[0] == t1.row(0)[0]);

  // Monte-Carlo oracle: 10x more episodes, independent stream.
  const int episodes = 20;
  Rng r3(7);
  const auto t3 = augment_payoff(PayoffTable(3), policy, tasks, env, episodes, r3);
  for (std::size_t j = 0; j < 3; ++j) {
    Rng ref_rng(1000 + j);
    const auto ref = estimate_return(policy, tasks.contexts[j], env, 10 * episodes, ref_rng);
    const double se = ref.stddev / std::sqrt(static_cast<double>(episodes));
    CHECK(std::abs(t3.at(0, j) - ref.mean) <= 2.0 * se + 1e-9);
  }
}

}  // namespace
}  // namespace girl
