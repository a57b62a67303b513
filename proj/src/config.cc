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

#include "girl/config.h"

#include <charconv>
#include <cstdio>
#include <functional>
#include <map>

#include "girl/errors.h"
#include "girl/io.h"

namespace girl {

ConfigError::ConfigError(std::vector<std::string> problems)
    : std::runtime_error([&] {
        std::string msg = "invalid configuration:";
        for (const auto& p : problems) msg += "\n  " + p;
        return msg;
      }()),
      problems_(std::move(problems)) {}

namespace {

std::string short_real(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", v);
  return buf;
}

// Thrown by value parsers; turned into a ConfigError entry by the caller.
struct BadValue {
  std::string message;
};

double to_real(const std::string& s) {
  try {
    return parse_real(s, "value");
  } catch (const DataError&) {
    throw BadValue{"expected a number, got '" + s + "'"};
  }
}

long to_int(const std::string& s) {
  const auto t = trim(s);
  long v = 0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size() || t.empty()) {
    throw BadValue{"expected an integer, got '" + s + "'"};
  }
  return v;
}

std::uint64_t to_u64(const std::string& s) {
  const auto t = trim(s);
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size() || t.empty()) {
    throw BadValue{"expected a nonnegative integer, got '" + s + "'"};
  }
  return v;
}

bool to_bool(const std::string& s) {
  if (s == "true" || s == "1") return true;
  if (s == "false" || s == "0") return false;
  throw BadValue{"expected true or false, got '" + s + "'"};
}

template <class T, class F>
std::vector<T> to_list(const std::string& s, F parse_one) {
  std::vector<T> out;
  if (trim(s).empty()) return out;
  for (const auto& part : split(s, ',')) out.push_back(static_cast<T>(parse_one(std::string(trim(part)))));
  return out;
}

template <class T, class F>
std::string join(const std::vector<T>& values, F format_one) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i > 0) out += ",";
    out += format_one(values[i]);
  }
  return out;
}

std::string fmt_int(long v) { return std::to_string(v); }
std::string fmt_u64(std::uint64_t v) { return std::to_string(v); }
std::string fmt_bool(bool v) { return v ? "true" : "false"; }

struct Field {
  std::string key;
  std::function<void(const std::string&)> set;
  std::function<std::string()> get;
};

std::vector<Field> fields_of(RunConfig& c) {
  std::vector<Field> f;
  auto real = [&](std::string key, double& ref) {
    f.push_back({std::move(key), [&ref](const std::string& s) { ref = to_real(s); },
                 [&ref] { return format_real(ref); }});
  };
  auto integer = [&](std::string key, int& ref) {
    f.push_back({std::move(key), [&ref](const std::string& s) { ref = static_cast<int>(to_int(s)); },
                 [&ref] { return fmt_int(ref); }});
  };
  auto boolean = [&](std::string key, bool& ref) {
    f.push_back({std::move(key), [&ref](const std::string& s) { ref = to_bool(s); },
                 [&ref] { return fmt_bool(ref); }});
  };
  auto reals = [&](std::string key, std::vector<double>& ref) {
    f.push_back({std::move(key),
                 [&ref](const std::string& s) { ref = to_list<double>(s, to_real); },
                 [&ref] { return join(ref, format_real); }});
  };
  auto ints = [&](std::string key, std::vector<int>& ref) {
    f.push_back({std::move(key), [&ref](const std::string& s) { ref = to_list<int>(s, to_int); },
                 [&ref] { return join(ref, [](int v) { return fmt_int(v); }); }});
  };
  auto seeds = [&](std::string key, std::vector<std::uint64_t>& ref) {
    f.push_back({std::move(key),
                 [&ref](const std::string& s) { ref = to_list<std::uint64_t>(s, to_u64); },
                 [&ref] { return join(ref, fmt_u64); }});
  };

  f.push_back({"tasks.kind",
               [&c](const std::string& s) {
                 try {
                   c.task_kind = parse_env_kind(s);
                 } catch (const InvalidArgument& e) {
                   throw BadValue{e.what()};
                 }
               },
               [&c] { return std::string(env_kind_name(c.task_kind)); }});
  integer("tasks.count", c.task_count);
  real("tasks.vmin", c.vmin);
  real("tasks.vmax", c.vmax);
  real("tasks.radius", c.radius);

  real("env.gamma", c.env.gamma);
  integer("env.horizon", c.env.horizon);
  real("env.action_clip", c.env.action_clip);
  real("env.dt", c.env.dt);

  real("maml.inner_lr", c.maml.inner_lr);
  real("maml.outer_lr", c.maml.outer_lr);
  integer("maml.traj_per_task", c.maml.traj_per_task);
  integer("maml.tasks_per_batch", c.maml.tasks_per_batch);
  integer("maml.meta_iterations", c.maml.meta_iterations);
  boolean("maml.first_order", c.maml.first_order);
  integer("maml.hidden_size", c.maml.hidden_size);
  f.push_back({"maml.baseline",
               [&c](const std::string& s) {
                 try {
                   c.maml.baseline = parse_baseline(s);
                 } catch (const InvalidArgument& e) {
                   throw BadValue{e.what()};
                 }
               },
               [&c] { return std::string(baseline_name(c.maml.baseline)); }});
  real("maml.entropy_bonus", c.maml.entropy_bonus);
  boolean("maml.normalize_advantages", c.maml.normalize_advantages);
  real("maml.max_grad_norm", c.maml.max_grad_norm);

  real("solver.eta", c.solver.eta);
  real("solver.explore_eps", c.solver.explore_eps);
  integer("solver.max_iters", c.solver.max_iters);
  real("solver.tol", c.solver.tol);
  real("solver.average_window", c.solver.average_window);
  boolean("solver.normalize_payoffs", c.solver.normalize_payoffs);

  integer("psro.max_loops", c.psro.max_loops);
  integer("psro.max_policies", c.psro.max_policies);
  real("psro.train_min", c.psro.train_min);
  real("psro.train_max", c.psro.train_max);
  f.push_back({"psro.mode",
               [&c](const std::string& s) {
                 try {
                   c.psro.mode = parse_psro_mode(s);
                 } catch (const InvalidArgument& e) {
                   throw BadValue{e.what()};
                 }
               },
               [&c] { return std::string(psro_mode_name(c.psro.mode)); }});
  f.push_back({"psro.seed", [&c](const std::string& s) { c.psro.seed = to_u64(s); },
               [&c] { return fmt_u64(c.psro.seed); }});
  integer("psro.payoff_episodes", c.psro.payoff_episodes);

  integer("eval.shots", c.eval.shots);
  reals("eval.shot_weights", c.eval.shot_weights);
  real("eval.test_min", c.eval.test_min);
  real("eval.test_max", c.eval.test_max);
  real("eval.beta", c.eval.beta);
  real("eval.finetune_lr", c.eval.finetune_lr);
  integer("eval.episodes", c.eval.episodes);
  seeds("eval.seeds", c.eval.seeds);

  reals("compare.train_max", c.compare.train_max);
  reals("compare.test_max", c.compare.test_max);
  ints("compare.shots", c.compare.shots);
  seeds("compare.seeds", c.compare.seeds);
  integer("compare.maml_iterations", c.compare.maml_iterations);
  return f;
}

}  // namespace

TaskSet RunConfig::make_tasks() const {
  switch (task_kind) {
    case EnvKind::kPointVel:
      return make_pointvel_tasks(task_count, vmin, vmax);
    case EnvKind::kPointPos:
      return make_pointpos_tasks(task_count, radius);
    case EnvKind::kBandit:
      break;
  }
  throw InvalidArgument("tasks.kind must be pointvel or pointpos");
}

PsroSetup RunConfig::setup() const { return {make_tasks(), psro, maml, env, solver}; }

std::vector<std::string> RunConfig::problems() const {
  std::vector<std::string> out;
  auto add = [&](std::vector<std::string> more) {
    out.insert(out.end(), more.begin(), more.end());
  };
  if (task_kind == EnvKind::kBandit) out.push_back("tasks.kind must be pointvel or pointpos");
  if (task_kind == EnvKind::kPointVel) {
    if (task_count < 2) out.push_back("tasks.count must be >= 2 for pointvel");
    if (!(vmin < vmax)) out.push_back("tasks.vmin must be < tasks.vmax");
  } else if (task_kind == EnvKind::kPointPos) {
    if (task_count < 1) out.push_back("tasks.count must be >= 1");
    if (!(radius > 0.0)) out.push_back("tasks.radius must be > 0");
  }
  add(env.problems());
  add(maml.problems());
  add(solver.problems());
  add(psro.problems());
  add(eval.problems());
  add(compare.problems());

  const std::size_t n = task_count > 0 ? static_cast<std::size_t>(task_count) : 1;
  if (!psro.train_simplex(n).feasible()) {
    out.push_back("psro.train_simplex infeasible: need 0 <= train_min <= train_max <= 1 and "
                  "train_min * tasks.count <= 1 <= train_max * tasks.count");
  }
  if (!eval.test_simplex(n).feasible()) {
    out.push_back("eval.test_simplex infeasible: need 0 <= test_min <= test_max <= 1 and "
                  "test_min * tasks.count <= 1 <= test_max * tasks.count");
  }
  for (double t : compare.train_max) {
    if (!RestrictedSimplex{n, psro.train_min, t}.feasible()) {
      out.push_back("compare.train_max entry " + short_real(t) + " gives an infeasible box");
    }
  }
  for (double t : compare.test_max) {
    if (!RestrictedSimplex{n, eval.test_min, t}.feasible()) {
      out.push_back("compare.test_max entry " + short_real(t) + " gives an infeasible box");
    }
  }
  if (solver.explore_eps * static_cast<double>(n) >= 1.0) {
    out.push_back("solver.explore_eps * tasks.count must be < 1");
  }
  return out;
}

RunConfig parse_config(std::string_view text) {
  RunConfig config;
  auto fields = fields_of(config);
  std::map<std::string, Field*> by_key;
  for (auto& f : fields) by_key[f.key] = &f;

  std::vector<std::string> problems;
  std::map<std::string, int> seen;
  int line_no = 0;
  for (const auto& raw : split(text, '\n')) {
    ++line_no;
    const auto line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    const std::string where = "line " + std::to_string(line_no) + ": ";
    if (eq == std::string_view::npos) {
      problems.push_back(where + "expected 'key = value'");
      continue;
    }
    const std::string key(trim(line.substr(0, eq)));
    const std::string value(trim(line.substr(eq + 1)));
    auto it = by_key.find(key);
    if (it == by_key.end()) {
      problems.push_back(where + "unknown key '" + key + "'");
      continue;
    }
    if (seen.count(key)) {
      problems.push_back(where + "duplicate key '" + key + "'");
      continue;
    }
    seen[key] = line_no;
    try {
      it->second->set(value);
    } catch (const BadValue& e) {
      problems.push_back(where + key + ": " + e.message);
    }
  }
  // Fields that failed to parse keep their defaults, so the remaining
  // checks still describe the rest of the file.
  for (auto& p : config.problems()) problems.push_back(std::move(p));
  if (!problems.empty()) throw ConfigError(std::move(problems));
  return config;
}

RunConfig load_config(const std::filesystem::path& path) {
  return parse_config(read_text(path));
}

std::string format_config(const RunConfig& config) {
  RunConfig copy = config;
  std::string out;
  for (const auto& f : fields_of(copy)) out += f.key + " = " + f.get() + "\n";
  return out;
}

}  // namespace girl
