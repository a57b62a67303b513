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

#include "girl/io.h"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "girl/errors.h"
#include "json.hpp"

namespace girl {

std::string format_real(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

double parse_real(std::string_view text, std::string_view what) {
  text = trim(text);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) {
    throw DataError(std::string(what) + ": cannot parse '" + std::string(text) +
                    "' as a number");
  }
  return v;
}

std::vector<std::string> split(std::string_view text, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t pos = text.find(sep, start);
    if (pos == std::string_view::npos) {
      out.emplace_back(text.substr(start));
      return out;
    }
    out.emplace_back(text.substr(start, pos - start));
    start = pos + 1;
  }
}

std::string_view trim(std::string_view text) {
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = text.find_last_not_of(" \t\r\n");
  return text.substr(first, last - first + 1);
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_atomic(const std::filesystem::path& path, std::string_view text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write " + tmp.string());
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) throw DataError("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

namespace {

std::vector<std::string_view> lines_of(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    lines.push_back(text.substr(start, end - start));
    start = end + 1;
  }
  return lines;
}

std::string line_tag(std::size_t index) { return "line " + std::to_string(index + 1); }

long parse_int(std::string_view text, const std::string& what) {
  text = trim(text);
  long v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) {
    throw DataError(what + ": cannot parse '" + std::string(text) + "' as an integer");
  }
  return v;
}

}  // namespace

std::string payoff_to_csv(const PayoffTable& table, std::span<const int> task_ids) {
  if (task_ids.size() != table.cols()) {
    throw InvalidArgument("payoff_to_csv: task id count differs from the table width");
  }
  std::string out = "policy";
  for (int id : task_ids) out += ",task_" + std::to_string(id);
  out += '\n';
  for (std::size_t r = 0; r < table.rows(); ++r) {
    out += std::to_string(r);
    for (double v : table.row(r)) out += "," + format_real(v);
    out += '\n';
  }
  return out;
}

PayoffTable payoff_from_csv(std::string_view text) {
  const auto lines = lines_of(text);
  std::size_t idx = 0;
  while (idx < lines.size() && trim(lines[idx]).empty()) ++idx;
  if (idx == lines.size()) throw DataError("payoff csv: empty file");
  const auto header = split(trim(lines[idx]), ',');
  if (header.size() < 2 || trim(header[0]) != "policy") {
    throw DataError("payoff csv: " + line_tag(idx) +
                    ": expected header 'policy,task_<id>,...'");
  }
  const std::size_t cols = header.size() - 1;
  PayoffTable table(cols);
  for (++idx; idx < lines.size(); ++idx) {
    const auto line = trim(lines[idx]);
    if (line.empty()) continue;
    const auto fields = split(line, ',');
    if (fields.size() != cols + 1) {
      throw DataError("payoff csv: " + line_tag(idx) + ": expected " +
                      std::to_string(cols + 1) + " fields, found " +
                      std::to_string(fields.size()));
    }
    const long id = parse_int(fields[0], "payoff csv: " + line_tag(idx));
    if (id != static_cast<long>(table.rows())) {
      throw DataError("payoff csv: " + line_tag(idx) + ": policy ids must be 0,1,2,...");
    }
    std::vector<double> row(cols);
    for (std::size_t c = 0; c < cols; ++c) {
      row[c] = parse_real(fields[c + 1], "payoff csv: " + line_tag(idx));
      if (!std::isfinite(row[c])) {
        throw DataError("payoff csv: " + line_tag(idx) + ": non-finite value");
      }
    }
    table.append_row(row);
  }
  if (table.empty()) throw DataError("payoff csv: no data rows");
  return table;
}

std::string strategies_to_csv(std::span<const MetaStrategyPair> strategies) {
  std::string out = "loop,player,index,probability\n";
  for (std::size_t k = 0; k < strategies.size(); ++k) {
    for (std::size_t i = 0; i < strategies[k].pi.size(); ++i) {
      out += std::to_string(k) + ",pi," + std::to_string(i) + "," +
             format_real(strategies[k].pi[i]) + "\n";
    }
    for (std::size_t j = 0; j < strategies[k].p1.size(); ++j) {
      out += std::to_string(k) + ",p1," + std::to_string(j) + "," +
             format_real(strategies[k].p1[j]) + "\n";
    }
  }
  return out;
}

std::vector<MetaStrategyPair> strategies_from_csv(std::string_view text) {
  const auto lines = lines_of(text);
  if (lines.empty() || trim(lines[0]) != "loop,player,index,probability") {
    throw DataError("strategies csv: line 1: unexpected header");
  }
  std::vector<MetaStrategyPair> out;
  for (std::size_t idx = 1; idx < lines.size(); ++idx) {
    const auto line = trim(lines[idx]);
    if (line.empty()) continue;
    const auto f = split(line, ',');
    if (f.size() != 4) throw DataError("strategies csv: " + line_tag(idx) + ": expected 4 fields");
    const long loop = parse_int(f[0], "strategies csv: " + line_tag(idx));
    const long index = parse_int(f[2], "strategies csv: " + line_tag(idx));
    const double prob = parse_real(f[3], "strategies csv: " + line_tag(idx));
    if (loop < 0 || loop > static_cast<long>(out.size())) {
      throw DataError("strategies csv: " + line_tag(idx) + ": loops must be consecutive");
    }
    if (loop == static_cast<long>(out.size())) out.emplace_back();
    const auto player = trim(f[1]);
    if (player != "pi" && player != "p1") {
      throw DataError("strategies csv: " + line_tag(idx) + ": unknown player");
    }
    auto& vec = player == "pi" ? out[loop].pi : out[loop].p1;
    if (index != static_cast<long>(vec.size())) {
      throw DataError("strategies csv: " + line_tag(idx) + ": indices must be consecutive");
    }
    vec.push_back(prob);
  }
  return out;
}

std::string policy_to_text(const MlpParams& params) {
  const MlpShape& s = params.shape();
  std::string out = "girl-mlp 1 " + std::to_string(s.obs_dim) + " " +
                    std::to_string(s.act_dim) + " " + std::to_string(s.hidden.size());
  for (int h : s.hidden) out += " " + std::to_string(h);
  out += " " + std::to_string(params.size()) + "\n";
  char buf[64];
  for (double v : params.values()) {
    std::snprintf(buf, sizeof(buf), "%a\n", v);
    out += buf;
  }
  return out;
}

MlpParams policy_from_text(std::string_view text) {
  const auto lines = lines_of(text);
  if (lines.empty()) throw DataError("policy checkpoint: empty");
  const auto head = split(trim(lines[0]), ' ');
  if (head.size() < 5 || head[0] != "girl-mlp" || head[1] != "1") {
    throw DataError("policy checkpoint: line 1: bad header");
  }
  MlpShape shape;
  shape.obs_dim = static_cast<int>(parse_int(head[2], "policy checkpoint: line 1"));
  shape.act_dim = static_cast<int>(parse_int(head[3], "policy checkpoint: line 1"));
  const long layers = parse_int(head[4], "policy checkpoint: line 1");
  if (layers < 0 || head.size() != static_cast<std::size_t>(6 + layers)) {
    throw DataError("policy checkpoint: line 1: bad hidden layer list");
  }
  for (long l = 0; l < layers; ++l) {
    shape.hidden.push_back(static_cast<int>(parse_int(head[5 + l], "policy checkpoint: line 1")));
  }
  const long count = parse_int(head.back(), "policy checkpoint: line 1");
  if (shape.obs_dim < 1 || shape.act_dim < 1 ||
      count != static_cast<long>(shape.param_count())) {
    throw DataError("policy checkpoint: line 1: parameter count does not match the shape");
  }
  std::vector<double> values;
  values.reserve(static_cast<std::size_t>(count));
  for (std::size_t idx = 1; idx < lines.size(); ++idx) {
    const auto line = trim(lines[idx]);
    if (line.empty()) continue;
    const std::string s(line);
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end != s.c_str() + s.size()) {
      throw DataError("policy checkpoint: " + line_tag(idx) + ": bad value");
    }
    values.push_back(v);
  }
  if (values.size() != static_cast<std::size_t>(count)) {
    throw DataError("policy checkpoint: expected " + std::to_string(count) + " values, found " +
                    std::to_string(values.size()));
  }
  return MlpParams(shape, std::move(values));
}

std::string task_set_to_json(const TaskSet& tasks) {
  nlohmann::json j;
  j["kind"] = std::string(env_kind_name(tasks.kind));
  j["contexts"] = nlohmann::json::array();
  for (const auto& c : tasks.contexts) {
    j["contexts"].push_back({{"id", c.id}, {"params", c.params}});
  }
  j["p0"] = tasks.p0;
  return j.dump(2) + "\n";
}

TaskSet task_set_from_json(std::string_view text) {
  try {
    const auto j = nlohmann::json::parse(text);
    TaskSet tasks;
    tasks.kind = parse_env_kind(j.at("kind").get<std::string>());
    for (const auto& c : j.at("contexts")) {
      tasks.contexts.push_back(
          {c.at("id").get<int>(), tasks.kind, c.at("params").get<std::vector<double>>()});
    }
    tasks.p0 = j.at("p0").get<std::vector<double>>();
    tasks.validate();
    return tasks;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("task set: ") + e.what());
  } catch (const InvalidArgument& e) {
    throw DataError(std::string("task set: ") + e.what());
  }
}

}  // namespace girl
