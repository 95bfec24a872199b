#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "hetsched/genmaps.hpp"
#include "hetsched/heuristics.hpp"
#include "hetsched/model.hpp"
#include "hetsched/search.hpp"

namespace hetsched {

struct NamedInstance {
  std::string name;
  Instance instance;
  std::optional<ScoreTable> scores;  // drives skip-greedy / skip-sample when present
};

struct BenchOptions {
  std::size_t samples = 64;                  // rollouts per seed for skip-sample
  std::vector<std::uint64_t> seeds{0};       // one best-of-samples value per seed
  std::size_t local_search_steps = 50;
  bool timing = false;
  EnumerationLimits limits{};
};

struct MethodResult {
  std::string method;
  double makespan = 0.0;
  std::optional<double> improvement;  // percent, positive = better than best heuristic
  std::optional<double> mean;         // skip-sample: mean over seeds of best-of-samples
  std::optional<double> stddev;
  std::optional<double> millis;
};

struct InstanceReport {
  std::string name;
  std::size_t tasks = 0;
  std::optional<double> best_heuristic;
  std::vector<MethodResult> results;
};

struct BenchReport {
  std::vector<std::string> methods;
  std::vector<InstanceReport> instances;
};

/// Rollout seed for sample i under a base seed; prefixes of the sample range
/// give nested seed sets.
inline std::uint64_t sample_seed(std::uint64_t base, std::size_t i) {
  std::uint64_t z = base * 0x9E3779B97F4A7C15ULL + static_cast<std::uint64_t>(i) + 1;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Scores used when an instance comes without a score table: the critical
/// path length of the task relative to the longest one, plus the pool's
/// share of the fastest coefficient, both in [0, 1].
inline ScoreTable default_scores(const Instance& inst) {
  const auto cp = critical_path_lengths(inst);
  const double top = cp.empty() ? 1.0 : *std::max_element(cp.begin(), cp.end());
  ScoreTable table(inst.num_tasks(), inst.num_pools(), 0.0);
  for (TaskIndex v = 0; v < inst.num_tasks(); ++v) {
    double kmax = 0.0;
    for (PoolIndex c = 0; c < inst.num_pools(); ++c) kmax = std::max(kmax, inst.coefficient(v, c));
    for (PoolIndex c = 0; c < inst.num_pools(); ++c)
      table.set(v, c, cp[v] / top + (kmax > 0.0 ? inst.coefficient(v, c) / kmax : 0.0) - 1.0);
  }
  return table;
}

inline bool is_heuristic_method(const std::string& m) {
  return m == "sft" || m == "mopnr" || m == "cp" || m == "tetris" || m == "heft" || m == "peft" ||
         m == "ippts" || m.rfind("list:", 0) == 0;
}

/// Parses "list:<priority>:<pool>".
inline std::optional<std::pair<PriorityRule, PoolRule>> parse_list_method(const std::string& m) {
  if (m.rfind("list:", 0) != 0) return std::nullopt;
  const auto rest = m.substr(5);
  const auto colon = rest.find(':');
  if (colon == std::string::npos) return std::nullopt;
  const auto pr = parse_priority_rule(rest.substr(0, colon));
  const auto pl = parse_pool_rule(rest.substr(colon + 1));
  if (!pr || !pl) return std::nullopt;
  return std::make_pair(*pr, *pl);
}

inline bool is_known_method(const std::string& m) {
  return (is_heuristic_method(m) && (m.rfind("list:", 0) != 0 || parse_list_method(m))) ||
         m == "sgs-oracle" || m == "skip-greedy" || m == "skip-sample" || m == "local-search";
}

/// Best makespan of a list heuristic over the three pool rules.
inline Schedule best_list_heuristic(const Instance& inst, PriorityRule rule) {
  std::optional<Schedule> best;
  double f_best = 0.0;
  for (PoolRule pool : {PoolRule::EFT, PoolRule::TetrisScore, PoolRule::Balance}) {
    auto x = run_list_heuristic(inst, rule, pool);
    const double f = makespan(inst, x);
    if (!best || f < f_best) {
      best = std::move(x);
      f_best = f;
    }
  }
  return *best;
}

namespace detail {

inline MethodResult run_method(const NamedInstance& item, const std::string& method, const BenchOptions& opt) {
  const Instance& inst = item.instance;
  MethodResult r;
  r.method = method;
  const auto t0 = std::chrono::steady_clock::now();
  if (auto list = parse_list_method(method)) {
    r.makespan = makespan(inst, run_list_heuristic(inst, list->first, list->second));
  } else if (auto pr = parse_priority_rule(method)) {
    r.makespan = makespan(inst, best_list_heuristic(inst, *pr));
  } else if (auto iv = parse_insertion_variant(method)) {
    r.makespan = makespan(inst, run_insertion_heuristic(inst, *iv));
  } else if (method == "sgs-oracle") {
    r.makespan = brute_force_optimum(inst, opt.limits).makespan;
  } else if (method == "local-search") {
    const auto x0 = best_list_heuristic(inst, PriorityRule::CP);
    r.makespan = local_search(inst, x0, opt.local_search_steps).makespan;
  } else if (method == "skip-greedy" || method == "skip-sample") {
    const ScoreTable table = item.scores ? *item.scores : default_scores(inst);
    const auto t_gen = std::chrono::steady_clock::now();
    if (method == "skip-greedy") {
      r.makespan = makespan(inst, rollout_skip_extended(inst, table, {PolicyMode::Greedy, 0}).first);
    } else {
      std::vector<double> per_seed;
      for (std::uint64_t seed : opt.seeds) {
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < opt.samples; ++i) {
          const auto x = rollout_skip_extended(inst, table, {PolicyMode::Sampling, sample_seed(seed, i)}).first;
          best = std::min(best, makespan(inst, x));
        }
        per_seed.push_back(best);
      }
      double sum = 0.0;
      for (double f : per_seed) sum += f;
      const double mean = sum / static_cast<double>(per_seed.size());
      double var = 0.0;
      for (double f : per_seed) var += (f - mean) * (f - mean);
      r.makespan = *std::min_element(per_seed.begin(), per_seed.end());
      r.mean = mean;
      r.stddev = std::sqrt(var / static_cast<double>(per_seed.size()));
    }
    if (opt.timing)
      r.millis = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t_gen).count();
    return r;
  } else {
    throw DomainError(ErrorKind::UnknownMethod, "unknown method '" + method + "'");
  }
  if (opt.timing) r.millis = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

}  // namespace detail

/// Runs every method on every instance. The best heuristic of an instance is
/// the smallest makespan among the heuristic methods requested; improvements
/// are relative to it.
inline BenchReport run_benchmark(const std::vector<NamedInstance>& instances,
                                 const std::vector<std::string>& methods, const BenchOptions& opt = {}) {
  for (const auto& m : methods)
    if (!is_known_method(m)) throw DomainError(ErrorKind::UnknownMethod, "unknown method '" + m + "'");
  if (opt.seeds.empty() || opt.samples == 0)
    throw DomainError(ErrorKind::ParameterRange, "sampling needs at least one seed and one sample");
  BenchReport report;
  report.methods = methods;
  for (const auto& item : instances) {
    InstanceReport ir;
    ir.name = item.name;
    ir.tasks = item.instance.num_tasks();
    for (const auto& m : methods) {
      ir.results.push_back(detail::run_method(item, m, opt));
      if (is_heuristic_method(m))
        ir.best_heuristic = std::min(ir.best_heuristic.value_or(ir.results.back().makespan), ir.results.back().makespan);
    }
    if (ir.best_heuristic)
      for (auto& r : ir.results) r.improvement = 100.0 * (*ir.best_heuristic - r.makespan) / *ir.best_heuristic;
    report.instances.push_back(std::move(ir));
  }
  return report;
}

inline nlohmann::json report_to_json(const BenchReport& report) {
  nlohmann::json j;
  j["methods"] = report.methods;
  j["instances"] = nlohmann::json::array();
  for (const auto& ir : report.instances) {
    nlohmann::json ji{{"name", ir.name}, {"tasks", ir.tasks}};
    ji["best_heuristic"] = ir.best_heuristic ? nlohmann::json(*ir.best_heuristic) : nlohmann::json(nullptr);
    ji["results"] = nlohmann::json::array();
    for (const auto& r : ir.results) {
      nlohmann::json jr{{"method", r.method}, {"makespan", r.makespan}};
      jr["improvement"] = r.improvement ? nlohmann::json(*r.improvement) : nlohmann::json(nullptr);
      if (r.mean) jr["mean"] = *r.mean;
      if (r.stddev) jr["std"] = *r.stddev;
      if (r.millis) jr["time_ms"] = *r.millis;
      ji["results"].push_back(std::move(jr));
    }
    j["instances"].push_back(std::move(ji));
  }
  // Per-method means over instances.
  j["summary"] = nlohmann::json::array();
  for (std::size_t k = 0; k < report.methods.size(); ++k) {
    double sum = 0.0, imp = 0.0;
    std::size_t with_imp = 0;
    for (const auto& ir : report.instances) {
      sum += ir.results[k].makespan;
      if (ir.results[k].improvement) {
        imp += *ir.results[k].improvement;
        ++with_imp;
      }
    }
    const double count = static_cast<double>(report.instances.size());
    nlohmann::json js{{"method", report.methods[k]}};
    js["mean_makespan"] = report.instances.empty() ? nlohmann::json(nullptr) : nlohmann::json(sum / count);
    js["mean_improvement"] = with_imp ? nlohmann::json(imp / static_cast<double>(with_imp)) : nlohmann::json(nullptr);
    j["summary"].push_back(std::move(js));
  }
  return j;
}

/// One row per (instance, method): name,method,makespan,improvement.
inline std::string report_to_csv(const BenchReport& report) {
  std::string out = "instance,method,makespan,improvement\n";
  for (const auto& ir : report.instances)
    for (const auto& r : ir.results) {
      out += ir.name + "," + r.method + "," + nlohmann::json(r.makespan).dump() + ",";
      if (r.improvement) out += nlohmann::json(*r.improvement).dump();
      out += "\n";
    }
  return out;
}

}  // namespace hetsched
