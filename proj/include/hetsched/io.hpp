#pragma once

#include <algorithm>
#include <fstream>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "hetsched/datagen.hpp"
#include "hetsched/genmaps.hpp"
#include "hetsched/milp.hpp"
#include "hetsched/model.hpp"
#include "hetsched/orderspace.hpp"

namespace hetsched {

using Json = nlohmann::json;

inline std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  out << text;
  if (!out) throw IoError("write failed for " + path);
}

inline Json parse_json(const std::string& text, const std::string& origin = "input") {
  try {
    return Json::parse(text);
  } catch (const Json::exception& e) {
    throw IoError(origin + ": " + e.what());
  }
}

inline Json load_json(const std::string& path) { return parse_json(read_text(path), path); }

namespace detail {

// Runs a JSON extraction, turning library exceptions into IoError.
template <class F>
auto guarded(const char* what, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const Json::exception& e) {
    throw IoError(std::string("malformed ") + what + ": " + e.what());
  }
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Instance

inline Instance instance_from_json(const Json& j) {
  return detail::guarded("instance", [&] {
    std::vector<Task> tasks;
    for (const auto& t : j.at("tasks"))
      tasks.push_back({t.at("id").get<TaskId>(), t.at("time").get<double>(),
                       t.at("demand").get<ResourceVector>(), t.value("type", 0)});
    std::vector<Pool> pools;
    for (const auto& p : j.at("pools"))
      pools.push_back({p.at("id").get<PoolId>(), p.at("capacity").get<ResourceVector>(), p.value("type", 0)});
    std::vector<std::pair<TaskId, TaskId>> edges;
    for (const auto& e : j.value("edges", Json::array())) {
      if (!e.is_array() || e.size() != 2) throw IoError("malformed instance: edge must be [u, v]");
      edges.emplace_back(e[0].get<TaskId>(), e[1].get<TaskId>());
    }
    CompatTable compat;
    if (j.contains("compat")) {
      const auto& c = j.at("compat");
      for (const auto& row : c.value("by_type", Json::array()))
        compat.by_type[{row.at(0).get<int>(), row.at(1).get<int>()}] = row.at(2).get<double>();
      for (const auto& row : c.value("overrides", Json::array()))
        compat.overrides[{row.at(0).get<TaskId>(), row.at(1).get<PoolId>()}] = row.at(2).get<double>();
    }
    const std::size_t r = j.value("resources", std::size_t{0});
    return Instance(std::move(tasks), std::move(pools), std::move(edges), std::move(compat), r);
  });
}

inline Json instance_to_json(const Instance& inst) {
  Json j;
  j["resources"] = inst.num_resources();
  j["tasks"] = Json::array();
  for (const auto& t : inst.tasks())
    j["tasks"].push_back({{"id", t.id}, {"time", t.base_time}, {"demand", t.demand}, {"type", t.type}});
  j["pools"] = Json::array();
  for (const auto& p : inst.pools())
    j["pools"].push_back({{"id", p.id}, {"capacity", p.capacity}, {"type", p.type}});
  j["edges"] = Json::array();
  for (const auto& [u, v] : inst.edges()) j["edges"].push_back({u, v});
  Json by_type = Json::array(), overrides = Json::array();
  for (const auto& [key, k] : inst.compat().by_type) by_type.push_back({key.first, key.second, k});
  for (const auto& [key, k] : inst.compat().overrides) overrides.push_back({key.first, key.second, k});
  j["compat"] = {{"by_type", by_type}, {"overrides", overrides}};
  return j;
}

inline Instance load_instance(const std::string& path) { return instance_from_json(load_json(path)); }

// ---------------------------------------------------------------------------
// Schedule

/// Assignment order in the file is kept as the dispatch order.
inline Schedule schedule_from_json(const Instance& inst, const Json& j) {
  return detail::guarded("schedule", [&] {
    const std::size_t n = inst.num_tasks();
    Schedule x{std::vector<double>(n, 0.0), std::vector<PoolIndex>(n, 0), {}};
    std::vector<bool> seen(n, false);
    for (const auto& a : j.at("assignments")) {
      const auto v = inst.find_task(a.at("task").get<TaskId>());
      const auto c = inst.find_pool(a.at("pool").get<PoolId>());
      if (!v) throw IoError("malformed schedule: unknown task " + a.at("task").dump());
      if (!c) throw IoError("malformed schedule: unknown pool " + a.at("pool").dump());
      if (seen[*v]) throw IoError("malformed schedule: task " + a.at("task").dump() + " assigned twice");
      seen[*v] = true;
      x.start[*v] = a.at("start").get<double>();
      x.pool[*v] = *c;
      x.dispatch_order.push_back(*v);
    }
    if (x.dispatch_order.size() != n) throw IoError("malformed schedule: not every task is assigned");
    return x;
  });
}

/// Assignments in dispatch order when recorded, otherwise by start then id.
inline Json schedule_to_json(const Instance& inst, const Schedule& x) {
  const std::size_t n = inst.num_tasks();
  std::vector<TaskIndex> order = x.dispatch_order;
  if (order.size() != n) {
    order.resize(n);
    std::iota(order.begin(), order.end(), TaskIndex{0});
    std::stable_sort(order.begin(), order.end(), [&](TaskIndex a, TaskIndex b) {
      if (x.start[a] != x.start[b]) return x.start[a] < x.start[b];
      return inst.task(a).id < inst.task(b).id;
    });
  }
  Json j;
  j["assignments"] = Json::array();
  for (TaskIndex v : order)
    j["assignments"].push_back({{"task", inst.task(v).id}, {"pool", inst.pool(x.pool[v]).id}, {"start", x.start[v]}});
  j["makespan"] = makespan(inst, x);
  return j;
}

inline Schedule load_schedule(const Instance& inst, const std::string& path) {
  return schedule_from_json(inst, load_json(path));
}

// ---------------------------------------------------------------------------
// ScheduleOrder

inline ScheduleOrder order_from_json(const Instance& inst, const Json& j) {
  return detail::guarded("order", [&] {
    const std::size_t n = inst.num_tasks();
    ScheduleOrder w{std::vector<PoolIndex>(n, 0), std::vector<std::size_t>(n, 0)};
    std::vector<bool> seen(n, false);
    for (const auto& e : j.at("order")) {
      const auto v = inst.find_task(e.at("task").get<TaskId>());
      const auto c = inst.find_pool(e.at("pool").get<PoolId>());
      if (!v || !c) throw IoError("malformed order: unknown task or pool");
      if (seen[*v]) throw IoError("malformed order: task listed twice");
      const auto rank = e.at("rank").get<long long>();
      if (rank < 1) throw IoError("malformed order: ranks start at 1");
      seen[*v] = true;
      w.pool[*v] = *c;
      w.rank[*v] = static_cast<std::size_t>(rank);
    }
    if (std::find(seen.begin(), seen.end(), false) != seen.end())
      throw IoError("malformed order: not every task is listed");
    if (!is_well_formed(inst, w)) throw IoError("malformed order: ranks per pool must be 1..n(c)");
    return w;
  });
}

/// Entries grouped by pool, then by rank.
inline Json order_to_json(const Instance& inst, const ScheduleOrder& w) {
  Json j;
  j["order"] = Json::array();
  const auto seqs = pool_sequences(inst, w);
  for (PoolIndex c = 0; c < seqs.size(); ++c)
    for (TaskIndex v : seqs[c])
      j["order"].push_back({{"task", inst.task(v).id}, {"pool", inst.pool(c).id}, {"rank", w.rank[v]}});
  return j;
}

// ---------------------------------------------------------------------------
// ScoreTable

/// Every action needs a score; pairs outside the action set default to 0
/// since they are always masked.
inline ScoreTable score_table_from_json(const Instance& inst, const Json& j) {
  return detail::guarded("score table", [&] {
    const std::size_t n = inst.num_tasks(), m = inst.num_pools();
    ScoreTable table(n, m, 0.0);
    std::vector<bool> seen(n * m, false);
    for (const auto& row : j.at("scores")) {
      const auto v = inst.find_task(row.at(0).get<TaskId>());
      const auto c = inst.find_pool(row.at(1).get<PoolId>());
      if (!v || !c) throw IoError("malformed score table: unknown task or pool in " + row.dump());
      table.set(*v, *c, row.at(2).get<double>());
      seen[*v * m + *c] = true;
    }
    for (const auto& a : action_set(inst))
      if (!seen[a.task * m + a.pool])
        throw IoError("malformed score table: no score for action (" + std::to_string(inst.task(a.task).id) +
                      "," + std::to_string(inst.pool(a.pool).id) + ")");
    if (j.contains("skip")) {
      const auto& s = j.at("skip");
      table.skip = {s.value("alpha", 1.0), s.value("beta", 1.0), s.value("gamma", 1.0)};
    }
    if (!(table.skip.alpha > 0.0 && table.skip.beta > 0.0 && table.skip.gamma > 0.0))
      throw DomainError(ErrorKind::ParameterRange, "skip parameters must be positive");
    if (j.value("skip_rule", std::string("decreasing")) == "constant") table.skip_rule = SkipRule::Constant;
    return table;
  });
}

inline Json score_table_to_json(const Instance& inst, const ScoreTable& table) {
  Json j;
  j["scores"] = Json::array();
  for (const auto& a : action_set(inst))
    j["scores"].push_back({inst.task(a.task).id, inst.pool(a.pool).id, table.score(a.task, a.pool)});
  j["skip"] = {{"alpha", table.skip.alpha}, {"beta", table.skip.beta}, {"gamma", table.skip.gamma}};
  if (table.skip_rule == SkipRule::Constant) j["skip_rule"] = "constant";
  return j;
}

// ---------------------------------------------------------------------------
// MilpSolution

inline Json milp_solution_to_json(const Instance& inst, const MilpSolution& sol) {
  Json j;
  j["mode"] = sol.mode == MilpMode::Homogeneous ? "hom" : "het";
  Json tasks = Json::array(), pools = Json::array();
  for (const auto& t : inst.tasks()) tasks.push_back(t.id);
  for (const auto& p : inst.pools()) pools.push_back(p.id);
  j["tasks"] = tasks;
  j["pools"] = pools;
  j["s"] = sol.s;
  j["tmax"] = sol.tmax;
  j["u"] = sol.u;
  j["w"] = sol.w;
  j["x"] = sol.x;
  if (sol.mode == MilpMode::Heterogeneous) {
    j["v"] = sol.v;
    j["y"] = sol.y;
  }
  return j;
}

inline MilpSolution milp_solution_from_json(const Json& j) {
  return detail::guarded("MILP solution", [&] {
    MilpSolution sol;
    sol.mode = j.value("mode", std::string("het")) == "hom" ? MilpMode::Homogeneous : MilpMode::Heterogeneous;
    sol.s = j.at("s").get<std::vector<double>>();
    sol.tmax = j.at("tmax").get<double>();
    sol.u = j.at("u").get<std::vector<std::vector<int>>>();
    sol.w = j.at("w").get<std::vector<std::vector<int>>>();
    sol.x = j.at("x").get<std::vector<std::vector<int>>>();
    if (sol.mode == MilpMode::Heterogeneous) {
      sol.v = j.at("v").get<std::vector<std::vector<int>>>();
      sol.y = j.at("y").get<std::vector<std::vector<std::vector<int>>>>();
    }
    return sol;
  });
}

// ---------------------------------------------------------------------------
// Profile
//
// {"task_types": [w0, w1, ...],
//  "demands": [{"choices": [...]} | {"range": [lo, hi]}, ...],
//  "pools": [{"id", "capacity", "type"}],
//  "compat": [[task_type, pool_type, k], ...]}

inline Profile profile_from_json(const Json& j) {
  return detail::guarded("profile", [&] {
    Profile p;
    p.type_weights = j.at("task_types").get<std::vector<double>>();
    for (const auto& d : j.at("demands")) {
      DemandSpec spec;
      if (d.contains("choices")) {
        spec.choices = d.at("choices").get<std::vector<double>>();
        if (spec.choices.empty()) throw IoError("malformed profile: empty demand choices");
      } else {
        spec.lo = d.at("range").at(0).get<double>();
        spec.hi = d.at("range").at(1).get<double>();
      }
      p.demands.push_back(std::move(spec));
    }
    for (const auto& q : j.at("pools"))
      p.pools.push_back({q.at("id").get<PoolId>(), q.at("capacity").get<ResourceVector>(), q.value("type", 0)});
    for (const auto& row : j.value("compat", Json::array()))
      p.compat[{row.at(0).get<int>(), row.at(1).get<int>()}] = row.at(2).get<double>();
    return p;
  });
}

inline Json profile_to_json(const Profile& p) {
  Json j;
  j["task_types"] = p.type_weights;
  j["demands"] = Json::array();
  for (const auto& d : p.demands) {
    if (!d.choices.empty()) j["demands"].push_back({{"choices", d.choices}});
    else j["demands"].push_back({{"range", {d.lo, d.hi}}});
  }
  j["pools"] = Json::array();
  for (const auto& q : p.pools) j["pools"].push_back({{"id", q.id}, {"capacity", q.capacity}, {"type", q.type}});
  j["compat"] = Json::array();
  for (const auto& [key, k] : p.compat) j["compat"].push_back({key.first, key.second, k});
  return j;
}

}  // namespace hetsched
