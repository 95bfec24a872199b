#pragma once

#include <algorithm>
#include <compare>
#include <cstddef>
#include <limits>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace hetsched {

using TaskId = int;
using PoolId = int;
using TaskIndex = std::size_t;
using PoolIndex = std::size_t;
using ResourceVector = std::vector<double>;

inline constexpr double kCapacitySlack = 1e-9;

enum class ErrorKind {
  IncompatiblePair,
  InvalidInstance,
  InfeasibleOrder,
  InfeasibleSchedule,
  IncompleteSequence,
  MalformedRollout,
  InfeasibleTarget,
  SizeCap,
  AllMasked,
  Deadlock,
  ModeMismatch,
  MalformedSolution,
  ParameterRange,
  ProfileInvalid,
  UnknownMethod,
};

// Errors raised by domain operations. The CLI maps these to exit code 1.
class DomainError : public std::runtime_error {
 public:
  DomainError(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

// Malformed files or unreadable paths. The CLI maps these to exit code 2.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Task {
  TaskId id = 0;
  double base_time = 1.0;
  ResourceVector demand;
  int type = 0;
};

struct Pool {
  PoolId id = 0;
  ResourceVector capacity;
  int type = 0;
};

/// Compatibility coefficients K(v,c). A per-(task, pool) override wins over the
/// (task_type, pool_type) entry; a pair with neither resolves to 1.
struct CompatTable {
  std::map<std::pair<int, int>, double> by_type;
  std::map<std::pair<TaskId, PoolId>, double> overrides;

  double coefficient(const Task& v, const Pool& c) const {
    if (auto it = overrides.find({v.id, c.id}); it != overrides.end()) return it->second;
    if (auto it = by_type.find({v.type, c.type}); it != by_type.end()) return it->second;
    return 1.0;
  }
};

inline bool fits(const ResourceVector& demand, const ResourceVector& available) {
  if (demand.size() != available.size()) return false;
  for (std::size_t k = 0; k < demand.size(); ++k)
    if (demand[k] > available[k] + kCapacitySlack) return false;
  return true;
}

/// Immutable scheduling instance. Construction never throws on semantic
/// problems (cycles, dangling edges, empty action sets); those are reported by
/// validate_instance. Derived adjacency and coefficient tables are built once.
class Instance {
 public:
  Instance() = default;
  Instance(std::vector<Task> tasks, std::vector<Pool> pools,
           std::vector<std::pair<TaskId, TaskId>> edges, CompatTable compat,
           std::size_t resources = 0)
      : tasks_(std::move(tasks)),
        pools_(std::move(pools)),
        edges_(std::move(edges)),
        compat_(std::move(compat)) {
    resources_ = resources;
    if (resources_ == 0) {
      if (!tasks_.empty()) resources_ = tasks_.front().demand.size();
      else if (!pools_.empty()) resources_ = pools_.front().capacity.size();
    }
    for (TaskIndex i = 0; i < tasks_.size(); ++i) task_index_.emplace(tasks_[i].id, i);
    for (PoolIndex k = 0; k < pools_.size(); ++k) pool_index_.emplace(pools_[k].id, k);
    preds_.assign(tasks_.size(), {});
    succs_.assign(tasks_.size(), {});
    for (const auto& [u, v] : edges_) {
      auto iu = task_index_.find(u);
      auto iv = task_index_.find(v);
      if (iu == task_index_.end() || iv == task_index_.end()) continue;
      auto& s = succs_[iu->second];
      if (std::find(s.begin(), s.end(), iv->second) != s.end()) continue;
      s.push_back(iv->second);
      preds_[iv->second].push_back(iu->second);
    }
    for (auto& s : succs_) std::sort(s.begin(), s.end());
    for (auto& p : preds_) std::sort(p.begin(), p.end());
    coeff_.assign(tasks_.size() * pools_.size(), 0.0);
    for (TaskIndex i = 0; i < tasks_.size(); ++i)
      for (PoolIndex k = 0; k < pools_.size(); ++k)
        coeff_[i * pools_.size() + k] = compat_.coefficient(tasks_[i], pools_[k]);
  }

  std::size_t num_tasks() const { return tasks_.size(); }
  std::size_t num_pools() const { return pools_.size(); }
  std::size_t num_resources() const { return resources_; }

  const std::vector<Task>& tasks() const { return tasks_; }
  const std::vector<Pool>& pools() const { return pools_; }
  const Task& task(TaskIndex i) const { return tasks_.at(i); }
  const Pool& pool(PoolIndex k) const { return pools_.at(k); }
  const std::vector<std::pair<TaskId, TaskId>>& edges() const { return edges_; }
  const CompatTable& compat() const { return compat_; }

  const std::vector<TaskIndex>& preds(TaskIndex i) const { return preds_[i]; }
  const std::vector<TaskIndex>& succs(TaskIndex i) const { return succs_[i]; }

  std::optional<TaskIndex> find_task(TaskId id) const {
    auto it = task_index_.find(id);
    if (it == task_index_.end()) return std::nullopt;
    return it->second;
  }
  std::optional<PoolIndex> find_pool(PoolId id) const {
    auto it = pool_index_.find(id);
    if (it == pool_index_.end()) return std::nullopt;
    return it->second;
  }
  TaskIndex task_index(TaskId id) const {
    if (auto i = find_task(id)) return *i;
    throw DomainError(ErrorKind::InvalidInstance, "unknown task id " + std::to_string(id));
  }
  PoolIndex pool_index(PoolId id) const {
    if (auto k = find_pool(id)) return *k;
    throw DomainError(ErrorKind::InvalidInstance, "unknown pool id " + std::to_string(id));
  }

  double coefficient(TaskIndex v, PoolIndex c) const { return coeff_[v * pools_.size() + c]; }

  /// (v,c) is in the action set: compatible and the demand fits the full capacity.
  bool is_action(TaskIndex v, PoolIndex c) const {
    return coefficient(v, c) > 0.0 && fits(tasks_[v].demand, pools_[c].capacity);
  }

  double actual_time(TaskIndex v, PoolIndex c) const {
    const double k = coefficient(v, c);
    if (!(k > 0.0))
      throw DomainError(ErrorKind::IncompatiblePair,
                        "incompatible pair: task " + std::to_string(tasks_[v].id) + " on pool " +
                            std::to_string(pools_[c].id));
    return tasks_[v].base_time / k;
  }

 private:
  std::vector<Task> tasks_;
  std::vector<Pool> pools_;
  std::vector<std::pair<TaskId, TaskId>> edges_;
  CompatTable compat_;
  std::size_t resources_ = 0;
  std::unordered_map<TaskId, TaskIndex> task_index_;
  std::unordered_map<PoolId, PoolIndex> pool_index_;
  std::vector<std::vector<TaskIndex>> preds_;
  std::vector<std::vector<TaskIndex>> succs_;
  std::vector<double> coeff_;
};

inline double actual_time(const Instance& inst, TaskIndex v, PoolIndex c) {
  return inst.actual_time(v, c);
}

struct Action {
  TaskIndex task = 0;
  PoolIndex pool = 0;
  friend auto operator<=>(const Action&, const Action&) = default;
};

/// All (task, pool) pairs with K>0 and demand within capacity, in (task, pool) order.
inline std::vector<Action> action_set(const Instance& inst) {
  std::vector<Action> out;
  for (TaskIndex v = 0; v < inst.num_tasks(); ++v)
    for (PoolIndex c = 0; c < inst.num_pools(); ++c)
      if (inst.is_action(v, c)) out.push_back({v, c});
  return out;
}

/// Topological order of the task graph (Kahn, smallest index first), or
/// nullopt when the edge relation has a cycle.
inline std::optional<std::vector<TaskIndex>> topological_order(const Instance& inst) {
  const std::size_t n = inst.num_tasks();
  std::vector<std::size_t> indeg(n);
  for (TaskIndex v = 0; v < n; ++v) indeg[v] = inst.preds(v).size();
  std::vector<TaskIndex> ready;
  for (TaskIndex v = 0; v < n; ++v)
    if (indeg[v] == 0) ready.push_back(v);
  std::vector<TaskIndex> order;
  order.reserve(n);
  while (!ready.empty()) {
    auto it = std::min_element(ready.begin(), ready.end());
    TaskIndex v = *it;
    ready.erase(it);
    order.push_back(v);
    for (TaskIndex w : inst.succs(v))
      if (--indeg[w] == 0) ready.push_back(w);
  }
  if (order.size() != n) return std::nullopt;
  return order;
}

struct ValidationReport {
  std::vector<std::string> issues;
  bool ok() const { return issues.empty(); }
  bool mentions(const std::string& needle) const {
    return std::any_of(issues.begin(), issues.end(),
                       [&](const std::string& s) { return s.find(needle) != std::string::npos; });
  }
};

inline ValidationReport validate_instance(const Instance& inst) {
  ValidationReport rep;
  auto add = [&](std::string s) { rep.issues.push_back(std::move(s)); };
  const std::size_t r = inst.num_resources();
  std::unordered_map<TaskId, int> seen_tasks;
  for (const auto& t : inst.tasks()) {
    if (seen_tasks[t.id]++ == 1) add("duplicate task id " + std::to_string(t.id));
    if (!(t.base_time > 0.0)) add("non-positive base time on task " + std::to_string(t.id));
    if (t.demand.size() != r) add("demand dimension mismatch on task " + std::to_string(t.id));
    for (double d : t.demand)
      if (d < 0.0) add("negative demand on task " + std::to_string(t.id));
  }
  std::unordered_map<PoolId, int> seen_pools;
  for (const auto& c : inst.pools()) {
    if (seen_pools[c.id]++ == 1) add("duplicate pool id " + std::to_string(c.id));
    if (c.capacity.size() != r) add("capacity dimension mismatch on pool " + std::to_string(c.id));
    for (double x : c.capacity)
      if (!(x > 0.0)) add("non-positive capacity on pool " + std::to_string(c.id));
  }
  for (const auto& [key, k] : inst.compat().by_type)
    if (k < 0.0) add("negative compatibility coefficient for type pair");
  for (const auto& [key, k] : inst.compat().overrides)
    if (k < 0.0) add("negative compatibility coefficient override");
  for (const auto& [u, v] : inst.edges()) {
    if (!inst.find_task(u) || !inst.find_task(v))
      add("dangling edge (" + std::to_string(u) + "," + std::to_string(v) + ")");
    else if (u == v)
      add("cycle in E: self-loop on task " + std::to_string(u));
  }
  if (!topological_order(inst)) add("cycle in E");
  for (TaskIndex v = 0; v < inst.num_tasks(); ++v) {
    bool any = false;
    for (PoolIndex c = 0; c < inst.num_pools() && !any; ++c) any = inst.is_action(v, c);
    if (!any) add("empty action set for task " + std::to_string(inst.task(v).id));
  }
  return rep;
}

/// A schedule: start time and pool per task (by index). `dispatch_order`
/// optionally records the order in which a generator started the tasks; it
/// only breaks ties between equal start times when extracting within-pool
/// ranks and is ignored by equality.
struct Schedule {
  std::vector<double> start;
  std::vector<PoolIndex> pool;
  std::vector<TaskIndex> dispatch_order;

  friend bool operator==(const Schedule& a, const Schedule& b) {
    return a.start == b.start && a.pool == b.pool;
  }
};

enum class Constraint { Shape, Precedence, Resource, Compatibility, NonNegativity };

struct Violation {
  Constraint constraint;
  std::string detail;
};

struct Verdict {
  std::vector<Violation> violations;
  bool feasible() const { return violations.empty(); }
  bool violates(Constraint c) const {
    return std::any_of(violations.begin(), violations.end(),
                       [c](const Violation& v) { return v.constraint == c; });
  }
};

/// Checks dependency, capacity, compatibility and non-negativity constraints.
/// Capacity is checked at every start time on the task's pool, counting tasks
/// running over the half-open interval [start, start + t_act).
inline Verdict check_schedule(const Instance& inst, const Schedule& x) {
  Verdict out;
  const std::size_t n = inst.num_tasks();
  if (x.start.size() != n || x.pool.size() != n) {
    out.violations.push_back({Constraint::Shape, "schedule does not cover every task"});
    return out;
  }
  std::vector<double> end(n, 0.0);
  bool compat_ok = true;
  for (TaskIndex v = 0; v < n; ++v) {
    const auto id = std::to_string(inst.task(v).id);
    if (x.pool[v] >= inst.num_pools()) {
      out.violations.push_back({Constraint::Compatibility, "task " + id + " has unknown pool"});
      compat_ok = false;
      continue;
    }
    if (!(inst.coefficient(v, x.pool[v]) > 0.0)) {
      out.violations.push_back({Constraint::Compatibility, "task " + id + " on incompatible pool"});
      compat_ok = false;
      continue;
    }
    if (x.start[v] < 0.0)
      out.violations.push_back({Constraint::NonNegativity, "task " + id + " starts before 0"});
    end[v] = x.start[v] + inst.actual_time(v, x.pool[v]);
  }
  if (!compat_ok) return out;
  for (TaskIndex v = 0; v < n; ++v)
    for (TaskIndex w : inst.succs(v))
      if (end[v] > x.start[w])
        out.violations.push_back({Constraint::Precedence,
                                  "task " + std::to_string(inst.task(w).id) + " starts before " +
                                      std::to_string(inst.task(v).id) + " completes"});
  const std::size_t r = inst.num_resources();
  for (TaskIndex v = 0; v < n; ++v) {
    const double tau = x.start[v];
    const PoolIndex c = x.pool[v];
    ResourceVector used(r, 0.0);
    for (TaskIndex u = 0; u < n; ++u)
      if (x.pool[u] == c && x.start[u] <= tau && tau < end[u])
        for (std::size_t k = 0; k < r; ++k) used[k] += inst.task(u).demand[k];
    if (!fits(used, inst.pool(c).capacity))
      out.violations.push_back({Constraint::Resource, "capacity exceeded on pool " +
                                                          std::to_string(inst.pool(c).id) +
                                                          " when task " +
                                                          std::to_string(inst.task(v).id) +
                                                          " starts"});
  }
  return out;
}

inline double makespan(const Instance& inst, const Schedule& x) {
  double f = 0.0;
  for (TaskIndex v = 0; v < inst.num_tasks(); ++v)
    f = std::max(f, x.start.at(v) + inst.actual_time(v, x.pool.at(v)));
  return f;
}

/// The eight-task, single-pool instance on which list scheduling misses the
/// optimum (list scheduling reaches makespan 4, the optimum is 3.2).
inline Instance p0_instance() {
  std::vector<Task> tasks;
  for (TaskId id = 1; id <= 8; ++id) {
    double t = id == 2 ? 1.1 : id == 3 ? 1.2 : 1.0;
    double d = id == 4 ? 2.0 : 1.0;
    tasks.push_back({id, t, {d}, 0});
  }
  std::vector<Pool> pools{{1, {3.0}, 0}};
  std::vector<std::pair<TaskId, TaskId>> edges{{1, 4}, {1, 6}, {4, 7}, {2, 5}, {5, 8}};
  return Instance(std::move(tasks), std::move(pools), std::move(edges), CompatTable{}, 1);
}

/// The unique list-scheduling output on P0 (makespan 4).
inline Schedule p0_list_schedule() {
  return {{0.0, 0.0, 0.0, 2.0, 1.1, 1.0, 3.0, 2.1}, std::vector<PoolIndex>(8, 0), {}};
}

/// An optimal schedule on P0 (makespan 3.2).
inline Schedule p0_optimal_schedule() {
  return {{0.0, 0.0, 0.0, 1.1, 1.2, 2.1, 2.1, 2.2}, std::vector<PoolIndex>(8, 0), {}};
}

}  // namespace hetsched
