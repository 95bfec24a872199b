#pragma once

#include <algorithm>
#include <functional>
#include <numeric>
#include <set>
#include <string>
#include <vector>

#include "hetsched/model.hpp"

namespace hetsched {

/// Pool assignment plus within-pool rank (1-based) for every task.
struct ScheduleOrder {
  std::vector<PoolIndex> pool;
  std::vector<std::size_t> rank;

  friend bool operator==(const ScheduleOrder&, const ScheduleOrder&) = default;

  // Lexicographic on the per-task (pool, rank) encoding.
  friend bool operator<(const ScheduleOrder& a, const ScheduleOrder& b) {
    for (std::size_t v = 0; v < a.pool.size() && v < b.pool.size(); ++v) {
      if (a.pool[v] != b.pool[v]) return a.pool[v] < b.pool[v];
      if (a.rank[v] != b.rank[v]) return a.rank[v] < b.rank[v];
    }
    return a.pool.size() < b.pool.size();
  }
};

using ActionSequence = std::vector<Action>;

/// Tasks of each pool listed by ascending rank.
inline std::vector<std::vector<TaskIndex>> pool_sequences(const Instance& inst,
                                                          const ScheduleOrder& w) {
  std::vector<std::vector<TaskIndex>> seqs(inst.num_pools());
  for (TaskIndex v = 0; v < w.pool.size(); ++v) seqs.at(w.pool[v]).push_back(v);
  for (auto& s : seqs)
    std::sort(s.begin(), s.end(), [&](TaskIndex a, TaskIndex b) { return w.rank[a] < w.rank[b]; });
  return seqs;
}

inline ScheduleOrder order_from_sequences(std::size_t n,
                                          const std::vector<std::vector<TaskIndex>>& seqs) {
  ScheduleOrder w{std::vector<PoolIndex>(n, 0), std::vector<std::size_t>(n, 0)};
  for (PoolIndex c = 0; c < seqs.size(); ++c)
    for (std::size_t i = 0; i < seqs[c].size(); ++i) {
      w.pool[seqs[c][i]] = c;
      w.rank[seqs[c][i]] = i + 1;
    }
  return w;
}

/// Ranks on every pool are exactly {1, ..., n(c)} and pools are in range.
inline bool is_well_formed(const Instance& inst, const ScheduleOrder& w) {
  const std::size_t n = inst.num_tasks();
  if (w.pool.size() != n || w.rank.size() != n) return false;
  std::vector<std::vector<std::size_t>> ranks(inst.num_pools());
  for (TaskIndex v = 0; v < n; ++v) {
    if (w.pool[v] >= inst.num_pools()) return false;
    ranks[w.pool[v]].push_back(w.rank[v]);
  }
  for (auto& r : ranks) {
    std::sort(r.begin(), r.end());
    for (std::size_t i = 0; i < r.size(); ++i)
      if (r[i] != i + 1) return false;
  }
  return true;
}

/// Extracts the pool assignment and within-pool ranks of a schedule. Ranks
/// follow ascending start time; equal starts fall back to the schedule's
/// recorded dispatch order when present, otherwise to ascending task id.
inline ScheduleOrder project(const Instance& inst, const Schedule& x) {
  const std::size_t n = inst.num_tasks();
  std::vector<std::size_t> seq_pos(n, n);
  if (x.dispatch_order.size() == n)
    for (std::size_t i = 0; i < n; ++i) seq_pos[x.dispatch_order[i]] = i;
  std::vector<std::vector<TaskIndex>> seqs(inst.num_pools());
  for (TaskIndex v = 0; v < n; ++v) seqs.at(x.pool[v]).push_back(v);
  for (auto& s : seqs)
    std::sort(s.begin(), s.end(), [&](TaskIndex a, TaskIndex b) {
      if (x.start[a] != x.start[b]) return x.start[a] < x.start[b];
      if (seq_pos[a] != seq_pos[b]) return seq_pos[a] < seq_pos[b];
      return inst.task(a).id < inst.task(b).id;
    });
  return order_from_sequences(n, seqs);
}

/// G_w = (V, E ∪ E_w^pool) with E_w^pool = {(u,v) : same pool, rank(u) < rank(v)}.
struct AugmentedGraph {
  std::size_t num_nodes = 0;
  std::vector<std::pair<TaskIndex, TaskIndex>> edges;  // sorted, deduplicated

  bool has_edge(TaskIndex u, TaskIndex v) const {
    return std::binary_search(edges.begin(), edges.end(), std::make_pair(u, v));
  }

  bool is_acyclic() const {
    std::vector<std::vector<TaskIndex>> succ(num_nodes);
    std::vector<std::size_t> indeg(num_nodes, 0);
    for (auto [u, v] : edges) {
      succ[u].push_back(v);
      ++indeg[v];
    }
    std::vector<TaskIndex> stack;
    for (TaskIndex v = 0; v < num_nodes; ++v)
      if (indeg[v] == 0) stack.push_back(v);
    std::size_t seen = 0;
    while (!stack.empty()) {
      TaskIndex v = stack.back();
      stack.pop_back();
      ++seen;
      for (TaskIndex w : succ[v])
        if (--indeg[w] == 0) stack.push_back(w);
    }
    return seen == num_nodes;
  }
};

inline AugmentedGraph augmented_graph(const Instance& inst, const ScheduleOrder& w) {
  AugmentedGraph g;
  g.num_nodes = inst.num_tasks();
  for (TaskIndex u = 0; u < g.num_nodes; ++u)
    for (TaskIndex v : inst.succs(u)) g.edges.emplace_back(u, v);
  for (const auto& seq : pool_sequences(inst, w))
    for (std::size_t i = 0; i < seq.size(); ++i)
      for (std::size_t j = i + 1; j < seq.size(); ++j) g.edges.emplace_back(seq[i], seq[j]);
  std::sort(g.edges.begin(), g.edges.end());
  g.edges.erase(std::unique(g.edges.begin(), g.edges.end()), g.edges.end());
  return g;
}

namespace detail {

// Acyclicity of E plus the consecutive-rank chain of each pool, which has the
// same transitive closure as G_w.
inline bool chain_graph_acyclic(const Instance& inst,
                                const std::vector<std::vector<TaskIndex>>& seqs) {
  const std::size_t n = inst.num_tasks();
  std::vector<std::size_t> indeg(n, 0);
  std::vector<TaskIndex> next(n, n);
  for (TaskIndex v = 0; v < n; ++v) indeg[v] = inst.preds(v).size();
  for (const auto& s : seqs)
    for (std::size_t i = 0; i + 1 < s.size(); ++i) {
      next[s[i]] = s[i + 1];
      ++indeg[s[i + 1]];
    }
  std::vector<TaskIndex> stack;
  for (TaskIndex v = 0; v < n; ++v)
    if (indeg[v] == 0) stack.push_back(v);
  std::size_t seen = 0;
  while (!stack.empty()) {
    TaskIndex v = stack.back();
    stack.pop_back();
    ++seen;
    for (TaskIndex w : inst.succs(v))
      if (--indeg[w] == 0) stack.push_back(w);
    if (next[v] < n && --indeg[next[v]] == 0) stack.push_back(next[v]);
  }
  return seen == n;
}

}  // namespace detail

/// w is realized by some feasible schedule: every (v, pool(v)) is an action
/// and G_w is acyclic.
inline bool is_feasible_order(const Instance& inst, const ScheduleOrder& w) {
  if (!is_well_formed(inst, w)) return false;
  for (TaskIndex v = 0; v < inst.num_tasks(); ++v)
    if (!inst.is_action(v, w.pool[v])) return false;
  return detail::chain_graph_acyclic(inst, pool_sequences(inst, w));
}

/// Canonical form of an action sequence: the per-pool subsequences, read off
/// as ranks. Constant on classes of the adjacent cross-pool swap relation.
inline ScheduleOrder canonicalize(const Instance& inst, const ActionSequence& seq) {
  const std::size_t n = inst.num_tasks();
  std::vector<bool> seen(n, false);
  std::vector<std::vector<TaskIndex>> seqs(inst.num_pools());
  for (const auto& a : seq) {
    if (a.task >= n || a.pool >= inst.num_pools())
      throw DomainError(ErrorKind::IncompleteSequence, "action out of range");
    if (seen[a.task])
      throw DomainError(ErrorKind::IncompleteSequence,
                        "task " + std::to_string(inst.task(a.task).id) + " appears twice");
    if (!inst.is_action(a.task, a.pool))
      throw DomainError(ErrorKind::IncompatiblePair,
                        "pair outside the action set for task " +
                            std::to_string(inst.task(a.task).id));
    seen[a.task] = true;
    seqs[a.pool].push_back(a.task);
  }
  for (TaskIndex v = 0; v < n; ++v)
    if (!seen[v])
      throw DomainError(ErrorKind::IncompleteSequence,
                        "task " + std::to_string(inst.task(v).id) + " missing from sequence");
  return order_from_sequences(n, seqs);
}

/// Feasible orders reachable by removing one task and reinserting it at any
/// position of any pool it can run on (its own pool included). Sorted; w itself
/// is excluded.
inline std::vector<ScheduleOrder> insertion_neighbors(const Instance& inst,
                                                      const ScheduleOrder& w) {
  const auto base = pool_sequences(inst, w);
  std::set<ScheduleOrder> out;
  for (TaskIndex v = 0; v < inst.num_tasks(); ++v) {
    auto removed = base;
    auto& from = removed[w.pool[v]];
    from.erase(std::find(from.begin(), from.end(), v));
    for (PoolIndex c = 0; c < inst.num_pools(); ++c) {
      if (!inst.is_action(v, c)) continue;
      for (std::size_t pos = 0; pos <= removed[c].size(); ++pos) {
        auto seqs = removed;
        seqs[c].insert(seqs[c].begin() + static_cast<std::ptrdiff_t>(pos), v);
        if (!detail::chain_graph_acyclic(inst, seqs)) continue;
        auto cand = order_from_sequences(inst.num_tasks(), seqs);
        if (cand != w) out.insert(std::move(cand));
      }
    }
  }
  return {out.begin(), out.end()};
}

struct EnumerationLimits {
  std::size_t max_tasks = 8;
  std::size_t max_actions = 40;
};

inline void check_enumeration_cap(const Instance& inst, const EnumerationLimits& lim) {
  if (inst.num_tasks() > lim.max_tasks)
    throw DomainError(ErrorKind::SizeCap, "instance has " + std::to_string(inst.num_tasks()) +
                                              " tasks; enumeration cap is " +
                                              std::to_string(lim.max_tasks));
  if (action_set(inst).size() > lim.max_actions)
    throw DomainError(ErrorKind::SizeCap, "action set exceeds enumeration cap");
}

enum class OrderFilter { Feasible, All };

/// Visits every order of the order space (or only its feasible part) exactly
/// once. Pools are filled in index order, rank slot by rank slot, trying tasks
/// in index order; output order is deterministic.
template <class Visitor>
void for_each_order(const Instance& inst, OrderFilter filter, Visitor&& visit,
                    const EnumerationLimits& lim = {}) {
  check_enumeration_cap(inst, lim);
  const std::size_t n = inst.num_tasks();
  const std::size_t m = inst.num_pools();
  std::vector<std::vector<TaskIndex>> seqs(m);
  std::vector<bool> assigned(n, false);
  std::vector<TaskIndex> next(n, n);
  std::size_t placed = 0;

  // Whether `from` reaches `to` through E and the chain edges placed so far.
  auto reaches = [&](TaskIndex from, TaskIndex to) {
    std::vector<bool> seen(n, false);
    std::vector<TaskIndex> stack{from};
    seen[from] = true;
    while (!stack.empty()) {
      TaskIndex u = stack.back();
      stack.pop_back();
      if (u == to) return true;
      auto push = [&](TaskIndex x) {
        if (x < n && !seen[x]) {
          seen[x] = true;
          stack.push_back(x);
        }
      };
      for (TaskIndex x : inst.succs(u)) push(x);
      push(next[u]);
    }
    return false;
  };

  std::function<void(PoolIndex)> fill = [&](PoolIndex c) {
    if (c == m) {
      if (placed == n) visit(order_from_sequences(n, seqs));
      return;
    }
    for (TaskIndex v = 0; v < n; ++v) {
      if (assigned[v] || !inst.is_action(v, c)) continue;
      if (filter == OrderFilter::Feasible && !seqs[c].empty() && reaches(v, seqs[c].back()))
        continue;
      TaskIndex last = seqs[c].empty() ? n : seqs[c].back();
      if (last < n) next[last] = v;
      seqs[c].push_back(v);
      assigned[v] = true;
      ++placed;
      fill(c);
      --placed;
      assigned[v] = false;
      seqs[c].pop_back();
      if (last < n) next[last] = n;
    }
    // Close pool c; every unassigned task must still fit a later pool.
    for (TaskIndex v = 0; v < n; ++v) {
      if (assigned[v]) continue;
      bool later = false;
      for (PoolIndex d = c + 1; d < m && !later; ++d) later = inst.is_action(v, d);
      if (!later) return;
    }
    fill(c + 1);
  };
  fill(0);
}

inline std::vector<ScheduleOrder> enumerate_feasible_orders(const Instance& inst,
                                                            const EnumerationLimits& lim = {}) {
  std::vector<ScheduleOrder> out;
  for_each_order(inst, OrderFilter::Feasible, [&](ScheduleOrder w) { out.push_back(std::move(w)); },
                 lim);
  return out;
}

}  // namespace hetsched
