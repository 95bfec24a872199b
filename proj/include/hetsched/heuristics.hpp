#pragma once

#include <algorithm>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "hetsched/genmaps.hpp"
#include "hetsched/model.hpp"
#include "hetsched/simulator.hpp"

namespace hetsched {

enum class PriorityRule { SFT, MOPNR, CP, Tetris };
enum class PoolRule { EFT, TetrisScore, Balance };
enum class InsertionVariant { HEFT, PEFT, IPPTS };

/// Mean of t(v)/K(v,c) over the pools with K(v,c) > 0.
inline double avg_time(const Instance& inst, TaskIndex v) {
  double sum = 0.0;
  std::size_t count = 0;
  for (PoolIndex c = 0; c < inst.num_pools(); ++c)
    if (inst.coefficient(v, c) > 0.0) {
      sum += inst.actual_time(v, c);
      ++count;
    }
  return count == 0 ? std::numeric_limits<double>::infinity() : sum / static_cast<double>(count);
}

/// sum_k (demand_k / full_k) * (current_k / full_k)
inline double tetris_score(const ResourceVector& demand, const ResourceVector& full,
                           const ResourceVector& current) {
  double s = 0.0;
  for (std::size_t k = 0; k < demand.size(); ++k) s += (demand[k] / full[k]) * (current[k] / full[k]);
  return s;
}

/// Longest path from v (inclusive) with average processing times as weights.
inline std::vector<double> critical_path_lengths(const Instance& inst) {
  const auto topo = topological_order(inst);
  if (!topo) throw DomainError(ErrorKind::InvalidInstance, "task graph has a cycle");
  std::vector<double> cp(inst.num_tasks(), 0.0);
  for (auto it = topo->rbegin(); it != topo->rend(); ++it) {
    double tail = 0.0;
    for (TaskIndex w : inst.succs(*it)) tail = std::max(tail, cp[w]);
    cp[*it] = avg_time(inst, *it) + tail;
  }
  return cp;
}

/// Number of strict descendants of each task.
inline std::vector<double> remaining_operations(const Instance& inst) {
  const std::size_t n = inst.num_tasks();
  std::vector<double> out(n, 0.0);
  for (TaskIndex v = 0; v < n; ++v) {
    std::vector<bool> seen(n, false);
    std::vector<TaskIndex> stack(inst.succs(v).begin(), inst.succs(v).end());
    std::size_t count = 0;
    while (!stack.empty()) {
      TaskIndex u = stack.back();
      stack.pop_back();
      if (seen[u]) continue;
      seen[u] = true;
      ++count;
      for (TaskIndex w : inst.succs(u)) stack.push_back(w);
    }
    out[v] = static_cast<double>(count);
  }
  return out;
}

/// Pool for v under `rule` among the pools where v can start right now;
/// ties go to the lowest pool id. nullopt when no pool is feasible.
inline std::optional<PoolIndex> select_pool(const Instance& inst, TaskIndex v, PoolRule rule,
                                            const EventSimulator& state) {
  std::optional<PoolIndex> best;
  double best_score = -std::numeric_limits<double>::infinity();
  for (PoolIndex c = 0; c < inst.num_pools(); ++c) {
    if (!state.can_dispatch(v, c)) continue;
    const auto& p = inst.pool(c);
    double score = 0.0;
    switch (rule) {
      case PoolRule::EFT: score = inst.coefficient(v, c); break;
      case PoolRule::TetrisScore:
        score = tetris_score(inst.task(v).demand, p.capacity, state.available(c));
        break;
      case PoolRule::Balance:
        score = tetris_score(inst.task(v).demand, p.capacity, state.available(c)) *
                inst.coefficient(v, c);
        break;
    }
    if (!best || score > best_score || (score == best_score && p.id < inst.pool(*best).id)) {
      best = c;
      best_score = score;
    }
  }
  return best;
}

/// Task priorities (larger is scheduled first). SFT is -avg_time, MOPNR the
/// descendant count, CP the critical path length. Tetris is dynamic: the
/// Tetris score of v on the pool `pool_rule` would pick in `state`
/// (-inf when v cannot start now).
inline std::vector<double> priority(const Instance& inst, PriorityRule rule,
                                    const EventSimulator* state = nullptr,
                                    PoolRule pool_rule = PoolRule::EFT) {
  const std::size_t n = inst.num_tasks();
  std::vector<double> out(n, 0.0);
  switch (rule) {
    case PriorityRule::SFT:
      for (TaskIndex v = 0; v < n; ++v) out[v] = -avg_time(inst, v);
      return out;
    case PriorityRule::MOPNR: return remaining_operations(inst);
    case PriorityRule::CP: return critical_path_lengths(inst);
    case PriorityRule::Tetris: {
      EventSimulator fresh(inst);
      const EventSimulator& st = state ? *state : fresh;
      for (TaskIndex v = 0; v < n; ++v) {
        auto c = select_pool(inst, v, pool_rule, st);
        out[v] = c ? tetris_score(inst.task(v).demand, inst.pool(*c).capacity, st.available(*c))
                   : -std::numeric_limits<double>::infinity();
      }
      return out;
    }
  }
  return out;
}

/// List-scheduling baseline: among tasks that can start now, the one with the
/// highest priority (lowest id on ties) starts on the pool chosen by the pool
/// rule.
inline Schedule run_list_heuristic(const Instance& inst, PriorityRule prule, PoolRule poolrule) {
  const bool dynamic = prule == PriorityRule::Tetris;
  const auto fixed = dynamic ? std::vector<double>{} : priority(inst, prule);
  auto [x, rollout] = list_schedule_with(inst, [&](const EventSimulator& sim,
                                                   const std::vector<Action>& acts) {
    std::optional<TaskIndex> best;
    double best_p = -std::numeric_limits<double>::infinity();
    PoolIndex best_pool = 0;
    std::optional<TaskIndex> last;
    for (const auto& a : acts) {
      if (last && *last == a.task) continue;
      last = a.task;
      const auto c = select_pool(inst, a.task, poolrule, sim);
      if (!c) continue;
      const double p = dynamic ? tetris_score(inst.task(a.task).demand, inst.pool(*c).capacity,
                                              sim.available(*c))
                               : fixed[a.task];
      if (!best || p > best_p || (p == best_p && inst.task(a.task).id < inst.task(*best).id)) {
        best = a.task;
        best_p = p;
        best_pool = *c;
      }
    }
    return Action{*best, best_pool};
  });
  return x;
}

// ---------------------------------------------------------------------------
// Insertion (timeline) heuristics

namespace detail {

struct Placement {
  double start;
  double end;
  const ResourceVector* demand;
};

// Earliest start >= ready at which `demand` fits pool capacity for the whole
// interval [start, start + duration).
inline double earliest_fit(const std::vector<Placement>& placed, const ResourceVector& capacity,
                           const ResourceVector& demand, double ready, double duration) {
  std::vector<double> candidates{ready};
  for (const auto& p : placed)
    if (p.end > ready) candidates.push_back(p.end);
  std::sort(candidates.begin(), candidates.end());
  candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());
  auto fits_at = [&](double tau) {
    ResourceVector used(capacity.size(), 0.0);
    for (const auto& p : placed)
      if (p.start <= tau && tau < p.end)
        for (std::size_t k = 0; k < used.size(); ++k) used[k] += (*p.demand)[k];
    for (std::size_t k = 0; k < used.size(); ++k) used[k] += demand[k];
    return fits(used, capacity);
  };
  for (double s : candidates) {
    const double e = s + duration;
    bool ok = fits_at(s);
    for (std::size_t i = 0; ok && i < placed.size(); ++i)
      if (placed[i].start > s && placed[i].start < e) ok = fits_at(placed[i].start);
    if (ok) return s;
  }
  return candidates.back();
}

}  // namespace detail

/// Optimistic cost table without communication: the cheapest remaining chain
/// below v, which is the same for every pool v could run on.
inline std::vector<std::vector<double>> optimistic_cost_table(const Instance& inst) {
  const auto topo = topological_order(inst);
  if (!topo) throw DomainError(ErrorKind::InvalidInstance, "task graph has a cycle");
  const std::size_t m = inst.num_pools();
  std::vector<std::vector<double>> oct(inst.num_tasks(), std::vector<double>(m, 0.0));
  for (auto it = topo->rbegin(); it != topo->rend(); ++it) {
    const TaskIndex v = *it;
    double worst = 0.0;
    for (TaskIndex w : inst.succs(v)) {
      double best = std::numeric_limits<double>::infinity();
      for (PoolIndex c = 0; c < m; ++c)
        if (inst.is_action(w, c)) best = std::min(best, oct[w][c] + inst.actual_time(w, c));
      worst = std::max(worst, best);
    }
    for (PoolIndex c = 0; c < m; ++c) oct[v][c] = worst;
  }
  return oct;
}

/// Predict cost matrix without communication. Sinks cost their own actual
/// time; otherwise the worst successor of the cheapest (successor chain + own
/// time) choice, with v's own time taken on the successor's pool when v can
/// run there and on c otherwise.
inline std::vector<std::vector<double>> predict_cost_matrix(const Instance& inst) {
  const auto topo = topological_order(inst);
  if (!topo) throw DomainError(ErrorKind::InvalidInstance, "task graph has a cycle");
  const std::size_t m = inst.num_pools();
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<std::vector<double>> pcm(inst.num_tasks(), std::vector<double>(m, inf));
  for (auto it = topo->rbegin(); it != topo->rend(); ++it) {
    const TaskIndex v = *it;
    for (PoolIndex c = 0; c < m; ++c) {
      if (!inst.is_action(v, c)) continue;
      if (inst.succs(v).empty()) {
        pcm[v][c] = inst.actual_time(v, c);
        continue;
      }
      double worst = 0.0;
      for (TaskIndex w : inst.succs(v)) {
        double best = inf;
        for (PoolIndex d = 0; d < m; ++d) {
          if (!inst.is_action(w, d)) continue;
          const double own = inst.is_action(v, d) ? inst.actual_time(v, d) : inst.actual_time(v, c);
          best = std::min(best, pcm[w][d] + inst.actual_time(w, d) + own);
        }
        worst = std::max(worst, best);
      }
      pcm[v][c] = worst;
    }
  }
  return pcm;
}

inline std::vector<double> insertion_priority(const Instance& inst, InsertionVariant variant) {
  const std::size_t n = inst.num_tasks();
  auto mean_over_actions = [&](const std::vector<std::vector<double>>& table, TaskIndex v) {
    double s = 0.0;
    std::size_t k = 0;
    for (PoolIndex c = 0; c < inst.num_pools(); ++c)
      if (inst.is_action(v, c)) {
        s += table[v][c];
        ++k;
      }
    return k ? s / static_cast<double>(k) : 0.0;
  };
  std::vector<double> out(n, 0.0);
  switch (variant) {
    case InsertionVariant::HEFT: return critical_path_lengths(inst);
    case InsertionVariant::PEFT: {
      const auto oct = optimistic_cost_table(inst);
      for (TaskIndex v = 0; v < n; ++v) out[v] = mean_over_actions(oct, v);
      return out;
    }
    case InsertionVariant::IPPTS: {
      const auto pcm = predict_cost_matrix(inst);
      for (TaskIndex v = 0; v < n; ++v)
        out[v] = mean_over_actions(pcm, v) * static_cast<double>(inst.succs(v).size());
      return out;
    }
  }
  return out;
}

/// Timeline-insertion baselines. Tasks whose predecessors are all placed are
/// taken by nonincreasing priority (lowest id on ties) and inserted at the
/// earliest start, at or after their dependency-ready time, where the demand
/// fits the pool's usage profile for the whole duration. HEFT picks the pool
/// with the earliest finish, PEFT adds the optimistic cost, IPPTS adds the
/// look-ahead term PCM(v,c) - t_act(v,c).
inline Schedule run_insertion_heuristic(const Instance& inst, InsertionVariant variant) {
  const std::size_t n = inst.num_tasks();
  const std::size_t m = inst.num_pools();
  const auto prio = insertion_priority(inst, variant);
  const auto oct = variant == InsertionVariant::PEFT ? optimistic_cost_table(inst)
                                                     : std::vector<std::vector<double>>{};
  const auto pcm = variant == InsertionVariant::IPPTS ? predict_cost_matrix(inst)
                                                      : std::vector<std::vector<double>>{};
  Schedule x{std::vector<double>(n, 0.0), std::vector<PoolIndex>(n, 0), {}};
  std::vector<double> end(n, 0.0);
  std::vector<std::size_t> missing(n);
  std::vector<bool> placed(n, false);
  for (TaskIndex v = 0; v < n; ++v) missing[v] = inst.preds(v).size();
  std::vector<std::vector<detail::Placement>> timeline(m);

  for (std::size_t step = 0; step < n; ++step) {
    std::optional<TaskIndex> pick;
    for (TaskIndex v = 0; v < n; ++v) {
      if (placed[v] || missing[v] != 0) continue;
      if (!pick || prio[v] > prio[*pick] ||
          (prio[v] == prio[*pick] && inst.task(v).id < inst.task(*pick).id))
        pick = v;
    }
    if (!pick) throw DomainError(ErrorKind::InvalidInstance, "task graph has a cycle");
    const TaskIndex v = *pick;
    double ready = 0.0;
    for (TaskIndex u : inst.preds(v)) ready = std::max(ready, end[u]);

    std::optional<PoolIndex> best_pool;
    double best_key = 0.0, best_start = 0.0;
    for (PoolIndex c = 0; c < m; ++c) {
      if (!inst.is_action(v, c)) continue;
      const double dur = inst.actual_time(v, c);
      const double s = detail::earliest_fit(timeline[c], inst.pool(c).capacity, inst.task(v).demand,
                                            ready, dur);
      double key = s + dur;
      if (variant == InsertionVariant::PEFT) key += oct[v][c];
      if (variant == InsertionVariant::IPPTS) key += pcm[v][c] - dur;
      if (!best_pool || key < best_key ||
          (key == best_key && inst.pool(c).id < inst.pool(*best_pool).id)) {
        best_pool = c;
        best_key = key;
        best_start = s;
      }
    }
    if (!best_pool) throw DomainError(ErrorKind::InvalidInstance, "task has an empty action set");
    const PoolIndex c = *best_pool;
    x.start[v] = best_start;
    x.pool[v] = c;
    end[v] = best_start + inst.actual_time(v, c);
    timeline[c].push_back({best_start, end[v], &inst.task(v).demand});
    placed[v] = true;
    x.dispatch_order.push_back(v);
    for (TaskIndex w : inst.succs(v)) --missing[w];
  }
  return x;
}

inline std::string to_string(PriorityRule r) {
  switch (r) {
    case PriorityRule::SFT: return "sft";
    case PriorityRule::MOPNR: return "mopnr";
    case PriorityRule::CP: return "cp";
    case PriorityRule::Tetris: return "tetris";
  }
  return "?";
}

inline std::string to_string(PoolRule r) {
  switch (r) {
    case PoolRule::EFT: return "eft";
    case PoolRule::TetrisScore: return "tetris";
    case PoolRule::Balance: return "balance";
  }
  return "?";
}

inline std::string to_string(InsertionVariant v) {
  switch (v) {
    case InsertionVariant::HEFT: return "heft";
    case InsertionVariant::PEFT: return "peft";
    case InsertionVariant::IPPTS: return "ippts";
  }
  return "?";
}

inline std::optional<PriorityRule> parse_priority_rule(const std::string& s) {
  if (s == "sft") return PriorityRule::SFT;
  if (s == "mopnr") return PriorityRule::MOPNR;
  if (s == "cp") return PriorityRule::CP;
  if (s == "tetris") return PriorityRule::Tetris;
  return std::nullopt;
}

inline std::optional<PoolRule> parse_pool_rule(const std::string& s) {
  if (s == "eft") return PoolRule::EFT;
  if (s == "tetris") return PoolRule::TetrisScore;
  if (s == "balance") return PoolRule::Balance;
  return std::nullopt;
}

inline std::optional<InsertionVariant> parse_insertion_variant(const std::string& s) {
  if (s == "heft") return InsertionVariant::HEFT;
  if (s == "peft") return InsertionVariant::PEFT;
  if (s == "ippts") return InsertionVariant::IPPTS;
  return std::nullopt;
}

}  // namespace hetsched
