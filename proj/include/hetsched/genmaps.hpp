#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <limits>
#include <optional>
#include <random>
#include <set>
#include <span>
#include <utility>
#include <variant>
#include <vector>

#include "hetsched/model.hpp"
#include "hetsched/orderspace.hpp"
#include "hetsched/simulator.hpp"

namespace hetsched {

// ---------------------------------------------------------------------------
// Rollouts

struct Dispatch {
  TaskIndex task = 0;
  PoolIndex pool = 0;
  friend bool operator==(const Dispatch&, const Dispatch&) = default;
};

struct Skip {
  friend bool operator==(const Skip&, const Skip&) = default;
};

using Step = std::variant<Dispatch, Skip>;

/// Extended action sequence: dispatches interleaved with skips.
struct Rollout {
  std::vector<Step> steps;

  std::size_t dispatch_count() const {
    return static_cast<std::size_t>(std::count_if(
        steps.begin(), steps.end(), [](const Step& s) { return std::holds_alternative<Dispatch>(s); }));
  }
  std::size_t skip_count() const { return steps.size() - dispatch_count(); }

  friend bool operator==(const Rollout&, const Rollout&) = default;
};

// ---------------------------------------------------------------------------
// Scores and policy

struct SkipParams {
  double alpha = 1.0;
  double beta = 1.0;
  double gamma = 1.0;
};

enum class SkipRule { Decreasing, Constant };

/// Skip score after k decisions on an n-task instance:
/// log(alpha * exp(-gamma * k / (2n)) + beta). Strictly decreasing in k.
inline double skip_score(const SkipParams& p, std::size_t k, std::size_t n) {
  return std::log(p.alpha * std::exp(-p.gamma * static_cast<double>(k) / (2.0 * static_cast<double>(n))) +
                  p.beta);
}

/// Static task-pool scores plus skip parameters.
class ScoreTable {
 public:
  ScoreTable() = default;
  ScoreTable(std::size_t tasks, std::size_t pools, double fill = 0.0)
      : pools_(pools), scores_(tasks * pools, fill) {}

  double score(TaskIndex v, PoolIndex c) const { return scores_.at(v * pools_ + c); }
  void set(TaskIndex v, PoolIndex c, double u) { scores_.at(v * pools_ + c) = u; }
  std::size_t num_tasks() const { return pools_ == 0 ? 0 : scores_.size() / pools_; }
  std::size_t num_pools() const { return pools_; }

  SkipParams skip;
  SkipRule skip_rule = SkipRule::Decreasing;

  double skip_score_at(std::size_t k, std::size_t n) const {
    if (skip_rule == SkipRule::Constant) return std::log(skip.beta);
    return hetsched::skip_score(skip, k, n);
  }

 private:
  std::size_t pools_ = 0;
  std::vector<double> scores_;
};

/// Masked softmax: p(a) = exp(u_a + M_a) / sum exp(u + M), with masks in
/// {0, -inf}. Masked entries get exactly 0.
inline std::vector<double> action_distribution(std::span<const double> scores,
                                               std::span<const double> masks) {
  double hi = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < scores.size(); ++i)
    if (masks[i] == 0.0) hi = std::max(hi, scores[i]);
  if (hi == -std::numeric_limits<double>::infinity())
    throw DomainError(ErrorKind::AllMasked, "every action is masked");
  std::vector<double> p(scores.size(), 0.0);
  double z = 0.0;
  for (std::size_t i = 0; i < scores.size(); ++i)
    if (masks[i] == 0.0) z += (p[i] = std::exp(scores[i] - hi));
  for (double& x : p) x /= z;
  return p;
}

enum class PolicyMode { Greedy, Sampling };

struct PolicyConfig {
  PolicyMode mode = PolicyMode::Greedy;
  std::uint64_t seed = 0;
};

namespace detail {

inline double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline bool id_less(const Instance& inst, const Action& a, const Action& b) {
  const auto ka = std::make_pair(inst.task(a.task).id, inst.pool(a.pool).id);
  const auto kb = std::make_pair(inst.task(b.task).id, inst.pool(b.pool).id);
  return ka < kb;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// List scheduling

/// Classic list scheduling: at each decision point `choose` picks one of the
/// unmasked actions (given in (task, pool) index order); time advances only
/// when nothing is eligible. The rollout records the dispatches.
template <class Chooser>
std::pair<Schedule, Rollout> list_schedule_with(const Instance& inst, Chooser&& choose) {
  EventSimulator sim(inst);
  Rollout rollout;
  while (!sim.done()) {
    auto acts = sim.unmasked_actions();
    if (acts.empty()) {
      if (!sim.advance())
        throw DomainError(ErrorKind::Deadlock, "no eligible action and nothing running");
      continue;
    }
    const Action a = choose(sim, std::as_const(acts));
    sim.dispatch(a.task, a.pool);
    rollout.steps.push_back(Dispatch{a.task, a.pool});
  }
  return {sim.schedule(), std::move(rollout)};
}

/// Priority form: highest score wins; ties go to the lowest (task id, pool id).
inline std::pair<Schedule, Rollout> list_schedule(const Instance& inst, const ScoreTable& table) {
  return list_schedule_with(inst, [&](const EventSimulator&, const std::vector<Action>& acts) {
    Action best = acts.front();
    for (const auto& a : acts) {
      const double ua = table.score(a.task, a.pool), ub = table.score(best.task, best.pool);
      if (ua > ub || (ua == ub && detail::id_less(inst, a, best))) best = a;
    }
    return best;
  });
}

/// Sequence form: the earliest unmasked action of the sequence wins.
inline std::pair<Schedule, Rollout> list_schedule(const Instance& inst, const ActionSequence& seq) {
  {
    std::vector<bool> seen(inst.num_tasks(), false);
    for (const auto& a : seq) {
      if (a.task >= inst.num_tasks() || seen[a.task] || a.pool >= inst.num_pools() ||
          !inst.is_action(a.task, a.pool))
        throw DomainError(ErrorKind::IncompleteSequence, "invalid action sequence");
      seen[a.task] = true;
    }
    if (seq.size() != inst.num_tasks())
      throw DomainError(ErrorKind::IncompleteSequence, "sequence does not cover every task");
  }
  return list_schedule_with(inst, [&](const EventSimulator& sim, const std::vector<Action>&) {
    for (const auto& a : seq)
      if (sim.can_dispatch(a.task, a.pool)) return a;
    throw DomainError(ErrorKind::Deadlock, "no sequence action is eligible");
  });
}

// ---------------------------------------------------------------------------
// Serial schedule generation scheme

/// Order-preserving realization: each task, taken from the ready set of G_w
/// (smallest index first), starts at the earliest time no earlier than its
/// pool cursor and its dependency time at which its demand fits the pool.
/// The result projects back onto w and is makespan-minimal within w's fiber.
inline Schedule sgs(const Instance& inst, const ScheduleOrder& w) {
  if (!is_feasible_order(inst, w))
    throw DomainError(ErrorKind::InfeasibleOrder, "order is not feasible");
  const std::size_t n = inst.num_tasks();
  const std::size_t m = inst.num_pools();
  const auto seqs = pool_sequences(inst, w);

  std::vector<std::size_t> indeg(n, 0);
  std::vector<TaskIndex> chain_next(n, n);
  for (TaskIndex v = 0; v < n; ++v) indeg[v] = inst.preds(v).size();
  for (const auto& s : seqs)
    for (std::size_t i = 0; i + 1 < s.size(); ++i) {
      chain_next[s[i]] = s[i + 1];
      ++indeg[s[i + 1]];
    }

  std::set<TaskIndex> ready;
  for (TaskIndex v = 0; v < n; ++v)
    if (indeg[v] == 0) ready.insert(v);

  Schedule x{std::vector<double>(n, 0.0), w.pool, {}};
  std::vector<double> t_end(n, 0.0), t_dep(n, 0.0), cursor(m, 0.0);
  std::vector<std::vector<TaskIndex>> on_pool(m);

  // Remaining capacity of pool c at time tau among tasks already placed there.
  auto available_at = [&](PoolIndex c, double tau) {
    ResourceVector avail = inst.pool(c).capacity;
    for (TaskIndex u : on_pool[c])
      if (x.start[u] <= tau && tau < t_end[u])
        for (std::size_t k = 0; k < avail.size(); ++k) avail[k] -= inst.task(u).demand[k];
    return avail;
  };

  while (!ready.empty()) {
    const TaskIndex v = *ready.begin();
    ready.erase(ready.begin());
    const PoolIndex c = w.pool[v];
    double tau = std::max(cursor[c], t_dep[v]);
    while (!fits(inst.task(v).demand, available_at(c, tau))) {
      double next = std::numeric_limits<double>::infinity();
      for (TaskIndex u : on_pool[c])
        if (x.start[u] <= tau && tau < t_end[u]) next = std::min(next, t_end[u]);
      tau = next;
    }
    x.start[v] = tau;
    t_end[v] = tau + inst.actual_time(v, c);
    cursor[c] = tau;
    on_pool[c].push_back(v);
    x.dispatch_order.push_back(v);

    auto release = [&](TaskIndex u) {
      if (--indeg[u] == 0) ready.insert(u);
    };
    for (TaskIndex u : inst.succs(v)) {
      t_dep[u] = std::max(t_dep[u], t_end[v]);
      release(u);
    }
    if (chain_next[v] < n) release(chain_next[v]);
  }
  return x;
}

// ---------------------------------------------------------------------------
// Skip-extended rollout

/// Score-driven scheduling with an explicit skip action. Feasibility masks
/// apply to task-pool actions; skip is masked iff nothing is running. Greedy
/// takes the argmax (lowest (task id, pool id) on ties, skip loses ties);
/// Sampling draws from the masked softmax with a rollout-local generator.
inline std::pair<Schedule, Rollout> rollout_skip_extended(const Instance& inst,
                                                          const ScoreTable& table,
                                                          const PolicyConfig& cfg) {
  const std::size_t n = inst.num_tasks();
  EventSimulator sim(inst);
  Rollout rollout;
  std::mt19937_64 rng(cfg.seed);
  std::vector<double> scores, masks;
  while (!sim.done()) {
    const auto acts = sim.unmasked_actions();
    const bool skip_open = sim.any_running();
    const double u_skip = table.skip_score_at(rollout.steps.size(), n);

    std::optional<Action> pick;
    bool take_skip = false;
    if (cfg.mode == PolicyMode::Greedy) {
      for (const auto& a : acts) {
        if (!pick) {
          pick = a;
          continue;
        }
        const double ua = table.score(a.task, a.pool), ub = table.score(pick->task, pick->pool);
        if (ua > ub || (ua == ub && detail::id_less(inst, a, *pick))) pick = a;
      }
      take_skip = skip_open && (!pick || u_skip > table.score(pick->task, pick->pool));
    } else {
      scores.clear();
      masks.clear();
      for (const auto& a : acts) {
        scores.push_back(table.score(a.task, a.pool));
        masks.push_back(0.0);
      }
      scores.push_back(u_skip);
      masks.push_back(skip_open ? 0.0 : -std::numeric_limits<double>::infinity());
      const auto p = action_distribution(scores, masks);
      const double draw = detail::uniform01(rng);
      double acc = 0.0;
      std::size_t chosen = p.size();
      for (std::size_t i = 0; i < p.size(); ++i) {
        if (p[i] == 0.0) continue;
        acc += p[i];
        chosen = i;
        if (draw < acc) break;
      }
      if (chosen == acts.size()) take_skip = true;
      else pick = acts[chosen];
    }

    if (take_skip) {
      sim.advance();
      rollout.steps.push_back(Skip{});
    } else {
      if (!pick) throw DomainError(ErrorKind::Deadlock, "no eligible action and nothing running");
      sim.dispatch(pick->task, pick->pool);
      rollout.steps.push_back(Dispatch{pick->task, pick->pool});
    }
  }
  return {sim.schedule(), std::move(rollout)};
}

/// Induced skip-extended generation map: repeatedly consumes the
/// smallest-index entry of the rollout that is unmasked at the current state
/// (a skip entry is unmasked iff some task is running). When no remaining
/// entry is unmasked, time advances without consuming an entry.
inline Schedule realize(const Instance& inst, const Rollout& rollout) {
  const std::size_t n = inst.num_tasks();
  {
    std::vector<bool> seen(n, false);
    for (const auto& s : rollout.steps) {
      if (const auto* d = std::get_if<Dispatch>(&s)) {
        if (d->task >= n || d->pool >= inst.num_pools() || seen[d->task] ||
            !inst.is_action(d->task, d->pool))
          throw DomainError(ErrorKind::MalformedRollout, "invalid or repeated dispatch in rollout");
        seen[d->task] = true;
      }
    }
    if (rollout.dispatch_count() != n)
      throw DomainError(ErrorKind::MalformedRollout, "rollout must dispatch every task once");
  }
  EventSimulator sim(inst);
  std::vector<bool> used(rollout.steps.size(), false);
  while (!sim.done()) {
    std::optional<std::size_t> pick;
    for (std::size_t i = 0; i < rollout.steps.size() && !pick; ++i) {
      if (used[i]) continue;
      const auto& s = rollout.steps[i];
      if (const auto* d = std::get_if<Dispatch>(&s)) {
        if (sim.can_dispatch(d->task, d->pool)) pick = i;
      } else if (sim.any_running()) {
        pick = i;
      }
    }
    if (!pick) {
      if (!sim.advance())
        throw DomainError(ErrorKind::MalformedRollout, "rollout cannot make progress");
      continue;
    }
    used[*pick] = true;
    if (const auto* d = std::get_if<Dispatch>(&rollout.steps[*pick])) sim.dispatch(d->task, d->pool);
    else sim.advance();
  }
  return sim.schedule();
}

/// Rollout that realizes a schedule whose start times are all event times of
/// the schedule itself (as produced by sgs): tasks are dispatched in
/// (start, recorded dispatch order) order and a skip is taken whenever the
/// next start lies in the future.
inline Rollout rollout_from_schedule(const Instance& inst, const Schedule& x) {
  const std::size_t n = inst.num_tasks();
  std::vector<std::size_t> pos(n, n);
  if (x.dispatch_order.size() == n)
    for (std::size_t i = 0; i < n; ++i) pos[x.dispatch_order[i]] = i;
  std::vector<TaskIndex> trace(n);
  std::iota(trace.begin(), trace.end(), TaskIndex{0});
  std::stable_sort(trace.begin(), trace.end(), [&](TaskIndex a, TaskIndex b) {
    if (x.start[a] != x.start[b]) return x.start[a] < x.start[b];
    return pos[a] < pos[b];
  });
  EventSimulator sim(inst);
  Rollout out;
  for (TaskIndex v : trace) {
    while (sim.now() < x.start[v]) {
      if (!sim.advance() || sim.now() > x.start[v])
        throw DomainError(ErrorKind::InfeasibleTarget,
                          "start of task " + std::to_string(inst.task(v).id) +
                              " is not an event time");
      out.steps.push_back(Skip{});
    }
    if (!sim.can_dispatch(v, x.pool[v]))
      throw DomainError(ErrorKind::InfeasibleTarget,
                        "task " + std::to_string(inst.task(v).id) + " is masked at its start");
    sim.dispatch(v, x.pool[v]);
    out.steps.push_back(Dispatch{v, x.pool[v]});
  }
  return out;
}

/// Static scores under which the Greedy skip-extended rollout reproduces
/// `target` step for step: with a strictly decreasing skip score u_skip(k),
/// Delta the smallest consecutive drop over the target's steps and
/// eps = Delta / 4, the dispatch at step k gets u_skip(k) + 2 eps and every
/// pair never dispatched in the target gets u_skip(N-1) - 2 eps.
inline ScoreTable construct_optimal_scores(const Instance& inst, const Rollout& target,
                                           SkipParams psi = {1.0, 1.0, 1.0}) {
  const std::size_t n = inst.num_tasks();
  {
    EventSimulator sim(inst);
    for (const auto& s : target.steps) {
      if (const auto* d = std::get_if<Dispatch>(&s)) {
        if (d->task >= n || d->pool >= inst.num_pools() || !sim.can_dispatch(d->task, d->pool))
          throw DomainError(ErrorKind::InfeasibleTarget, "target dispatch is masked at its step");
        sim.dispatch(d->task, d->pool);
      } else if (!sim.advance()) {
        throw DomainError(ErrorKind::InfeasibleTarget, "target skip is masked at its step");
      }
    }
    if (!sim.done()) throw DomainError(ErrorKind::InfeasibleTarget, "target leaves tasks undispatched");
  }
  const std::size_t steps = target.steps.size();
  double delta = 1.0;
  for (std::size_t k = 0; k + 1 < steps; ++k)
    delta = std::min(delta, skip_score(psi, k, n) - skip_score(psi, k + 1, n));
  if (!(delta > 0.0))
    throw DomainError(ErrorKind::InfeasibleTarget, "skip score is not strictly decreasing");
  const double eps = delta / 4.0;

  ScoreTable table(n, inst.num_pools(), skip_score(psi, steps - 1, n) - 2.0 * eps);
  table.skip = psi;
  for (std::size_t k = 0; k < steps; ++k)
    if (const auto* d = std::get_if<Dispatch>(&target.steps[k]))
      table.set(d->task, d->pool, skip_score(psi, k, n) + 2.0 * eps);
  return table;
}

// ---------------------------------------------------------------------------
// Reachable sets

enum class MapKind { List, SkipExtended };

namespace detail {
struct ScheduleLess {
  bool operator()(const Schedule& a, const Schedule& b) const {
    if (a.start != b.start) return a.start < b.start;
    return a.pool < b.pool;
  }
};
}  // namespace detail

using ScheduleSet = std::set<Schedule, detail::ScheduleLess>;

/// Every schedule the selected generator can output, by exhaustive search over
/// all unmasked choices at every decision point (memoized on the state).
inline ScheduleSet enumerate_reachable(const Instance& inst, MapKind kind,
                                       const EnumerationLimits& lim = {}) {
  check_enumeration_cap(inst, lim);
  ScheduleSet out;
  std::set<std::vector<double>> visited;
  std::function<void(const EventSimulator&)> explore = [&](const EventSimulator& sim) {
    if (sim.done()) {
      auto x = sim.schedule();
      x.dispatch_order.clear();
      out.insert(std::move(x));
      return;
    }
    if (!visited.insert(sim.state_key()).second) return;
    const auto acts = sim.unmasked_actions();
    for (const auto& a : acts) {
      EventSimulator next = sim;
      next.dispatch(a.task, a.pool);
      explore(next);
    }
    const bool skip_branch = kind == MapKind::SkipExtended || acts.empty();
    if (skip_branch && sim.any_running()) {
      EventSimulator next = sim;
      next.advance();
      explore(next);
    }
  };
  explore(EventSimulator(inst));
  return out;
}

}  // namespace hetsched
