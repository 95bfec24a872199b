#pragma once

#include <algorithm>
#include <deque>
#include <limits>
#include <map>
#include <vector>

#include "hetsched/genmaps.hpp"
#include "hetsched/model.hpp"
#include "hetsched/orderspace.hpp"

namespace hetsched {

/// Makespans closer than this are treated as equal by the search routines.
inline constexpr double kMakespanTolerance = 1e-12;

struct OracleResult {
  Schedule schedule;
  double makespan = 0.0;
  ScheduleOrder order;
};

/// Exact optimum: the best SGS schedule over every feasible order. The first
/// minimizer in enumeration order is returned.
inline OracleResult brute_force_optimum(const Instance& inst, const EnumerationLimits& lim = {}) {
  OracleResult best;
  best.makespan = std::numeric_limits<double>::infinity();
  for_each_order(
      inst, OrderFilter::Feasible,
      [&](const ScheduleOrder& w) {
        Schedule x = sgs(inst, w);
        const double f = makespan(inst, x);
        if (f < best.makespan) best = {std::move(x), f, w};
      },
      lim);
  return best;
}

enum class GapMap { List, SkipExtended, SGS };

/// Best makespan reachable by the map minus the global optimum.
inline double optimality_gap(const Instance& inst, GapMap map, const EnumerationLimits& lim = {}) {
  const double opt = brute_force_optimum(inst, lim).makespan;
  double best = std::numeric_limits<double>::infinity();
  if (map == GapMap::SGS) {
    for_each_order(
        inst, OrderFilter::Feasible,
        [&](const ScheduleOrder& w) { best = std::min(best, makespan(inst, sgs(inst, w))); }, lim);
  } else {
    const auto kind = map == GapMap::List ? MapKind::List : MapKind::SkipExtended;
    for (const auto& x : enumerate_reachable(inst, kind, lim)) best = std::min(best, makespan(inst, x));
  }
  return best - opt;
}

struct StepResult {
  ScheduleOrder order;
  double makespan = 0.0;
};

/// One best-improvement move over the insertion neighbourhood, evaluated with
/// SGS. w is kept unless a neighbour is strictly better; among equally good
/// neighbours the lexicographically smallest order wins.
inline StepResult local_search_step(const Instance& inst, const ScheduleOrder& w) {
  StepResult best{w, makespan(inst, sgs(inst, w))};
  const double base = best.makespan;
  bool improved = false;
  for (const auto& nb : insertion_neighbors(inst, w)) {
    const double f = makespan(inst, sgs(inst, nb));
    if (f < base - kMakespanTolerance &&
        (!improved || f < best.makespan - kMakespanTolerance ||
         (f <= best.makespan + kMakespanTolerance && nb < best.order))) {
      best = {nb, f};
      improved = true;
    }
  }
  return best;
}

struct LocalSearchResult {
  Schedule schedule;
  double makespan = 0.0;
  std::size_t steps = 0;
};

/// Repeated local_search_step from project(x0) until a fixed point or
/// max_steps moves. Returns the better of the final SGS schedule and x0.
inline LocalSearchResult local_search(const Instance& inst, const Schedule& x0, std::size_t max_steps) {
  if (!check_schedule(inst, x0).feasible())
    throw DomainError(ErrorKind::InfeasibleSchedule, "initial schedule is infeasible");
  ScheduleOrder w = project(inst, x0);
  std::size_t steps = 0;
  while (steps < max_steps) {
    auto next = local_search_step(inst, w);
    if (next.order == w) break;
    w = std::move(next.order);
    ++steps;
  }
  Schedule x = sgs(inst, w);
  const double f = makespan(inst, x);
  const double f0 = makespan(inst, x0);
  if (f0 <= f) return {x0, f0, steps};
  return {std::move(x), f, steps};
}

/// True when every feasible order reaches an optimal order by a directed
/// path of insertion moves.
inline bool insertion_connectivity(const Instance& inst, const EnumerationLimits& lim = {}) {
  const auto orders = enumerate_feasible_orders(inst, lim);
  if (orders.empty()) return true;
  std::map<ScheduleOrder, std::size_t> index;
  std::vector<double> value(orders.size());
  for (std::size_t i = 0; i < orders.size(); ++i) {
    index.emplace(orders[i], i);
    value[i] = makespan(inst, sgs(inst, orders[i]));
  }
  const double opt = *std::min_element(value.begin(), value.end());

  std::vector<std::vector<std::size_t>> reverse(orders.size());
  for (std::size_t i = 0; i < orders.size(); ++i)
    for (const auto& nb : insertion_neighbors(inst, orders[i])) reverse[index.at(nb)].push_back(i);

  std::vector<bool> reached(orders.size(), false);
  std::deque<std::size_t> queue;
  for (std::size_t i = 0; i < orders.size(); ++i)
    if (value[i] <= opt + kMakespanTolerance) {
      reached[i] = true;
      queue.push_back(i);
    }
  while (!queue.empty()) {
    const std::size_t i = queue.front();
    queue.pop_front();
    for (std::size_t j : reverse[i])
      if (!reached[j]) {
        reached[j] = true;
        queue.push_back(j);
      }
  }
  return std::all_of(reached.begin(), reached.end(), [](bool b) { return b; });
}

}  // namespace hetsched
