#pragma once

// Random instances and independent reference implementations used as test
// oracles. Nothing here calls into the order-space or generation-map code.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "hetsched/model.hpp"

namespace testsupport {

using namespace hetsched;

struct RandomSpec {
  std::size_t min_tasks = 1;
  std::size_t max_tasks = 6;
  std::size_t max_pools = 2;
  double edge_prob = 0.3;
};

inline std::size_t pick(std::mt19937_64& rng, std::size_t lo, std::size_t hi) {
  return lo + static_cast<std::size_t>(rng() % (hi - lo + 1));
}

/// Integer durations, coefficients from {0, 1/2, 1, 2} so every actual time
/// and every sum of them is exact in binary floating point. Task ids are
/// scattered and shuffled; the edge orientation follows a random permutation
/// rather than storage order.
inline Instance random_instance(std::uint64_t seed, const RandomSpec& spec = {}) {
  std::mt19937_64 rng(seed);
  const std::size_t n = pick(rng, spec.min_tasks, spec.max_tasks);
  const std::size_t m = pick(rng, 1, spec.max_pools);
  const std::size_t r = pick(rng, 1, 2);

  std::vector<Pool> pools;
  for (std::size_t k = 0; k < m; ++k) {
    Pool p{static_cast<PoolId>(100 + 7 * k), {}, static_cast<int>(k % 2)};
    for (std::size_t l = 0; l < r; ++l) p.capacity.push_back(static_cast<double>(pick(rng, 2, 4)));
    pools.push_back(std::move(p));
  }
  std::vector<TaskId> ids(n);
  for (std::size_t i = 0; i < n; ++i) ids[i] = static_cast<TaskId>(3 * i + 2);
  std::shuffle(ids.begin(), ids.end(), rng);

  const double coeffs[] = {0.0, 0.5, 1.0, 2.0};
  std::vector<Task> tasks;
  CompatTable compat;
  for (std::size_t i = 0; i < n; ++i) {
    Task t{ids[i], static_cast<double>(pick(rng, 1, 4)), {}, 0};
    // Demand fits the home pool; the others may or may not.
    const std::size_t home = pick(rng, 0, m - 1);
    for (std::size_t l = 0; l < r; ++l)
      t.demand.push_back(static_cast<double>(pick(rng, 0, static_cast<std::size_t>(pools[home].capacity[l]))));
    for (std::size_t k = 0; k < m; ++k) {
      double kk = coeffs[pick(rng, 0, 3)];
      if (k == home && kk == 0.0) kk = 1.0;
      compat.overrides[{t.id, pools[k].id}] = kk;
    }
    tasks.push_back(std::move(t));
  }
  std::vector<std::size_t> topo(n);
  std::iota(topo.begin(), topo.end(), std::size_t{0});
  std::shuffle(topo.begin(), topo.end(), rng);
  std::vector<std::pair<TaskId, TaskId>> edges;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = a + 1; b < n; ++b)
      if (unit(rng) < spec.edge_prob) edges.emplace_back(tasks[topo[a]].id, tasks[topo[b]].id);
  return Instance(std::move(tasks), std::move(pools), std::move(edges), std::move(compat), r);
}

/// Number of linear extensions of the precedence relation (subset DP).
inline std::uint64_t count_linear_extensions(const Instance& inst) {
  const std::size_t n = inst.num_tasks();
  std::vector<std::uint32_t> pred_mask(n, 0);
  for (const auto& [u, v] : inst.edges()) pred_mask[inst.task_index(v)] |= 1u << inst.task_index(u);
  std::vector<std::uint64_t> ways(std::size_t{1} << n, 0);
  ways[0] = 1;
  for (std::uint32_t s = 0; s < ways.size(); ++s) {
    if (!ways[s]) continue;
    for (std::size_t v = 0; v < n; ++v)
      if (!(s >> v & 1u) && (pred_mask[v] & s) == pred_mask[v]) ways[s | (1u << v)] += ways[s];
  }
  return ways.back();
}

/// Cycle check by Kahn's algorithm on an explicit edge list.
inline bool acyclic(std::size_t n, const std::vector<std::pair<std::size_t, std::size_t>>& edges) {
  std::vector<std::size_t> indeg(n, 0);
  std::vector<std::vector<std::size_t>> out(n);
  for (auto [u, v] : edges) {
    out[u].push_back(v);
    ++indeg[v];
  }
  std::vector<std::size_t> q;
  for (std::size_t v = 0; v < n; ++v)
    if (!indeg[v]) q.push_back(v);
  std::size_t seen = 0;
  while (!q.empty()) {
    auto u = q.back();
    q.pop_back();
    ++seen;
    for (auto v : out[u])
      if (--indeg[v] == 0) q.push_back(v);
  }
  return seen == n;
}

/// Earliest start >= ready on a pool so that demand fits over the whole
/// duration, given tasks already placed on that pool (start, end, demand).
struct Placed {
  double start, end;
  ResourceVector demand;
};

inline double earliest_start(const std::vector<Placed>& placed, const ResourceVector& cap,
                             const ResourceVector& demand, double ready, double dur) {
  std::vector<double> cands{ready};
  for (const auto& p : placed)
    if (p.end > ready) cands.push_back(p.end);
  std::sort(cands.begin(), cands.end());
  for (double s : cands) {
    // usage is piecewise constant; check at s and at every start inside (s, s+dur)
    std::vector<double> checks{s};
    for (const auto& p : placed)
      if (p.start > s && p.start < s + dur) checks.push_back(p.start);
    bool ok = true;
    for (double tau : checks) {
      for (std::size_t l = 0; l < cap.size() && ok; ++l) {
        double used = demand[l];
        for (const auto& p : placed)
          if (p.start <= tau && tau < p.end) used += p.demand[l];
        ok = used <= cap[l] + 1e-9;
      }
      if (!ok) break;
    }
    if (ok) return s;
  }
  return std::numeric_limits<double>::infinity();
}

/// Optimum by serial placement over every precedence-feasible task
/// permutation and every pool assignment (activity lists with modes).
inline double activity_list_optimum(const Instance& inst) {
  const std::size_t n = inst.num_tasks(), m = inst.num_pools();
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  double best = std::numeric_limits<double>::infinity();
  std::vector<std::size_t> assign(n, 0);
  do {
    std::vector<std::size_t> pos(n);
    for (std::size_t i = 0; i < n; ++i) pos[perm[i]] = i;
    bool ok = true;
    for (std::size_t v = 0; v < n && ok; ++v)
      for (auto w : inst.succs(v)) ok = ok && pos[v] < pos[w];
    if (!ok) continue;
    std::function<void(std::size_t)> rec = [&](std::size_t i) {
      if (i == n) {
        std::vector<std::vector<Placed>> placed(m);
        std::vector<double> end(n, 0.0);
        double f = 0.0;
        for (std::size_t v : perm) {
          double ready = 0.0;
          for (auto u : inst.preds(v)) ready = std::max(ready, end[u]);
          const std::size_t c = assign[v];
          const double dur = inst.task(v).base_time / inst.coefficient(v, c);
          const double s = earliest_start(placed[c], inst.pool(c).capacity, inst.task(v).demand, ready, dur);
          end[v] = s + dur;
          placed[c].push_back({s, end[v], inst.task(v).demand});
          f = std::max(f, end[v]);
        }
        best = std::min(best, f);
        return;
      }
      const std::size_t v = perm[i];
      for (std::size_t c = 0; c < m; ++c) {
        if (inst.coefficient(v, c) <= 0.0) continue;
        bool fits_pool = true;
        for (std::size_t l = 0; l < inst.num_resources(); ++l)
          fits_pool = fits_pool && inst.task(v).demand[l] <= inst.pool(c).capacity[l];
        if (!fits_pool) continue;
        assign[v] = c;
        rec(i + 1);
      }
    };
    rec(0);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

/// Independent event sweep: usage per pool never exceeds capacity, every
/// edge is respected, every pair is compatible.
inline bool sweep_feasible(const Instance& inst, const std::vector<double>& start, const std::vector<std::size_t>& pool) {
  const std::size_t n = inst.num_tasks();
  std::vector<double> end(n);
  for (std::size_t v = 0; v < n; ++v) {
    const double k = inst.coefficient(v, pool[v]);
    if (!(k > 0.0) || start[v] < 0.0) return false;
    end[v] = start[v] + inst.task(v).base_time / k;
  }
  for (const auto& [a, b] : inst.edges())
    if (end[inst.task_index(a)] > start[inst.task_index(b)]) return false;
  std::set<double> events(start.begin(), start.end());
  for (std::size_t c = 0; c < inst.num_pools(); ++c)
    for (double tau : events)
      for (std::size_t l = 0; l < inst.num_resources(); ++l) {
        double used = 0.0;
        for (std::size_t v = 0; v < n; ++v)
          if (pool[v] == c && start[v] <= tau && tau < end[v]) used += inst.task(v).demand[l];
        if (used > inst.pool(c).capacity[l] + 1e-9) return false;
      }
  return true;
}

/// Normal density.
inline double normal_pdf(double x, double mu, double sd) {
  const double z = (x - mu) / sd;
  return std::exp(-0.5 * z * z) / (sd * std::sqrt(2.0 * std::acos(-1.0)));
}

/// Composite Simpson rule.
template <class F>
double simpson(F&& f, double a, double b, std::size_t intervals) {
  if (intervals % 2) ++intervals;
  const double h = (b - a) / static_cast<double>(intervals);
  double s = f(a) + f(b);
  for (std::size_t i = 1; i < intervals; ++i) s += f(a + h * static_cast<double>(i)) * (i % 2 ? 4.0 : 2.0);
  return s * h / 3.0;
}

/// E[max(m, 0)] for the equal-weight four-component mixture.
inline double clamped_gmm_mean() {
  const double mu[] = {0.5, 1.0, 3.0, 5.0};
  const double sd[] = {0.5, 1.0, 1.0, 1.0};
  auto integrand = [&](double x) {
    double p = 0.0;
    for (int c = 0; c < 4; ++c) p += 0.25 * normal_pdf(x, mu[c], sd[c]);
    return x * p;
  };
  return simpson(integrand, 0.0, 20.0, 20000);
}

}  // namespace testsupport
