#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <random>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "hetsched/model.hpp"

namespace hetsched {

using EdgeList = std::vector<std::pair<TaskId, TaskId>>;

struct LayeredParams {
  double sigma_n = 0.75;  // coefficient of variation of layer sizes
  double rho_e = 0.2;     // edge density between adjacent layers
  double rho_s = 0.14;    // edge density between layers two or more apart
};

struct ErdosRenyiParams {
  double p = 0.05;
};

struct StochasticBlockParams {
  double p_in = 0.3;
  double p_out = 0.005;
  std::size_t blocks = 4;
};

using DagKind = std::variant<LayeredParams, ErdosRenyiParams, StochasticBlockParams>;

namespace detail {

inline double draw_unit(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline void check_probability(double p, const char* name) {
  if (!(p >= 0.0 && p <= 1.0))
    throw DomainError(ErrorKind::ParameterRange, std::string(name) + " must lie in [0, 1]");
}

// Sizes of `layers` nonempty layers summing to n; relative sizes are drawn
// from a normal with mean 1 and standard deviation sigma, truncated at 0.05.
inline std::vector<std::size_t> layer_sizes(std::size_t n, std::size_t layers, double sigma,
                                            std::mt19937_64& rng) {
  std::normal_distribution<double> normal(1.0, sigma);
  std::vector<double> weight(layers);
  for (auto& w : weight) w = std::max(0.05, normal(rng));
  double total = 0.0;
  for (double w : weight) total += w;
  const std::size_t spare = n - layers;
  std::vector<std::size_t> size(layers, 1);
  std::vector<std::pair<double, std::size_t>> remainder;
  std::size_t used = 0;
  for (std::size_t l = 0; l < layers; ++l) {
    const double share = static_cast<double>(spare) * weight[l] / total;
    const auto whole = static_cast<std::size_t>(std::floor(share));
    size[l] += whole;
    used += whole;
    remainder.emplace_back(share - static_cast<double>(whole), l);
  }
  std::sort(remainder.begin(), remainder.end(),
            [](const auto& a, const auto& b) { return a.first != b.first ? a.first > b.first : a.second < b.second; });
  for (std::size_t i = 0; used < spare; ++i, ++used) ++size[remainder[i].second];
  return size;
}

}  // namespace detail

/// Random DAG on task ids 1..n. ER and SBM graphs are sampled undirected and
/// every edge is oriented from the lower to the higher id. SBM blocks are
/// contiguous id ranges. Layered graphs have ceil(sqrt(n)) layers; a node
/// without a predecessor from the previous layer gets one chosen uniformly.
inline EdgeList gen_dag(const DagKind& kind, std::size_t n, std::uint64_t seed) {
  if (n < 1) throw DomainError(ErrorKind::ParameterRange, "n must be at least 1");
  std::mt19937_64 rng(seed);
  EdgeList edges;
  const auto id = [](std::size_t i) { return static_cast<TaskId>(i + 1); };

  if (const auto* er = std::get_if<ErdosRenyiParams>(&kind)) {
    detail::check_probability(er->p, "p");
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j)
        if (detail::draw_unit(rng) < er->p) edges.emplace_back(id(i), id(j));
  } else if (const auto* sbm = std::get_if<StochasticBlockParams>(&kind)) {
    detail::check_probability(sbm->p_in, "p_in");
    detail::check_probability(sbm->p_out, "p_out");
    if (sbm->blocks < 1) throw DomainError(ErrorKind::ParameterRange, "blocks must be at least 1");
    const std::size_t blocks = std::min(sbm->blocks, n);
    auto block = [&](std::size_t i) { return i * blocks / n; };
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) {
        const double p = block(i) == block(j) ? sbm->p_in : sbm->p_out;
        if (detail::draw_unit(rng) < p) edges.emplace_back(id(i), id(j));
      }
  } else {
    const auto& lp = std::get<LayeredParams>(kind);
    detail::check_probability(lp.rho_e, "rho_e");
    detail::check_probability(lp.rho_s, "rho_s");
    if (!(lp.sigma_n >= 0.0)) throw DomainError(ErrorKind::ParameterRange, "sigma_n must be nonnegative");
    const auto layers = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(n))));
    const auto size = detail::layer_sizes(n, layers, lp.sigma_n, rng);
    std::vector<std::size_t> first(layers + 1, 0);
    for (std::size_t l = 0; l < layers; ++l) first[l + 1] = first[l] + size[l];
    for (std::size_t l = 1; l < layers; ++l)
      for (std::size_t j = first[l]; j < first[l + 1]; ++j) {
        bool from_previous = false;
        for (std::size_t i = 0; i < first[l]; ++i) {
          const bool adjacent = i >= first[l - 1];
          if (detail::draw_unit(rng) < (adjacent ? lp.rho_e : lp.rho_s)) {
            edges.emplace_back(id(i), id(j));
            from_previous = from_previous || adjacent;
          }
        }
        if (!from_previous) {
          const std::size_t i = first[l - 1] + static_cast<std::size_t>(rng() % size[l - 1]);
          edges.emplace_back(id(i), id(j));
        }
      }
    std::sort(edges.begin(), edges.end());
  }
  return edges;
}

/// round(100 m) + 1 with m clamped at 0.
inline int duration_from_sample(double m) {
  return static_cast<int>(std::lround(100.0 * std::max(m, 0.0))) + 1;
}

inline constexpr double kGmmMeans[4] = {0.5, 1.0, 3.0, 5.0};
inline constexpr double kGmmStdDevs[4] = {0.5, 1.0, 1.0, 1.0};

inline std::vector<int> gen_durations_gmm(std::size_t n, std::uint64_t seed) {
  if (n < 1) throw DomainError(ErrorKind::ParameterRange, "n must be at least 1");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> standard(0.0, 1.0);
  std::vector<int> out(n);
  for (auto& t : out) {
    const std::size_t c = static_cast<std::size_t>(rng() % 4);
    t = duration_from_sample(kGmmMeans[c] + kGmmStdDevs[c] * standard(rng));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Heterogeneity profiles

/// Per-dimension demand distribution: uniform over `choices` when nonempty,
/// otherwise uniform over the integers in [lo, hi].
struct DemandSpec {
  std::vector<double> choices;
  double lo = 1.0;
  double hi = 1.0;
};

struct Profile {
  std::vector<double> type_weights;  // probability of each task type
  std::vector<DemandSpec> demands;
  std::vector<Pool> pools;
  std::map<std::pair<int, int>, double> compat;  // (task type, pool type) -> K
};

/// Three pools (types 0, 1, 1) with capacities (600,260), (800,240),
/// (500,240); second demand from {30,40,50}, first demand in [1,250].
inline Profile tpch_profile() {
  Profile p;
  p.type_weights = {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};
  p.demands = {{{}, 1.0, 250.0}, {{30.0, 40.0, 50.0}, 0.0, 0.0}};
  p.pools = {{1, {600.0, 260.0}, 0}, {2, {800.0, 240.0}, 1}, {3, {500.0, 240.0}, 1}};
  p.compat = {{{0, 0}, 1.0}, {{1, 0}, 1.0 / 0.8}, {{2, 0}, 1.0 / 0.7},
              {{0, 1}, 0.0}, {{1, 1}, 1.0 / 1.0}, {{2, 1}, 1.0 / 1.1}};
  return p;
}

/// Computation-graph setting: demands from {2,4,8,16} x {1,2,3}, task types
/// weighted 1/6, 1/6, 2/3, pools (16,15), (12,20), (64,50).
inline Profile computation_graph_profile() {
  Profile p;
  p.type_weights = {1.0 / 6.0, 1.0 / 6.0, 2.0 / 3.0};
  p.demands = {{{2.0, 4.0, 8.0, 16.0}, 0.0, 0.0}, {{1.0, 2.0, 3.0}, 0.0, 0.0}};
  p.pools = {{1, {16.0, 15.0}, 0}, {2, {12.0, 20.0}, 1}, {3, {64.0, 50.0}, 1}};
  p.compat = {{{0, 0}, 1.0}, {{1, 0}, 1.0 / 0.8}, {{2, 0}, 1.0 / 1.2},
              {{0, 1}, 0.0}, {{1, 1}, 1.0 / 1.2}, {{2, 1}, 1.0 / 0.8}};
  return p;
}

inline double max_demand(const DemandSpec& d) {
  return d.choices.empty() ? d.hi : *std::max_element(d.choices.begin(), d.choices.end());
}

/// Throws ProfileInvalid unless every task type that can be drawn has a pool
/// with K > 0 that fits the largest possible demand.
inline void check_profile(const Profile& p) {
  auto fail = [](const std::string& why) { throw DomainError(ErrorKind::ProfileInvalid, why); };
  if (p.type_weights.empty()) fail("profile has no task types");
  double total = 0.0;
  for (double w : p.type_weights) {
    if (!(w >= 0.0)) fail("task type weights must be nonnegative");
    total += w;
  }
  if (!(total > 0.0)) fail("task type weights sum to zero");
  if (p.pools.empty()) fail("profile has no pools");
  if (p.demands.empty()) fail("profile has no demand dimensions");
  for (const auto& d : p.demands) {
    if (d.choices.empty() && !(d.lo >= 0.0 && d.lo <= d.hi)) fail("demand range must satisfy 0 <= lo <= hi");
    for (double c : d.choices)
      if (!(c >= 0.0)) fail("demand choices must be nonnegative");
  }
  for (const auto& pool : p.pools) {
    if (pool.capacity.size() != p.demands.size()) fail("pool capacity dimension differs from demand dimension");
    for (double c : pool.capacity)
      if (!(c > 0.0)) fail("pool capacities must be positive");
  }
  for (const auto& [key, k] : p.compat)
    if (!(k >= 0.0)) fail("compatibility coefficients must be nonnegative");
  ResourceVector worst;
  for (const auto& d : p.demands) worst.push_back(max_demand(d));
  for (std::size_t type = 0; type < p.type_weights.size(); ++type) {
    if (p.type_weights[type] == 0.0) continue;
    bool ok = false;
    for (const auto& pool : p.pools) {
      auto it = p.compat.find({static_cast<int>(type), pool.type});
      const double k = it == p.compat.end() ? 1.0 : it->second;
      ok = ok || (k > 0.0 && fits(worst, pool.capacity));
    }
    if (!ok) fail("task type " + std::to_string(type) + " has no compatible pool that fits its demand");
  }
}

/// Attaches sampled task types and demands, the profile's pools and its
/// type-level compatibility table to a DAG with given durations.
inline Instance augment_heterogeneous(const EdgeList& edges, const std::vector<int>& durations,
                                      const Profile& profile, std::uint64_t seed) {
  check_profile(profile);
  std::mt19937_64 rng(seed);
  std::discrete_distribution<int> type_dist(profile.type_weights.begin(), profile.type_weights.end());
  std::vector<Task> tasks;
  for (std::size_t i = 0; i < durations.size(); ++i) {
    Task t;
    t.id = static_cast<TaskId>(i + 1);
    t.base_time = durations[i];
    t.type = type_dist(rng);
    for (const auto& d : profile.demands) {
      if (!d.choices.empty()) {
        t.demand.push_back(d.choices[static_cast<std::size_t>(rng() % d.choices.size())]);
      } else {
        const auto lo = static_cast<std::int64_t>(std::ceil(d.lo));
        const auto hi = static_cast<std::int64_t>(std::floor(d.hi));
        const auto span = static_cast<std::uint64_t>(hi - lo + 1);
        t.demand.push_back(static_cast<double>(lo + static_cast<std::int64_t>(rng() % span)));
      }
    }
    tasks.push_back(std::move(t));
  }
  CompatTable compat;
  compat.by_type = profile.compat;
  Instance inst(std::move(tasks), profile.pools, edges, std::move(compat), profile.demands.size());
  const auto report = validate_instance(inst);
  if (!report.ok()) throw DomainError(ErrorKind::ProfileInvalid, "augmented instance is invalid: " + report.issues.front());
  return inst;
}

// ---------------------------------------------------------------------------
// Longest directed distance

/// Signed longest path length (in edges) between every ordered pair: positive
/// along edges, negative against them, +inf for pairs connected only when
/// edges are undirected, -inf for disconnected pairs; 0 on the diagonal.
inline std::vector<std::vector<double>> ldd_raw(const Instance& inst) {
  const auto topo = topological_order(inst);
  if (!topo) throw DomainError(ErrorKind::InvalidInstance, "task graph has a cycle");
  const std::size_t n = inst.num_tasks();
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<std::size_t> pos(n);
  for (std::size_t i = 0; i < n; ++i) pos[(*topo)[i]] = i;

  // Weakly connected components.
  std::vector<std::size_t> comp(n, n);
  for (TaskIndex s = 0; s < n; ++s) {
    if (comp[s] != n) continue;
    std::vector<TaskIndex> stack{s};
    comp[s] = s;
    while (!stack.empty()) {
      TaskIndex u = stack.back();
      stack.pop_back();
      for (const auto* nbrs : {&inst.succs(u), &inst.preds(u)})
        for (TaskIndex w : *nbrs)
          if (comp[w] == n) {
            comp[w] = s;
            stack.push_back(w);
          }
    }
  }

  std::vector<std::vector<double>> d(n, std::vector<double>(n, 0.0));
  for (TaskIndex v = 0; v < n; ++v) {
    std::vector<double> longest(n, -1.0);
    longest[v] = 0.0;
    for (std::size_t k = pos[v]; k < n; ++k) {
      const TaskIndex u = (*topo)[k];
      if (longest[u] < 0.0) continue;
      for (TaskIndex w : inst.succs(u)) longest[w] = std::max(longest[w], longest[u] + 1.0);
    }
    for (TaskIndex w = 0; w < n; ++w)
      if (w != v && longest[w] > 0.0) {
        d[v][w] = longest[w];
        d[w][v] = -longest[w];
      }
  }
  for (TaskIndex v = 0; v < n; ++v)
    for (TaskIndex w = 0; w < n; ++w)
      if (v != w && d[v][w] == 0.0) d[v][w] = comp[v] == comp[w] ? inf : -inf;
  return d;
}

inline int fold_distance(double d, int d_max) {
  if (d == std::numeric_limits<double>::infinity()) return d_max;
  if (d == -std::numeric_limits<double>::infinity()) return -d_max;
  const double lim = d_max - 1;
  return static_cast<int>(std::clamp(d, -lim, lim));
}

inline std::vector<std::vector<int>> ldd_matrix(const Instance& inst, int d_max = 500) {
  if (d_max < 1) throw DomainError(ErrorKind::ParameterRange, "D_max must be at least 1");
  const auto raw = ldd_raw(inst);
  std::vector<std::vector<int>> out(raw.size(), std::vector<int>(raw.size(), 0));
  for (std::size_t v = 0; v < raw.size(); ++v)
    for (std::size_t w = 0; w < raw.size(); ++w) out[v][w] = v == w ? 0 : fold_distance(raw[v][w], d_max);
  return out;
}

}  // namespace hetsched
