#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <set>

#include "hetsched/datagen.hpp"
#include "test_support.hpp"

using namespace hetsched;

namespace {

bool sortable(std::size_t n, const EdgeList& edges) {
  std::vector<std::pair<std::size_t, std::size_t>> e;
  for (auto [a, b] : edges) e.emplace_back(a - 1, b - 1);
  return testsupport::acyclic(n, e);
}

Instance bare(std::size_t n, const EdgeList& edges) {
  std::vector<Task> ts;
  for (std::size_t i = 0; i < n; ++i) ts.push_back({static_cast<TaskId>(i + 1), 1, {1}, 0});
  return Instance(ts, {{1, {1}, 0}}, edges, {});
}

// All-pairs longest path in edges (Floyd-Warshall on the max-plus semiring)
// and undirected components by union-find.
struct LddOracle {
  std::vector<std::vector<double>> longest;
  std::vector<std::size_t> parent;

  explicit LddOracle(const Instance& inst) {
    const std::size_t n = inst.num_tasks();
    const double none = -std::numeric_limits<double>::infinity();
    longest.assign(n, std::vector<double>(n, none));
    parent.resize(n);
    std::iota(parent.begin(), parent.end(), std::size_t{0});
    for (const auto& [a, b] : inst.edges()) {
      const auto i = inst.task_index(a), j = inst.task_index(b);
      longest[i][j] = std::max(longest[i][j], 1.0);
      parent[find(i)] = find(j);
    }
    for (std::size_t k = 0; k < n; ++k)
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
          if (longest[i][k] > none && longest[k][j] > none)
            longest[i][j] = std::max(longest[i][j], longest[i][k] + longest[k][j]);
  }
  std::size_t find(std::size_t i) { return parent[i] == i ? i : parent[i] = find(parent[i]); }

  double value(std::size_t v, std::size_t w) {
    const double inf = std::numeric_limits<double>::infinity();
    if (v == w) return 0.0;
    if (longest[v][w] > -inf) return longest[v][w];
    if (longest[w][v] > -inf) return -longest[w][v];
    return find(v) == find(w) ? inf : -inf;
  }
};

}  // namespace

TEST(GenDag, ErdosRenyiExtremes) {
  EXPECT_TRUE(gen_dag(ErdosRenyiParams{0.0}, 10, 1).empty());
  EXPECT_EQ(gen_dag(ErdosRenyiParams{1.0}, 3, 1), (EdgeList{{1, 2}, {1, 3}, {2, 3}}));
}

TEST(GenDag, ErdosRenyiMeanEdgeCount) {
  const double p = 0.05, pairs = 50.0 * 49.0 / 2.0;
  double sum = 0.0;
  for (std::uint64_t seed = 0; seed < 1000; ++seed) sum += gen_dag(ErdosRenyiParams{p}, 50, seed).size();
  const double sigma_of_mean = std::sqrt(pairs * p * (1 - p) / 1000.0);
  EXPECT_NEAR(sum / 1000.0, p * pairs, 3 * sigma_of_mean);
}

TEST(GenDag, StochasticBlockDensities) {
  const StochasticBlockParams params{0.3, 0.05, 4};
  const std::size_t n = 40;
  double inside = 0, across = 0;
  const int seeds = 300;
  for (int seed = 0; seed < seeds; ++seed)
    for (auto [a, b] : gen_dag(params, n, seed)) ((a - 1) / 10 == (b - 1) / 10 ? inside : across) += 1;
  const double pairs_in = 4 * 45.0 * seeds, pairs_out = (780.0 - 180.0) * seeds;
  EXPECT_NEAR(inside / pairs_in, 0.3, 3 * std::sqrt(0.3 * 0.7 / pairs_in));
  EXPECT_NEAR(across / pairs_out, 0.05, 3 * std::sqrt(0.05 * 0.95 / pairs_out));
}

TEST(GenDag, AllKindsAcyclicDeterministicAndDistinct) {
  const DagKind kinds[] = {LayeredParams{}, ErdosRenyiParams{0.2}, StochasticBlockParams{}};
  for (const auto& kind : kinds)
    for (std::size_t n : {1u, 2u, 7u, 50u}) {
      std::set<EdgeList> seen;
      for (std::uint64_t seed = 0; seed < 40; ++seed) {
        const auto edges = gen_dag(kind, n, seed);
        EXPECT_TRUE(sortable(n, edges));
        EXPECT_EQ(edges, gen_dag(kind, n, seed));
        std::set<std::pair<TaskId, TaskId>> uniq(edges.begin(), edges.end());
        EXPECT_EQ(uniq.size(), edges.size());
        for (auto [a, b] : edges) {
          EXPECT_LT(a, b);
          EXPECT_GE(a, 1);
          EXPECT_LE(b, static_cast<TaskId>(n));
        }
        seen.insert(edges);
      }
      if (n == 50) { EXPECT_GT(seen.size(), 35u); }
    }
}

TEST(GenDag, LayeredEveryLaterNodeHasAPredecessor) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const std::size_t n = 50;
    const auto edges = gen_dag(LayeredParams{}, n, seed);
    std::vector<bool> has_pred(n + 1, false);
    for (auto [a, b] : edges) has_pred[b] = true;
    // Roots form a prefix of the ids: the first layer.
    std::size_t roots = 0;
    while (roots < n && !has_pred[roots + 1]) ++roots;
    EXPECT_GE(roots, 1u);
    for (std::size_t v = roots + 1; v <= n; ++v) EXPECT_TRUE(has_pred[v]) << seed;
  }
}

TEST(GenDag, ParameterRange) {
  for (const DagKind& bad : {DagKind{ErdosRenyiParams{1.5}}, DagKind{StochasticBlockParams{-0.1, 0.1, 2}},
                             DagKind{LayeredParams{0.75, 2.0, 0.1}}, DagKind{LayeredParams{-1, 0.2, 0.1}}}) {
    try {
      gen_dag(bad, 5, 0);
      FAIL();
    } catch (const DomainError& e) {
      EXPECT_EQ(e.kind(), ErrorKind::ParameterRange);
    }
  }
  EXPECT_THROW(gen_dag(ErdosRenyiParams{}, 0, 0), DomainError);
}

TEST(Durations, Transform) {
  EXPECT_EQ(duration_from_sample(0.0), 1);
  EXPECT_EQ(duration_from_sample(-3.0), 1);
  EXPECT_EQ(duration_from_sample(3.004), 301);
}

TEST(Durations, MeanMatchesIntegratedExpectation) {
  const auto ds = gen_durations_gmm(100000, 42);
  double sum = 0.0;
  for (int d : ds) {
    ASSERT_GE(d, 1);
    sum += d;
  }
  const double expected = 100.0 * testsupport::clamped_gmm_mean() + 1.0;
  EXPECT_NEAR(sum / 1e5, expected, 0.02 * expected);
  EXPECT_EQ(ds, gen_durations_gmm(100000, 42));
}

TEST(Profile, TpchAugmentation) {
  const auto edges = gen_dag(ErdosRenyiParams{0.3}, 10, 3);
  const auto inst = augment_heterogeneous(edges, gen_durations_gmm(10, 3), tpch_profile(), 3);
  EXPECT_TRUE(validate_instance(inst).ok());
  EXPECT_EQ(inst.num_pools(), 3u);
  EXPECT_EQ(inst.num_resources(), 2u);
  EXPECT_EQ(inst.pool(1).capacity, (ResourceVector{800, 240}));
  for (TaskIndex v = 0; v < inst.num_tasks(); ++v) {
    const auto& t = inst.task(v);
    EXPECT_GE(t.demand[0], 1.0);
    EXPECT_LE(t.demand[0], 250.0);
    EXPECT_EQ(t.demand[0], std::floor(t.demand[0]));
    EXPECT_TRUE(t.demand[1] == 30 || t.demand[1] == 40 || t.demand[1] == 50);
    if (t.type == 0) { EXPECT_EQ(inst.coefficient(v, 1), 0.0); }
    if (t.type == 2) { EXPECT_DOUBLE_EQ(inst.coefficient(v, 0), 1.0 / 0.7); }
  }
}

TEST(Profile, SingleTypeSinglePoolIsHomogeneous) {
  Profile p;
  p.type_weights = {1.0};
  p.demands = {{{}, 1.0, 1.0}};
  p.pools = {{1, {4}, 0}};
  p.compat = {{{0, 0}, 1.0}};
  const auto inst = augment_heterogeneous({{1, 2}}, {3, 5}, p, 0);
  EXPECT_EQ(inst.coefficient(0, 0), 1.0);
  EXPECT_EQ(inst.task(1).base_time, 5.0);
  EXPECT_EQ(inst.task(0).demand, (ResourceVector{1}));
}

TEST(Profile, TypeFrequencies) {
  const std::size_t n = 10000;
  const std::vector<int> ds(n, 1);
  const std::pair<Profile, std::vector<double>> cases[] = {{tpch_profile(), {1 / 3.0, 1 / 3.0, 1 / 3.0}},
                                                           {computation_graph_profile(), {1 / 6.0, 1 / 6.0, 2 / 3.0}}};
  for (const auto& [profile, probs] : cases) {
    const auto inst = augment_heterogeneous({}, ds, profile, 11);
    std::vector<double> count(3, 0.0);
    for (const auto& t : inst.tasks()) count[t.type] += 1;
    for (int k = 0; k < 3; ++k)
      EXPECT_NEAR(count[k] / n, probs[k], 3 * std::sqrt(probs[k] * (1 - probs[k]) / n));
  }
}

TEST(Profile, Invalid) {
  auto p = tpch_profile();
  p.compat[{0, 0}] = 0.0;  // type 0 now runs nowhere
  try {
    augment_heterogeneous({}, {1}, p, 0);
    FAIL();
  } catch (const DomainError& e) {
    EXPECT_EQ(e.kind(), ErrorKind::ProfileInvalid);
  }
  auto q = computation_graph_profile();
  q.demands[0].choices = {2, 4, 8, 100};  // too large for every pool
  EXPECT_THROW(check_profile(q), DomainError);
}

TEST(Ldd, ChainAndIsolated) {
  const auto chain = ldd_matrix(bare(3, {{1, 2}, {2, 3}}));
  EXPECT_EQ(chain[0][2], 2);
  EXPECT_EQ(chain[2][0], -2);
  EXPECT_EQ(chain[0][0], 0);
  const auto iso = ldd_matrix(bare(2, {}));
  EXPECT_EQ(iso[0][1], -500);
  EXPECT_EQ(iso[1][0], -500);
  // 2 <- 1 -> 3: 2 and 3 are connected only through undirected edges
  EXPECT_EQ(ldd_matrix(bare(3, {{1, 2}, {1, 3}}))[1][2], 500);
}

TEST(Ldd, FoldingClamps) {
  EdgeList path;
  for (TaskId i = 1; i < 8; ++i) path.emplace_back(i, i + 1);
  const auto m = ldd_matrix(bare(8, path), 4);
  EXPECT_EQ(m[0][7], 3);
  EXPECT_EQ(m[7][0], -3);
  EXPECT_EQ(m[0][2], 2);
  EXPECT_EQ(fold_distance(std::numeric_limits<double>::infinity(), 4), 4);
}

TEST(Ldd, P0AgainstOracle) {
  const auto inst = p0_instance();
  const auto m = ldd_matrix(inst);
  EXPECT_EQ(m[0][6], 2);  // 1 -> 4 -> 7
  EXPECT_EQ(m[0][7], -500);  // 1 and 8 lie in different components
  EXPECT_EQ(m[3][5], 500);   // 4 and 6 share predecessor 1
  LddOracle oracle(inst);
  for (std::size_t v = 0; v < 8; ++v)
    for (std::size_t w = 0; w < 8; ++w) EXPECT_EQ(m[v][w], fold_distance(oracle.value(v, w), 500));
}

TEST(Ldd, RandomDagsAgainstOracle) {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const std::size_t n = 15;
    const auto inst = bare(n, gen_dag(ErdosRenyiParams{0.12}, n, seed));
    const auto raw = ldd_raw(inst);
    LddOracle oracle(inst);
    for (std::size_t v = 0; v < n; ++v) {
      EXPECT_EQ(raw[v][v], 0.0);
      for (std::size_t w = 0; w < n; ++w) {
        EXPECT_EQ(raw[v][w], oracle.value(v, w));
        if (std::isfinite(raw[v][w])) { EXPECT_EQ(raw[v][w], -raw[w][v]); }
      }
    }
  }
}
