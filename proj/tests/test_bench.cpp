#include <gtest/gtest.h>

#include "hetsched/bench.hpp"
#include "test_support.hpp"

using namespace hetsched;

TEST(Bench, P0CpAgainstOracle) {
  const auto report = run_benchmark({{"p0", p0_instance(), std::nullopt}}, {"cp", "sgs-oracle"});
  ASSERT_EQ(report.instances.size(), 1u);
  const auto& ir = report.instances[0];
  EXPECT_EQ(ir.tasks, 8u);
  EXPECT_NEAR(ir.results[0].makespan, 4.0, 1e-12);
  EXPECT_NEAR(ir.results[1].makespan, 3.2, 1e-12);
  EXPECT_NEAR(*ir.best_heuristic, 4.0, 1e-12);
  EXPECT_NEAR(*ir.results[0].improvement, 0.0, 1e-12);
  EXPECT_NEAR(*ir.results[1].improvement, 20.0, 1e-9);
}

TEST(Bench, EmptyMethodList) {
  const auto report = run_benchmark({{"p0", p0_instance(), std::nullopt}}, {});
  EXPECT_TRUE(report.methods.empty());
  ASSERT_EQ(report.instances.size(), 1u);
  EXPECT_TRUE(report.instances[0].results.empty());
  EXPECT_FALSE(report.instances[0].best_heuristic);
  EXPECT_TRUE(run_benchmark({}, {"cp"}).instances.empty());
}

TEST(Bench, UnknownMethod) {
  for (const char* bad : {"nope", "list:cp", "list:cp:zzz"}) {
    try {
      run_benchmark({}, {bad});
      FAIL() << bad;
    } catch (const DomainError& e) {
      EXPECT_EQ(e.kind(), ErrorKind::UnknownMethod);
    }
  }
}

TEST(Bench, ListHeuristicReportsBestPoolRule) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto inst = testsupport::random_instance(seed);
    std::vector<std::string> methods{"tetris", "list:tetris:eft", "list:tetris:tetris", "list:tetris:balance"};
    const auto r = run_benchmark({{"r", inst, std::nullopt}}, methods).instances[0].results;
    EXPECT_EQ(r[0].makespan, std::min({r[1].makespan, r[2].makespan, r[3].makespan}));
  }
}

TEST(Bench, SamplingMonotoneUnderNestedSeeds) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-1, 1);
  for (std::uint64_t seed = 0; seed < 15; ++seed) {
    const auto inst = testsupport::random_instance(seed);
    ScoreTable t(inst.num_tasks(), inst.num_pools());
    for (TaskIndex v = 0; v < inst.num_tasks(); ++v)
      for (PoolIndex c = 0; c < inst.num_pools(); ++c) t.set(v, c, u(rng));
    const NamedInstance item{"r", inst, t};
    double prev = std::numeric_limits<double>::infinity();
    for (std::size_t n : {1u, 4u, 16u, 64u, 256u}) {
      BenchOptions opt;
      opt.samples = n;
      opt.seeds = {7, 8};
      const auto f = run_benchmark({item}, {"skip-sample"}, opt).instances[0].results[0];
      EXPECT_LE(f.makespan, prev);
      EXPECT_LE(f.makespan, *f.mean);
      prev = f.makespan;
    }
  }
}

TEST(Bench, SampleSeedsDistinct) {
  std::set<std::uint64_t> seen;
  for (std::uint64_t base = 0; base < 4; ++base)
    for (std::size_t i = 0; i < 256; ++i) seen.insert(sample_seed(base, i));
  EXPECT_EQ(seen.size(), 1024u);
}

TEST(Bench, DeterministicReports) {
  std::vector<NamedInstance> items;
  for (std::uint64_t seed = 0; seed < 5; ++seed)
    items.push_back({"r" + std::to_string(seed), testsupport::random_instance(seed), std::nullopt});
  const std::vector<std::string> methods{"sft", "mopnr", "cp", "tetris", "heft", "peft", "ippts",
                                         "sgs-oracle", "local-search", "skip-greedy", "skip-sample"};
  BenchOptions opt;
  opt.samples = 8;
  opt.seeds = {0, 1, 2};
  const auto a = report_to_json(run_benchmark(items, methods, opt));
  const auto b = report_to_json(run_benchmark(items, methods, opt));
  EXPECT_EQ(a, b);
  EXPECT_FALSE(a["instances"][0]["results"][0].contains("time_ms"));
  // every method is at least the oracle optimum
  for (const auto& ji : a["instances"]) {
    const double opt_f = ji["results"][7]["makespan"];
    for (const auto& jr : ji["results"]) EXPECT_GE(jr["makespan"].get<double>(), opt_f - 1e-12);
  }
  EXPECT_EQ(a["summary"].size(), methods.size());
}

TEST(Bench, TimingAndCsv) {
  BenchOptions opt;
  opt.timing = true;
  const auto report = run_benchmark({{"p0", p0_instance(), std::nullopt}}, {"cp", "skip-greedy"}, opt);
  const auto j = report_to_json(report);
  EXPECT_TRUE(j["instances"][0]["results"][1].contains("time_ms"));
  const auto csv = report_to_csv(report);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "instance,method,makespan,improvement");
  EXPECT_NE(csv.find("p0,cp,4.0,0.0\n"), std::string::npos);
}

TEST(Bench, DefaultScoresFavourCriticalTasks) {
  const auto t = default_scores(p0_instance());
  // task 2 has the longest critical path on P0
  for (TaskIndex v = 0; v < 8; ++v) EXPECT_LE(t.score(v, 0), t.score(1, 0));
  EXPECT_DOUBLE_EQ(t.score(1, 0), 1.0);
}
