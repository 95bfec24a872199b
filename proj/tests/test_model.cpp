#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "hetsched/model.hpp"
#include "test_support.hpp"

using namespace hetsched;

namespace {

Instance single_task(double t, ResourceVector demand, ResourceVector cap, double k = 1.0) {
  CompatTable compat;
  compat.overrides[{1, 1}] = k;
  return Instance({{1, t, demand, 0}}, {{1, cap, 0}}, {}, compat);
}

}  // namespace

TEST(Validate, P0IsWellFormed) {
  const auto rep = validate_instance(p0_instance());
  EXPECT_TRUE(rep.ok());
}

TEST(Validate, TwoCycleReported) {
  Instance inst({{1, 1, {1}, 0}, {2, 1, {1}, 0}}, {{1, {3}, 0}}, {{1, 2}, {2, 1}}, {});
  EXPECT_TRUE(validate_instance(inst).mentions("cycle in E"));
}

TEST(Validate, SelfLoopIsACycle) {
  Instance inst({{1, 1, {1}, 0}}, {{1, {3}, 0}}, {{1, 1}}, {});
  EXPECT_TRUE(validate_instance(inst).mentions("cycle in E"));
}

TEST(Validate, OversizedDemandHasEmptyActionSet) {
  EXPECT_TRUE(validate_instance(single_task(1, {5}, {3})).mentions("empty action set"));
}

TEST(Validate, IncompatibleEverywhereHasEmptyActionSet) {
  EXPECT_TRUE(validate_instance(single_task(1, {1}, {3}, 0.0)).mentions("empty action set"));
}

TEST(Validate, DanglingEdgeAndNegativeValues) {
  Instance inst({{1, -1, {-1}, 0}}, {{1, {0}, 0}}, {{1, 9}}, {});
  const auto rep = validate_instance(inst);
  EXPECT_TRUE(rep.mentions("dangling edge"));
  EXPECT_GE(rep.issues.size(), 3u);
}

TEST(ActualTime, Formula) {
  EXPECT_DOUBLE_EQ(actual_time(single_task(1, {1}, {3}, 1.0), 0, 0), 1.0);
  EXPECT_DOUBLE_EQ(actual_time(single_task(1, {1}, {3}, 0.8), 0, 0), 1.25);
}

TEST(ActualTime, IncompatibleThrows) {
  const auto inst = single_task(2, {1}, {3}, 0.0);
  try {
    actual_time(inst, 0, 0);
    FAIL();
  } catch (const DomainError& e) {
    EXPECT_EQ(e.kind(), ErrorKind::IncompatiblePair);
  }
}

TEST(ActionSet, P0HasEveryPair) {
  const auto acts = action_set(p0_instance());
  ASSERT_EQ(acts.size(), 8u);
  for (TaskIndex v = 0; v < 8; ++v) EXPECT_EQ(acts[v], (Action{v, 0}));
}

TEST(ActionSet, CapacityAndCompatibilityFilters) {
  EXPECT_TRUE(action_set(single_task(1, {4}, {3})).empty());
  EXPECT_TRUE(action_set(single_task(1, {1}, {3}, 0.0)).empty());
}

TEST(CompatTable, OverrideWinsOverType) {
  CompatTable c;
  c.by_type[{0, 0}] = 0.5;
  c.overrides[{1, 1}] = 2.0;
  EXPECT_DOUBLE_EQ(c.coefficient({1, 1, {}, 0}, {1, {}, 0}), 2.0);
  EXPECT_DOUBLE_EQ(c.coefficient({2, 1, {}, 0}, {1, {}, 0}), 0.5);
}

TEST(CheckSchedule, P0SchedulesFromTheExample) {
  const auto inst = p0_instance();
  EXPECT_TRUE(check_schedule(inst, p0_list_schedule()).feasible());
  EXPECT_TRUE(check_schedule(inst, p0_optimal_schedule()).feasible());
}

TEST(CheckSchedule, CapacityOverflow) {
  const auto inst = p0_instance();
  auto x = p0_optimal_schedule();
  x.start[3] = 0.0;  // task 4 alongside 1, 2, 3
  const auto verdict = check_schedule(inst, x);
  EXPECT_FALSE(verdict.feasible());
  EXPECT_TRUE(verdict.violates(Constraint::Resource));
}

TEST(CheckSchedule, PrecedenceCompatibilityNegativity) {
  const auto inst = p0_instance();
  auto x = p0_optimal_schedule();
  x.start[6] = 1.5;  // task 7 before 4 ends
  EXPECT_TRUE(check_schedule(inst, x).violates(Constraint::Precedence));
  auto y = p0_optimal_schedule();
  y.start[0] = -1.0;
  EXPECT_TRUE(check_schedule(inst, y).violates(Constraint::NonNegativity));
  const auto bad = single_task(1, {1}, {3}, 0.0);
  EXPECT_TRUE(check_schedule(bad, Schedule{{0.0}, {0}, {}}).violates(Constraint::Compatibility));
}

TEST(CheckSchedule, HalfOpenIntervalsReleaseAtCompletion) {
  // Task 6 starts at 1, exactly when task 1 ends; capacity would overflow if
  // task 1 were still counted.
  const auto inst = p0_instance();
  auto x = p0_list_schedule();
  EXPECT_DOUBLE_EQ(x.start[5], 1.0);
  EXPECT_TRUE(check_schedule(inst, x).feasible());
}

TEST(Makespan, Values) {
  const auto inst = p0_instance();
  EXPECT_NEAR(makespan(inst, p0_list_schedule()), 4.0, 1e-12);
  EXPECT_NEAR(makespan(inst, p0_optimal_schedule()), 3.2, 1e-12);
  EXPECT_DOUBLE_EQ(makespan(single_task(5, {1}, {3}), Schedule{{0.0}, {0}, {}}), 5.0);
}

TEST(Makespan, InvariantUnderStoragePermutation) {
  const auto inst = p0_instance();
  const auto x = p0_optimal_schedule();
  std::vector<std::size_t> perm{7, 2, 5, 0, 3, 6, 1, 4};
  std::vector<Task> tasks;
  Schedule y;
  for (auto i : perm) {
    tasks.push_back(inst.task(i));
    y.start.push_back(x.start[i]);
    y.pool.push_back(0);
  }
  Instance shuffled(tasks, inst.pools(), inst.edges(), inst.compat(), 1);
  EXPECT_DOUBLE_EQ(makespan(shuffled, y), makespan(inst, x));
  EXPECT_TRUE(check_schedule(shuffled, y).feasible());
}

TEST(Makespan, AtLeastLongestRootOnFeasibleSchedules) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto inst = testsupport::random_instance(seed);
    // Serial schedule: tasks one after another in topological order.
    const auto topo = topological_order(inst);
    ASSERT_TRUE(topo);
    Schedule x{std::vector<double>(inst.num_tasks()), std::vector<PoolIndex>(inst.num_tasks()), {}};
    double t = 0.0;
    for (auto v : *topo) {
      for (PoolIndex c = 0; c < inst.num_pools(); ++c)
        if (inst.is_action(v, c)) {
          x.pool[v] = c;
          break;
        }
      x.start[v] = t;
      t += inst.actual_time(v, x.pool[v]);
    }
    ASSERT_TRUE(check_schedule(inst, x).feasible());
    double longest_root = 0.0;
    for (TaskIndex v = 0; v < inst.num_tasks(); ++v)
      if (inst.preds(v).empty()) longest_root = std::max(longest_root, inst.actual_time(v, x.pool[v]));
    EXPECT_GE(makespan(inst, x), longest_root);
  }
}

TEST(Instance, RandomInstancesAreValid) {
  for (std::uint64_t seed = 0; seed < 200; ++seed)
    EXPECT_TRUE(validate_instance(testsupport::random_instance(seed)).ok()) << seed;
}
