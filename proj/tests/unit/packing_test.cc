#include "slowfast/packing.h"

#include <algorithm>
#include <map>
#include <numeric>
#include <random>

#include <gtest/gtest.h>

#include "oracles.h"
#include "slowfast/error.h"

namespace slowfast {
namespace {

std::vector<SequenceItem> items_of(const std::vector<std::int64_t>& lengths) {
  std::vector<SequenceItem> items;
  for (std::size_t i = 0; i < lengths.size(); ++i) {
    items.push_back({"s" + std::to_string(i), lengths[i], Modality::kText,
                     static_cast<double>(lengths[i])});
  }
  return items;
}

std::vector<std::int64_t> window_lengths(const PackedWindow& w) {
  std::vector<std::int64_t> out;
  for (const auto& it : w.items) out.push_back(it.length_tokens);
  return out;
}

TEST(PackWindows, ExactFill) {
  const auto w = pack_windows(items_of({5, 5, 5}), 10);
  ASSERT_EQ(w.size(), 2u);
  EXPECT_EQ(window_lengths(w[0]), (std::vector<std::int64_t>{5, 5}));
  EXPECT_EQ(window_lengths(w[1]), (std::vector<std::int64_t>{5}));
}

TEST(PackWindows, FullWindowAtBoundary) {
  const auto w = pack_windows(items_of({kShortContextTokens}), kShortContextTokens);
  ASSERT_EQ(w.size(), 1u);
  EXPECT_EQ(w[0].used_tokens(), kShortContextTokens);
}

TEST(PackWindows, DecreasingFirstFit) {
  const std::vector<std::int64_t> lengths = {7, 6, 5, 4, 3};
  const auto w = pack_windows(items_of(lengths), 10);
  ASSERT_EQ(w.size(), 3u);
  EXPECT_EQ(window_lengths(w[0]), (std::vector<std::int64_t>{7, 3}));
  EXPECT_EQ(window_lengths(w[1]), (std::vector<std::int64_t>{6, 4}));
  EXPECT_EQ(window_lengths(w[2]), (std::vector<std::int64_t>{5}));
  EXPECT_EQ(testing::optimal_bin_count(lengths, 10), 3);
}

TEST(PackWindows, SegmentIdsAndOffsets) {
  const auto w = pack_windows(items_of({3, 2, 4}), 10);
  ASSERT_EQ(w.size(), 1u);
  EXPECT_EQ(w[0].offsets, (std::vector<std::int64_t>{0, 4, 7}));
  EXPECT_EQ(w[0].segment_ids, (std::vector<std::int32_t>{0, 0, 0, 0, 1, 1, 1, 2, 2}));
}

TEST(PackWindows, OversizeItemNamesId) {
  try {
    pack_windows(items_of({3, 11}), 10);
    FAIL();
  } catch (const OversizeItemError& e) {
    EXPECT_EQ(e.id(), "s1");
  }
  EXPECT_THROW(pack_windows(items_of({3}), 0), Error);
}

TEST(PackWindows, RandomInstancesConserveAndRespectBound) {
  std::mt19937 rng(77);
  std::uniform_int_distribution<int> count(1, 12);
  std::uniform_int_distribution<std::int64_t> cap(5, 60);
  for (int trial = 0; trial < 1500; ++trial) {
    const std::int64_t capacity = cap(rng);
    std::uniform_int_distribution<std::int64_t> len(1, capacity);
    std::vector<std::int64_t> lengths(static_cast<std::size_t>(count(rng)));
    for (auto& l : lengths) l = len(rng);
    const auto items = items_of(lengths);
    const auto windows = pack_windows(items, capacity);

    std::multiset<std::string> seen;
    for (const auto& w : windows) {
      ASSERT_LE(w.used_tokens(), capacity);
      ASSERT_EQ(static_cast<std::int64_t>(w.segment_ids.size()), w.used_tokens());
      ASSERT_TRUE(std::is_sorted(w.segment_ids.begin(), w.segment_ids.end()));
      for (std::size_t k = 0; k < w.items.size(); ++k) {
        seen.insert(w.items[k].id);
        EXPECT_EQ(w.segment_ids[w.offsets[k]], static_cast<std::int32_t>(k));
      }
    }
    std::multiset<std::string> want;
    for (const auto& it : items) want.insert(it.id);
    ASSERT_EQ(seen, want);

    const int opt = testing::optimal_bin_count(lengths, capacity);
    EXPECT_LE(static_cast<double>(windows.size()), opt * 11.0 / 9.0 + 1.0);
    EXPECT_GE(static_cast<int>(windows.size()), opt);
  }
}

TEST(PackWindows, Deterministic) {
  const auto items = items_of({4, 9, 2, 2, 7, 3, 3, 1});
  const auto a = pack_windows(items, 10);
  const auto b = pack_windows(items, 10);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].offsets, b[i].offsets);
    for (std::size_t k = 0; k < a[i].items.size(); ++k) EXPECT_EQ(a[i].items[k].id, b[i].items[k].id);
  }
}

TEST(PlanMixture, DefaultFractions) {
  const ModalityTokens ample = {1000, 1000, 1000};
  EXPECT_EQ(plan_mixture(ample, 100), (ModalityTokens{24, 50, 26}));
}

TEST(PlanMixture, SingleModality) {
  EXPECT_EQ(plan_mixture({0, 0, 5}, 1, {0.0, 0.0, 1.0}), (ModalityTokens{0, 0, 1}));
}

TEST(PlanMixture, ShortfallIsRedistributed) {
  // Video capped at 10; the remaining 90 split 50:26 between image and text:
  // 59.21 and 30.79, largest remainder gives 59 and 31.
  EXPECT_EQ(plan_mixture({10, 1000, 1000}, 100), (ModalityTokens{10, 59, 31}));
}

TEST(PlanMixture, CascadingCaps) {
  const auto t = plan_mixture({10, 40, 1000}, 100);
  EXPECT_EQ(t, (ModalityTokens{10, 40, 50}));
}

TEST(PlanMixture, InfeasibleReportsAchievable) {
  try {
    plan_mixture({10, 20, 30}, 100);
    FAIL();
  } catch (const InfeasibleMixtureError& e) {
    EXPECT_EQ(e.achievable(), 60);
  }
  EXPECT_THROW(plan_mixture({10, 10, 10}, 5, {0.5, 0.5, 0.5}), Error);
}

TEST(PlanMixture, RandomTargetsSumToBudget) {
  std::mt19937 rng(5);
  std::uniform_int_distribution<std::int64_t> avail(0, 5000);
  std::uniform_int_distribution<std::int64_t> budget(1, 8000);
  int checked = 0;
  for (int trial = 0; trial < 2000; ++trial) {
    const ModalityTokens a = {avail(rng), avail(rng), avail(rng)};
    const std::int64_t b = budget(rng);
    if (a[0] + a[1] + a[2] < b) {
      EXPECT_THROW(plan_mixture(a, b), InfeasibleMixtureError);
      continue;
    }
    const ModalityTokens t = plan_mixture(a, b);
    EXPECT_EQ(t[0] + t[1] + t[2], b);
    for (int m = 0; m < 3; ++m) {
      EXPECT_GE(t[m], 0);
      EXPECT_LE(t[m], a[m]);
    }
    ++checked;
  }
  EXPECT_GT(checked, 500);
}

TEST(BalanceWorkers, SmallExampleIsOptimal) {
  std::vector<SequenceItem> items;
  const double costs[] = {5, 4, 3, 3};
  for (int i = 0; i < 4; ++i) items.push_back({"i" + std::to_string(i), 1, Modality::kText, costs[i]});
  const WorkerAssignment a = balance_workers(items, 2);
  std::vector<double> loads = a.loads;
  std::sort(loads.begin(), loads.end());
  EXPECT_EQ(loads, (std::vector<double>{7, 8}));
  EXPECT_EQ(a.makespan(), 8);
  EXPECT_EQ(testing::optimal_makespan({5, 4, 3, 3}, 2), 8);
}

TEST(BalanceWorkers, IdenticalCostsSpreadEvenly) {
  std::vector<SequenceItem> items;
  for (int i = 0; i < 6; ++i) items.push_back({"i" + std::to_string(i), 1, Modality::kText, 2.5});
  const WorkerAssignment a = balance_workers(items, 6);
  for (const auto& w : a.assignments) EXPECT_EQ(w.size(), 1u);
  EXPECT_EQ(a.makespan(), 2.5);
}

TEST(BalanceWorkers, SingleWorkerTakesAll) {
  std::vector<SequenceItem> items;
  for (int i = 0; i < 5; ++i) items.push_back({"i" + std::to_string(i), 1, Modality::kText, i + 1.0});
  const WorkerAssignment a = balance_workers(items, 1);
  ASSERT_EQ(a.assignments.size(), 1u);
  EXPECT_EQ(a.assignments[0].size(), 5u);
  EXPECT_EQ(a.makespan(), 15.0);
  EXPECT_THROW(balance_workers(items, 0), Error);
}

TEST(BalanceWorkers, RandomInstancesRespectBound) {
  std::mt19937 rng(8);
  std::uniform_int_distribution<int> count(1, 10);
  std::uniform_int_distribution<int> workers(1, 4);
  std::uniform_int_distribution<int> cost(1, 50);
  for (int trial = 0; trial < 1500; ++trial) {
    const int n = count(rng), m = workers(rng);
    std::vector<SequenceItem> items;
    std::vector<double> costs;
    for (int i = 0; i < n; ++i) {
      costs.push_back(cost(rng));
      items.push_back({"i" + std::to_string(i), 1, Modality::kText, costs.back()});
    }
    const WorkerAssignment a = balance_workers(items, static_cast<std::size_t>(m));
    std::multiset<std::string> seen;
    for (std::size_t w = 0; w < a.assignments.size(); ++w) {
      double load = 0;
      for (const auto& id : a.assignments[w]) {
        seen.insert(id);
        load += costs[std::stoul(id.substr(1))];
      }
      EXPECT_DOUBLE_EQ(load, a.loads[w]);
    }
    ASSERT_EQ(seen.size(), items.size());
    const double opt = testing::optimal_makespan(costs, m);
    EXPECT_LE(a.makespan(), (4.0 / 3.0 - 1.0 / (3.0 * m)) * opt + 1e-9);
  }
}

TEST(CostModel, DefaultsByModality) {
  const CostModel cost;
  EXPECT_EQ(cost.estimate(10, 5), 25.0);
  EXPECT_EQ(cost.estimate(SequenceItem{"v", 10, Modality::kVideo, 0}), 20.0);
  EXPECT_EQ(cost.estimate(SequenceItem{"t", 10, Modality::kText, 0}), 10.0);
}

}  // namespace
}  // namespace slowfast
