// Copyright 2026 The fairhpo Authors.
// SPDX-License-Identifier: Apache-2.0

#include "fairhpo/pareto.hpp"

#include <cmath>
#include <random>
#include <set>

#include <gmock/gmock.h>
#include <gtest/gtest.h>

#include "fairhpo/error.hpp"
#include "oracles.hpp"

namespace fairhpo {
namespace {

using ::testing::ElementsAre;

bool dom(std::vector<double> a, std::vector<double> b) { return dominates(a, b); }

TEST(Dominates, Examples) {
  EXPECT_TRUE(dom({1, 2}, {2, 2}));
  EXPECT_FALSE(dom({1, 2}, {1, 2}));
  EXPECT_FALSE(dom({1, 3}, {2, 2}));
  EXPECT_FALSE(dom({2, 2}, {1, 2}));
  EXPECT_THROW(dom({1, 2}, {1, 2, 3}), InvalidArgument);
}

TEST(Dominates, IrreflexiveAndAntisymmetric) {
  std::mt19937_64 gen(1);
  std::uniform_int_distribution<int> d(0, 3);
  for (int t = 0; t < 2000; ++t) {
    Point a(3), b(3);
    for (auto& v : a) v = d(gen);
    for (auto& v : b) v = d(gen);
    EXPECT_FALSE(dominates(a, a));
    EXPECT_FALSE(dominates(a, b) && dominates(b, a));
  }
}

TEST(NonDominatedSort, SmallExample) {
  const std::vector<Point> pts{{1, 2}, {2, 1}, {3, 3}};
  const auto fronts = non_dominated_sort(pts);
  ASSERT_EQ(fronts.size(), 2u);
  EXPECT_THAT(fronts[0], ElementsAre(0, 1));
  EXPECT_THAT(fronts[1], ElementsAre(2));
}

TEST(NonDominatedSort, DuplicatesShareRank) {
  const std::vector<Point> pts{{1, 1}, {1, 1}, {2, 2}, {2, 2}};
  const auto fronts = non_dominated_sort(pts);
  ASSERT_EQ(fronts.size(), 2u);
  EXPECT_THAT(fronts[0], ElementsAre(0, 1));
  EXPECT_THAT(fronts[1], ElementsAre(2, 3));
}

TEST(NonDominatedSort, Errors) {
  EXPECT_THROW(non_dominated_sort(std::vector<Point>{}), InvalidArgument);
  EXPECT_THROW(non_dominated_sort(std::vector<Point>{{1, 2}, {1}}), InvalidArgument);
  EXPECT_TRUE(pareto_front_indices(std::vector<Point>{}).empty());
}

TEST(NonDominatedSort, MatchesPeelingOracle) {
  std::mt19937_64 gen(2);
  for (int t = 0; t < 300; ++t) {
    const std::size_t n = 1 + gen() % 40, d = 2 + gen() % 4;
    std::uniform_int_distribution<int> v(0, 5);  // coarse grid forces ties
    std::vector<Point> pts(n, Point(d));
    for (auto& p : pts) {
      for (auto& x : p) x = v(gen);
    }
    const auto rank = oracle::peel_ranks(pts);
    const auto fronts = non_dominated_sort(pts);
    std::set<std::size_t> seen;
    for (std::size_t r = 0; r < fronts.size(); ++r) {
      for (auto i : fronts[r]) {
        EXPECT_EQ(rank[i], r);
        seen.insert(i);
      }
    }
    EXPECT_EQ(seen.size(), n);
    std::vector<bool> alive(n, true);
    const auto front0 = oracle::pareto_filter(pts, alive);
    EXPECT_EQ(pareto_front_indices(pts), front0);
  }
}

TEST(Crowding, TwoPointsAreInfinite) {
  const std::vector<Point> f{{0, 1}, {1, 0}};
  for (double c : crowding_distance(f)) EXPECT_TRUE(std::isinf(c));
}

TEST(Crowding, CollinearMiddlePoint) {
  const std::vector<Point> f{{0, 1}, {0.5, 0.5}, {1, 0}};
  const auto c = crowding_distance(f);
  EXPECT_TRUE(std::isinf(c[0]));
  EXPECT_DOUBLE_EQ(c[1], 2.0);
  EXPECT_TRUE(std::isinf(c[2]));
}

TEST(Crowding, ZeroRangeAddsNothing) {
  const std::vector<Point> same{{1, 1}, {1, 1}, {1, 1}};
  for (double c : crowding_distance(same)) EXPECT_FALSE(std::isnan(c));
  const std::vector<Point> f{{0, 5}, {0.25, 5}, {1, 5}};
  EXPECT_DOUBLE_EQ(crowding_distance(f)[1], 1.0);
}

TEST(Crowding, SubsetIndices) {
  const std::vector<Point> pts{{9, 9}, {0, 1}, {0.5, 0.5}, {1, 0}};
  const std::size_t front[] = {1, 2, 3};
  const auto c = crowding_distance(pts, front);
  ASSERT_EQ(c.size(), 3u);
  EXPECT_DOUBLE_EQ(c[1], 2.0);
}

TEST(DasDennis, CountsMatchBinomial) {
  EXPECT_EQ(das_dennis(2, 2).directions.size(), 3u);
  EXPECT_EQ(das_dennis(3, 2).directions.size(), 6u);
  EXPECT_EQ(das_dennis(5, 3).directions.size(), 35u);
  EXPECT_EQ(binomial(7, 4), 35u);
  for (int m = 2; m <= 6; ++m) {
    for (int p = 1; p <= 6; ++p) {
      const auto set = das_dennis(m, p);
      EXPECT_EQ(set.directions.size(), binomial(p + m - 1, m - 1));
      std::set<Point> uniq(set.directions.begin(), set.directions.end());
      EXPECT_EQ(uniq.size(), set.directions.size());
      for (const auto& d : set.directions) {
        double s = 0.0;
        for (double v : d) {
          EXPECT_GE(v, 0.0);
          EXPECT_NEAR(v * p, std::round(v * p), 1e-12);
          s += v;
        }
        EXPECT_NEAR(s, 1.0, 1e-12);
      }
    }
  }
}

}  // namespace
}  // namespace fairhpo
