// Copyright 2026 The fairhpo Authors.
// SPDX-License-Identifier: Apache-2.0

#include "fairhpo/pareto.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

#include <fmt/format.h>

#include "fairhpo/error.hpp"

namespace fairhpo {

bool dominates(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw InvalidArgument(fmt::format("dominates: dimension mismatch ({} vs {})", a.size(), b.size()));
  }
  bool strictly = false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] > b[i]) return false;
    if (a[i] < b[i]) strictly = true;
  }
  return strictly;
}

std::vector<std::vector<std::size_t>> non_dominated_sort(std::span<const Point> points) {
  if (points.empty()) throw InvalidArgument("non_dominated_sort: empty input");
  const std::size_t d = points.front().size();
  for (const auto& p : points) {
    if (p.size() != d) throw InvalidArgument("non_dominated_sort: mixed dimensions");
  }
  const std::size_t n = points.size();
  std::vector<std::vector<std::size_t>> dominated_by_me(n);
  std::vector<std::size_t> domination_count(n, 0);
  std::vector<std::vector<std::size_t>> fronts(1);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (dominates(points[i], points[j])) {
        dominated_by_me[i].push_back(j);
        ++domination_count[j];
      } else if (dominates(points[j], points[i])) {
        dominated_by_me[j].push_back(i);
        ++domination_count[i];
      }
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (domination_count[i] == 0) fronts[0].push_back(i);
  }
  while (true) {
    std::vector<std::size_t> next;
    for (auto i : fronts.back()) {
      for (auto j : dominated_by_me[i]) {
        if (--domination_count[j] == 0) next.push_back(j);
      }
    }
    if (next.empty()) break;
    std::sort(next.begin(), next.end());
    fronts.push_back(std::move(next));
  }
  return fronts;
}

std::vector<std::size_t> pareto_front_indices(std::span<const Point> points) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < points.size(); ++i) {
    bool dominated = false;
    for (std::size_t j = 0; j < points.size() && !dominated; ++j) {
      dominated = j != i && dominates(points[j], points[i]);
    }
    if (!dominated) out.push_back(i);
  }
  return out;
}

std::vector<double> crowding_distance(std::span<const Point> points, std::span<const std::size_t> front) {
  const std::size_t n = front.size();
  std::vector<double> dist(n, 0.0);
  if (n == 0) return dist;
  constexpr double inf = std::numeric_limits<double>::infinity();
  if (n <= 2) {
    std::fill(dist.begin(), dist.end(), inf);
    return dist;
  }
  const std::size_t d = points[front[0]].size();
  std::vector<std::size_t> order(n);
  for (std::size_t m = 0; m < d; ++m) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return points[front[a]][m] < points[front[b]][m]; });
    const double lo = points[front[order.front()]][m];
    const double hi = points[front[order.back()]][m];
    dist[order.front()] = inf;
    dist[order.back()] = inf;
    const double range = hi - lo;
    if (!(range > 0.0)) continue;
    for (std::size_t k = 1; k + 1 < n; ++k) {
      dist[order[k]] += (points[front[order[k + 1]]][m] - points[front[order[k - 1]]][m]) / range;
    }
  }
  return dist;
}

std::vector<double> crowding_distance(std::span<const Point> front) {
  std::vector<std::size_t> idx(front.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  return crowding_distance(front, idx);
}

namespace {

void compositions(int remaining, int slots, Point& current, int p, std::vector<Point>& out) {
  if (slots == 1) {
    current.push_back(static_cast<double>(remaining) / p);
    out.push_back(current);
    current.pop_back();
    return;
  }
  for (int v = remaining; v >= 0; --v) {
    current.push_back(static_cast<double>(v) / p);
    compositions(remaining - v, slots - 1, current, p, out);
    current.pop_back();
  }
}

}  // namespace

ReferenceDirectionSet das_dennis(int n_objectives, int partitions) {
  if (n_objectives < 2 || partitions < 1) {
    throw InvalidArgument(fmt::format("das_dennis: need M >= 2 and p >= 1 (got {}, {})", n_objectives, partitions));
  }
  ReferenceDirectionSet set;
  set.partitions = partitions;
  Point cur;
  compositions(partitions, n_objectives, cur, partitions, set.directions);
  return set;
}

std::uint64_t binomial(unsigned n, unsigned k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  std::uint64_t r = 1;
  for (unsigned i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

}  // namespace fairhpo
