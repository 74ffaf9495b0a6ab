// Copyright 2026 The fairhpo Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace fairhpo {

// Objective vector, every component minimized.
using Point = std::vector<double>;

// a <= b componentwise and a < b somewhere. Throws InvalidArgument on a
// dimension mismatch.
bool dominates(std::span<const double> a, std::span<const double> b);

// Fronts of indices into `points`, rank 0 first. Duplicated points share a
// rank. Throws InvalidArgument on mixed dimensions or an empty input.
std::vector<std::vector<std::size_t>> non_dominated_sort(std::span<const Point> points);

// Indices of the rank-0 front, ascending. Empty input gives an empty set.
std::vector<std::size_t> pareto_front_indices(std::span<const Point> points);

// Crowding distance of each member of `front` (indices into `points`),
// aligned with `front`. Objective-wise boundary members get +infinity; an
// objective with zero range adds nothing.
std::vector<double> crowding_distance(std::span<const Point> points, std::span<const std::size_t> front);

// Convenience form over a front given directly as points.
std::vector<double> crowding_distance(std::span<const Point> front);

struct ReferenceDirectionSet {
  std::vector<Point> directions;
  int partitions = 0;
};

// All compositions of p into M non-negative parts, divided by p.
ReferenceDirectionSet das_dennis(int n_objectives, int partitions);

// Binomial coefficient C(n, k) as an exact integer.
std::uint64_t binomial(unsigned n, unsigned k);

}  // namespace fairhpo
