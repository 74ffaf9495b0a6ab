// Copyright 2026 The fairhpo Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "fairhpo/pareto.hpp"

namespace fairhpo {

// Per-objective normalization box and a reference point expressed in the
// normalized space (all ones by default).
struct HvSpec {
  std::vector<double> lower;
  std::vector<double> upper;
  std::vector<double> reference;

  // Unit box [0,1]^d with reference (1,...,1).
  static HvSpec unit(std::size_t d);
  static HvSpec bounds(std::vector<double> lower, std::vector<double> upper);

  std::size_t dim() const noexcept { return lower.size(); }
  // Throws InvalidArgument unless lower < upper and sizes agree.
  void validate() const;
  // (v - lower) / (upper - lower), componentwise.
  Point normalize(std::span<const double> v) const;
};

// Dominated volume of already-normalized points w.r.t. `reference`, by
// recursive dimension sweep (slicing on the last objective, closed-form
// sweep in two dimensions). Points not strictly below the reference in
// every objective contribute nothing.
double dominated_volume(std::span<const Point> points, std::span<const double> reference);

// Normalizes `front` with the spec and returns the dominated volume divided
// by the reference box volume, so the result lies in [0,1]. Throws
// InvalidArgument when a point falls below a lower bound by more than 1e-9;
// smaller undershoots are clamped. Supports d <= 6.
double hypervolume_exact(std::span<const Point> front, const HvSpec& spec);

// Fraction of `samples` uniform draws from [0, reference] dominated by a
// normalized front point.
double hv_monte_carlo(std::span<const Point> front, const HvSpec& spec, std::size_t samples, std::uint64_t seed);

struct NormalizedHv {
  double value = 0.0;
  // Points outside the bounds (clamped at the lower side, dropped at the
  // upper side).
  std::size_t clipped = 0;
  std::size_t front_size = 0;
};

// Projects every point onto `objectives`, extracts the Pareto front,
// normalizes with `bounds` (given for the projected objectives) and
// measures hypervolume against the all-ones reference.
NormalizedHv normalized_hypervolume(std::span<const Point> points, std::span<const std::size_t> objectives,
                                    const HvSpec& bounds);

}  // namespace fairhpo
