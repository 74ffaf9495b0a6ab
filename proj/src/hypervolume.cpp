// Copyright 2026 The fairhpo Authors.
// SPDX-License-Identifier: Apache-2.0

#include "fairhpo/hypervolume.hpp"

#include <algorithm>
#include <numeric>

#include <fmt/format.h>

#include "fairhpo/error.hpp"
#include "fairhpo/rng.hpp"

namespace fairhpo {

HvSpec HvSpec::unit(std::size_t d) {
  return HvSpec{std::vector<double>(d, 0.0), std::vector<double>(d, 1.0), std::vector<double>(d, 1.0)};
}

HvSpec HvSpec::bounds(std::vector<double> lower, std::vector<double> upper) {
  const std::size_t d = lower.size();
  return HvSpec{std::move(lower), std::move(upper), std::vector<double>(d, 1.0)};
}

void HvSpec::validate() const {
  if (upper.size() != lower.size() || reference.size() != lower.size()) {
    throw InvalidArgument("HvSpec: lower/upper/reference sizes differ");
  }
  for (std::size_t i = 0; i < lower.size(); ++i) {
    if (!(lower[i] < upper[i])) throw InvalidArgument(fmt::format("HvSpec: lower >= upper in objective {}", i));
    if (!(reference[i] > 0.0)) throw InvalidArgument(fmt::format("HvSpec: reference must be > 0 in objective {}", i));
  }
}

Point HvSpec::normalize(std::span<const double> v) const {
  Point out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = (v[i] - lower[i]) / (upper[i] - lower[i]);
  return out;
}

namespace {

double volume_2d(std::vector<Point> pts, std::span<const double> ref) {
  std::sort(pts.begin(), pts.end(), [](const Point& a, const Point& b) {
    return a[0] < b[0] || (a[0] == b[0] && a[1] < b[1]);
  });
  double vol = 0.0, prev_y = ref[1];
  for (const auto& p : pts) {
    if (p[1] < prev_y) {
      vol += (ref[0] - p[0]) * (prev_y - p[1]);
      prev_y = p[1];
    }
  }
  return vol;
}

// Keeps only mutually non-dominated, distinct points.
std::vector<Point> filter_front(std::vector<Point> pts) {
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  std::vector<Point> out;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    bool dominated = false;
    for (std::size_t j = 0; j < pts.size() && !dominated; ++j) {
      if (j == i) continue;
      dominated = std::equal(pts[j].begin(), pts[j].end(), pts[i].begin(), std::less_equal<>());
    }
    if (!dominated) out.push_back(pts[i]);
  }
  return out;
}

double sweep(std::vector<Point> pts, std::span<const double> ref) {
  const std::size_t d = ref.size();
  if (pts.empty()) return 0.0;
  if (d == 1) {
    double best = ref[0];
    for (const auto& p : pts) best = std::min(best, p[0]);
    return ref[0] - best;
  }
  if (d == 2) return volume_2d(std::move(pts), ref);
  pts = filter_front(std::move(pts));
  std::sort(pts.begin(), pts.end(), [d](const Point& a, const Point& b) { return a[d - 1] < b[d - 1]; });
  const std::span<const double> sub_ref = ref.first(d - 1);
  std::vector<Point> slice;
  double vol = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    slice.emplace_back(pts[i].begin(), pts[i].end() - 1);
    const double top = i + 1 < pts.size() ? pts[i + 1][d - 1] : ref[d - 1];
    const double height = top - pts[i][d - 1];
    if (height <= 0.0) continue;
    slice = filter_front(std::move(slice));
    vol += sweep(slice, sub_ref) * height;
  }
  return vol;
}

}  // namespace

double dominated_volume(std::span<const Point> points, std::span<const double> reference) {
  std::vector<Point> inside;
  for (const auto& p : points) {
    if (p.size() != reference.size()) throw InvalidArgument("dominated_volume: dimension mismatch");
    bool below = true;
    for (std::size_t i = 0; i < p.size() && below; ++i) below = p[i] < reference[i];
    if (below) inside.push_back(p);
  }
  return sweep(std::move(inside), reference);
}

namespace {

std::vector<Point> normalized_points(std::span<const Point> front, const HvSpec& spec) {
  std::vector<Point> pts;
  pts.reserve(front.size());
  for (const auto& p : front) {
    if (p.size() != spec.dim()) throw InvalidArgument("hypervolume: point dimension differs from spec");
    Point q = spec.normalize(p);
    for (std::size_t i = 0; i < q.size(); ++i) {
      if (q[i] < -1e-9) {
        throw InvalidArgument(fmt::format("hypervolume: objective {} value {} below lower bound {}", i, p[i],
                                          spec.lower[i]));
      }
      q[i] = std::max(q[i], 0.0);
    }
    pts.push_back(std::move(q));
  }
  return pts;
}

}  // namespace

double hypervolume_exact(std::span<const Point> front, const HvSpec& spec) {
  spec.validate();
  if (spec.dim() > 6) throw InvalidArgument("hypervolume_exact: supports at most 6 objectives");
  const auto pts = normalized_points(front, spec);
  double box = 1.0;
  for (double r : spec.reference) box *= r;
  return dominated_volume(pts, spec.reference) / box;
}

double hv_monte_carlo(std::span<const Point> front, const HvSpec& spec, std::size_t samples, std::uint64_t seed) {
  spec.validate();
  if (front.empty() || samples == 0) return 0.0;
  const auto pts = normalized_points(front, spec);
  const std::size_t d = spec.dim();
  Rng rng(seed);
  std::vector<double> s(d);
  std::size_t hits = 0;
  for (std::size_t k = 0; k < samples; ++k) {
    for (std::size_t i = 0; i < d; ++i) s[i] = uniform01(rng) * spec.reference[i];
    for (const auto& p : pts) {
      bool dom = true;
      for (std::size_t i = 0; i < d && dom; ++i) dom = p[i] <= s[i];
      if (dom) {
        ++hits;
        break;
      }
    }
  }
  return static_cast<double>(hits) / static_cast<double>(samples);
}

NormalizedHv normalized_hypervolume(std::span<const Point> points, std::span<const std::size_t> objectives,
                                    const HvSpec& bounds) {
  bounds.validate();
  if (bounds.dim() != objectives.size()) throw InvalidArgument("normalized_hypervolume: bounds/objectives size mismatch");
  std::vector<Point> projected;
  projected.reserve(points.size());
  for (const auto& p : points) {
    Point q;
    q.reserve(objectives.size());
    for (auto o : objectives) {
      if (o >= p.size()) throw InvalidArgument("normalized_hypervolume: objective index out of range");
      q.push_back(p[o]);
    }
    projected.push_back(std::move(q));
  }
  NormalizedHv out;
  if (projected.empty()) return out;
  std::vector<Point> front;
  for (auto i : pareto_front_indices(projected)) front.push_back(projected[i]);
  out.front_size = front.size();
  std::vector<Point> normalized;
  for (const auto& p : front) {
    Point q = bounds.normalize(p);
    bool clipped = false;
    for (auto& v : q) {
      if (v < -1e-9 || v > 1.0 + 1e-9) clipped = true;
      v = std::max(v, 0.0);
    }
    if (clipped) ++out.clipped;
    normalized.push_back(std::move(q));
  }
  out.value = dominated_volume(normalized, bounds.reference);
  return out;
}

}  // namespace fairhpo
