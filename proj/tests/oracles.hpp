// Copyright 2026 The fairhpo Authors.
// SPDX-License-Identifier: Apache-2.0

// Independent reference implementations used by the unit and acceptance
// tests. Everything here is written from the definitions by direct
// enumeration and shares no code with the library beyond plain types.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace fairhpo::oracle {

struct Labels {
  std::vector<std::uint8_t> y, yhat, a;
};

inline Labels random_labels(std::mt19937_64& gen, std::size_t m) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  // Per-set skew so some sets have rare cells.
  const double py = u(gen), pp = u(gen), pa = u(gen);
  Labels l;
  for (std::size_t i = 0; i < m; ++i) {
    l.y.push_back(u(gen) < py);
    l.yhat.push_back(u(gen) < pp);
    l.a.push_back(u(gen) < pa);
  }
  return l;
}

// P(yhat = 1 | a == group [, y == label]) by scanning rows; returns -1 for
// an empty condition.
inline double cond_rate(const Labels& l, int group, int label = -1) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < l.y.size(); ++i) {
    if (l.a[i] != group) continue;
    if (label >= 0 && l.y[i] != label) continue;
    den += 1.0;
    num += l.yhat[i];
  }
  return den == 0.0 ? -1.0 : num / den;
}

inline bool has_both_groups(const Labels& l) {
  return std::count(l.a.begin(), l.a.end(), 0) > 0 && std::count(l.a.begin(), l.a.end(), 1) > 0;
}

inline double ddsp(const Labels& l) { return std::abs(cond_rate(l, 0) - cond_rate(l, 1)); }

// Gap with the empty-cell convention: 0 when either side is undefined.
inline double gap(const Labels& l, int label) {
  const double r0 = cond_rate(l, 0, label), r1 = cond_rate(l, 1, label);
  if (r0 < 0.0 || r1 < 0.0) return 0.0;
  return std::abs(r0 - r1);
}

inline double deop(const Labels& l) { return gap(l, 1); }
inline double deod(const Labels& l) { return 0.5 * (gap(l, 1) + gap(l, 0)); }

// Double sum over ordered pairs, straight from the definition.
inline double invd(const Labels& l) {
  const std::size_t m = l.y.size();
  double s = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      s += std::abs(int(l.y[i]) - int(l.y[j])) * std::abs(int(l.yhat[i]) - int(l.yhat[j]));
    }
  }
  return s / double(m * m);
}

inline double invd_sim(const Labels& l) {
  const std::size_t m = l.y.size();
  double s = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      s += (1 - std::abs(int(l.y[i]) - int(l.y[j]))) * std::abs(int(l.yhat[i]) - int(l.yhat[j]));
    }
  }
  return s / double(m * m);
}

inline double f1_obj(const Labels& l) {
  double tp = 0, fp = 0, fn = 0;
  for (std::size_t i = 0; i < l.y.size(); ++i) {
    tp += l.y[i] && l.yhat[i];
    fp += !l.y[i] && l.yhat[i];
    fn += l.y[i] && !l.yhat[i];
  }
  if (tp + fp + fn == 0) return 0.0;
  const double precision = tp + fp > 0 ? tp / (tp + fp) : 0.0;
  const double recall = tp + fn > 0 ? tp / (tp + fn) : 0.0;
  if (precision + recall == 0.0) return 1.0;
  return 1.0 - 2.0 * precision * recall / (precision + recall);
}

using Vec = std::vector<double>;

inline bool weakly_better_somewhere_strict(const Vec& a, const Vec& b) {
  bool strict = false;
  for (std::size_t k = 0; k < a.size(); ++k) {
    if (a[k] > b[k]) return false;
    if (a[k] < b[k]) strict = true;
  }
  return strict;
}

// Indices of points no other point dominates.
inline std::vector<std::size_t> pareto_filter(const std::vector<Vec>& pts, const std::vector<bool>& alive) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (!alive[i]) continue;
    bool dominated = false;
    for (std::size_t j = 0; j < pts.size() && !dominated; ++j) {
      dominated = alive[j] && j != i && weakly_better_somewhere_strict(pts[j], pts[i]);
    }
    if (!dominated) out.push_back(i);
  }
  return out;
}

// Ranks by repeatedly removing the current Pareto set.
inline std::vector<std::size_t> peel_ranks(const std::vector<Vec>& pts) {
  std::vector<bool> alive(pts.size(), true);
  std::vector<std::size_t> rank(pts.size(), 0);
  std::size_t left = pts.size(), r = 0;
  while (left > 0) {
    const auto front = pareto_filter(pts, alive);
    for (auto i : front) {
      rank[i] = r;
      alive[i] = false;
    }
    left -= front.size();
    ++r;
  }
  return rank;
}

// Inclusion-exclusion over all subsets; exact for small fronts in the
// unit box with reference (1,...,1).
inline double hv_inclusion_exclusion(const std::vector<Vec>& pts) {
  const std::size_t n = pts.size();
  double total = 0.0;
  for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << n); ++mask) {
    const std::size_t d = pts.front().size();
    Vec corner(d, 0.0);
    int bits = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (!(mask >> i & 1)) continue;
      ++bits;
      for (std::size_t k = 0; k < d; ++k) corner[k] = std::max(corner[k], pts[i][k]);
    }
    double vol = 1.0;
    for (double c : corner) vol *= std::max(0.0, 1.0 - c);
    total += (bits % 2 == 1 ? 1.0 : -1.0) * vol;
  }
  return total;
}

// Linear scan for the minimum weighted sum. `weights` are raw (not yet
// normalized) and aligned with the columns; `f0` is the column used as
// the first tie-break, or -1.
inline std::size_t scan_select(const std::vector<Vec>& pts, const std::vector<std::uint64_t>& ids,
                               const std::vector<double>& weights, int f0) {
  double total = 0.0;
  for (double w : weights) total += w;
  auto score = [&](const Vec& p) {
    double s = 0.0;
    for (std::size_t k = 0; k < p.size(); ++k) {
      if (weights[k] != 0.0) s += weights[k] / total * p[k];
    }
    return s;
  };
  std::size_t best = 0;
  for (std::size_t i = 1; i < pts.size(); ++i) {
    const double si = score(pts[i]), sb = score(pts[best]);
    bool better;
    if (si != sb) {
      better = si < sb;
    } else if (f0 >= 0 && pts[i][f0] != pts[best][f0]) {
      better = pts[i][f0] < pts[best][f0];
    } else if (pts[i] != pts[best]) {
      better = pts[i] < pts[best];
    } else {
      better = ids[i] < ids[best];
    }
    if (better) best = i;
  }
  return best;
}

}  // namespace fairhpo::oracle
