// Copyright 2026 The fairhpo Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "fairhpo/error.hpp"
#include "fairhpo/hypervolume.hpp"
#include "fairhpo/metrics.hpp"
#include "fairhpo/orchestrator.hpp"
#include "fairhpo/selection.hpp"

namespace fairhpo {

// Raised when a contrast grid or a BiO/MaO comparison lacks runs; the
// message lists every missing cell.
class IncompleteGrid : public DataError {
 public:
  IncompleteGrid(const std::string& what, std::vector<std::string> missing)
      : DataError(what), missing_(std::move(missing)) {}
  const char* kind() const noexcept override { return "incomplete_grid"; }
  const std::vector<std::string>& missing() const noexcept { return missing_; }

 private:
  std::vector<std::string> missing_;
};

// One archive reduced to what the analyses need.
struct CollectionMember {
  std::string run_id;
  std::string dataset;
  LearnerId learner = LearnerId::kRandomForest;
  Formulation formulation;
  std::uint64_t seed = 0;
  std::vector<std::uint64_t> eval_ids;
  std::vector<Point> points;  // aligned with RunCollection::metrics
};

// Archives sharing one metric vocabulary. Normalization bounds are the
// per-objective min/max over the union of members with the same (dataset,
// learner); a zero-width range is widened to [lo, lo + 1].
class RunCollection {
 public:
  explicit RunCollection(std::vector<MetricId> metrics);
  static RunCollection from_runs(std::span<const StoredRun> runs);

  // Throws InvalidArgument if the member's points do not match the metric
  // vocabulary.
  void add(CollectionMember member);

  const std::vector<MetricId>& metrics() const noexcept { return metrics_; }
  const std::vector<CollectionMember>& members() const noexcept { return members_; }
  std::size_t column(MetricId id) const;

  // Bounds for (f1_obj, f) over the members of the given group.
  HvSpec bounds(std::string_view dataset, LearnerId learner, std::span<const MetricId> objectives) const;

  const CollectionMember* find(std::string_view dataset, LearnerId learner, const Formulation& f,
                               std::uint64_t seed) const;
  // Distinct (dataset, learner) pairs in insertion order.
  std::vector<std::pair<std::string, LearnerId>> groups() const;

 private:
  std::vector<MetricId> metrics_;
  std::vector<CollectionMember> members_;
};

// hv_direct - hv_indirect; both must lie in [0,1].
double contrast_from_hv(double hv_direct, double hv_indirect);

// H_f(member): normalized hypervolume of the member's (f1_obj, f)
// projection under the collection's bounds.
double bi_hypervolume(const RunCollection& runs, const CollectionMember& member, MetricId f);

struct ContrastCell {
  double mean = 0.0;
  double min = 0.0;
  double max = 0.0;
  std::vector<std::uint64_t> seeds;
  std::vector<double> per_seed;
};

// C(f_i, f_j) averaged over seeds where both BiO archives exist. The
// collection must hold a single (dataset, learner) group unless one is
// named. Throws IncompleteGrid when no seed matches.
ContrastCell contrast(const RunCollection& runs, MetricId f_i, MetricId f_j,
                      std::optional<std::pair<std::string, LearnerId>> group = std::nullopt);

struct ContrastMatrix {
  std::string dataset;
  LearnerId learner = LearnerId::kRandomForest;
  std::vector<MetricId> metrics;
  // [j][i] = C(f_i, f_j)
  std::vector<std::vector<ContrastCell>> cells;
  // Bounds per fairness metric, for (f1_obj, f).
  std::vector<HvSpec> bounds;

  nlohmann::json to_json() const;
  // row_metric,col_metric,value,min,max,n_seeds
  std::string to_csv() const;
};

// Every BiO seed must exist for every metric; otherwise IncompleteGrid
// lists the missing (metric, seed) cells. Metrics default to the BiO
// metrics present in the collection, in vocabulary order.
ContrastMatrix contrast_matrix(const RunCollection& runs, std::vector<MetricId> metrics = {},
                               std::optional<std::pair<std::string, LearnerId>> group = std::nullopt);

struct ComparisonPair {
  std::string dataset;
  LearnerId learner = LearnerId::kRandomForest;
  MetricId metric = MetricId::kDdsp;
  std::uint64_t seed = 0;
  double hv_bi = 0.0;
  double hv_many = 0.0;
  double regret = 0.0;  // hv_bi - hv_many
};

struct FormulationComparison {
  std::vector<ComparisonPair> pairs;
  std::optional<double> pearson_r;  // nullopt when either side is constant
  double mean_regret = 0.0;

  bool degenerate() const noexcept { return !pearson_r.has_value(); }
  nlohmann::json to_json() const;
};

// Pearson correlation; nullopt when fewer than two points or a side has
// zero variance.
std::optional<double> pearson(std::span<const double> a, std::span<const double> b);

// Pairs every MaO archive with the BiO archive of the same (dataset,
// learner, seed) for each of its fairness metrics.
FormulationComparison formulation_comparison(const RunCollection& runs);

struct TernaryPoint {
  std::uint64_t eval_id = 0;
  double x = 0.0;
  double y = 0.0;
  std::array<double, 3> barycentric{};
  std::array<double, 3> values{};
  bool degenerate = false;
};

// Corners: objective 0 at (0,0), objective 1 at (1,0), objective 2 at
// (1/2, sqrt(3)/2). Each value is min-max normalized by `bounds` and
// clamped to [0,1]; barycentric weights are the normalized values over
// their sum, so a point sits closest to the corner of its worst objective.
// All-zero points map to the centroid and are flagged.
std::vector<TernaryPoint> ternary_projection(std::span<const Point> points, std::span<const std::uint64_t> ids,
                                             std::span<const std::size_t> three_objectives, const HvSpec& bounds);
// x,y,eval_id,<objective names...>
std::string ternary_csv(std::span<const TernaryPoint> pts, std::span<const MetricId> objectives);

struct BehaviorReport {
  std::size_t m = 0;
  // [a][y][p]
  std::size_t counts[2][2][2] = {};
  std::size_t group_size[2] = {};
  // P(Yhat=1 | A=a); nullopt when the group is empty.
  std::optional<double> acceptance_rate[2];
  // P(Y=1 | A=a)
  std::optional<double> qualification_rate[2];
  // P(Yhat=1 | A=a, Y=y)
  std::optional<double> conditional_acceptance[2][2];
  std::optional<double> ddsp;
  FlaggedValue deop;
  FlaggedValue deod;
  double invd = 0.0;
  double invd_sim = 0.0;
  FlaggedValue f1_obj;

  nlohmann::json to_json() const;
};

BehaviorReport behavior_report(const PredictionSet& p);

// Pareto front of a stored run over `objectives` (the run's own objectives
// when empty).
Front run_front(const StoredRun& run, std::span<const MetricId> objectives = {});

// Front bounds for a run: min/max of each objective over the whole archive.
HvSpec run_bounds(const StoredRun& run, std::span<const MetricId> objectives);

}  // namespace fairhpo
