// Copyright 2026 The fairhpo Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace fairhpo {

enum class MetricId : std::uint8_t { kDdsp, kDeod, kDeop, kInvd, kInvdSim, kF1Obj };

inline constexpr MetricId kAllMetrics[] = {MetricId::kDdsp, MetricId::kDeod, MetricId::kDeop,
                                           MetricId::kInvd, MetricId::kInvdSim, MetricId::kF1Obj};

// The four group/individual unfairness metrics used as objectives by default.
inline constexpr MetricId kFairnessMetrics[] = {MetricId::kDdsp, MetricId::kDeod, MetricId::kDeop,
                                                MetricId::kInvd};

// "ddsp", "deod", "deop", "invd", "invd_sim", "f1_obj".
std::string_view metric_name(MetricId id) noexcept;
std::optional<MetricId> parse_metric(std::string_view name) noexcept;
// Throws UnknownMetric for unknown names.
MetricId metric_from_name(std::string_view name);

// Non-owning view of labels, predictions and group membership. All three
// spans must have equal length and binary entries; the constructor checks.
class PredictionSet {
 public:
  PredictionSet(std::span<const std::uint8_t> y_true, std::span<const std::uint8_t> y_pred,
                std::span<const std::uint8_t> protected_attr);

  std::size_t size() const noexcept { return y_true_.size(); }
  std::span<const std::uint8_t> y_true() const noexcept { return y_true_; }
  std::span<const std::uint8_t> y_pred() const noexcept { return y_pred_; }
  std::span<const std::uint8_t> protected_attr() const noexcept { return protected_; }

 private:
  std::span<const std::uint8_t> y_true_;
  std::span<const std::uint8_t> y_pred_;
  std::span<const std::uint8_t> protected_;
};

// Counts of rows by (protected a, label y, prediction p).
struct ConfusionCells {
  // count[a][y][p]
  std::size_t count[2][2][2] = {};

  static ConfusionCells of(const PredictionSet& p);
  std::size_t group(std::uint8_t a) const;
  std::size_t group_positive_predictions(std::uint8_t a) const;
};

struct FlaggedValue {
  double value = 0.0;
  // A conditioning cell was empty and its term contributed zero.
  bool undefined = false;
};

// |P(Yhat=1|A=0) - P(Yhat=1|A=1)|. Throws InvalidArgument("undefined group
// rate") when either group is empty.
double ddsp(const PredictionSet& p);
// |TPR(A=0) - TPR(A=1)|.
FlaggedValue deop(const PredictionSet& p);
// Mean over y of |P(Yhat=1|A=0,Y=y) - P(Yhat=1|A=1,Y=y)|.
FlaggedValue deod(const PredictionSet& p);
// (1/m^2) * sum_{i,j} |y_i - y_j| * |yhat_i - yhat_j| over ordered pairs.
double invd(const PredictionSet& p);
// (1/m^2) * sum_{i,j} (1 - |y_i - y_j|) * |yhat_i - yhat_j|.
double invd_sim(const PredictionSet& p);
// 1 - F1 with F1 = 2TP / (2TP + FP + FN); F1 := 1 when TP+FP+FN = 0 (flagged).
FlaggedValue f1_objective(const PredictionSet& p);

struct ObjectiveVector {
  std::vector<MetricId> ids;
  std::vector<double> values;
  // Metrics whose value relied on the empty-cell policy.
  std::vector<MetricId> undefined;

  std::size_t size() const noexcept { return ids.size(); }
  // Throws NotFound if `id` is absent.
  double at(MetricId id) const;
};

// Values in request order. Throws InvalidArgument on an empty or
// duplicated request.
ObjectiveVector evaluate_all(const PredictionSet& p, std::span<const MetricId> metrics);

// Checks a metric list is non-empty and duplicate-free.
void check_metric_list(std::span<const MetricId> metrics);

}  // namespace fairhpo
