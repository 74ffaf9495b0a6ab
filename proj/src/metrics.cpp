// Copyright 2026 The fairhpo Authors.
// SPDX-License-Identifier: Apache-2.0

#include "fairhpo/metrics.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "fairhpo/error.hpp"

namespace fairhpo {

namespace {

constexpr std::string_view kNames[] = {"ddsp", "deod", "deop", "invd", "invd_sim", "f1_obj"};

double rate(std::size_t num, std::size_t den) {
  return static_cast<double>(num) / static_cast<double>(den);
}

// Gap between the two groups' P(Yhat=1 | A=a, Y=y).
FlaggedValue conditional_gap(const ConfusionCells& c, std::uint8_t y) {
  const std::size_t n0 = c.count[0][y][0] + c.count[0][y][1];
  const std::size_t n1 = c.count[1][y][0] + c.count[1][y][1];
  if (n0 == 0 || n1 == 0) return {0.0, true};
  return {std::abs(rate(c.count[0][y][1], n0) - rate(c.count[1][y][1], n1)), false};
}

// n[y][p] pooled over groups.
std::array<std::array<double, 2>, 2> label_prediction_counts(const PredictionSet& p) {
  std::array<std::array<double, 2>, 2> n{};
  for (std::size_t i = 0; i < p.size(); ++i) n[p.y_true()[i]][p.y_pred()[i]] += 1.0;
  return n;
}

}  // namespace

std::string_view metric_name(MetricId id) noexcept { return kNames[static_cast<std::size_t>(id)]; }

std::optional<MetricId> parse_metric(std::string_view name) noexcept {
  for (std::size_t i = 0; i < std::size(kNames); ++i) {
    if (kNames[i] == name) return static_cast<MetricId>(i);
  }
  return std::nullopt;
}

MetricId metric_from_name(std::string_view name) {
  if (auto id = parse_metric(name)) return *id;
  throw UnknownMetric(fmt::format("unknown metric id '{}'", name));
}

PredictionSet::PredictionSet(std::span<const std::uint8_t> y_true, std::span<const std::uint8_t> y_pred,
                             std::span<const std::uint8_t> protected_attr)
    : y_true_(y_true), y_pred_(y_pred), protected_(protected_attr) {
  if (y_pred.size() != y_true.size() || protected_attr.size() != y_true.size()) {
    throw InvalidArgument(fmt::format("prediction set length mismatch ({}, {}, {})", y_true.size(),
                                      y_pred.size(), protected_attr.size()));
  }
  auto binary = [](std::span<const std::uint8_t> v) {
    return std::all_of(v.begin(), v.end(), [](std::uint8_t x) { return x <= 1; });
  };
  if (!binary(y_true) || !binary(y_pred) || !binary(protected_attr)) {
    throw InvalidArgument("prediction set entries must be 0 or 1");
  }
}

ConfusionCells ConfusionCells::of(const PredictionSet& p) {
  ConfusionCells c;
  for (std::size_t i = 0; i < p.size(); ++i) {
    ++c.count[p.protected_attr()[i]][p.y_true()[i]][p.y_pred()[i]];
  }
  return c;
}

std::size_t ConfusionCells::group(std::uint8_t a) const {
  return count[a][0][0] + count[a][0][1] + count[a][1][0] + count[a][1][1];
}

std::size_t ConfusionCells::group_positive_predictions(std::uint8_t a) const {
  return count[a][0][1] + count[a][1][1];
}

double ddsp(const PredictionSet& p) {
  const auto c = ConfusionCells::of(p);
  const std::size_t n0 = c.group(0), n1 = c.group(1);
  if (n0 == 0 || n1 == 0) throw InvalidArgument("undefined group rate: a protected group is empty");
  return std::abs(rate(c.group_positive_predictions(0), n0) - rate(c.group_positive_predictions(1), n1));
}

FlaggedValue deop(const PredictionSet& p) { return conditional_gap(ConfusionCells::of(p), 1); }

FlaggedValue deod(const PredictionSet& p) {
  const auto c = ConfusionCells::of(p);
  const auto pos = conditional_gap(c, 1);
  const auto neg = conditional_gap(c, 0);
  return {0.5 * (pos.value + neg.value), pos.undefined || neg.undefined};
}

// Ordered pairs with differing labels and differing predictions come from
// the (y,p) cell pairs {(1,1),(0,0)} and {(1,0),(0,1)}, each counted twice.
double invd(const PredictionSet& p) {
  if (p.size() == 0) return 0.0;
  const auto n = label_prediction_counts(p);
  const double m = static_cast<double>(p.size());
  return 2.0 * (n[1][1] * n[0][0] + n[1][0] * n[0][1]) / (m * m);
}

// Ordered pairs with equal labels but differing predictions.
double invd_sim(const PredictionSet& p) {
  if (p.size() == 0) return 0.0;
  const auto n = label_prediction_counts(p);
  const double m = static_cast<double>(p.size());
  return 2.0 * (n[1][1] * n[1][0] + n[0][1] * n[0][0]) / (m * m);
}

FlaggedValue f1_objective(const PredictionSet& p) {
  const auto n = label_prediction_counts(p);
  const double tp = n[1][1], fp = n[0][1], fn = n[1][0];
  if (tp + fp + fn == 0.0) {
    spdlog::debug("f1_objective: no positive labels or predictions; F1 taken as 1");
    return {0.0, true};
  }
  return {1.0 - 2.0 * tp / (2.0 * tp + fp + fn), false};
}

double ObjectiveVector::at(MetricId id) const {
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (ids[i] == id) return values[i];
  }
  throw UnknownMetric(fmt::format("metric '{}' not in objective vector", metric_name(id)));
}

void check_metric_list(std::span<const MetricId> metrics) {
  if (metrics.empty()) throw InvalidArgument("metric list is empty");
  for (std::size_t i = 0; i < metrics.size(); ++i) {
    for (std::size_t j = i + 1; j < metrics.size(); ++j) {
      if (metrics[i] == metrics[j]) {
        throw InvalidArgument(fmt::format("duplicate metric id '{}'", metric_name(metrics[i])));
      }
    }
  }
}

ObjectiveVector evaluate_all(const PredictionSet& p, std::span<const MetricId> metrics) {
  check_metric_list(metrics);
  ObjectiveVector out;
  out.ids.assign(metrics.begin(), metrics.end());
  out.values.reserve(metrics.size());
  for (auto id : metrics) {
    FlaggedValue v;
    switch (id) {
      case MetricId::kDdsp: v.value = ddsp(p); break;
      case MetricId::kDeod: v = deod(p); break;
      case MetricId::kDeop: v = deop(p); break;
      case MetricId::kInvd: v.value = invd(p); break;
      case MetricId::kInvdSim: v.value = invd_sim(p); break;
      case MetricId::kF1Obj: v = f1_objective(p); break;
    }
    out.values.push_back(v.value);
    if (v.undefined) out.undefined.push_back(id);
  }
  return out;
}

}  // namespace fairhpo
