// Copyright 2026 The fairhpo Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "fairhpo/metrics.hpp"
#include "fairhpo/pareto.hpp"

namespace fairhpo {

// Non-negative weights over distinct metrics, normalized to sum 1.
class WeightVector {
 public:
  // Throws InvalidArgument on negative or non-finite weights, duplicated
  // metrics, or an all-zero vector.
  explicit WeightVector(std::vector<std::pair<MetricId, double>> weights);

  // Parses {"metric_id": weight, ...}. Malformed shapes or values raise
  // InvalidArgument; unknown metric ids raise UnknownMetric.
  static WeightVector from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;

  const std::vector<std::pair<MetricId, double>>& entries() const noexcept { return weights_; }
  double weight_of(MetricId id) const noexcept;

 private:
  std::vector<std::pair<MetricId, double>> weights_;
};

struct FrontMember {
  std::uint64_t eval_id = 0;
  Point objectives;  // ordered as Front::metrics
};

struct Front {
  std::vector<MetricId> metrics;
  std::vector<FrontMember> members;
};

// Keeps the mutually non-dominated members. Duplicated vectors stay.
Front pareto_filter(Front front);

struct RankedEntry {
  std::uint64_t eval_id = 0;
  double score = 0.0;
};

struct SelectionResult {
  std::uint64_t eval_id = 0;
  double score = 0.0;
  std::vector<RankedEntry> ranking;
};

// Full ordering by sum_i w_i * f_i on raw values. Ties: lower f1_obj (when
// the front carries it), then lexicographic objective vector, then lower
// eval id. Throws InvalidArgument for an empty front and UnknownMetric when
// a weighted metric is missing from the front.
std::vector<RankedEntry> what_if(const Front& front, const WeightVector& w);

// Head of what_if, with the ranking attached.
SelectionResult scalarized_select(const Front& front, const WeightVector& w);

// {eval_id, score, ranking: [{eval_id, score}, ...]}
nlohmann::json to_json(const SelectionResult& r);

}  // namespace fairhpo
