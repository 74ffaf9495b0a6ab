// Copyright 2026 The fairhpo Authors.
// SPDX-License-Identifier: Apache-2.0

#include "fairhpo/selection.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/format.h>

#include "fairhpo/error.hpp"

namespace fairhpo {

WeightVector::WeightVector(std::vector<std::pair<MetricId, double>> weights) : weights_(std::move(weights)) {
  if (weights_.empty()) throw InvalidArgument("weights: empty weight vector");
  double total = 0.0;
  for (std::size_t i = 0; i < weights_.size(); ++i) {
    const auto [id, w] = weights_[i];
    if (!std::isfinite(w) || w < 0.0) {
      throw InvalidArgument(fmt::format("weights: '{}' must be a finite non-negative number", metric_name(id)));
    }
    for (std::size_t j = 0; j < i; ++j) {
      if (weights_[j].first == id) throw InvalidArgument(fmt::format("weights: '{}' given twice", metric_name(id)));
    }
    total += w;
  }
  if (!(total > 0.0)) throw InvalidArgument("weights: at least one weight must be positive");
  for (auto& e : weights_) e.second /= total;
}

WeightVector WeightVector::from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw InvalidArgument("weights: expected a JSON object {metric_id: weight}");
  std::vector<std::pair<MetricId, double>> out;
  for (const auto& [key, value] : j.items()) {
    const MetricId id = metric_from_name(key);
    if (!value.is_number()) throw InvalidArgument(fmt::format("weights: value for '{}' is not a number", key));
    out.emplace_back(id, value.get<double>());
  }
  return WeightVector(std::move(out));
}

nlohmann::json WeightVector::to_json() const {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& [id, w] : weights_) j[std::string(metric_name(id))] = w;
  return j;
}

double WeightVector::weight_of(MetricId id) const noexcept {
  for (const auto& [m, w] : weights_) {
    if (m == id) return w;
  }
  return 0.0;
}

Front pareto_filter(Front front) {
  std::vector<Point> pts;
  pts.reserve(front.members.size());
  for (const auto& m : front.members) pts.push_back(m.objectives);
  Front out{front.metrics, {}};
  for (auto i : pareto_front_indices(pts)) out.members.push_back(std::move(front.members[i]));
  return out;
}

std::vector<RankedEntry> what_if(const Front& front, const WeightVector& w) {
  if (front.members.empty()) throw InvalidArgument("selection: empty front");
  std::vector<std::pair<std::size_t, double>> terms;
  for (const auto& [id, weight] : w.entries()) {
    const auto it = std::find(front.metrics.begin(), front.metrics.end(), id);
    if (it == front.metrics.end()) {
      throw UnknownMetric(fmt::format("selection: weighted metric '{}' is not an objective of this front",
                                      metric_name(id)));
    }
    terms.emplace_back(static_cast<std::size_t>(it - front.metrics.begin()), weight);
  }
  const auto f0 = std::find(front.metrics.begin(), front.metrics.end(), MetricId::kF1Obj);
  const bool has_f0 = f0 != front.metrics.end();
  const std::size_t f0_col = static_cast<std::size_t>(f0 - front.metrics.begin());

  std::vector<double> score(front.members.size(), 0.0);
  for (std::size_t i = 0; i < front.members.size(); ++i) {
    const auto& obj = front.members[i].objectives;
    if (obj.size() != front.metrics.size()) throw InvalidArgument("selection: member objective size mismatch");
    for (const auto& [col, weight] : terms) score[i] += weight * obj[col];
  }
  std::vector<std::size_t> order(front.members.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (score[a] != score[b]) return score[a] < score[b];
    const auto& oa = front.members[a].objectives;
    const auto& ob = front.members[b].objectives;
    if (has_f0 && oa[f0_col] != ob[f0_col]) return oa[f0_col] < ob[f0_col];
    if (oa != ob) return oa < ob;
    return front.members[a].eval_id < front.members[b].eval_id;
  });
  std::vector<RankedEntry> ranking;
  ranking.reserve(order.size());
  for (auto i : order) ranking.push_back({front.members[i].eval_id, score[i]});
  return ranking;
}

SelectionResult scalarized_select(const Front& front, const WeightVector& w) {
  SelectionResult r;
  r.ranking = what_if(front, w);
  r.eval_id = r.ranking.front().eval_id;
  r.score = r.ranking.front().score;
  return r;
}

nlohmann::json to_json(const SelectionResult& r) {
  nlohmann::json ranking = nlohmann::json::array();
  for (const auto& e : r.ranking) ranking.push_back({{"eval_id", e.eval_id}, {"score", e.score}});
  return {{"eval_id", r.eval_id}, {"score", r.score}, {"ranking", std::move(ranking)}};
}

}  // namespace fairhpo
