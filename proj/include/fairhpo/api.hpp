// Copyright 2026 The fairhpo Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "fairhpo/orchestrator.hpp"

namespace fairhpo {

// Payload builders shared by the CLI and the HTTP service, so both paths
// return identical numbers.

// {runs: [{run_id, collection, dataset, learner, formulation, seed,
//          objectives, metrics, n_evals, status}]}
nlohmann::json runs_payload(const RunStore& store);
// {run_id, total, offset, limit, records: [ArchiveRecord JSON...]}
nlohmann::json archive_payload(const StoredRun& run, std::size_t offset, std::size_t limit);
// {run_id, objectives, points: [{eval_id, values}]}; needs >= 2 objectives.
nlohmann::json front_payload(const StoredRun& run, std::span<const MetricId> objectives);
// {run_id, objectives, bounds, corners, points: [{eval_id, x, y,
//  barycentric, values, degenerate}]}; exactly 3 objectives.
nlohmann::json ternary_payload(const StoredRun& run, std::span<const MetricId> objectives);
// ContrastMatrix JSON plus {collection}.
nlohmann::json contrast_payload(const RunStore& store, std::string_view collection);
// FormulationComparison JSON plus {collection}.
nlohmann::json compare_payload(const RunStore& store, std::string_view collection);
// BehaviorReport JSON over out-of-fold predictions plus {run_id, eval_id,
// params}.
nlohmann::json behavior_payload(const StoredRun& run, std::uint64_t eval_id);
// Selection over the run's Pareto front: {run_id, weights, eval_id, score,
// ranking}.
nlohmann::json select_payload(const StoredRun& run, const nlohmann::json& weights);

// "ddsp,invd" -> ids. Throws UnknownMetric / InvalidArgument.
std::vector<MetricId> parse_metric_csv(std::string_view text);

struct ApiRequest {
  std::string method;
  std::string path;
  std::map<std::string, std::string> query;
  std::string body;
};

struct ApiResponse {
  int status = 200;
  nlohmann::json body;
};

// Read-only JSON service over a run store. Routes:
//   GET  /runs
//   GET  /runs/{id}
//   GET  /runs/{id}/archive?offset=&limit=
//   GET  /runs/{id}/front?objectives=a,b
//   GET  /runs/{id}/ternary?objectives=a,b,c
//   GET  /runs/{id}/behavior/{eval_id}
//   POST /runs/{id}/select            body: {metric_id: weight}
//   GET  /collections/{id}/contrast
//   GET  /collections/{id}/compare
// Errors: 404 unknown run, collection or evaluation; 400 malformed input;
// 422 unknown metric id or incomplete grid; 500 otherwise. Error bodies are
// {"error": {"kind", "message"}}.
class ApiService {
 public:
  explicit ApiService(RunStore store) : store_(std::move(store)) {}
  ApiResponse handle(const ApiRequest& req) const;
  const RunStore& store() const noexcept { return store_; }

 private:
  RunStore store_;
};

// HTTP status for a library error kind.
int status_for_kind(std::string_view kind) noexcept;

// Blocks serving `service` with permissive CORS headers.
void serve_http(const ApiService& service, const std::string& host, int port);

}  // namespace fairhpo
