// Copyright 2026 The fairhpo Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "fairhpo/orchestrator.hpp"
#include "fairhpo/selection.hpp"

namespace fairhpo {

// Decision record exported by the explorer UI:
//   {"version": 1, "run_id": "...",
//    "events": [{"t": "<ISO-8601>", "weights": {metric: w}, "selected_eval_id": n}]}
struct SessionEvent {
  std::string t;
  WeightVector weights;
  std::uint64_t selected_eval_id = 0;
};

struct SessionLog {
  static constexpr int kVersion = 1;
  int version = kVersion;
  std::string run_id;
  std::vector<SessionEvent> events;

  // Throws InvalidArgument on schema violations and UnknownMetric on
  // unknown weight keys.
  static SessionLog from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
};

// Re-runs every logged selection against the stored run. Returns the eval
// id each event selects now; entries differing from the log indicate a
// changed run or a client-side scoring bug.
std::vector<std::uint64_t> replay(const SessionLog& log, const StoredRun& run);

}  // namespace fairhpo
