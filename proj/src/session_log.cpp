// Copyright 2026 The fairhpo Authors.
// SPDX-License-Identifier: Apache-2.0

#include "fairhpo/session_log.hpp"

#include <fmt/format.h>

#include "fairhpo/analysis.hpp"
#include "fairhpo/error.hpp"

namespace fairhpo {

using nlohmann::json;

SessionLog SessionLog::from_json(const json& j) {
  if (!j.is_object()) throw InvalidArgument("session log: expected an object");
  SessionLog log;
  try {
    log.version = j.at("version").get<int>();
    log.run_id = j.at("run_id").get<std::string>();
    if (log.version != kVersion) throw InvalidArgument(fmt::format("session log: unsupported version {}", log.version));
    const auto& events = j.at("events");
    if (!events.is_array()) throw InvalidArgument("session log: events must be an array");
    for (const auto& e : events) {
      auto weights = WeightVector::from_json(e.at("weights"));
      auto t = e.at("t").get<std::string>();
      const auto id = e.at("selected_eval_id").get<std::uint64_t>();
      log.events.push_back({std::move(t), std::move(weights), id});
    }
  } catch (const json::exception& e) {
    throw InvalidArgument(fmt::format("session log: {}", e.what()));
  }
  return log;
}

json SessionLog::to_json() const {
  json events_json = json::array();
  for (const auto& e : events) {
    events_json.push_back({{"t", e.t}, {"weights", e.weights.to_json()}, {"selected_eval_id", e.selected_eval_id}});
  }
  return {{"version", version}, {"run_id", run_id}, {"events", std::move(events_json)}};
}

std::vector<std::uint64_t> replay(const SessionLog& log, const StoredRun& run) {
  if (log.run_id != run.run_id) {
    throw InvalidArgument(fmt::format("session log is for run '{}', not '{}'", log.run_id, run.run_id));
  }
  const Front front = run_front(run);
  std::vector<std::uint64_t> out;
  for (const auto& e : log.events) out.push_back(scalarized_select(front, e.weights).eval_id);
  return out;
}

}  // namespace fairhpo
