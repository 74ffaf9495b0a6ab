// Copyright 2026 The fairhpo Authors.
// SPDX-License-Identifier: Apache-2.0

#include "fairhpo/api.hpp"

#include <charconv>
#include <cmath>

#include <fmt/format.h>
#include <httplib.h>
#include <spdlog/spdlog.h>

#include "fairhpo/analysis.hpp"
#include "fairhpo/error.hpp"
#include "fairhpo/selection.hpp"

namespace fairhpo {

using nlohmann::json;

namespace {

json names(std::span<const MetricId> ids) {
  json a = json::array();
  for (auto m : ids) a.push_back(metric_name(m));
  return a;
}

std::uint64_t parse_uint(std::string_view text, std::string_view what) {
  std::uint64_t v = 0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (text.empty() || ec != std::errc() || ptr != end) {
    throw InvalidArgument(fmt::format("{} must be a non-negative integer (got '{}')", what, text));
  }
  return v;
}

}  // namespace

std::vector<MetricId> parse_metric_csv(std::string_view text) {
  std::vector<MetricId> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto pos = text.find(',', start);
    const auto item = text.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start);
    if (item.empty()) throw InvalidArgument(fmt::format("malformed metric list '{}'", text));
    out.push_back(metric_from_name(item));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  check_metric_list(out);
  return out;
}

json runs_payload(const RunStore& store) {
  json runs = json::array();
  for (const auto& id : store.list()) {
    const json m = store.manifest(id);
    runs.push_back({{"run_id", id},
                    {"collection", m.value("collection", "")},
                    {"dataset", m.at("dataset").value("name", "")},
                    {"learner", m.at("config").value("learner", "")},
                    {"formulation", m.value("formulation", "")},
                    {"seed", m.value("seed", std::uint64_t{0})},
                    {"objectives", m.value("objectives", json::array())},
                    {"metrics", m.value("metrics", json::array())},
                    {"n_evals", m.value("n_evals", json(nullptr))},
                    {"status", m.value("status", "")}});
  }
  return {{"runs", std::move(runs)}};
}

json archive_payload(const StoredRun& run, std::size_t offset, std::size_t limit) {
  if (limit == 0 || limit > 1000) throw InvalidArgument("limit must be in [1, 1000]");
  json records = json::array();
  for (std::size_t i = offset; i < run.records.size() && i < offset + limit; ++i) {
    records.push_back(run.records[i].to_json(run.metrics));
  }
  return {{"run_id", run.run_id},
          {"total", run.records.size()},
          {"offset", offset},
          {"limit", limit},
          {"metrics", names(run.metrics)},
          {"records", std::move(records)}};
}

json front_payload(const StoredRun& run, std::span<const MetricId> objectives) {
  std::vector<MetricId> objs(objectives.begin(), objectives.end());
  if (objs.empty()) objs = run.objectives();
  if (objs.size() < 2) throw InvalidArgument("front needs at least 2 objectives");
  check_metric_list(objs);
  const Front f = run_front(run, objs);
  json pts = json::array();
  for (const auto& m : f.members) pts.push_back({{"eval_id", m.eval_id}, {"values", m.objectives}});
  return {{"run_id", run.run_id}, {"objectives", names(objs)}, {"points", std::move(pts)}};
}

json ternary_payload(const StoredRun& run, std::span<const MetricId> objectives) {
  if (objectives.size() != 3) {
    throw InvalidArgument(fmt::format("ternary needs exactly 3 objectives (got {})", objectives.size()));
  }
  check_metric_list(objectives);
  for (auto m : objectives) run.column(m);
  const Front front = run_front(run);
  std::vector<Point> pts;
  std::vector<std::uint64_t> ids;
  for (const auto& m : front.members) {
    ids.push_back(m.eval_id);
    pts.push_back(run.record(m.eval_id).objectives);
  }
  std::vector<std::size_t> cols;
  for (auto m : objectives) cols.push_back(run.column(m));
  const HvSpec bounds = run_bounds(run, objectives);
  json out = json::array();
  for (const auto& t : ternary_projection(pts, ids, cols, bounds)) {
    out.push_back({{"eval_id", t.eval_id},
                   {"x", t.x},
                   {"y", t.y},
                   {"barycentric", t.barycentric},
                   {"values", t.values},
                   {"degenerate", t.degenerate}});
  }
  return {{"run_id", run.run_id},
          {"objectives", names(objectives)},
          {"bounds", {{"lower", bounds.lower}, {"upper", bounds.upper}}},
          {"corners", json::array({json::array({0.0, 0.0}), json::array({1.0, 0.0}),
                                   json::array({0.5, std::sqrt(3.0) / 2.0})})},
          {"points", std::move(out)}};
}

json contrast_payload(const RunStore& store, std::string_view collection) {
  const auto runs = store.load_collection(collection);
  json j = contrast_matrix(RunCollection::from_runs(runs)).to_json();
  j["collection"] = collection;
  return j;
}

json compare_payload(const RunStore& store, std::string_view collection) {
  const auto runs = store.load_collection(collection);
  json j = formulation_comparison(RunCollection::from_runs(runs)).to_json();
  j["collection"] = collection;
  return j;
}

json behavior_payload(const StoredRun& run, std::uint64_t eval_id) {
  const ArchiveRecord& rec = run.record(eval_id);
  const auto oof = retrain_out_of_fold(run, eval_id);
  const PredictionSet ps(oof.dataset.target, oof.predictions, oof.dataset.protected_attr);
  json j = behavior_report(ps).to_json();
  j["run_id"] = run.run_id;
  j["eval_id"] = eval_id;
  j["params"] = rec.params;
  j["scope"] = "out-of-fold predictions over every row";
  return j;
}

json select_payload(const StoredRun& run, const json& weights) {
  const WeightVector w = WeightVector::from_json(weights);
  json j = to_json(scalarized_select(run_front(run), w));
  j["run_id"] = run.run_id;
  j["weights"] = w.to_json();
  return j;
}

int status_for_kind(std::string_view kind) noexcept {
  if (kind == "unknown_metric" || kind == "incomplete_grid") return 422;
  if (kind == "not_found") return 404;
  if (kind == "invalid_argument") return 400;
  return 500;
}

namespace {

std::vector<std::string> segments(std::string_view path) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < path.size()) {
    while (i < path.size() && path[i] == '/') ++i;
    const auto j = path.find('/', i);
    const auto end = j == std::string_view::npos ? path.size() : j;
    if (end > i) out.emplace_back(path.substr(i, end - i));
    i = end;
  }
  return out;
}

ApiResponse error_response(int status, std::string_view kind, std::string_view message) {
  return {status, {{"error", {{"kind", kind}, {"message", message}}}}};
}

std::string query_value(const ApiRequest& req, const std::string& key, std::string fallback = {}) {
  const auto it = req.query.find(key);
  return it == req.query.end() ? fallback : it->second;
}

}  // namespace

ApiResponse ApiService::handle(const ApiRequest& req) const {
  const auto seg = segments(req.path);
  try {
    const bool get = req.method == "GET";
    if (get && seg.size() == 1 && seg[0] == "runs") return {200, runs_payload(store_)};
    if (seg.size() >= 2 && seg[0] == "runs") {
      if (!store_.exists(seg[1])) return error_response(404, "not_found", fmt::format("unknown run '{}'", seg[1]));
      if (get && seg.size() == 2) return {200, store_.manifest(seg[1])};
      const StoredRun run = store_.load(seg[1]);
      if (get && seg.size() == 3 && seg[2] == "archive") {
        const auto offset = parse_uint(query_value(req, "offset", "0"), "offset");
        const auto limit = parse_uint(query_value(req, "limit", "100"), "limit");
        return {200, archive_payload(run, offset, limit)};
      }
      if (get && seg.size() == 3 && seg[2] == "front") {
        const auto q = query_value(req, "objectives");
        return {200, front_payload(run, q.empty() ? std::vector<MetricId>{} : parse_metric_csv(q))};
      }
      if (get && seg.size() == 3 && seg[2] == "ternary") {
        return {200, ternary_payload(run, parse_metric_csv(query_value(req, "objectives")))};
      }
      if (get && seg.size() == 4 && seg[2] == "behavior") {
        return {200, behavior_payload(run, parse_uint(seg[3], "eval_id"))};
      }
      if (req.method == "POST" && seg.size() == 3 && seg[2] == "select") {
        json body;
        try {
          body = json::parse(req.body);
        } catch (const json::exception& e) {
          return error_response(400, "invalid_argument", fmt::format("malformed weights: {}", e.what()));
        }
        return {200, select_payload(run, body)};
      }
    }
    if (get && seg.size() == 3 && seg[0] == "collections" && seg[2] == "contrast") {
      return {200, contrast_payload(store_, seg[1])};
    }
    if (get && seg.size() == 3 && seg[0] == "collections" && seg[2] == "compare") {
      return {200, compare_payload(store_, seg[1])};
    }
    return error_response(404, "not_found", fmt::format("no route for {} {}", req.method, req.path));
  } catch (const Error& e) {
    return error_response(status_for_kind(e.kind()), e.kind(), e.what());
  } catch (const std::exception& e) {
    spdlog::error("{} {}: {}", req.method, req.path, e.what());
    return error_response(500, "internal", e.what());
  }
}

void serve_http(const ApiService& service, const std::string& host, int port) {
  httplib::Server svr;
  svr.set_default_headers({{"Access-Control-Allow-Origin", "*"},
                           {"Access-Control-Allow-Methods", "GET, POST, OPTIONS"},
                           {"Access-Control-Allow-Headers", "Content-Type"}});
  auto bridge = [&service](const httplib::Request& in, httplib::Response& out) {
    ApiRequest req{in.method, in.path, {}, in.body};
    for (const auto& [k, v] : in.params) req.query.emplace(k, v);
    const ApiResponse res = service.handle(req);
    out.status = res.status;
    out.set_content(res.body.dump(), "application/json");
  };
  svr.Get(".*", bridge);
  svr.Post(".*", bridge);
  svr.Options(".*", [](const httplib::Request&, httplib::Response& out) { out.status = 204; });
  spdlog::info("serving {} on http://{}:{}", service.store().root().string(), host, port);
  if (!svr.listen(host, port)) throw IoError(fmt::format("cannot listen on {}:{}", host, port));
}

}  // namespace fairhpo
