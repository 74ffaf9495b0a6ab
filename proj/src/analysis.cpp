// Copyright 2026 The fairhpo Authors.
// SPDX-License-Identifier: Apache-2.0

#include "fairhpo/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>

#include <fmt/format.h>
#include <fmt/ranges.h>

namespace fairhpo {

using nlohmann::json;

RunCollection::RunCollection(std::vector<MetricId> metrics) : metrics_(std::move(metrics)) {
  check_metric_list(metrics_);
}

RunCollection RunCollection::from_runs(std::span<const StoredRun> runs) {
  if (runs.empty()) throw InvalidArgument("run collection: no runs");
  RunCollection c(runs.front().metrics);
  for (const auto& r : runs) {
    if (r.metrics != c.metrics_) {
      throw InvalidArgument(fmt::format("run collection: run {} uses a different metric list", r.run_id));
    }
    CollectionMember m{r.run_id, r.dataset, r.learner, r.formulation, r.seed, {}, {}};
    for (const auto& rec : r.records) {
      m.eval_ids.push_back(rec.eval_id);
      m.points.push_back(rec.objectives);
    }
    c.add(std::move(m));
  }
  return c;
}

void RunCollection::add(CollectionMember member) {
  if (member.points.size() != member.eval_ids.size()) {
    throw InvalidArgument(fmt::format("run collection: {} has mismatched ids and points", member.run_id));
  }
  if (member.points.empty()) throw InvalidArgument(fmt::format("run collection: {} has an empty archive", member.run_id));
  for (const auto& p : member.points) {
    if (p.size() != metrics_.size()) {
      throw InvalidArgument(fmt::format("run collection: {} does not match the metric vocabulary", member.run_id));
    }
  }
  for (auto m : member.formulation.objectives()) column(m);
  members_.push_back(std::move(member));
}

std::size_t RunCollection::column(MetricId id) const {
  const auto it = std::find(metrics_.begin(), metrics_.end(), id);
  if (it == metrics_.end()) throw UnknownMetric(fmt::format("collection does not carry metric '{}'", metric_name(id)));
  return static_cast<std::size_t>(it - metrics_.begin());
}

HvSpec RunCollection::bounds(std::string_view dataset, LearnerId learner,
                             std::span<const MetricId> objectives) const {
  std::vector<double> lo(objectives.size(), std::numeric_limits<double>::infinity());
  std::vector<double> hi(objectives.size(), -std::numeric_limits<double>::infinity());
  bool any = false;
  for (const auto& m : members_) {
    if (m.dataset != dataset || m.learner != learner) continue;
    any = true;
    for (std::size_t k = 0; k < objectives.size(); ++k) {
      const std::size_t c = column(objectives[k]);
      for (const auto& p : m.points) {
        lo[k] = std::min(lo[k], p[c]);
        hi[k] = std::max(hi[k], p[c]);
      }
    }
  }
  if (!any) throw NotFound(fmt::format("collection has no runs for {}-{}", dataset, learner_name(learner)));
  for (std::size_t k = 0; k < lo.size(); ++k) {
    if (!(hi[k] > lo[k])) hi[k] = lo[k] + 1.0;
  }
  return HvSpec::bounds(std::move(lo), std::move(hi));
}

const CollectionMember* RunCollection::find(std::string_view dataset, LearnerId learner, const Formulation& f,
                                            std::uint64_t seed) const {
  for (const auto& m : members_) {
    if (m.dataset == dataset && m.learner == learner && m.formulation == f && m.seed == seed) return &m;
  }
  return nullptr;
}

std::vector<std::pair<std::string, LearnerId>> RunCollection::groups() const {
  std::vector<std::pair<std::string, LearnerId>> out;
  for (const auto& m : members_) {
    std::pair<std::string, LearnerId> g{m.dataset, m.learner};
    if (std::find(out.begin(), out.end(), g) == out.end()) out.push_back(std::move(g));
  }
  return out;
}

double contrast_from_hv(double hv_direct, double hv_indirect) {
  constexpr double tol = 1e-12;
  if (!(hv_direct >= -tol && hv_direct <= 1.0 + tol) || !(hv_indirect >= -tol && hv_indirect <= 1.0 + tol)) {
    throw InvalidArgument(fmt::format("contrast: hypervolumes must lie in [0,1] (got {}, {})", hv_direct, hv_indirect));
  }
  return hv_direct - hv_indirect;
}

namespace {

std::pair<std::string, LearnerId> resolve_group(const RunCollection& runs,
                                                std::optional<std::pair<std::string, LearnerId>> group) {
  if (group) return *group;
  const auto groups = runs.groups();
  if (groups.size() != 1) {
    throw InvalidArgument(fmt::format("collection spans {} dataset/learner groups; name one", groups.size()));
  }
  return groups.front();
}

double member_hv(const RunCollection& runs, const CollectionMember& member, MetricId f, const HvSpec& bounds) {
  const std::size_t cols[2] = {runs.column(MetricId::kF1Obj), runs.column(f)};
  return normalized_hypervolume(member.points, cols, bounds).value;
}

HvSpec bi_bounds(const RunCollection& runs, const std::string& dataset, LearnerId learner, MetricId f) {
  const MetricId obj[2] = {MetricId::kF1Obj, f};
  return runs.bounds(dataset, learner, obj);
}

std::set<std::uint64_t> bio_seeds(const RunCollection& runs, const std::string& dataset, LearnerId learner) {
  std::set<std::uint64_t> seeds;
  for (const auto& m : runs.members()) {
    if (m.dataset == dataset && m.learner == learner && m.formulation.kind == FormulationKind::kBiO) {
      seeds.insert(m.seed);
    }
  }
  return seeds;
}

}  // namespace

double bi_hypervolume(const RunCollection& runs, const CollectionMember& member, MetricId f) {
  return member_hv(runs, member, f, bi_bounds(runs, member.dataset, member.learner, f));
}

ContrastCell contrast(const RunCollection& runs, MetricId f_i, MetricId f_j,
                      std::optional<std::pair<std::string, LearnerId>> group) {
  const auto [dataset, learner] = resolve_group(runs, std::move(group));
  const HvSpec bounds = bi_bounds(runs, dataset, learner, f_j);
  ContrastCell cell;
  std::vector<std::string> missing;
  for (auto seed : bio_seeds(runs, dataset, learner)) {
    const auto* direct = runs.find(dataset, learner, Formulation::bio(f_j), seed);
    const auto* indirect = runs.find(dataset, learner, Formulation::bio(f_i), seed);
    if (!direct || !indirect) continue;
    const double c = f_i == f_j ? 0.0
                                : contrast_from_hv(member_hv(runs, *direct, f_j, bounds),
                                                   member_hv(runs, *indirect, f_j, bounds));
    cell.seeds.push_back(seed);
    cell.per_seed.push_back(c);
  }
  if (cell.seeds.empty()) {
    const std::vector<std::string> cells = {fmt::format("bio:{}", metric_name(f_i)),
                                            fmt::format("bio:{}", metric_name(f_j))};
    throw IncompleteGrid(fmt::format("contrast {}->{}: no seed has both BiO archives", metric_name(f_i),
                                     metric_name(f_j)),
                         cells);
  }
  cell.mean = std::accumulate(cell.per_seed.begin(), cell.per_seed.end(), 0.0) /
              static_cast<double>(cell.per_seed.size());
  cell.min = *std::min_element(cell.per_seed.begin(), cell.per_seed.end());
  cell.max = *std::max_element(cell.per_seed.begin(), cell.per_seed.end());
  return cell;
}

ContrastMatrix contrast_matrix(const RunCollection& runs, std::vector<MetricId> metrics,
                               std::optional<std::pair<std::string, LearnerId>> group) {
  const auto [dataset, learner] = resolve_group(runs, std::move(group));
  if (metrics.empty()) {
    for (auto id : runs.metrics()) {
      for (const auto& m : runs.members()) {
        if (m.dataset == dataset && m.learner == learner && m.formulation == Formulation::bio(id)) {
          metrics.push_back(id);
          break;
        }
      }
    }
  }
  check_metric_list(metrics);
  const auto seeds = bio_seeds(runs, dataset, learner);
  std::vector<std::string> missing;
  for (auto f : metrics) {
    for (auto s : seeds) {
      if (!runs.find(dataset, learner, Formulation::bio(f), s)) {
        missing.push_back(fmt::format("{}/seed {}", metric_name(f), s));
      }
    }
  }
  if (seeds.empty()) {
    for (auto f : metrics) missing.push_back(fmt::format("{}/any seed", metric_name(f)));
  }
  if (!missing.empty()) {
    throw IncompleteGrid(fmt::format("incomplete BiO grid for {}-{}; missing: {}", dataset, learner_name(learner),
                                     fmt::join(missing, ", ")),
                         missing);
  }
  ContrastMatrix out;
  out.dataset = dataset;
  out.learner = learner;
  out.metrics = metrics;
  out.cells.assign(metrics.size(), std::vector<ContrastCell>(metrics.size()));
  for (std::size_t j = 0; j < metrics.size(); ++j) {
    out.bounds.push_back(bi_bounds(runs, dataset, learner, metrics[j]));
    for (std::size_t i = 0; i < metrics.size(); ++i) {
      out.cells[j][i] = contrast(runs, metrics[i], metrics[j], std::pair{dataset, learner});
    }
  }
  return out;
}

json ContrastMatrix::to_json() const {
  json names = json::array();
  for (auto m : metrics) names.push_back(metric_name(m));
  json mean = json::array(), lo = json::array(), hi = json::array();
  for (const auto& row : cells) {
    json r = json::array(), a = json::array(), b = json::array();
    for (const auto& c : row) {
      r.push_back(c.mean);
      a.push_back(c.min);
      b.push_back(c.max);
    }
    mean.push_back(std::move(r));
    lo.push_back(std::move(a));
    hi.push_back(std::move(b));
  }
  json bj = json::object();
  for (std::size_t k = 0; k < metrics.size(); ++k) {
    bj[std::string(metric_name(metrics[k]))] = {{"objectives", {"f1_obj", metric_name(metrics[k])}},
                                                {"lower", bounds[k].lower},
                                                {"upper", bounds[k].upper}};
  }
  const std::size_t n_seeds = cells.empty() ? 0 : cells.front().front().seeds.size();
  return {{"dataset", dataset},
          {"learner", learner_name(learner)},
          {"metrics", names},
          {"layout", "matrix[j][i] = C(metrics[i], metrics[j])"},
          {"matrix", mean},
          {"min", lo},
          {"max", hi},
          {"n_seeds", n_seeds},
          {"aggregation", "seed mean"},
          {"bounds", bj}};
}

std::string ContrastMatrix::to_csv() const {
  std::string out = "row_metric,col_metric,value,min,max,n_seeds\n";
  for (std::size_t j = 0; j < metrics.size(); ++j) {
    for (std::size_t i = 0; i < metrics.size(); ++i) {
      const auto& c = cells[j][i];
      out += fmt::format("{},{},{},{},{},{}\n", metric_name(metrics[j]), metric_name(metrics[i]), json(c.mean).dump(),
                         json(c.min).dump(), json(c.max).dump(), c.seeds.size());
    }
  }
  return out;
}

std::optional<double> pearson(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw InvalidArgument("pearson: length mismatch");
  const std::size_t n = a.size();
  if (n < 2) return std::nullopt;
  const double ma = std::accumulate(a.begin(), a.end(), 0.0) / static_cast<double>(n);
  const double mb = std::accumulate(b.begin(), b.end(), 0.0) / static_cast<double>(n);
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  if (!(saa > 0.0) || !(sbb > 0.0)) return std::nullopt;
  return sab / std::sqrt(saa * sbb);
}

FormulationComparison formulation_comparison(const RunCollection& runs) {
  FormulationComparison out;
  std::vector<std::string> missing;
  bool any_mao = false;
  for (const auto& many : runs.members()) {
    if (many.formulation.kind != FormulationKind::kMaO) continue;
    any_mao = true;
    for (auto f : many.formulation.fairness) {
      const auto* bi = runs.find(many.dataset, many.learner, Formulation::bio(f), many.seed);
      if (!bi) {
        missing.push_back(fmt::format("{}-{} bio:{} seed {}", many.dataset, learner_name(many.learner),
                                      metric_name(f), many.seed));
        continue;
      }
      const HvSpec bounds = bi_bounds(runs, many.dataset, many.learner, f);
      ComparisonPair p{many.dataset, many.learner, f, many.seed, member_hv(runs, *bi, f, bounds),
                       member_hv(runs, many, f, bounds), 0.0};
      p.regret = p.hv_bi - p.hv_many;
      out.pairs.push_back(p);
    }
  }
  if (!any_mao) throw IncompleteGrid("comparison: collection has no MaO runs", {"mao"});
  if (!missing.empty()) {
    throw IncompleteGrid(fmt::format("comparison: missing BiO counterparts: {}", fmt::join(missing, ", ")), missing);
  }
  std::vector<double> a, b;
  for (const auto& p : out.pairs) {
    a.push_back(p.hv_bi);
    b.push_back(p.hv_many);
    out.mean_regret += p.regret;
  }
  out.mean_regret /= static_cast<double>(out.pairs.size());
  out.pearson_r = pearson(a, b);
  return out;
}

json FormulationComparison::to_json() const {
  json pj = json::array();
  for (const auto& p : pairs) {
    pj.push_back({{"dataset", p.dataset},
                  {"learner", learner_name(p.learner)},
                  {"metric", metric_name(p.metric)},
                  {"seed", p.seed},
                  {"hv_bi", p.hv_bi},
                  {"hv_many", p.hv_many},
                  {"regret", p.regret}});
  }
  json j = {{"pairs", pj}, {"mean_regret", mean_regret}, {"degenerate", degenerate()}};
  j["pearson_r"] = pearson_r ? json(*pearson_r) : json(nullptr);
  return j;
}

std::vector<TernaryPoint> ternary_projection(std::span<const Point> points, std::span<const std::uint64_t> ids,
                                             std::span<const std::size_t> three_objectives, const HvSpec& bounds) {
  if (three_objectives.size() != 3) {
    throw InvalidArgument(fmt::format("ternary: exactly 3 objectives required (got {})", three_objectives.size()));
  }
  if (bounds.dim() != 3) throw InvalidArgument("ternary: bounds must cover the 3 objectives");
  bounds.validate();
  if (ids.size() != points.size()) throw InvalidArgument("ternary: ids and points differ in length");
  const double h = std::sqrt(3.0) / 2.0;
  std::vector<TernaryPoint> out;
  out.reserve(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    TernaryPoint t;
    t.eval_id = ids[i];
    double norm[3], sum = 0.0;
    for (std::size_t k = 0; k < 3; ++k) {
      const std::size_t c = three_objectives[k];
      if (c >= points[i].size()) throw InvalidArgument("ternary: objective index out of range");
      t.values[k] = points[i][c];
      norm[k] = std::clamp((points[i][c] - bounds.lower[k]) / (bounds.upper[k] - bounds.lower[k]), 0.0, 1.0);
      sum += norm[k];
    }
    if (sum > 0.0) {
      for (std::size_t k = 0; k < 3; ++k) t.barycentric[k] = norm[k] / sum;
    } else {
      t.barycentric = {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};
      t.degenerate = true;
    }
    t.x = t.barycentric[1] + 0.5 * t.barycentric[2];
    t.y = h * t.barycentric[2];
    out.push_back(t);
  }
  return out;
}

std::string ternary_csv(std::span<const TernaryPoint> pts, std::span<const MetricId> objectives) {
  std::vector<std::string_view> names;
  for (auto m : objectives) names.push_back(metric_name(m));
  std::string out = fmt::format("x,y,eval_id,{},degenerate\n", fmt::join(names, ","));
  for (const auto& p : pts) {
    out += fmt::format("{},{},{},{},{},{},{}\n", json(p.x).dump(), json(p.y).dump(), p.eval_id, json(p.values[0]).dump(),
                       json(p.values[1]).dump(), json(p.values[2]).dump(), p.degenerate ? 1 : 0);
  }
  return out;
}

BehaviorReport behavior_report(const PredictionSet& p) {
  BehaviorReport r;
  r.m = p.size();
  const auto cells = ConfusionCells::of(p);
  for (int a = 0; a < 2; ++a) {
    for (int y = 0; y < 2; ++y) {
      for (int q = 0; q < 2; ++q) r.counts[a][y][q] = cells.count[a][y][q];
    }
  }
  auto ratio = [](std::size_t num, std::size_t den) -> std::optional<double> {
    if (den == 0) return std::nullopt;
    return static_cast<double>(num) / static_cast<double>(den);
  };
  for (int a = 0; a < 2; ++a) {
    const auto& c = r.counts[a];
    r.group_size[a] = c[0][0] + c[0][1] + c[1][0] + c[1][1];
    r.acceptance_rate[a] = ratio(c[0][1] + c[1][1], r.group_size[a]);
    r.qualification_rate[a] = ratio(c[1][0] + c[1][1], r.group_size[a]);
    for (int y = 0; y < 2; ++y) r.conditional_acceptance[a][y] = ratio(c[y][1], c[y][0] + c[y][1]);
  }
  if (r.group_size[0] > 0 && r.group_size[1] > 0) r.ddsp = ddsp(p);
  r.deop = deop(p);
  r.deod = deod(p);
  r.invd = invd(p);
  r.invd_sim = invd_sim(p);
  r.f1_obj = f1_objective(p);
  return r;
}

json BehaviorReport::to_json() const {
  auto opt = [](const std::optional<double>& v) { return v ? json(*v) : json(nullptr); };
  auto flagged = [](const FlaggedValue& v) { return json{{"value", v.value}, {"undefined", v.undefined}}; };
  json groups = json::array();
  for (int a = 0; a < 2; ++a) {
    json cells = json::array();
    for (int y = 0; y < 2; ++y) {
      for (int q = 0; q < 2; ++q) cells.push_back({{"y", y}, {"y_pred", q}, {"count", counts[a][y][q]}});
    }
    groups.push_back({{"a", a},
                      {"privileged", a == 1},
                      {"size", group_size[a]},
                      {"acceptance_rate", opt(acceptance_rate[a])},
                      {"qualification_rate", opt(qualification_rate[a])},
                      {"acceptance_rate_given_y0", opt(conditional_acceptance[a][0])},
                      {"acceptance_rate_given_y1", opt(conditional_acceptance[a][1])},
                      {"cells", std::move(cells)}});
  }
  return {{"m", m},
          {"groups", std::move(groups)},
          {"metrics",
           {{"ddsp", opt(ddsp)},
            {"deop", flagged(deop)},
            {"deod", flagged(deod)},
            {"invd", invd},
            {"invd_sim", invd_sim},
            {"f1_obj", flagged(f1_obj)}}}};
}

Front run_front(const StoredRun& run, std::span<const MetricId> objectives) {
  std::vector<MetricId> objs(objectives.begin(), objectives.end());
  if (objs.empty()) objs = run.objectives();
  std::vector<std::size_t> cols;
  for (auto m : objs) cols.push_back(run.column(m));
  Front f{objs, {}};
  for (const auto& r : run.records) {
    Point p;
    for (auto c : cols) p.push_back(r.objectives[c]);
    f.members.push_back({r.eval_id, std::move(p)});
  }
  return pareto_filter(std::move(f));
}

HvSpec run_bounds(const StoredRun& run, std::span<const MetricId> objectives) {
  std::vector<double> lo(objectives.size(), std::numeric_limits<double>::infinity());
  std::vector<double> hi(objectives.size(), -std::numeric_limits<double>::infinity());
  for (std::size_t k = 0; k < objectives.size(); ++k) {
    const std::size_t c = run.column(objectives[k]);
    for (const auto& r : run.records) {
      lo[k] = std::min(lo[k], r.objectives[c]);
      hi[k] = std::max(hi[k], r.objectives[c]);
    }
    if (run.records.empty()) lo[k] = 0.0;
    if (!(hi[k] > lo[k])) hi[k] = lo[k] + 1.0;
  }
  return HvSpec::bounds(std::move(lo), std::move(hi));
}

}  // namespace fairhpo
