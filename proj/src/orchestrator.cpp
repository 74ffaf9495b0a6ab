// Copyright 2026 The fairhpo Authors.
// SPDX-License-Identifier: Apache-2.0

#include "fairhpo/orchestrator.hpp"

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <mutex>
#include <set>
#include <sstream>

#include <fmt/format.h>
#include <fmt/ranges.h>
#include <spdlog/spdlog.h>

#include "fairhpo/error.hpp"
#include "fairhpo/nsga.hpp"
#include "fairhpo/pareto.hpp"

namespace fairhpo {

namespace fs = std::filesystem;
using nlohmann::json;

// Formulation ---------------------------------------------------------------

Formulation Formulation::bio(MetricId metric) { return Formulation{FormulationKind::kBiO, {metric}}; }

Formulation Formulation::mao(std::vector<MetricId> metrics) {
  return Formulation{FormulationKind::kMaO, std::move(metrics)};
}

namespace {

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.emplace_back(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

bool is_default_mao(const std::vector<MetricId>& m) {
  return std::equal(m.begin(), m.end(), std::begin(kFairnessMetrics), std::end(kFairnessMetrics));
}

}  // namespace

Formulation Formulation::parse(std::string_view text) {
  const auto colon = text.find(':');
  const std::string_view head = text.substr(0, colon);
  std::vector<MetricId> metrics;
  if (colon != std::string_view::npos) {
    for (const auto& name : split(text.substr(colon + 1), ',')) metrics.push_back(metric_from_name(name));
  }
  Formulation f;
  if (head == "bio") {
    if (metrics.size() != 1) throw InvalidArgument(fmt::format("formulation '{}': bio needs exactly one metric", text));
    f = bio(metrics.front());
  } else if (head == "mao") {
    f = metrics.empty() ? mao() : mao(std::move(metrics));
  } else {
    throw InvalidArgument(fmt::format("formulation '{}': expected bio:<metric> or mao[:m1,m2,...]", text));
  }
  f.validate();
  return f;
}

std::vector<MetricId> Formulation::objectives() const {
  std::vector<MetricId> out;
  out.reserve(fairness.size() + 1);
  out.push_back(MetricId::kF1Obj);
  for (auto m : fairness) out.push_back(m);
  return out;
}

std::string Formulation::label() const {
  std::string out = kind == FormulationKind::kBiO ? "bio" : "mao";
  if (kind == FormulationKind::kMaO && is_default_mao(fairness)) return out;
  for (auto m : fairness) out += fmt::format("-{}", metric_name(m));
  return out;
}

std::string Formulation::spec() const {
  if (kind == FormulationKind::kMaO && is_default_mao(fairness)) return "mao";
  std::vector<std::string_view> names;
  for (auto m : fairness) names.push_back(metric_name(m));
  return fmt::format("{}:{}", kind == FormulationKind::kBiO ? "bio" : "mao", fmt::join(names, ","));
}

void Formulation::validate() const {
  for (auto m : fairness) {
    if (m == MetricId::kF1Obj) throw InvalidArgument("formulation: f1_obj is always objective 0, not a fairness metric");
  }
  check_metric_list(fairness);
  if (kind == FormulationKind::kBiO && fairness.size() != 1) {
    throw InvalidArgument("formulation: bio takes exactly one fairness metric");
  }
  if (kind == FormulationKind::kMaO && fairness.size() < 2) {
    throw InvalidArgument("formulation: mao needs at least two fairness metrics");
  }
}

// DatasetRef ----------------------------------------------------------------

Dataset DatasetRef::load() const {
  if (is_synthetic()) return synth_lawschool(synth_m, synth_seed);
  CsvLoadOptions opts = csv;
  if (opts.name.empty()) opts.name = name();
  return load_csv(csv_path, opts);
}

std::string DatasetRef::name() const {
  if (is_synthetic()) return "synth_lawschool";
  if (!csv.name.empty()) return csv.name;
  return csv_path.stem().string();
}

json DatasetRef::to_json() const {
  if (is_synthetic()) return {{"synth_lawschool", {{"m", synth_m}, {"seed", synth_seed}}}};
  return {{"csv", csv_path.string()},       {"target", csv.target_col},
          {"protected", csv.protected_col}, {"positive", csv.positive_label},
          {"privileged", csv.privileged_label}, {"name", name()}};
}

DatasetRef DatasetRef::from_json(const json& j) {
  DatasetRef r;
  if (!j.is_object()) throw InvalidArgument("config: dataset must be an object");
  if (j.contains("synth_lawschool")) {
    const auto& s = j.at("synth_lawschool");
    r.synth_m = s.at("m").get<std::size_t>();
    r.synth_seed = s.value("seed", std::uint64_t{0});
    return r;
  }
  r.csv_path = j.at("csv").get<std::string>();
  r.csv.target_col = j.at("target").get<std::string>();
  r.csv.protected_col = j.at("protected").get<std::string>();
  r.csv.positive_label = j.at("positive").get<std::string>();
  r.csv.privileged_label = j.at("privileged").get<std::string>();
  r.csv.name = j.value("name", std::string{});
  return r;
}

// ExperimentConfig ----------------------------------------------------------

ExperimentConfig ExperimentConfig::resolved() const {
  ExperimentConfig c = *this;
  if (c.pop_size == 0) c.pop_size = formulation.kind == FormulationKind::kBiO ? 20 : 42;
  if (c.metrics.empty()) {
    c.metrics = {MetricId::kF1Obj};
    c.metrics.insert(c.metrics.end(), std::begin(kFairnessMetrics), std::end(kFairnessMetrics));
    for (auto m : formulation.fairness) {
      if (std::find(c.metrics.begin(), c.metrics.end(), m) == c.metrics.end()) c.metrics.push_back(m);
    }
  }
  if (c.collection.empty()) c.collection = fmt::format("{}-{}", dataset.name(), learner_name(learner));
  if (c.output_dir.empty()) c.output_dir = default_data_dir();
  return c;
}

void ExperimentConfig::validate() const {
  formulation.validate();
  if (k < 2) throw InvalidArgument(fmt::format("config: k must be >= 2 (got {})", k));
  if (pop_size < 2 || pop_size % 2 != 0) {
    throw InvalidArgument(fmt::format("config: population size must be even and >= 2 (got {})", pop_size));
  }
  if (max_evals < pop_size) {
    throw InvalidArgument(fmt::format("config: max_evals ({}) below population size ({})", max_evals, pop_size));
  }
  if (seeds.empty()) throw InvalidArgument("config: at least one seed is required");
  std::set<std::uint64_t> unique(seeds.begin(), seeds.end());
  if (unique.size() != seeds.size()) throw InvalidArgument("config: duplicated seed");
  check_metric_list(metrics);
  for (auto m : formulation.objectives()) {
    if (std::find(metrics.begin(), metrics.end(), m) == metrics.end()) {
      throw InvalidArgument(fmt::format("config: objective '{}' missing from the metric list", metric_name(m)));
    }
  }
  if (threads < 1) throw InvalidArgument("config: threads must be >= 1");
  if (partitions < 1) throw InvalidArgument("config: partitions must be >= 1");
  if (wall_clock_limit_s && !(*wall_clock_limit_s > 0.0)) throw InvalidArgument("config: wall clock limit must be > 0");
  if (!dataset.is_synthetic()) {
    if (dataset.csv_path.empty()) throw InvalidArgument("config: dataset csv path is empty");
    const auto& o = dataset.csv;
    if (o.target_col.empty() || o.protected_col.empty() || o.positive_label.empty() || o.privileged_label.empty()) {
      throw InvalidArgument("config: target, protected, positive and privileged labels are all required");
    }
  } else if (dataset.synth_m < 100) {
    throw InvalidArgument("config: synth_lawschool needs m >= 100");
  }
  for (char ch : collection) {
    if (!(std::isalnum(static_cast<unsigned char>(ch)) || ch == '-' || ch == '_' || ch == '.')) {
      throw InvalidArgument(fmt::format("config: collection '{}' may only use [A-Za-z0-9._-]", collection));
    }
  }
}

json ExperimentConfig::to_json() const {
  json metric_names = json::array();
  for (auto m : metrics) metric_names.push_back(metric_name(m));
  json j = {{"dataset", dataset.to_json()},
            {"learner", learner_name(learner)},
            {"formulation", formulation.spec()},
            {"k", k},
            {"pop_size", pop_size},
            {"max_evals", max_evals},
            {"seeds", seeds},
            {"metrics", metric_names},
            {"output_dir", output_dir.string()},
            {"collection", collection},
            {"threads", threads},
            {"partitions", partitions}};
  j["wall_clock_limit_s"] = wall_clock_limit_s ? json(*wall_clock_limit_s) : json(nullptr);
  return j;
}

ExperimentConfig ExperimentConfig::from_json(const json& j) {
  if (!j.is_object()) throw InvalidArgument("config: expected a JSON object");
  static const std::set<std::string> known = {"dataset", "learner", "formulation", "k", "pop_size", "max_evals",
                                              "seeds", "metrics", "output_dir", "collection", "threads",
                                              "partitions", "wall_clock_limit_s"};
  for (const auto& [key, _] : j.items()) {
    if (!known.contains(key)) throw InvalidArgument(fmt::format("config: unknown field '{}'", key));
  }
  ExperimentConfig c;
  try {
    c.dataset = DatasetRef::from_json(j.at("dataset"));
    c.learner = learner_from_name(j.value("learner", std::string{"rf"}));
    c.formulation = Formulation::parse(j.value("formulation", std::string{"mao"}));
    c.k = j.value("k", std::size_t{5});
    c.pop_size = j.value("pop_size", std::size_t{0});
    c.max_evals = j.value("max_evals", std::size_t{1000});
    if (j.contains("seeds")) c.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
    if (j.contains("metrics")) {
      for (const auto& m : j.at("metrics")) c.metrics.push_back(metric_from_name(m.get<std::string>()));
    }
    c.output_dir = j.value("output_dir", std::string{});
    c.collection = j.value("collection", std::string{});
    c.threads = j.value("threads", std::size_t{1});
    c.partitions = j.value("partitions", 3);
    if (j.contains("wall_clock_limit_s") && !j.at("wall_clock_limit_s").is_null()) {
      c.wall_clock_limit_s = j.at("wall_clock_limit_s").get<double>();
    }
  } catch (const json::exception& e) {
    throw InvalidArgument(fmt::format("config: {}", e.what()));
  }
  return c;
}

std::string run_id_for(const ExperimentConfig& resolved, std::uint64_t seed) {
  return fmt::format("{}_{}_s{}", resolved.collection, resolved.formulation.label(), seed);
}

// ArchiveRecord -------------------------------------------------------------

bool ArchiveRecord::failed() const {
  return std::find(flags.begin(), flags.end(), "evaluation_failed") != flags.end();
}

namespace {

json metric_object(std::span<const MetricId> metrics, std::span<const double> values) {
  json o = json::object();
  for (std::size_t i = 0; i < metrics.size(); ++i) o[std::string(metric_name(metrics[i]))] = values[i];
  return o;
}

std::vector<double> metric_values(const json& o, std::span<const MetricId> metrics) {
  std::vector<double> v;
  v.reserve(metrics.size());
  for (auto m : metrics) v.push_back(o.at(std::string(metric_name(m))).get<double>());
  return v;
}

}  // namespace

json ArchiveRecord::to_json(std::span<const MetricId> metrics) const {
  json folds = json::array();
  for (const auto& f : fold_objectives) folds.push_back(f ? metric_object(metrics, *f) : json(nullptr));
  return {{"eval_id", eval_id},
          {"gen", generation},
          {"genotype", genotype},
          {"params", params},
          {"fold_objectives", std::move(folds)},
          {"objectives", metric_object(metrics, objectives)},
          {"flags", flags},
          {"eval_seed", eval_seed}};
}

ArchiveRecord ArchiveRecord::from_json(const json& j, std::span<const MetricId> metrics) {
  ArchiveRecord r;
  r.eval_id = j.at("eval_id").get<std::uint64_t>();
  r.generation = j.at("gen").get<std::uint32_t>();
  r.genotype = j.at("genotype").get<std::vector<double>>();
  r.params = j.at("params");
  for (const auto& f : j.at("fold_objectives")) {
    if (f.is_null()) {
      r.fold_objectives.emplace_back(std::nullopt);
    } else {
      r.fold_objectives.emplace_back(metric_values(f, metrics));
    }
  }
  r.objectives = metric_values(j.at("objectives"), metrics);
  r.flags = j.at("flags").get<std::vector<std::string>>();
  r.eval_seed = j.value("eval_seed", std::uint64_t{0});
  return r;
}

// Objective function ---------------------------------------------------------

PreparedFolds PreparedFolds::build(const Dataset& d, const FoldPlan& plan) {
  PreparedFolds p;
  for (std::size_t f = 0; f < plan.k; ++f) {
    Fold fold;
    const auto train_rows = plan.training_rows(f);
    fold.x_train = d.features.select_rows(train_rows);
    for (auto r : train_rows) fold.y_train.push_back(d.target[r]);
    fold.valid_rows = plan.folds[f];
    fold.x_valid = d.features.select_rows(fold.valid_rows);
    for (auto r : fold.valid_rows) {
      fold.y_valid.push_back(d.target[r]);
      fold.a_valid.push_back(d.protected_attr[r]);
    }
    p.folds.push_back(std::move(fold));
  }
  return p;
}

FoldEvaluation objective_function(const SearchSpace& space, const Configuration& cfg, const PreparedFolds& folds,
                                  std::span<const MetricId> metrics, std::uint64_t seed) {
  check_metric_list(metrics);
  FoldEvaluation out;
  std::vector<bool> undefined(metrics.size(), false);
  std::vector<std::string> degenerate, failed;
  std::vector<double> sum(metrics.size(), 0.0);
  std::size_t ok = 0;
  for (std::size_t f = 0; f < folds.folds.size(); ++f) {
    const auto& fold = folds.folds[f];
    try {
      const auto model = train(space.learner, cfg, fold.x_train, fold.y_train, derive_seed(seed, {f}));
      if (model.degenerate) degenerate.push_back(fmt::format("degenerate_model:{}", f));
      const auto pred = predict(model, fold.x_valid);
      const auto ov = evaluate_all(PredictionSet(fold.y_valid, pred, fold.a_valid), metrics);
      for (auto u : ov.undefined) {
        undefined[static_cast<std::size_t>(std::find(metrics.begin(), metrics.end(), u) - metrics.begin())] = true;
      }
      for (std::size_t i = 0; i < metrics.size(); ++i) sum[i] += ov.values[i];
      out.fold_values.emplace_back(ov.values);
      ++ok;
    } catch (const std::exception& e) {
      spdlog::debug("fold {} failed: {}", f, e.what());
      failed.push_back(fmt::format("fold_failed:{}", f));
      out.fold_values.emplace_back(std::nullopt);
    }
  }
  out.flags = std::move(degenerate);
  out.flags.insert(out.flags.end(), failed.begin(), failed.end());
  for (std::size_t i = 0; i < metrics.size(); ++i) {
    if (undefined[i]) out.flags.push_back(fmt::format("undefined:{}", metric_name(metrics[i])));
  }
  if (ok == 0) {
    out.failed = true;
    out.aggregated.assign(metrics.size(), 1.0);
    out.flags.emplace_back("evaluation_failed");
  } else {
    out.aggregated.resize(metrics.size());
    for (std::size_t i = 0; i < metrics.size(); ++i) out.aggregated[i] = sum[i] / static_cast<double>(ok);
  }
  return out;
}

FoldEvaluation objective_function(const SearchSpace& space, const Configuration& cfg, const Dataset& d,
                                  const FoldPlan& plan, std::span<const MetricId> metrics, std::uint64_t seed) {
  return objective_function(space, cfg, PreparedFolds::build(d, plan), metrics, seed);
}

// Persistence ----------------------------------------------------------------

fs::path default_data_dir() {
  if (const char* env = std::getenv("FAIRHPO_DATA_DIR"); env && *env) return fs::path(env);
  return fs::path("fairhpo_data");
}

namespace {

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(fmt::format("cannot write {}", path.string()));
  out << text;
  if (!out.flush()) throw IoError(fmt::format("write failed: {}", path.string()));
}

json read_json_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw NotFound(fmt::format("cannot open {}", path.string()));
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw DataError(fmt::format("{}: {}", path.string(), e.what()));
  }
}

json metric_names_json(std::span<const MetricId> metrics) {
  json a = json::array();
  for (auto m : metrics) a.push_back(metric_name(m));
  return a;
}

std::vector<MetricId> metrics_from_json(const json& a) {
  std::vector<MetricId> out;
  for (const auto& m : a) out.push_back(metric_from_name(m.get<std::string>()));
  return out;
}

class RunWriter {
 public:
  RunWriter(const fs::path& dir, std::vector<MetricId> metrics) : dir_(dir), metrics_(std::move(metrics)) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError(fmt::format("cannot create {}: {}", dir.string(), ec.message()));
    archive_.open(dir / "archive.jsonl", std::ios::binary | std::ios::trunc);
    summary_.open(dir / "summary.csv", std::ios::binary | std::ios::trunc);
    timings_.open(dir / "timings.csv", std::ios::binary | std::ios::trunc);
    if (!archive_ || !summary_ || !timings_) throw IoError(fmt::format("cannot open run files in {}", dir.string()));
    summary_ << "eval_id,gen";
    for (auto m : metrics_) summary_ << ',' << metric_name(m);
    summary_ << ",flags\n";
    timings_ << "eval_id,wall_ms\n";
    flush();
  }

  void append(const ArchiveRecord& r) {
    archive_ << r.to_json(metrics_).dump() << '\n';
    summary_ << r.eval_id << ',' << r.generation;
    for (double v : r.objectives) summary_ << ',' << json(v).dump();
    summary_ << ',' << fmt::format("{}", fmt::join(r.flags, ";")) << '\n';
    timings_ << r.eval_id << ',' << fmt::format("{:.3f}", r.wall_ms) << '\n';
  }

  void flush() {
    archive_.flush();
    summary_.flush();
    timings_.flush();
    if (!archive_ || !summary_ || !timings_) throw IoError(fmt::format("write failed in {}", dir_.string()));
  }

 private:
  fs::path dir_;
  std::vector<MetricId> metrics_;
  std::ofstream archive_, summary_, timings_;
};

CsvLoadOptions manifest_csv_options(const DatasetRef& ref) {
  if (!ref.is_synthetic()) {
    CsvLoadOptions o = ref.csv;
    o.name = ref.name();
    return o;
  }
  return CsvLoadOptions{"y", "a", "1", "1", "synth_lawschool"};
}

json fold_plan_json(const FoldPlan& plan) {
  json sizes = json::array();
  for (const auto& f : plan.folds) sizes.push_back(f.size());
  return {{"k", plan.k}, {"seed", plan.seed}, {"fold_sizes", sizes}, {"stratified_on", "target x protected"}};
}

RunOutput run_single(const ExperimentConfig& cfg, const Dataset& data, std::uint64_t seed) {
  RunOutput out;
  out.seed = seed;
  out.run_id = run_id_for(cfg, seed);
  out.dir = cfg.output_dir / "runs" / out.run_id;

  ExperimentConfig echo = cfg;
  echo.seeds = {seed};
  const SearchSpace space = builtin_space(cfg.learner);
  const auto objectives = cfg.formulation.objectives();
  std::vector<std::size_t> objective_cols;
  for (auto o : objectives) {
    objective_cols.push_back(static_cast<std::size_t>(std::find(cfg.metrics.begin(), cfg.metrics.end(), o) -
                                                      cfg.metrics.begin()));
  }
  const std::uint64_t fold_seed = derive_seed(seed, {kFoldSeedTag});
  const std::uint64_t ea_seed = derive_seed(seed, {kEaSeedTag});
  const FoldPlan plan = stratified_kfold(data, cfg.k, fold_seed);
  const PreparedFolds folds = PreparedFolds::build(data, plan);
  const bool many = cfg.formulation.kind == FormulationKind::kMaO;
  std::optional<ReferenceDirectionSet> dirs;
  if (many) dirs = das_dennis(static_cast<int>(objectives.size()), cfg.partitions);

  NsgaOptions opt;
  opt.n_var = space.dim();
  opt.n_obj = objectives.size();
  opt.pop_size = cfg.pop_size;
  opt.max_evals = cfg.max_evals;
  opt.seed = ea_seed;
  opt.threads = cfg.threads;

  json manifest = {
      {"run_id", out.run_id},
      {"collection", cfg.collection},
      {"status", "running"},
      {"software_version", kSoftwareVersion},
      {"seed", seed},
      {"config", echo.to_json()},
      {"seeds",
       {{"run_seed", seed},
        {"fold_seed", fold_seed},
        {"ea_seed", ea_seed},
        {"fold_seed_rule", "derive_seed(run_seed, {0xF01D5})"},
        {"ea_seed_rule", "derive_seed(run_seed, {0xEA5EED})"},
        {"eval_seed_rule", "derive_seed(derive_seed(ea_seed, {0xE7A1}), {generation, index})"},
        {"learner_seed_rule", "derive_seed(eval_seed, {fold})"}}},
      {"dataset", dataset_manifest(data, manifest_csv_options(cfg.dataset))},
      {"fold_plan", fold_plan_json(plan)},
      {"aggregation", "mean"},
      {"search_space", to_json(space)},
      {"formulation", cfg.formulation.spec()},
      {"objectives", metric_names_json(objectives)},
      {"metrics", metric_names_json(cfg.metrics)},
      {"algorithm",
       {{"name", many ? "nsga3" : "nsga2"},
        {"pop_size", cfg.pop_size},
        {"max_evals", cfg.max_evals},
        {"eta_c", opt.variation.eta_c},
        {"p_cx", opt.variation.p_cx},
        {"eta_m", opt.variation.eta_m},
        {"p_m", 1.0 / static_cast<double>(space.dim())},
        {"partitions", many ? json(cfg.partitions) : json(nullptr)},
        {"reference_directions", many ? json(dirs->directions.size()) : json(nullptr)}}},
  };

  RunWriter writer(out.dir, cfg.metrics);
  write_text(out.dir / "manifest.json", manifest.dump(2) + "\n");

  std::vector<ArchiveRecord> slots(cfg.max_evals);
  auto problem = [&](const EvalRequest& req) -> Point {
    const auto start = std::chrono::steady_clock::now();
    const Configuration conf = decode(space, req.genotype);
    FoldEvaluation ev = objective_function(space, conf, folds, cfg.metrics, req.seed);
    ArchiveRecord& r = slots.at(req.eval_id);
    r.eval_id = req.eval_id;
    r.generation = req.generation;
    r.genotype.assign(req.genotype.begin(), req.genotype.end());
    r.params = params_json(space, conf);
    r.fold_objectives = std::move(ev.fold_values);
    r.objectives = std::move(ev.aggregated);
    r.flags = std::move(ev.flags);
    r.eval_seed = req.seed;
    r.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    Point p;
    for (auto c : objective_cols) p.push_back(r.objectives[c]);
    return p;
  };
  std::size_t generations = 0;
  opt.on_generation = [&](std::span<const ArchiveEntry> entries) {
    for (const auto& e : entries) writer.append(slots[e.eval_id]);
    writer.flush();
    ++generations;
    spdlog::info("{}: generation {} done ({} evaluations)", out.run_id, generations - 1,
                 entries.empty() ? 0 : entries.back().eval_id + 1);
  };
  const auto t0 = std::chrono::steady_clock::now();
  if (cfg.wall_clock_limit_s) {
    const double limit = *cfg.wall_clock_limit_s;
    opt.should_stop = [t0, limit] {
      return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count() > limit;
    };
  }

  const RunResult result = many ? run_nsga3(problem, opt, *dirs) : run_nsga2(problem, opt);
  slots.resize(result.archive.size());
  out.records = std::move(slots);

  json ranges = json::object();
  for (std::size_t i = 0; i < cfg.metrics.size(); ++i) {
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (const auto& r : out.records) {
      lo = std::min(lo, r.objectives[i]);
      hi = std::max(hi, r.objectives[i]);
    }
    ranges[std::string(metric_name(cfg.metrics[i]))] = {lo, hi};
  }
  json final_pop = json::array();
  for (auto i : result.population) final_pop.push_back(result.archive[i].eval_id);
  manifest["status"] = result.stopped_early ? "stopped" : "complete";
  manifest["n_evals"] = out.records.size();
  manifest["objective_ranges"] = std::move(ranges);
  manifest["final_population"] = std::move(final_pop);
  write_text(out.dir / "manifest.json", manifest.dump(2) + "\n");
  out.manifest = std::move(manifest);
  return out;
}

}  // namespace

std::vector<RunOutput> run_experiment(const ExperimentConfig& raw) {
  const ExperimentConfig cfg = raw.resolved();
  cfg.validate();
  const Dataset data = cfg.dataset.load();
  data.validate();
  std::vector<RunOutput> outs;
  for (auto seed : cfg.seeds) outs.push_back(run_single(cfg, data, seed));
  return outs;
}

ExperimentConfig config_from_manifest(const json& manifest) {
  if (!manifest.contains("config")) throw DataError("manifest has no config echo");
  return ExperimentConfig::from_json(manifest.at("config"));
}

// Run store -------------------------------------------------------------------

std::size_t StoredRun::column(MetricId id) const {
  const auto it = std::find(metrics.begin(), metrics.end(), id);
  if (it == metrics.end()) throw UnknownMetric(fmt::format("run {} does not carry metric '{}'", run_id, metric_name(id)));
  return static_cast<std::size_t>(it - metrics.begin());
}

const ArchiveRecord& StoredRun::record(std::uint64_t eval_id) const {
  if (eval_id < records.size() && records[eval_id].eval_id == eval_id) return records[eval_id];
  for (const auto& r : records) {
    if (r.eval_id == eval_id) return r;
  }
  throw NotFound(fmt::format("run {} has no evaluation {}", run_id, eval_id));
}

RunStore::RunStore(fs::path root) : root_(std::move(root)) {}

fs::path RunStore::run_dir(std::string_view run_id) const { return root_ / "runs" / std::string(run_id); }

std::vector<std::string> RunStore::list() const {
  std::vector<std::string> out;
  std::error_code ec;
  const fs::path runs = root_ / "runs";
  if (!fs::is_directory(runs, ec)) return out;
  for (const auto& entry : fs::directory_iterator(runs, ec)) {
    if (entry.is_directory() && fs::exists(entry.path() / "manifest.json")) {
      out.push_back(entry.path().filename().string());
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

bool RunStore::exists(std::string_view run_id) const {
  if (run_id.empty() || run_id.find('/') != std::string_view::npos || run_id.find("..") != std::string_view::npos) {
    return false;
  }
  return fs::exists(run_dir(run_id) / "manifest.json");
}

json RunStore::manifest(std::string_view run_id) const {
  if (!exists(run_id)) throw NotFound(fmt::format("unknown run '{}'", run_id));
  return read_json_file(run_dir(run_id) / "manifest.json");
}

std::vector<ArchiveRecord> read_archive(const fs::path& path, std::span<const MetricId> metrics) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw NotFound(fmt::format("cannot open {}", path.string()));
  std::vector<ArchiveRecord> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const bool last = in.peek() == std::char_traits<char>::eof();
    try {
      out.push_back(ArchiveRecord::from_json(json::parse(line), metrics));
    } catch (const json::exception& e) {
      if (last && in.eof()) {
        spdlog::warn("{}: skipping truncated final line {}", path.string(), line_no);
        break;
      }
      throw DataError(fmt::format("{}:{}: {}", path.string(), line_no, e.what()));
    }
  }
  return out;
}

StoredRun RunStore::load(std::string_view run_id) const {
  StoredRun run;
  run.run_id = std::string(run_id);
  run.dir = run_dir(run_id);
  run.manifest = manifest(run_id);
  try {
    const auto& m = run.manifest;
    run.collection = m.at("collection").get<std::string>();
    run.dataset = m.at("dataset").at("name").get<std::string>();
    run.learner = learner_from_name(m.at("config").at("learner").get<std::string>());
    run.formulation = Formulation::parse(m.at("formulation").get<std::string>());
    run.seed = m.at("seed").get<std::uint64_t>();
    run.metrics = metrics_from_json(m.at("metrics"));
  } catch (const json::exception& e) {
    throw DataError(fmt::format("run {}: malformed manifest: {}", run_id, e.what()));
  }
  run.records = read_archive(run.dir / "archive.jsonl", run.metrics);
  return run;
}

std::vector<StoredRun> RunStore::load_collection(std::string_view collection) const {
  std::vector<StoredRun> out;
  for (const auto& id : list()) {
    const json m = manifest(id);
    if (m.value("collection", std::string{}) == collection) out.push_back(load(id));
  }
  if (out.empty()) throw NotFound(fmt::format("unknown collection '{}'", collection));
  return out;
}

OutOfFoldPredictions retrain_out_of_fold(const StoredRun& run, std::uint64_t eval_id) {
  const ArchiveRecord& rec = run.record(eval_id);
  const ExperimentConfig cfg = config_from_manifest(run.manifest).resolved();
  OutOfFoldPredictions out{cfg.dataset.load(), {}};
  if (dataset_manifest(out.dataset, manifest_csv_options(cfg.dataset)) != run.manifest.at("dataset")) {
    throw DataError(fmt::format("run {}: dataset no longer matches the manifest", run.run_id));
  }
  const SearchSpace space = builtin_space(run.learner);
  const Configuration conf = decode(space, rec.genotype);
  const FoldPlan plan = stratified_kfold(out.dataset, cfg.k, derive_seed(run.seed, {kFoldSeedTag}));
  const PreparedFolds folds = PreparedFolds::build(out.dataset, plan);
  out.predictions.assign(out.dataset.size(), 0);
  for (std::size_t f = 0; f < folds.folds.size(); ++f) {
    const auto& fold = folds.folds[f];
    const auto model = train(space.learner, conf, fold.x_train, fold.y_train, derive_seed(rec.eval_seed, {f}));
    const auto pred = predict(model, fold.x_valid);
    for (std::size_t i = 0; i < pred.size(); ++i) out.predictions[fold.valid_rows[i]] = pred[i];
  }
  return out;
}

}  // namespace fairhpo
