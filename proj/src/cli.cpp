// Copyright 2026 The fairhpo Authors.
// SPDX-License-Identifier: Apache-2.0

#include "fairhpo/cli.hpp"

#include <fstream>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ostream.h>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "fairhpo/analysis.hpp"
#include "fairhpo/api.hpp"
#include "fairhpo/error.hpp"
#include "fairhpo/orchestrator.hpp"

namespace fairhpo {

using nlohmann::json;

namespace {

struct RunFlags {
  std::string config_path, manifest_path;
  std::string csv, target, protected_col, positive, privileged, name;
  std::size_t synth_m = 0;
  std::uint64_t synth_seed = 0;
  std::string learner = "rf", formulation = "mao", metrics, collection;
  std::size_t k = 5, pop = 0, evals = 1000, threads = 1;
  int partitions = 3;
  std::vector<std::uint64_t> seeds{0};
  double wall_clock = 0.0;
};

json read_json(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidArgument(fmt::format("cannot open '{}'", path));
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw InvalidArgument(fmt::format("{}: {}", path, e.what()));
  }
}

void write_or_print(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty()) {
    out << text;
    return;
  }
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f || !(f << text)) throw IoError(fmt::format("cannot write '{}'", path));
}

void configure_logging(const std::string& level) {
  auto logger = spdlog::get("fairhpo");
  if (!logger) {
    logger = spdlog::stderr_color_mt("fairhpo");
    spdlog::set_default_logger(logger);
  }
  spdlog::set_level(spdlog::level::from_str(level));
}

ExperimentConfig build_config(const RunFlags& f, CLI::App& run, const std::string& data_dir, bool data_dir_given) {
  ExperimentConfig cfg;
  auto given = [&run](const char* name) { return run.get_option(name)->count() > 0; };
  if (!f.manifest_path.empty()) {
    cfg = config_from_manifest(read_json(f.manifest_path));
  } else if (!f.config_path.empty()) {
    cfg = ExperimentConfig::from_json(read_json(f.config_path));
  }
  const bool from_file = !f.manifest_path.empty() || !f.config_path.empty();
  if (given("--csv") || given("--synth") || !from_file) {
    if (given("--synth")) {
      cfg.dataset = DatasetRef{};
      cfg.dataset.synth_m = f.synth_m;
      cfg.dataset.synth_seed = f.synth_seed;
    } else if (given("--csv")) {
      cfg.dataset = DatasetRef{};
      cfg.dataset.csv_path = f.csv;
      cfg.dataset.csv = CsvLoadOptions{f.target, f.protected_col, f.positive, f.privileged, f.name};
    } else {
      throw InvalidArgument("run: give --config, --manifest, --csv or --synth");
    }
  }
  if (!from_file || given("--learner")) cfg.learner = learner_from_name(f.learner);
  if (!from_file || given("--formulation")) cfg.formulation = Formulation::parse(f.formulation);
  if (!from_file || given("--k")) cfg.k = f.k;
  if (!from_file || given("--pop")) cfg.pop_size = f.pop;
  if (!from_file || given("--evals")) cfg.max_evals = f.evals;
  if (!from_file || given("--seeds")) cfg.seeds = f.seeds;
  if (!from_file || given("--threads")) cfg.threads = f.threads;
  if (!from_file || given("--partitions")) cfg.partitions = f.partitions;
  if (given("--metrics")) cfg.metrics = parse_metric_csv(f.metrics);
  if (given("--collection")) cfg.collection = f.collection;
  if (given("--wall-clock")) cfg.wall_clock_limit_s = f.wall_clock;
  if (data_dir_given || cfg.output_dir.empty()) cfg.output_dir = data_dir;
  cfg = cfg.resolved();
  cfg.validate();
  return cfg;
}

std::string format_matrix(const ContrastMatrix& m) {
  std::string s = fmt::format("contrast {}-{}  (row f_j, column f_i: C(f_i, f_j), seed mean)\n", m.dataset,
                              learner_name(m.learner));
  s += fmt::format("{:>10}", "");
  for (auto id : m.metrics) s += fmt::format("{:>10}", metric_name(id));
  s += '\n';
  for (std::size_t j = 0; j < m.metrics.size(); ++j) {
    s += fmt::format("{:>10}", metric_name(m.metrics[j]));
    for (const auto& c : m.cells[j]) s += fmt::format("{:>10.4f}", c.mean);
    s += '\n';
  }
  return s;
}

int classify(std::string_view kind) {
  return kind == "invalid_argument" || kind == "unknown_metric" ? kExitUsage : kExitRuntime;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"fairhpo: fairness-aware many-objective hyperparameter optimization"};
  app.require_subcommand(1);
  std::string data_dir = default_data_dir().string();
  bool as_json = false;
  std::string log_level = "warn";
  auto* data_dir_opt = app.add_option("--data-dir", data_dir, "Run storage root (default $FAIRHPO_DATA_DIR)");
  app.add_flag("--json", as_json, "Machine-readable output and errors");
  app.add_option("--log-level", log_level, "trace|debug|info|warn|error|off")
      ->check(CLI::IsMember({"trace", "debug", "info", "warn", "error", "off"}));

  RunFlags rf;
  auto* run = app.add_subcommand("run", "Run an experiment (one archive per seed)");
  run->add_option("--config", rf.config_path, "Experiment config JSON");
  run->add_option("--manifest", rf.manifest_path, "Re-run the config echoed in a run manifest");
  run->add_option("--csv", rf.csv, "Dataset CSV");
  run->add_option("--target", rf.target, "Target column");
  run->add_option("--protected", rf.protected_col, "Protected attribute column");
  run->add_option("--positive", rf.positive, "Favorable target label");
  run->add_option("--privileged", rf.privileged, "Privileged group label");
  run->add_option("--name", rf.name, "Dataset name");
  run->add_option("--synth", rf.synth_m, "Use the synthetic admissions generator with this many rows");
  run->add_option("--synth-seed", rf.synth_seed, "Generator seed");
  run->add_option("--learner", rf.learner, "rf | gb | mlp");
  run->add_option("--formulation", rf.formulation, "bio:<metric> | mao[:m1,m2,...]");
  run->add_option("--k", rf.k, "Cross-validation folds");
  run->add_option("--pop", rf.pop, "Population size (0: 20 for bio, 42 for mao)");
  run->add_option("--evals", rf.evals, "Evaluation budget per seed");
  run->add_option("--seeds", rf.seeds, "Seeds")->expected(1, -1);
  run->add_option("--metrics", rf.metrics, "Metrics evaluated per configuration, comma separated");
  run->add_option("--collection", rf.collection, "Collection id for grouping runs");
  run->add_option("--threads", rf.threads, "Evaluation threads");
  run->add_option("--partitions", rf.partitions, "Reference direction partitions (mao)");
  run->add_option("--wall-clock", rf.wall_clock, "Optional wall-clock cap in seconds");

  auto* analyze = app.add_subcommand("analyze", "Contrast, BiO-vs-MaO comparison and ternary projections");
  analyze->require_subcommand(1);
  std::string collection, run_id, objectives, csv_out;
  auto* contrast_cmd = analyze->add_subcommand("contrast", "Contrast matrix over a collection's BiO runs");
  contrast_cmd->add_option("--collection", collection)->required();
  contrast_cmd->add_option("--csv-out", csv_out, "Write heatmap CSV here");
  auto* compare_cmd = analyze->add_subcommand("compare", "BiO vs MaO hypervolume comparison");
  compare_cmd->add_option("--collection", collection)->required();
  auto* ternary_cmd = analyze->add_subcommand("ternary", "Ternary projection of a run's front");
  ternary_cmd->add_option("--run", run_id)->required();
  ternary_cmd->add_option("--objectives", objectives, "Three metrics, comma separated")->required();
  ternary_cmd->add_option("--csv-out", csv_out, "Write ternary CSV here");

  std::string weights;
  auto* select = app.add_subcommand("select", "Weighted selection over a run's Pareto front");
  select->add_option("--run", run_id)->required();
  select->add_option("--weights", weights, R"(JSON object, e.g. {"f1_obj":0.5,"ddsp":0.2,"invd":0.3})")->required();

  std::uint64_t eval_id = 0;
  auto* report = app.add_subcommand("report", "Group behavior report for one evaluation (retrains it)");
  report->add_option("--run", run_id)->required();
  report->add_option("--eval-id", eval_id)->required();

  std::string what = "archive", format = "json", out_path;
  auto* exp = app.add_subcommand("export", "Export a run's archive, front or manifest");
  exp->add_option("--run", run_id)->required();
  exp->add_option("--what", what)->check(CLI::IsMember({"archive", "front", "manifest"}));
  exp->add_option("--format", format)->check(CLI::IsMember({"json", "csv"}));
  exp->add_option("--out", out_path, "Output file (default stdout)");

  int port = 8080;
  std::string host = "127.0.0.1";
  auto* serve = app.add_subcommand("serve", "Serve the read-only JSON API");
  serve->add_option("--port", port);
  serve->add_option("--host", host);

  auto fail = [&](std::string_view kind, const std::string& message, int code,
                  const std::vector<std::string>& missing = {}) {
    if (as_json) {
      json e = {{"kind", kind}, {"message", message}, {"exit_code", code}};
      if (!missing.empty()) e["missing"] = missing;
      err << json{{"error", e}}.dump() << '\n';
    } else {
      err << "error: " << message << '\n';
    }
    return code;
  };

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    return fail("usage", e.what(), kExitUsage);
  }
  configure_logging(log_level);

  try {
    const RunStore store(data_dir);
    if (run->parsed()) {
      const ExperimentConfig cfg = build_config(rf, *run, data_dir, data_dir_opt->count() > 0);
      const auto outputs = run_experiment(cfg);
      json runs = json::array();
      for (const auto& o : outputs) {
        runs.push_back({{"run_id", o.run_id},
                        {"dir", o.dir.string()},
                        {"n_evals", o.records.size()},
                        {"status", o.manifest.at("status")}});
        if (!as_json) out << fmt::format("{}  {} evaluations  {}\n", o.run_id, o.records.size(), o.dir.string());
      }
      if (as_json) out << json{{"runs", runs}}.dump(2) << '\n';
    } else if (contrast_cmd->parsed()) {
      const auto runs = store.load_collection(collection);
      const auto matrix = contrast_matrix(RunCollection::from_runs(runs));
      if (!csv_out.empty()) write_or_print(csv_out, matrix.to_csv(), out);
      json j = matrix.to_json();
      j["collection"] = collection;
      out << (as_json ? j.dump(2) + "\n" : format_matrix(matrix));
    } else if (compare_cmd->parsed()) {
      const json j = compare_payload(store, collection);
      if (as_json) {
        out << j.dump(2) << '\n';
      } else {
        for (const auto& p : j.at("pairs")) {
          out << fmt::format("{:<8} seed {:<4} hv_bi {:.4f}  hv_many {:.4f}  regret {:+.4f}\n",
                             p.at("metric").get<std::string>(), p.at("seed").get<std::uint64_t>(),
                             p.at("hv_bi").get<double>(), p.at("hv_many").get<double>(), p.at("regret").get<double>());
        }
        const auto& r = j.at("pearson_r");
        out << fmt::format("pearson r: {}   mean regret: {:.4f}\n", r.is_null() ? "degenerate" : fmt::format("{:.4f}", r.get<double>()),
                           j.at("mean_regret").get<double>());
      }
    } else if (ternary_cmd->parsed()) {
      const StoredRun r = store.load(run_id);
      const auto objs = parse_metric_csv(objectives);
      const json j = ternary_payload(r, objs);
      if (!csv_out.empty()) {
        std::vector<TernaryPoint> pts;
        for (const auto& p : j.at("points")) {
          TernaryPoint t;
          t.eval_id = p.at("eval_id");
          t.x = p.at("x");
          t.y = p.at("y");
          t.values = p.at("values");
          t.degenerate = p.at("degenerate");
          pts.push_back(t);
        }
        write_or_print(csv_out, ternary_csv(pts, objs), out);
      }
      out << j.dump(as_json ? 2 : -1) << '\n';
    } else if (select->parsed()) {
      json w;
      try {
        w = json::parse(weights);
      } catch (const json::exception& e) {
        throw InvalidArgument(fmt::format("malformed weights: {}", e.what()));
      }
      const json j = select_payload(store.load(run_id), w);
      if (as_json) {
        out << j.dump(2) << '\n';
      } else {
        out << fmt::format("eval_id {} score {}\n", j.at("eval_id").get<std::uint64_t>(), j.at("score").dump());
      }
    } else if (report->parsed()) {
      out << behavior_payload(store.load(run_id), eval_id).dump(2) << '\n';
    } else if (exp->parsed()) {
      const StoredRun r = store.load(run_id);
      std::string text;
      if (what == "manifest") {
        text = r.manifest.dump(2) + "\n";
      } else if (what == "front") {
        const json j = front_payload(r, {});
        if (format == "json") {
          text = j.dump(2) + "\n";
        } else {
          text = "eval_id";
          for (const auto& n : j.at("objectives")) text += "," + n.get<std::string>();
          text += "\n";
          for (const auto& p : j.at("points")) {
            text += std::to_string(p.at("eval_id").get<std::uint64_t>());
            for (const auto& v : p.at("values")) text += "," + v.dump();
            text += "\n";
          }
        }
      } else if (format == "json") {
        json recs = json::array();
        for (const auto& rec : r.records) recs.push_back(rec.to_json(r.metrics));
        text = recs.dump(2) + "\n";
      } else {
        std::ifstream in(r.dir / "summary.csv", std::ios::binary);
        std::stringstream ss;
        ss << in.rdbuf();
        text = ss.str();
      }
      write_or_print(out_path, text, out);
    } else if (serve->parsed()) {
      serve_http(ApiService(store), host, port);
    }
  } catch (const IncompleteGrid& e) {
    return fail(e.kind(), e.what(), kExitRuntime, e.missing());
  } catch (const Error& e) {
    return fail(e.kind(), e.what(), classify(e.kind()));
  } catch (const std::exception& e) {
    return fail("internal", e.what(), kExitRuntime);
  }
  return kExitOk;
}

}  // namespace fairhpo
