// Copyright 2026 The fairhpo Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "fairhpo/data.hpp"
#include "fairhpo/learners.hpp"
#include "fairhpo/metrics.hpp"
#include "fairhpo/space.hpp"

namespace fairhpo {

inline constexpr std::string_view kSoftwareVersion = "0.3.0";

enum class FormulationKind { kBiO, kMaO };

// BiO optimizes (f1_obj, one fairness metric) with NSGA-II; MaO optimizes
// f1_obj plus two or more fairness metrics with NSGA-III.
struct Formulation {
  FormulationKind kind = FormulationKind::kMaO;
  std::vector<MetricId> fairness;

  static Formulation bio(MetricId metric);
  static Formulation mao(std::vector<MetricId> metrics = {std::begin(kFairnessMetrics), std::end(kFairnessMetrics)});
  // "bio:ddsp", "mao", "mao:ddsp,deod,invd".
  static Formulation parse(std::string_view text);

  // f1_obj followed by the fairness metrics.
  std::vector<MetricId> objectives() const;
  // "bio-ddsp" or "mao"; used in run ids.
  std::string label() const;
  // Round-trips through parse().
  std::string spec() const;
  void validate() const;
  friend bool operator==(const Formulation&, const Formulation&) = default;
};

// Either a CSV file with explicit labels or the synthetic admissions
// generator.
struct DatasetRef {
  std::filesystem::path csv_path;
  CsvLoadOptions csv;
  std::size_t synth_m = 0;  // > 0 selects synth_lawschool(synth_m, synth_seed)
  std::uint64_t synth_seed = 0;

  bool is_synthetic() const noexcept { return synth_m > 0; }
  Dataset load() const;
  std::string name() const;
  nlohmann::json to_json() const;
  static DatasetRef from_json(const nlohmann::json& j);
};

struct ExperimentConfig {
  DatasetRef dataset;
  LearnerId learner = LearnerId::kRandomForest;
  Formulation formulation;
  std::size_t k = 5;
  std::size_t pop_size = 0;  // 0: 20 for BiO, 42 for MaO
  std::size_t max_evals = 1000;
  std::vector<std::uint64_t> seeds{0};
  // Metrics evaluated and stored for every configuration. Must contain the
  // formulation's objectives. Defaults to f1_obj plus the four fairness
  // metrics so BiO archives can be compared across metrics.
  std::vector<MetricId> metrics;
  std::filesystem::path output_dir;
  // Groups runs for contrast and comparison; defaults to "<dataset>-<learner>".
  std::string collection;
  std::size_t threads = 1;
  // NSGA-III reference direction partitions.
  int partitions = 3;
  std::optional<double> wall_clock_limit_s;

  // Fills pop_size, metrics and collection defaults.
  ExperimentConfig resolved() const;
  // Throws InvalidArgument on any inconsistency (k < 2, budget below the
  // population, objectives missing from the metric list, ...).
  void validate() const;
  nlohmann::json to_json() const;
  static ExperimentConfig from_json(const nlohmann::json& j);
};

std::string run_id_for(const ExperimentConfig& resolved, std::uint64_t seed);

// Seed tags. fold seed = derive_seed(seed, {kFoldSeedTag}), EA master seed =
// derive_seed(seed, {kEaSeedTag}); the learner seed for fold f of an
// evaluation is derive_seed(eval_seed, {f}).
inline constexpr std::uint64_t kFoldSeedTag = 0xF01D5;
inline constexpr std::uint64_t kEaSeedTag = 0xEA5EED;

struct ArchiveRecord {
  std::uint64_t eval_id = 0;
  std::uint32_t generation = 0;
  std::vector<double> genotype;
  nlohmann::json params;
  // Aligned with the run's metric list; nullopt marks a failed fold.
  std::vector<std::optional<std::vector<double>>> fold_objectives;
  std::vector<double> objectives;
  // "undefined:<metric>", "fold_failed:<f>", "degenerate_model:<f>",
  // "evaluation_failed".
  std::vector<std::string> flags;
  std::uint64_t eval_seed = 0;
  // Kept out of the JSONL line; see timings.csv.
  double wall_ms = 0.0;

  bool failed() const;
  nlohmann::json to_json(std::span<const MetricId> metrics) const;
  static ArchiveRecord from_json(const nlohmann::json& j, std::span<const MetricId> metrics);
};

// Training/validation matrices per fold, materialized once per run.
struct PreparedFolds {
  struct Fold {
    Matrix x_train;
    BinaryVector y_train;
    std::vector<std::size_t> valid_rows;
    Matrix x_valid;
    BinaryVector y_valid;
    BinaryVector a_valid;
  };
  std::vector<Fold> folds;

  static PreparedFolds build(const Dataset& d, const FoldPlan& plan);
};

struct FoldEvaluation {
  std::vector<std::optional<std::vector<double>>> fold_values;
  std::vector<double> aggregated;
  std::vector<std::string> flags;
  bool failed = false;
};

// Trains on each training portion, scores the held-out fold and averages
// the fold vectors. Failed folds are skipped; when every fold fails the
// result is all ones with `failed` set.
FoldEvaluation objective_function(const SearchSpace& space, const Configuration& cfg, const PreparedFolds& folds,
                                  std::span<const MetricId> metrics, std::uint64_t seed);
FoldEvaluation objective_function(const SearchSpace& space, const Configuration& cfg, const Dataset& d,
                                  const FoldPlan& plan, std::span<const MetricId> metrics, std::uint64_t seed);

struct RunOutput {
  std::string run_id;
  std::uint64_t seed = 0;
  std::filesystem::path dir;
  std::vector<ArchiveRecord> records;
  nlohmann::json manifest;
};

// Runs every seed of the config in turn, persisting
//   <output_dir>/runs/<run_id>/{manifest.json, archive.jsonl, summary.csv, timings.csv}
// with archive lines flushed after each generation.
std::vector<RunOutput> run_experiment(const ExperimentConfig& cfg);

// Reconstructs the single-seed config echoed in a manifest.
ExperimentConfig config_from_manifest(const nlohmann::json& manifest);

// Root for run storage: $FAIRHPO_DATA_DIR, else ./fairhpo_data.
std::filesystem::path default_data_dir();

struct StoredRun {
  std::string run_id;
  std::filesystem::path dir;
  nlohmann::json manifest;
  std::string collection;
  std::string dataset;
  LearnerId learner = LearnerId::kRandomForest;
  Formulation formulation;
  std::uint64_t seed = 0;
  std::vector<MetricId> metrics;
  std::vector<ArchiveRecord> records;

  std::vector<MetricId> objectives() const { return formulation.objectives(); }
  // Column of `id` in the stored metric list; throws UnknownMetric.
  std::size_t column(MetricId id) const;
  // Throws NotFound.
  const ArchiveRecord& record(std::uint64_t eval_id) const;
};

class RunStore {
 public:
  explicit RunStore(std::filesystem::path root);

  const std::filesystem::path& root() const noexcept { return root_; }
  std::filesystem::path run_dir(std::string_view run_id) const;
  // Sorted run ids with a manifest on disk.
  std::vector<std::string> list() const;
  bool exists(std::string_view run_id) const;
  // Throws NotFound for an unknown id and DataError for corrupt files.
  StoredRun load(std::string_view run_id) const;
  nlohmann::json manifest(std::string_view run_id) const;
  std::vector<StoredRun> load_collection(std::string_view collection) const;

 private:
  std::filesystem::path root_;
};

// Reads archive.jsonl. A truncated final line (interrupted write) is
// skipped with a warning; any other malformed line throws DataError.
std::vector<ArchiveRecord> read_archive(const std::filesystem::path& path, std::span<const MetricId> metrics);

// Out-of-fold hard predictions for one archived configuration, retrained
// fold by fold with the seeds used during the search.
struct OutOfFoldPredictions {
  Dataset dataset;
  BinaryVector predictions;
};
OutOfFoldPredictions retrain_out_of_fold(const StoredRun& run, std::uint64_t eval_id);

}  // namespace fairhpo
