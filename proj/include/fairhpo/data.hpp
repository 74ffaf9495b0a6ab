// Copyright 2026 The fairhpo Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace fairhpo {

// Dense row-major real matrix.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<const double> row(std::size_t r) const {
    return {data_.data() + r * cols_, cols_};
  }
  std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }

  std::span<const double> values() const noexcept { return data_; }

  // Copies the listed rows, in order.
  Matrix select_rows(std::span<const std::size_t> idx) const;

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

// Binary vectors are stored as bytes holding 0 or 1.
using BinaryVector = std::vector<std::uint8_t>;

// Tabular fairness dataset: features, binary target (1 = favorable outcome)
// and binary protected attribute (1 = privileged group).
struct Dataset {
  std::string name;
  Matrix features;
  std::vector<std::string> feature_names;
  BinaryVector target;
  BinaryVector protected_attr;
  std::string provenance;
  // Rows dropped at ingestion for missing cells.
  std::size_t dropped_rows = 0;

  std::size_t size() const noexcept { return target.size(); }

  // Throws DataError when an invariant is broken: non-binary entries,
  // length mismatch, fewer than 4 rows, non-finite features, or an empty
  // target class / protected group.
  void validate() const;

  // Row subset in the given order; provenance and names are kept.
  Dataset subset(std::span<const std::size_t> rows) const;
};

// Joint stratum index: 2*y + a.
constexpr std::size_t stratum_of(std::uint8_t y, std::uint8_t a) noexcept {
  return 2u * y + a;
}

struct FoldPlan {
  std::size_t k = 0;
  std::vector<std::vector<std::size_t>> folds;
  std::uint64_t seed = 0;

  // All row indices not in fold `f`, ascending.
  std::vector<std::size_t> training_rows(std::size_t f) const;
};

struct DatasetSummary {
  std::size_t m = 0;
  std::size_t n = 0;
  // Indexed by stratum_of(y, a).
  std::array<std::size_t, 4> cell_counts{};
  std::array<double, 4> cell_probabilities{};
  // P(Y=1 | A=1) - P(Y=1 | A=0).
  double base_rate_gap = 0.0;
  double positive_share = 0.0;
  double privileged_share = 0.0;
};

struct CsvLoadOptions {
  std::string target_col;
  std::string protected_col;
  std::string positive_label;
  std::string privileged_label;
  // Defaults to the file stem.
  std::string name;
};

// Reads a UTF-8 CSV with a header row. Numeric columns are kept as-is;
// any other column is expanded one-hot in (column, lexicographic category)
// order. Rows with empty / "NA" / "?" cells are dropped and counted.
Dataset load_csv(const std::filesystem::path& path, const CsvLoadOptions& opts);

// Same as load_csv but from an in-memory CSV document.
Dataset parse_csv(std::string_view text, const CsvLoadOptions& opts,
                  std::string provenance = "<memory>");

// Stratifies on the joint (Y, A) cell so that every stratum's per-fold
// count differs by at most one across folds. Deterministic in (d, k, seed).
FoldPlan stratified_kfold(const Dataset& d, std::size_t k, std::uint64_t seed);

// Synthetic law-school style admissions data. Joint cells follow
//   P(Y=1,A=0)=0.01  P(Y=0,A=0)=0.07  P(Y=1,A=1)=0.50  P(Y=0,A=1)=0.42
// with exact counts by largest-remainder rounding. Features are
//   lsat  = 1.5*y + 0.5*a + N(0,1)
//   gpa   = 1.0*y + 0.3*a + N(0,1)
//   essay = 0.5*y         + N(0,1)
// and rows are shuffled with the seed.
Dataset synth_lawschool(std::size_t m, std::uint64_t seed);

// Largest-remainder apportionment of `total` over `weights` (which must sum
// to a positive value). Ties on remainder go to the lower index.
std::vector<std::size_t> largest_remainder(std::size_t total, std::span<const double> weights);

DatasetSummary summarize(const Dataset& d);

// Manifest fields: {name, m, n, target_col, protected_col, positive_label,
// privileged_label, cell_counts}.
nlohmann::json dataset_manifest(const Dataset& d, const CsvLoadOptions& opts);

}  // namespace fairhpo
