// Copyright 2026 The fairhpo Authors.
// SPDX-License-Identifier: Apache-2.0

#include "fairhpo/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "fairhpo/error.hpp"
#include "fairhpo/rng.hpp"

namespace fairhpo {

Matrix Matrix::select_rows(std::span<const std::size_t> idx) const {
  Matrix out(idx.size(), cols_);
  for (std::size_t i = 0; i < idx.size(); ++i) {
    auto src = row(idx[i]);
    std::copy(src.begin(), src.end(), out.row(i).begin());
  }
  return out;
}

void Dataset::validate() const {
  const std::size_t m = target.size();
  if (protected_attr.size() != m || features.rows() != m) {
    throw DataError(fmt::format("dataset '{}': length mismatch (target {}, protected {}, features {})",
                                name, m, protected_attr.size(), features.rows()));
  }
  if (feature_names.size() != features.cols()) {
    throw DataError(fmt::format("dataset '{}': {} feature names for {} columns", name,
                                feature_names.size(), features.cols()));
  }
  if (m < 4) throw DataError(fmt::format("dataset '{}': needs at least 4 rows, has {}", name, m));
  std::array<std::size_t, 2> y_counts{}, a_counts{};
  for (std::size_t i = 0; i < m; ++i) {
    if (target[i] > 1) throw DataError(fmt::format("dataset '{}': non-binary target at row {}", name, i));
    if (protected_attr[i] > 1) {
      throw DataError(fmt::format("dataset '{}': non-binary protected attribute at row {}", name, i));
    }
    ++y_counts[target[i]];
    ++a_counts[protected_attr[i]];
  }
  if (y_counts[0] == 0 || y_counts[1] == 0) {
    throw DataError(fmt::format("dataset '{}': target has a single class", name));
  }
  if (a_counts[0] == 0 || a_counts[1] == 0) {
    throw DataError(fmt::format("dataset '{}': protected attribute has a single group", name));
  }
  for (double v : features.values()) {
    if (!std::isfinite(v)) throw DataError(fmt::format("dataset '{}': non-finite feature value", name));
  }
}

Dataset Dataset::subset(std::span<const std::size_t> rows) const {
  Dataset out;
  out.name = name;
  out.feature_names = feature_names;
  out.provenance = provenance;
  out.features = features.select_rows(rows);
  out.target.reserve(rows.size());
  out.protected_attr.reserve(rows.size());
  for (auto r : rows) {
    out.target.push_back(target[r]);
    out.protected_attr.push_back(protected_attr[r]);
  }
  return out;
}

std::vector<std::size_t> FoldPlan::training_rows(std::size_t f) const {
  std::vector<std::size_t> rows;
  for (std::size_t g = 0; g < folds.size(); ++g) {
    if (g != f) rows.insert(rows.end(), folds[g].begin(), folds[g].end());
  }
  std::sort(rows.begin(), rows.end());
  return rows;
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

// Splits one CSV record. Handles double-quoted fields with "" escapes; a
// record never spans lines.
std::vector<std::string> split_record(std::string_view line) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.emplace_back(trim(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  fields.emplace_back(trim(cur));
  return fields;
}

bool is_missing(std::string_view cell) {
  return cell.empty() || cell == "NA" || cell == "?" || cell == "NaN" || cell == "nan";
}

bool parse_double(std::string_view s, double& out) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size() && std::isfinite(out);
}

BinaryVector binarize(const std::vector<std::vector<std::string>>& rows, std::size_t col,
                      const std::string& col_name, const std::string& one_label,
                      const char* what) {
  std::set<std::string> distinct;
  for (const auto& r : rows) distinct.insert(r[col]);
  if (distinct.size() > 2) {
    std::string listing;
    for (const auto& v : distinct) listing += (listing.empty() ? "" : ", ") + v;
    throw DataError(fmt::format("non-binary {} (column '{}' has {} distinct values: {})", what,
                                col_name, distinct.size(), listing));
  }
  if (!distinct.count(one_label)) {
    throw DataError(fmt::format("{} label '{}' does not occur in column '{}'", what, one_label,
                                col_name));
  }
  BinaryVector out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(r[col] == one_label ? 1 : 0);
  return out;
}

}  // namespace

Dataset parse_csv(std::string_view text, const CsvLoadOptions& opts, std::string provenance) {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::size_t dropped = 0;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (line_no == 1 && line.size() >= 3 && line.substr(0, 3) == "\xEF\xBB\xBF") line.remove_prefix(3);
    if (trim(line).empty()) continue;
    auto fields = split_record(line);
    if (header.empty()) {
      header = std::move(fields);
      continue;
    }
    if (fields.size() != header.size()) {
      throw DataError(fmt::format("unparseable row at line {}: {} fields, header has {}", line_no,
                                  fields.size(), header.size()));
    }
    if (std::any_of(fields.begin(), fields.end(), [](const auto& f) { return is_missing(f); })) {
      ++dropped;
      continue;
    }
    rows.push_back(std::move(fields));
  }
  if (header.empty()) throw DataError("CSV has no header row");

  auto column_index = [&](const std::string& name) {
    auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw DataError(fmt::format("missing column '{}'", name));
    return static_cast<std::size_t>(it - header.begin());
  };
  const std::size_t ycol = column_index(opts.target_col);
  const std::size_t acol = column_index(opts.protected_col);
  if (ycol == acol) throw InvalidArgument("target and protected column must differ");

  Dataset d;
  d.provenance = std::move(provenance);
  d.name = opts.name;
  d.dropped_rows = dropped;
  d.target = binarize(rows, ycol, opts.target_col, opts.positive_label, "target");
  d.protected_attr = binarize(rows, acol, opts.protected_col, opts.privileged_label,
                              "protected attribute");

  // Column plan: numeric columns map to one feature, others to one feature
  // per sorted category.
  struct ColumnPlan {
    std::size_t src;
    bool numeric;
    std::vector<std::string> categories;
  };
  std::vector<ColumnPlan> plan;
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (c == ycol || c == acol) continue;
    ColumnPlan p{c, true, {}};
    double tmp = 0.0;
    for (const auto& r : rows) {
      if (!parse_double(r[c], tmp)) {
        p.numeric = false;
        break;
      }
    }
    if (!p.numeric) {
      std::set<std::string> cats;
      for (const auto& r : rows) cats.insert(r[c]);
      p.categories.assign(cats.begin(), cats.end());
    }
    plan.push_back(std::move(p));
  }
  std::size_t n = 0;
  for (const auto& p : plan) {
    if (p.numeric) {
      d.feature_names.push_back(header[p.src]);
      ++n;
    } else {
      for (const auto& cat : p.categories) d.feature_names.push_back(header[p.src] + "=" + cat);
      n += p.categories.size();
    }
  }
  d.features = Matrix(rows.size(), n);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    std::size_t j = 0;
    for (const auto& p : plan) {
      if (p.numeric) {
        parse_double(rows[i][p.src], d.features(i, j++));
      } else {
        auto it = std::lower_bound(p.categories.begin(), p.categories.end(), rows[i][p.src]);
        d.features(i, j + static_cast<std::size_t>(it - p.categories.begin())) = 1.0;
        j += p.categories.size();
      }
    }
  }
  if (dropped > 0) spdlog::info("dataset '{}': dropped {} rows with missing cells", d.name, dropped);
  d.validate();
  return d;
}

Dataset load_csv(const std::filesystem::path& path, const CsvLoadOptions& opts) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(fmt::format("cannot open '{}'", path.string()));
  std::ostringstream buf;
  buf << in.rdbuf();
  CsvLoadOptions o = opts;
  if (o.name.empty()) o.name = path.stem().string();
  return parse_csv(buf.str(), o, path.string());
}

FoldPlan stratified_kfold(const Dataset& d, std::size_t k, std::uint64_t seed) {
  const std::size_t m = d.size();
  if (k < 2) throw InvalidArgument(fmt::format("stratified_kfold: k must be >= 2, got {}", k));
  if (k > m) throw InvalidArgument(fmt::format("stratified_kfold: k={} exceeds {} rows", k, m));

  std::array<std::vector<std::size_t>, 4> strata;
  for (std::size_t i = 0; i < m; ++i) strata[stratum_of(d.target[i], d.protected_attr[i])].push_back(i);

  FoldPlan plan;
  plan.k = k;
  plan.seed = seed;
  plan.folds.resize(k);
  Rng rng(derive_seed(seed, {0xF01D}));
  // Round-robin dealing per stratum; the starting fold carries over between
  // strata so fold sizes also stay within one of each other.
  std::size_t next = 0;
  for (auto& members : strata) {
    std::shuffle(members.begin(), members.end(), rng);
    for (auto idx : members) {
      plan.folds[next].push_back(idx);
      next = (next + 1) % k;
    }
  }
  for (auto& f : plan.folds) std::sort(f.begin(), f.end());
  return plan;
}

std::vector<std::size_t> largest_remainder(std::size_t total, std::span<const double> weights) {
  const double sum = std::accumulate(weights.begin(), weights.end(), 0.0);
  if (!(sum > 0.0)) throw InvalidArgument("largest_remainder: weights must sum to a positive value");
  std::vector<std::size_t> counts(weights.size());
  std::vector<std::pair<double, std::size_t>> rem;
  std::size_t assigned = 0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    const double quota = static_cast<double>(total) * weights[i] / sum;
    // Guard against quotas like 99.99999999 that should be exact integers.
    const double rounded = std::round(quota);
    const double fl = std::abs(quota - rounded) < 1e-9 ? rounded : std::floor(quota);
    counts[i] = static_cast<std::size_t>(fl);
    assigned += counts[i];
    rem.emplace_back(quota - fl, i);
  }
  std::stable_sort(rem.begin(), rem.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
  for (std::size_t r = 0; assigned < total; ++r, ++assigned) ++counts[rem[r % rem.size()].second];
  return counts;
}

Dataset synth_lawschool(std::size_t m, std::uint64_t seed) {
  if (m < 100) throw InvalidArgument(fmt::format("synth_lawschool: m must be >= 100, got {}", m));
  // Order: (y=1,a=0), (y=0,a=0), (y=1,a=1), (y=0,a=1).
  constexpr std::array<double, 4> props{0.01, 0.07, 0.50, 0.42};
  constexpr std::array<std::uint8_t, 4> ys{1, 0, 1, 0};
  constexpr std::array<std::uint8_t, 4> as{0, 0, 1, 1};
  const auto counts = largest_remainder(m, props);
  for (auto c : counts) {
    if (c == 0) throw InvalidArgument(fmt::format("synth_lawschool: m={} leaves a joint cell empty", m));
  }

  std::vector<std::pair<std::uint8_t, std::uint8_t>> cells;
  cells.reserve(m);
  for (std::size_t c = 0; c < 4; ++c) cells.insert(cells.end(), counts[c], {ys[c], as[c]});
  Rng rng(derive_seed(seed, {0x1a55}));
  std::shuffle(cells.begin(), cells.end(), rng);

  Dataset d;
  d.name = "synth_lawschool";
  d.provenance = fmt::format("synth_lawschool(m={}, seed={})", m, seed);
  d.feature_names = {"lsat", "gpa", "essay"};
  d.features = Matrix(m, 3);
  d.target.resize(m);
  d.protected_attr.resize(m);
  std::normal_distribution<double> noise(0.0, 1.0);
  for (std::size_t i = 0; i < m; ++i) {
    const auto [y, a] = cells[i];
    d.target[i] = y;
    d.protected_attr[i] = a;
    d.features(i, 0) = 1.5 * y + 0.5 * a + noise(rng);
    d.features(i, 1) = 1.0 * y + 0.3 * a + noise(rng);
    d.features(i, 2) = 0.5 * y + noise(rng);
  }
  d.validate();
  return d;
}

DatasetSummary summarize(const Dataset& d) {
  DatasetSummary s;
  s.m = d.size();
  s.n = d.features.cols();
  for (std::size_t i = 0; i < s.m; ++i) ++s.cell_counts[stratum_of(d.target[i], d.protected_attr[i])];
  const double m = static_cast<double>(s.m);
  for (std::size_t c = 0; c < 4; ++c) s.cell_probabilities[c] = static_cast<double>(s.cell_counts[c]) / m;
  const auto& n = s.cell_counts;
  const double priv = static_cast<double>(n[stratum_of(0, 1)] + n[stratum_of(1, 1)]);
  const double unpriv = static_cast<double>(n[stratum_of(0, 0)] + n[stratum_of(1, 0)]);
  const double rate_priv = priv > 0 ? static_cast<double>(n[stratum_of(1, 1)]) / priv : 0.0;
  const double rate_unpriv = unpriv > 0 ? static_cast<double>(n[stratum_of(1, 0)]) / unpriv : 0.0;
  s.base_rate_gap = rate_priv - rate_unpriv;
  s.positive_share = static_cast<double>(n[stratum_of(1, 0)] + n[stratum_of(1, 1)]) / m;
  s.privileged_share = priv / m;
  return s;
}

nlohmann::json dataset_manifest(const Dataset& d, const CsvLoadOptions& opts) {
  const auto s = summarize(d);
  nlohmann::json cells = nlohmann::json::object();
  for (std::uint8_t y = 0; y < 2; ++y) {
    for (std::uint8_t a = 0; a < 2; ++a) cells[fmt::format("y{}_a{}", y, a)] = s.cell_counts[stratum_of(y, a)];
  }
  return {{"name", d.name},
          {"m", s.m},
          {"n", s.n},
          {"target_col", opts.target_col},
          {"protected_col", opts.protected_col},
          {"positive_label", opts.positive_label},
          {"privileged_label", opts.privileged_label},
          {"cell_counts", cells},
          {"provenance", d.provenance}};
}

}  // namespace fairhpo
