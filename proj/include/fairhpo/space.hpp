// Copyright 2026 The fairhpo Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "fairhpo/rng.hpp"

namespace fairhpo {

enum class LearnerId { kRandomForest, kGradBoost, kMlp };

// "rf", "gb", "mlp". Parsing also accepts "random_forest", "xgb", "nn".
std::string_view learner_name(LearnerId id) noexcept;
LearnerId learner_from_name(std::string_view name);

enum class ParamKind { kInt, kFloat };
enum class ParamScale { kUniform, kLog };

struct HyperparamDef {
  std::string name;
  ParamKind kind = ParamKind::kFloat;
  double lo = 0.0;
  double hi = 1.0;
  ParamScale scale = ParamScale::kUniform;

  // Throws InvalidArgument unless lo < hi and (log => lo > 0).
  void validate() const;
};

struct SearchSpace {
  LearnerId learner = LearnerId::kRandomForest;
  std::vector<HyperparamDef> params;

  std::size_t dim() const noexcept { return params.size(); }
  // Index of the named parameter; throws NotFound.
  std::size_t index_of(std::string_view name) const;
  const HyperparamDef& param(std::string_view name) const { return params[index_of(name)]; }
};

// Genotype in [0,1]^k plus the decoded values aligned with the space's
// parameter order. Integer parameters hold integral doubles.
struct Configuration {
  std::vector<double> genotype;
  std::vector<double> values;

  // Value of an integer parameter, e.g. cfg.as_int(space, "max_depth").
  long as_int(const SearchSpace& space, std::string_view name) const;
  double as_double(const SearchSpace& space, std::string_view name) const;
};

SearchSpace builtin_space(LearnerId learner);

// Maps one gene to a parameter value.
double decode_value(const HyperparamDef& def, double gene);
// Inverse of decode_value for in-range values (integers land on the gene
// that decodes back to the same grid point).
double encode_value(const HyperparamDef& def, double value);

// Throws InvalidArgument on length mismatch or genes outside [0,1].
Configuration decode(const SearchSpace& space, std::span<const double> genotype);
Configuration encode(const SearchSpace& space, std::span<const double> values);

Configuration sample(const SearchSpace& space, Rng& rng);

struct VariationParams {
  double eta_c = 15.0;
  double p_cx = 0.9;
  double eta_m = 20.0;
  // Per-gene mutation probability; nullopt means 1/k.
  std::optional<double> p_m;
};

// Bounded simulated binary crossover on [0,1]^k. Each gene is crossed
// independently with probability p_cx; children are clipped to [0,1].
std::pair<std::vector<double>, std::vector<double>> sbx_crossover(std::span<const double> a,
                                                                  std::span<const double> b,
                                                                  double eta_c, double p_cx, Rng& rng);

// Bounded polynomial mutation applied per gene with probability p_m.
std::vector<double> polynomial_mutation(std::span<const double> g, double eta_m, double p_m, Rng& rng);

nlohmann::json to_json(const SearchSpace& space);
SearchSpace search_space_from_json(const nlohmann::json& j);
// {name: value} with integers emitted as JSON integers.
nlohmann::json params_json(const SearchSpace& space, const Configuration& cfg);

}  // namespace fairhpo
