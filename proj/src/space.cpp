// Copyright 2026 The fairhpo Authors.
// SPDX-License-Identifier: Apache-2.0

#include "fairhpo/space.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "fairhpo/error.hpp"

namespace fairhpo {

std::string_view learner_name(LearnerId id) noexcept {
  switch (id) {
    case LearnerId::kRandomForest: return "rf";
    case LearnerId::kGradBoost: return "gb";
    case LearnerId::kMlp: return "mlp";
  }
  return "?";
}

LearnerId learner_from_name(std::string_view name) {
  if (name == "rf" || name == "random_forest" || name == "RandomForest") return LearnerId::kRandomForest;
  if (name == "gb" || name == "xgb" || name == "GradBoost") return LearnerId::kGradBoost;
  if (name == "mlp" || name == "nn" || name == "Mlp") return LearnerId::kMlp;
  throw InvalidArgument(fmt::format("unknown learner id '{}'", name));
}

void HyperparamDef::validate() const {
  if (!(lo < hi)) throw InvalidArgument(fmt::format("param '{}': lo must be < hi", name));
  if (scale == ParamScale::kLog && !(lo > 0.0)) {
    throw InvalidArgument(fmt::format("param '{}': log scale requires lo > 0", name));
  }
}

std::size_t SearchSpace::index_of(std::string_view name) const {
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (params[i].name == name) return i;
  }
  throw NotFound(fmt::format("search space has no parameter '{}'", name));
}

long Configuration::as_int(const SearchSpace& space, std::string_view name) const {
  return std::lround(values[space.index_of(name)]);
}

double Configuration::as_double(const SearchSpace& space, std::string_view name) const {
  return values[space.index_of(name)];
}

SearchSpace builtin_space(LearnerId learner) {
  using K = ParamKind;
  using S = ParamScale;
  SearchSpace s;
  s.learner = learner;
  switch (learner) {
    case LearnerId::kRandomForest:
      s.params = {{"max_depth", K::kInt, 1, 50, S::kLog},
                  {"min_samples_split", K::kInt, 2, 128, S::kLog},
                  {"min_samples_leaf", K::kInt, 1, 20, S::kUniform},
                  {"max_features", K::kFloat, 0, 1, S::kUniform},
                  {"n_estimators", K::kInt, 1, 200, S::kLog}};
      break;
    case LearnerId::kGradBoost:
      s.params = {{"eta", K::kFloat, std::ldexp(1.0, -10), 1.0, S::kLog},
                  {"max_depth", K::kInt, 1, 50, S::kLog},
                  {"colsample_bytree", K::kFloat, 0.1, 1.0, S::kUniform},
                  {"reg_lambda", K::kFloat, std::ldexp(1.0, -10), std::ldexp(1.0, 10), S::kLog},
                  {"n_estimators", K::kInt, 1, 200, S::kLog}};
      break;
    case LearnerId::kMlp:
      s.params = {{"depth", K::kInt, 1, 3, S::kUniform},
                  {"width", K::kInt, 16, 1024, S::kLog},
                  {"batch_size", K::kInt, 4, 256, S::kLog},
                  {"alpha", K::kFloat, 1e-8, 1.0, S::kLog},
                  {"learning_rate_init", K::kFloat, 1e-5, 1.0, S::kLog},
                  {"n_iter_no_change", K::kInt, 1, 20, S::kLog}};
      break;
  }
  return s;
}

double decode_value(const HyperparamDef& def, double gene) {
  double v = def.scale == ParamScale::kLog
                 ? std::exp(std::log(def.lo) + gene * (std::log(def.hi) - std::log(def.lo)))
                 : def.lo + gene * (def.hi - def.lo);
  if (def.kind == ParamKind::kInt) v = std::floor(v + 0.5);
  return std::clamp(v, def.lo, def.hi);
}

double encode_value(const HyperparamDef& def, double value) {
  double g = def.scale == ParamScale::kLog
                 ? (std::log(value) - std::log(def.lo)) / (std::log(def.hi) - std::log(def.lo))
                 : (value - def.lo) / (def.hi - def.lo);
  return std::clamp(g, 0.0, 1.0);
}

Configuration decode(const SearchSpace& space, std::span<const double> genotype) {
  if (genotype.size() != space.dim()) {
    throw InvalidArgument(fmt::format("genotype has {} genes, space has {} parameters", genotype.size(),
                                      space.dim()));
  }
  Configuration cfg;
  cfg.genotype.assign(genotype.begin(), genotype.end());
  cfg.values.reserve(space.dim());
  for (std::size_t i = 0; i < space.dim(); ++i) {
    const double g = genotype[i];
    if (!(g >= 0.0 && g <= 1.0)) {
      throw InvalidArgument(fmt::format("gene {} = {} outside [0,1]", i, g));
    }
    cfg.values.push_back(decode_value(space.params[i], g));
  }
  return cfg;
}

Configuration encode(const SearchSpace& space, std::span<const double> values) {
  if (values.size() != space.dim()) {
    throw InvalidArgument(fmt::format("{} values for {} parameters", values.size(), space.dim()));
  }
  std::vector<double> genes(space.dim());
  for (std::size_t i = 0; i < space.dim(); ++i) genes[i] = encode_value(space.params[i], values[i]);
  return decode(space, genes);
}

Configuration sample(const SearchSpace& space, Rng& rng) {
  std::vector<double> genes(space.dim());
  for (auto& g : genes) g = uniform01(rng);
  return decode(space, genes);
}

std::pair<std::vector<double>, std::vector<double>> sbx_crossover(std::span<const double> a,
                                                                  std::span<const double> b,
                                                                  double eta_c, double p_cx, Rng& rng) {
  if (a.size() != b.size()) throw InvalidArgument("sbx_crossover: parent length mismatch");
  if (!(eta_c > 0.0)) throw InvalidArgument("sbx_crossover: eta_c must be > 0");
  std::vector<double> c1(a.begin(), a.end()), c2(b.begin(), b.end());
  constexpr double lo = 0.0, hi = 1.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (uniform01(rng) >= p_cx) continue;
    if (std::abs(a[i] - b[i]) <= 1e-14) continue;
    const double y1 = std::min(a[i], b[i]);
    const double y2 = std::max(a[i], b[i]);
    const double r = uniform01(rng);

    auto spread = [&](double beta) {
      const double alpha = 2.0 - std::pow(beta, -(eta_c + 1.0));
      return r <= 1.0 / alpha ? std::pow(r * alpha, 1.0 / (eta_c + 1.0))
                              : std::pow(1.0 / (2.0 - r * alpha), 1.0 / (eta_c + 1.0));
    };
    const double betaq1 = spread(1.0 + 2.0 * (y1 - lo) / (y2 - y1));
    const double betaq2 = spread(1.0 + 2.0 * (hi - y2) / (y2 - y1));
    double v1 = std::clamp(0.5 * ((y1 + y2) - betaq1 * (y2 - y1)), lo, hi);
    double v2 = std::clamp(0.5 * ((y1 + y2) + betaq2 * (y2 - y1)), lo, hi);
    if (uniform01(rng) < 0.5) std::swap(v1, v2);
    c1[i] = v1;
    c2[i] = v2;
  }
  return {std::move(c1), std::move(c2)};
}

std::vector<double> polynomial_mutation(std::span<const double> g, double eta_m, double p_m, Rng& rng) {
  std::vector<double> out(g.begin(), g.end());
  const double mut_pow = 1.0 / (eta_m + 1.0);
  for (auto& y : out) {
    if (uniform01(rng) >= p_m) continue;
    const double d1 = y;
    const double d2 = 1.0 - y;
    const double r = uniform01(rng);
    double deltaq;
    if (r < 0.5) {
      const double val = 2.0 * r + (1.0 - 2.0 * r) * std::pow(1.0 - d1, eta_m + 1.0);
      deltaq = std::pow(val, mut_pow) - 1.0;
    } else {
      const double val = 2.0 * (1.0 - r) + 2.0 * (r - 0.5) * std::pow(1.0 - d2, eta_m + 1.0);
      deltaq = 1.0 - std::pow(val, mut_pow);
    }
    y = std::clamp(y + deltaq, 0.0, 1.0);
  }
  return out;
}

nlohmann::json to_json(const SearchSpace& space) {
  nlohmann::json params = nlohmann::json::array();
  for (const auto& p : space.params) {
    params.push_back({{"name", p.name},
                      {"kind", p.kind == ParamKind::kInt ? "int" : "float"},
                      {"lo", p.lo},
                      {"hi", p.hi},
                      {"scale", p.scale == ParamScale::kLog ? "log" : "uniform"}});
  }
  return {{"learner", learner_name(space.learner)}, {"params", params}};
}

SearchSpace search_space_from_json(const nlohmann::json& j) {
  SearchSpace s;
  s.learner = learner_from_name(j.at("learner").get<std::string>());
  for (const auto& p : j.at("params")) {
    HyperparamDef d;
    d.name = p.at("name").get<std::string>();
    d.kind = p.at("kind").get<std::string>() == "int" ? ParamKind::kInt : ParamKind::kFloat;
    d.lo = p.at("lo").get<double>();
    d.hi = p.at("hi").get<double>();
    d.scale = p.at("scale").get<std::string>() == "log" ? ParamScale::kLog : ParamScale::kUniform;
    d.validate();
    s.params.push_back(std::move(d));
  }
  return s;
}

nlohmann::json params_json(const SearchSpace& space, const Configuration& cfg) {
  nlohmann::json j = nlohmann::json::object();
  for (std::size_t i = 0; i < space.dim(); ++i) {
    const auto& p = space.params[i];
    if (p.kind == ParamKind::kInt) {
      j[p.name] = std::lround(cfg.values[i]);
    } else {
      j[p.name] = cfg.values[i];
    }
  }
  return j;
}

}  // namespace fairhpo
