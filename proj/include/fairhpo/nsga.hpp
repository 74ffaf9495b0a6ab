// Copyright 2026 The fairhpo Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "fairhpo/error.hpp"
#include "fairhpo/pareto.hpp"
#include "fairhpo/space.hpp"

namespace fairhpo {

// One evaluated individual. Every evaluation ever made during a run is
// appended to the run's archive in evaluation order.
struct ArchiveEntry {
  std::uint64_t eval_id = 0;
  std::uint32_t generation = 0;
  std::vector<double> genotype;
  Point objectives;
  // Per-individual stream seed handed to the objective callback.
  std::uint64_t eval_seed = 0;
};

using Archive = std::vector<ArchiveEntry>;

struct EvalRequest {
  std::uint64_t eval_id = 0;
  std::uint32_t generation = 0;
  std::size_t index = 0;  // position within the generation's batch
  std::span<const double> genotype;
  std::uint64_t seed = 0;  // derive_seed(master, {generation, index})
};

// Objective callback. Must be safe to call concurrently for distinct
// requests and must return the same vector for the same request.
using Problem = std::function<Point(const EvalRequest&)>;

// Raised when the objective callback throws; carries the offending
// individual so the caller can log it.
class EvaluationError : public Error {
 public:
  EvaluationError(const std::string& what, std::uint64_t eval_id, std::vector<double> genotype)
      : Error(what), eval_id_(eval_id), genotype_(std::move(genotype)) {}
  const char* kind() const noexcept override { return "evaluation_error"; }
  std::uint64_t eval_id() const noexcept { return eval_id_; }
  const std::vector<double>& genotype() const noexcept { return genotype_; }

 private:
  std::uint64_t eval_id_;
  std::vector<double> genotype_;
};

struct NsgaOptions {
  std::size_t n_var = 0;
  std::size_t n_obj = 0;
  std::size_t pop_size = 20;
  std::size_t max_evals = 1000;
  std::uint64_t seed = 0;
  VariationParams variation;
  // Worker threads for objective evaluation within a generation.
  std::size_t threads = 1;
  // Called after each generation's evaluations are appended, with the new
  // entries only. Used to flush archives incrementally.
  std::function<void(std::span<const ArchiveEntry>)> on_generation;
  // Polled before each new generation; returning true ends the run early.
  std::function<bool()> should_stop;
};

struct RunResult {
  Archive archive;
  // Indices into `archive` of the final surviving population.
  std::vector<std::size_t> population;
  bool stopped_early = false;
};

// Elitist NSGA-II: binary tournament on (rank, crowding), SBX, polynomial
// mutation, (mu + lambda) survivor selection by rank then crowding. The
// last generation is truncated so that archive.size() == max_evals.
RunResult run_nsga2(const Problem& problem, const NsgaOptions& options);

// NSGA-III with reference-direction niching. Population size may exceed
// the number of directions; the niching loop keeps filling the least
// crowded niches.
RunResult run_nsga3(const Problem& problem, const NsgaOptions& options, const ReferenceDirectionSet& ref_dirs);

// NSGA-III survivor selection, exposed for testing: picks `n_survive`
// indices from `points`.
std::vector<std::size_t> nsga3_survivors(std::span<const Point> points, std::size_t n_survive,
                                         const ReferenceDirectionSet& ref_dirs, Rng& rng);

// NSGA-II survivor selection.
std::vector<std::size_t> nsga2_survivors(std::span<const Point> points, std::size_t n_survive);

}  // namespace fairhpo
