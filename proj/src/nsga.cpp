// Copyright 2026 The fairhpo Authors.
// SPDX-License-Identifier: Apache-2.0

#include "fairhpo/nsga.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <numeric>
#include <thread>

#include <Eigen/Dense>
#include <fmt/format.h>

namespace fairhpo {

namespace {

// Evaluates a batch; results land at their batch index regardless of
// which worker ran them.
std::vector<ArchiveEntry> evaluate_batch(const Problem& problem, const std::vector<std::vector<double>>& genotypes,
                                         std::uint64_t first_id, std::uint32_t generation, std::uint64_t master_seed,
                                         std::size_t n_obj, std::size_t threads) {
  std::vector<ArchiveEntry> out(genotypes.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::size_t failed_index = 0;
  std::mutex failure_mu;
  auto worker = [&] {
    for (std::size_t i = next++; i < genotypes.size(); i = next++) {
      ArchiveEntry& e = out[i];
      e.eval_id = first_id + i;
      e.generation = generation;
      e.genotype = genotypes[i];
      e.eval_seed = derive_seed(master_seed, {generation, i});
      EvalRequest req{e.eval_id, generation, i, e.genotype, e.eval_seed};
      try {
        e.objectives = problem(req);
        if (e.objectives.size() != n_obj) {
          throw InvalidArgument(fmt::format("objective callback returned {} values, expected {}",
                                            e.objectives.size(), n_obj));
        }
      } catch (...) {
        std::lock_guard lock(failure_mu);
        if (!failure || i < failed_index) {
          failure = std::current_exception();
          failed_index = i;
        }
      }
    }
  };
  const std::size_t n_threads = std::clamp<std::size_t>(threads, 1, std::max<std::size_t>(genotypes.size(), 1));
  if (n_threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < n_threads; ++t) pool.emplace_back(worker);
  }
  if (failure) {
    std::string msg = "objective evaluation failed";
    try {
      std::rethrow_exception(failure);
    } catch (const std::exception& ex) {
      msg = fmt::format("objective evaluation {} failed: {}", first_id + failed_index, ex.what());
    } catch (...) {
    }
    throw EvaluationError(msg, first_id + failed_index, genotypes[failed_index]);
  }
  return out;
}

void check_options(const NsgaOptions& o) {
  if (o.n_var == 0) throw InvalidArgument("nsga: n_var must be > 0");
  if (o.n_obj == 0) throw InvalidArgument("nsga: n_obj must be > 0");
  if (o.pop_size < 2 || o.pop_size % 2 != 0) {
    throw InvalidArgument(fmt::format("nsga: population size must be even and >= 2 (got {})", o.pop_size));
  }
  if (o.max_evals < o.pop_size) {
    throw InvalidArgument(fmt::format("nsga: max_evals ({}) < population size ({})", o.max_evals, o.pop_size));
  }
}

struct RankInfo {
  std::vector<std::size_t> rank;
  std::vector<double> crowding;
};

RankInfo rank_population(std::span<const Point> pts) {
  RankInfo info{std::vector<std::size_t>(pts.size()), std::vector<double>(pts.size())};
  const auto fronts = non_dominated_sort(pts);
  for (std::size_t r = 0; r < fronts.size(); ++r) {
    const auto cd = crowding_distance(pts, fronts[r]);
    for (std::size_t k = 0; k < fronts[r].size(); ++k) {
      info.rank[fronts[r][k]] = r;
      info.crowding[fronts[r][k]] = cd[k];
    }
  }
  return info;
}

// Mating selection strategy: returns a parent index into the population.
using ParentPicker = std::function<std::size_t(Rng&)>;
// Survivor strategy: picks pop_size indices from the merged points.
using SurvivorPicker = std::function<std::vector<std::size_t>(std::span<const Point>, std::size_t, Rng&)>;
using PickerFactory = std::function<ParentPicker(std::span<const Point>)>;

RunResult evolve(const Problem& problem, const NsgaOptions& opt, const PickerFactory& make_picker,
                 const SurvivorPicker& survive) {
  check_options(opt);
  Rng rng(derive_seed(opt.seed, {0xEA}));
  const std::uint64_t eval_master = derive_seed(opt.seed, {0xE7A1});
  const double p_m = opt.variation.p_m.value_or(1.0 / static_cast<double>(opt.n_var));

  RunResult result;
  std::uint32_t generation = 0;
  auto run_generation = [&](const std::vector<std::vector<double>>& genotypes) {
    auto entries = evaluate_batch(problem, genotypes, result.archive.size(), generation, eval_master, opt.n_obj,
                                  opt.threads);
    const std::size_t start = result.archive.size();
    for (auto& e : entries) result.archive.push_back(std::move(e));
    if (opt.on_generation) {
      opt.on_generation(std::span<const ArchiveEntry>(result.archive).subspan(start));
    }
    ++generation;
    return start;
  };

  std::vector<std::vector<double>> init(opt.pop_size, std::vector<double>(opt.n_var));
  for (auto& g : init) {
    for (auto& v : g) v = uniform01(rng);
  }
  run_generation(init);
  result.population.resize(opt.pop_size);
  std::iota(result.population.begin(), result.population.end(), std::size_t{0});

  while (result.archive.size() < opt.max_evals) {
    if (opt.should_stop && opt.should_stop()) {
      result.stopped_early = true;
      break;
    }
    const std::size_t n_off = std::min(opt.pop_size, opt.max_evals - result.archive.size());
    std::vector<Point> pop_pts;
    for (auto i : result.population) pop_pts.push_back(result.archive[i].objectives);
    const ParentPicker pick = make_picker(pop_pts);

    std::vector<std::vector<double>> offspring;
    while (offspring.size() < n_off) {
      const auto& a = result.archive[result.population[pick(rng)]].genotype;
      const auto& b = result.archive[result.population[pick(rng)]].genotype;
      auto [c1, c2] = sbx_crossover(a, b, opt.variation.eta_c, opt.variation.p_cx, rng);
      offspring.push_back(polynomial_mutation(c1, opt.variation.eta_m, p_m, rng));
      if (offspring.size() < n_off) offspring.push_back(polynomial_mutation(c2, opt.variation.eta_m, p_m, rng));
    }
    const std::size_t start = run_generation(offspring);

    std::vector<std::size_t> merged = result.population;
    for (std::size_t i = start; i < result.archive.size(); ++i) merged.push_back(i);
    std::vector<Point> merged_pts;
    for (auto i : merged) merged_pts.push_back(result.archive[i].objectives);
    const auto keep = survive(merged_pts, opt.pop_size, rng);
    std::vector<std::size_t> next;
    for (auto k : keep) next.push_back(merged[k]);
    result.population = std::move(next);
  }
  return result;
}

// Perpendicular distance from `p` to the line spanned by `w`.
double perpendicular_distance(std::span<const double> p, std::span<const double> w) {
  double dot = 0.0, ww = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    dot += p[i] * w[i];
    ww += w[i] * w[i];
  }
  const double t = ww > 0.0 ? dot / ww : 0.0;
  double d2 = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double r = p[i] - t * w[i];
    d2 += r * r;
  }
  return std::sqrt(d2);
}

// Intercepts of the hyperplane through the extreme points of the translated
// objectives; falls back to the front's worst values when the hyperplane is
// degenerate, and to 1 where that range is zero too.
std::vector<double> intercepts(const std::vector<Point>& translated, std::span<const std::size_t> first_front,
                               std::span<const std::size_t> selected) {
  const std::size_t d = translated[selected.front()].size();
  std::vector<std::size_t> extreme(d);
  for (std::size_t axis = 0; axis < d; ++axis) {
    double best = std::numeric_limits<double>::infinity();
    for (auto i : selected) {
      double asf = 0.0;
      for (std::size_t k = 0; k < d; ++k) asf = std::max(asf, translated[i][k] / (k == axis ? 1.0 : 1e-6));
      if (asf < best) {
        best = asf;
        extreme[axis] = i;
      }
    }
  }
  std::vector<double> a(d, 0.0);
  bool ok = true;
  Eigen::MatrixXd e(d, d);
  for (std::size_t r = 0; r < d; ++r) {
    for (std::size_t c = 0; c < d; ++c) e(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = translated[extreme[r]][c];
  }
  Eigen::FullPivLU<Eigen::MatrixXd> lu(e);
  if (lu.rank() == static_cast<Eigen::Index>(d)) {
    const Eigen::VectorXd x = lu.solve(Eigen::VectorXd::Ones(static_cast<Eigen::Index>(d)));
    for (std::size_t k = 0; k < d; ++k) {
      a[k] = 1.0 / x[static_cast<Eigen::Index>(k)];
      if (!std::isfinite(a[k]) || a[k] <= 1e-6) ok = false;
    }
  } else {
    ok = false;
  }
  if (!ok) {
    for (std::size_t k = 0; k < d; ++k) {
      double worst = 0.0;
      for (auto i : first_front) worst = std::max(worst, translated[i][k]);
      if (worst <= 1e-6) {
        for (auto i : selected) worst = std::max(worst, translated[i][k]);
      }
      a[k] = worst > 1e-12 ? worst : 1.0;
    }
  }
  return a;
}

}  // namespace

std::vector<std::size_t> nsga2_survivors(std::span<const Point> points, std::size_t n_survive) {
  std::vector<std::size_t> keep;
  for (const auto& front : non_dominated_sort(points)) {
    if (keep.size() + front.size() <= n_survive) {
      keep.insert(keep.end(), front.begin(), front.end());
      if (keep.size() == n_survive) break;
      continue;
    }
    const auto cd = crowding_distance(points, front);
    std::vector<std::size_t> order(front.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return cd[a] > cd[b]; });
    for (std::size_t k = 0; keep.size() < n_survive; ++k) keep.push_back(front[order[k]]);
    break;
  }
  return keep;
}

std::vector<std::size_t> nsga3_survivors(std::span<const Point> points, std::size_t n_survive,
                                         const ReferenceDirectionSet& ref_dirs, Rng& rng) {
  const auto fronts = non_dominated_sort(points);
  std::vector<std::size_t> selected;  // S_t
  std::size_t last = 0;
  for (; last < fronts.size(); ++last) {
    selected.insert(selected.end(), fronts[last].begin(), fronts[last].end());
    if (selected.size() >= n_survive) break;
  }
  if (selected.size() == n_survive) return selected;
  const auto& last_front = fronts[last];
  const std::size_t before_last = selected.size() - last_front.size();
  std::vector<std::size_t> keep(selected.begin(), selected.begin() + static_cast<std::ptrdiff_t>(before_last));

  const std::size_t d = points.front().size();
  if (ref_dirs.directions.empty() || ref_dirs.directions.front().size() != d) {
    throw InvalidArgument("nsga3: reference directions do not match the objective count");
  }
  std::vector<double> ideal(d, std::numeric_limits<double>::infinity());
  for (auto i : selected) {
    for (std::size_t k = 0; k < d; ++k) ideal[k] = std::min(ideal[k], points[i][k]);
  }
  std::vector<Point> translated(points.size());
  for (auto i : selected) {
    translated[i].resize(d);
    for (std::size_t k = 0; k < d; ++k) translated[i][k] = points[i][k] - ideal[k];
  }
  const auto a = intercepts(translated, fronts[0], selected);

  const auto& dirs = ref_dirs.directions;
  std::vector<std::size_t> niche(points.size());
  std::vector<double> dist(points.size());
  for (auto i : selected) {
    Point normalized(d);
    for (std::size_t k = 0; k < d; ++k) normalized[k] = translated[i][k] / a[k];
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < dirs.size(); ++j) {
      const double pd = perpendicular_distance(normalized, dirs[j]);
      if (pd < best) {
        best = pd;
        niche[i] = j;
      }
    }
    dist[i] = best;
  }

  std::vector<std::size_t> niche_count(dirs.size(), 0);
  for (auto i : keep) ++niche_count[niche[i]];
  std::vector<std::vector<std::size_t>> candidates(dirs.size());
  for (auto i : last_front) candidates[niche[i]].push_back(i);
  std::vector<bool> active(dirs.size());
  for (std::size_t j = 0; j < dirs.size(); ++j) active[j] = !candidates[j].empty();

  while (keep.size() < n_survive) {
    std::size_t min_count = std::numeric_limits<std::size_t>::max();
    for (std::size_t j = 0; j < dirs.size(); ++j) {
      if (active[j]) min_count = std::min(min_count, niche_count[j]);
    }
    std::vector<std::size_t> least;
    for (std::size_t j = 0; j < dirs.size(); ++j) {
      if (active[j] && niche_count[j] == min_count) least.push_back(j);
    }
    const std::size_t j = least[uniform_index(rng, least.size())];
    auto& pool = candidates[j];
    std::size_t pos = 0;
    if (niche_count[j] == 0) {
      for (std::size_t k = 1; k < pool.size(); ++k) {
        if (dist[pool[k]] < dist[pool[pos]]) pos = k;
      }
    } else {
      pos = uniform_index(rng, pool.size());
    }
    keep.push_back(pool[pos]);
    pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(pos));
    ++niche_count[j];
    if (pool.empty()) active[j] = false;
  }
  return keep;
}

RunResult run_nsga2(const Problem& problem, const NsgaOptions& options) {
  auto make_picker = [](std::span<const Point> pop) -> ParentPicker {
    auto info = std::make_shared<RankInfo>(rank_population(pop));
    const std::size_t n = pop.size();
    return [info, n](Rng& rng) {
      const std::size_t a = uniform_index(rng, n);
      const std::size_t b = uniform_index(rng, n);
      if (info->rank[a] != info->rank[b]) return info->rank[a] < info->rank[b] ? a : b;
      if (info->crowding[a] != info->crowding[b]) return info->crowding[a] > info->crowding[b] ? a : b;
      return std::min(a, b);
    };
  };
  auto survive = [](std::span<const Point> pts, std::size_t n, Rng&) { return nsga2_survivors(pts, n); };
  return evolve(problem, options, make_picker, survive);
}

RunResult run_nsga3(const Problem& problem, const NsgaOptions& options, const ReferenceDirectionSet& ref_dirs) {
  if (ref_dirs.directions.empty() || ref_dirs.directions.front().size() != options.n_obj) {
    throw InvalidArgument("run_nsga3: reference directions do not match n_obj");
  }
  auto make_picker = [](std::span<const Point> pop) -> ParentPicker {
    const std::size_t n = pop.size();
    return [n](Rng& rng) { return uniform_index(rng, n); };
  };
  auto survive = [&ref_dirs](std::span<const Point> pts, std::size_t n, Rng& rng) {
    return nsga3_survivors(pts, n, ref_dirs, rng);
  };
  return evolve(problem, options, make_picker, survive);
}

}  // namespace fairhpo
