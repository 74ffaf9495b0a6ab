// Copyright 2026 The fairhpo Authors.
// SPDX-License-Identifier: Apache-2.0

// Acceptance checks 1-9. Each prints one line:
//   criterion N: PASS|FAIL  <summary>
// Usage: fairhpo_acceptance [--only N] [--work-dir DIR]

#include <chrono>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <thread>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "fairhpo/analysis.hpp"
#include "fairhpo/data.hpp"
#include "fairhpo/error.hpp"
#include "fairhpo/hypervolume.hpp"
#include "fairhpo/metrics.hpp"
#include "fairhpo/nsga.hpp"
#include "fairhpo/orchestrator.hpp"
#include "fairhpo/pareto.hpp"
#include "fairhpo/selection.hpp"
#include "oracles.hpp"

namespace fs = std::filesystem;
using namespace fairhpo;

namespace {

struct Outcome {
  bool pass = true;
  std::string summary;
};

// Collects the first few failure messages.
struct Checker {
  std::size_t checks = 0, failures = 0;
  std::string first;
  void expect(bool ok, const std::string& what) {
    ++checks;
    if (!ok) {
      if (failures == 0) first = what;
      ++failures;
    }
  }
  Outcome outcome(const std::string& summary) const {
    if (failures == 0) return {true, summary};
    return {false, fmt::format("{} ({} of {} checks failed; first: {})", summary, failures, checks, first)};
  }
};

fs::path g_work = "acceptance_work";

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// 1 -------------------------------------------------------------------------

Outcome metric_oracle() {
  Checker c;
  std::mt19937_64 gen(20261016);
  double worst = 0.0;
  std::size_t no_groups = 0;
  for (int t = 0; t < 1000; ++t) {
    const auto l = oracle::random_labels(gen, 1 + gen() % 64);
    const PredictionSet p(l.y, l.yhat, l.a);
    auto near = [&](double got, double want, const char* name) {
      const double e = std::abs(got - want);
      worst = std::max(worst, e);
      c.expect(e <= 1e-12, fmt::format("{} set {}: {} vs {}", name, t, got, want));
    };
    if (oracle::has_both_groups(l)) {
      near(ddsp(p), oracle::ddsp(l), "ddsp");
    } else {
      ++no_groups;
      bool threw = false;
      try {
        ddsp(p);
      } catch (const InvalidArgument&) {
        threw = true;
      }
      c.expect(threw, fmt::format("ddsp set {} with one group did not throw", t));
    }
    near(deod(p).value, oracle::deod(l), "deod");
    near(deop(p).value, oracle::deop(l), "deop");
    near(invd(p), oracle::invd(l), "invd");
    near(invd_sim(p), oracle::invd_sim(l), "invd_sim");
    near(f1_objective(p).value, oracle::f1_obj(l), "f1_obj");
  }
  return c.outcome(
      fmt::format("1000 random sets, max abs error {:.2e} (tol 1e-12); {} single-group sets rejected by ddsp", worst,
                  no_groups));
}

// 2 -------------------------------------------------------------------------

Outcome sorting_oracle() {
  Checker c;
  std::mt19937_64 gen(7);
  const std::size_t dims[] = {2, 3, 5};
  for (int t = 0; t < 50; ++t) {
    const std::size_t d = dims[t % 3];
    std::vector<Point> pts(200, Point(d));
    // Every other set on a coarse grid, so ties and duplicates occur.
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (auto& p : pts) {
      for (auto& v : p) v = t % 2 ? std::floor(u(gen) * 6) : u(gen);
    }
    std::vector<bool> alive(pts.size(), true);
    const auto want0 = oracle::pareto_filter(pts, alive);
    c.expect(pareto_front_indices(pts) == want0, fmt::format("set {}: rank-0 differs", t));
    const auto rank = oracle::peel_ranks(pts);
    const auto fronts = non_dominated_sort(pts);
    std::size_t covered = 0;
    for (std::size_t r = 0; r < fronts.size(); ++r) {
      for (auto i : fronts[r]) {
        c.expect(rank[i] == r, fmt::format("set {}: point {} rank {} vs {}", t, i, r, rank[i]));
        ++covered;
      }
    }
    c.expect(covered == pts.size(), fmt::format("set {}: sort covers {} of {}", t, covered, pts.size()));
  }
  return c.outcome("50 sets, n=200, d in {2,3,5}: rank-0 and full ranks equal brute force exactly");
}

// 3 -------------------------------------------------------------------------

Outcome hypervolume_check() {
  Checker c;
  const std::vector<Point> two{{0.2, 0.8}, {0.8, 0.2}};
  const double ex = hypervolume_exact(two, HvSpec::unit(2));
  c.expect(std::abs(ex - 0.28) <= 1e-15, fmt::format("two-point example gave {:.17g}", ex));
  std::mt19937_64 gen(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = 0.0;
  std::uint64_t seed = 1;
  for (std::size_t d : {2u, 3u, 5u}) {
    for (int t = 0; t < 30; ++t) {
      // Points near the simplex |x| = d/2 so most are mutually non-dominated.
      const std::size_t n = 3 + gen() % 12;
      std::vector<Point> front(n, Point(d));
      for (auto& p : front) {
        double s = 0.0;
        for (auto& v : p) s += (v = u(gen));
        for (auto& v : p) v = std::min(1.0, v * (0.5 * d / s) * (0.8 + 0.4 * u(gen)));
      }
      const auto spec = HvSpec::unit(d);
      const double e = hypervolume_exact(front, spec);
      const double mc = hv_monte_carlo(front, spec, 1'000'000, seed++);
      worst = std::max(worst, std::abs(e - mc));
      c.expect(std::abs(e - mc) <= 0.003, fmt::format("d={} front {}: exact {} vs mc {}", d, t, e, mc));
    }
  }
  return c.outcome(fmt::format("two-point example = {:.17g}; 90 fronts, max |exact - MC(1e6)| = {:.5f} (tol 0.003)",
                               ex, worst));
}

// 4 -------------------------------------------------------------------------

Outcome nsga2_convergence() {
  Checker c;
  // f1 = x0, f2 = g (1 - sqrt(f1 / g)), g = 1 + 9 mean(x1..x3); optimum at g = 1.
  const Problem zdt = [](const EvalRequest& r) {
    const auto& x = r.genotype;
    double s = 0.0;
    for (std::size_t i = 1; i < x.size(); ++i) s += x[i];
    const double g = 1.0 + 9.0 * s / static_cast<double>(x.size() - 1);
    return Point{x[0], g * (1.0 - std::sqrt(x[0] / g))};
  };
  const double target = 0.95 * 2.0 / 3.0;
  std::string values;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    NsgaOptions o;
    o.n_var = 4;
    o.n_obj = 2;
    o.pop_size = 20;
    o.max_evals = 1000;
    o.seed = seed;
    const auto r = run_nsga2(zdt, o);
    std::vector<Point> pop;
    for (auto i : r.population) pop.push_back(r.archive[i].objectives);
    const std::size_t obj[] = {0, 1};
    const double hv = normalized_hypervolume(pop, obj, HvSpec::unit(2)).value;
    values += fmt::format("{}{:.4f}", values.empty() ? "" : " ", hv);
    c.expect(r.archive.size() == 1000, fmt::format("seed {} archive size {}", seed, r.archive.size()));
    c.expect(hv >= target, fmt::format("seed {} hv {:.4f} < {:.4f}", seed, hv, target));
  }
  return c.outcome(fmt::format("final-front HV per seed [{}], threshold {:.4f}", values, target));
}

// 5 -------------------------------------------------------------------------

Outcome bio_vs_mao() {
  const fs::path root = g_work / "c5";
  fs::remove_all(root);
  DatasetRef data;
  data.csv_path = FAIRHPO_SOURCE_DIR "/data/german_credit.csv";
  data.csv = CsvLoadOptions{"creditability", "sex", "good", "male", "german"};
  const std::size_t threads = std::max(1u, std::thread::hardware_concurrency());
  auto base = [&](Formulation f) {
    ExperimentConfig cfg;
    cfg.dataset = data;
    cfg.learner = LearnerId::kRandomForest;
    cfg.formulation = std::move(f);
    cfg.max_evals = 300;
    cfg.seeds = {0, 1, 2};
    cfg.output_dir = root;
    cfg.collection = "german-rf";
    cfg.threads = threads;
    return cfg;
  };
  const auto t0 = std::chrono::steady_clock::now();
  for (auto m : kFairnessMetrics) run_experiment(base(Formulation::bio(m)));
  auto mao = base(Formulation::mao());
  mao.pop_size = 42;
  mao.partitions = 3;
  run_experiment(mao);
  const double minutes = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count() / 60.0;

  const auto runs = RunStore(root).load_collection("german-rf");
  const auto cmp = formulation_comparison(RunCollection::from_runs(runs));
  Checker c;
  c.expect(runs.size() == 15, fmt::format("{} runs stored", runs.size()));
  c.expect(cmp.pairs.size() == 12, fmt::format("{} pairs", cmp.pairs.size()));
  for (const auto& r : runs) c.expect(r.records.size() == 300, fmt::format("{} has {} records", r.run_id, r.records.size()));
  const double r = cmp.pearson_r.value_or(NAN);
  c.expect(cmp.pearson_r.has_value() && r >= 0.9, fmt::format("pearson r {:.4f} < 0.9", r));
  c.expect(cmp.mean_regret <= 0.1, fmt::format("mean regret {:.4f} > 0.1", cmp.mean_regret));
  std::ofstream(g_work / "c5_comparison.json") << cmp.to_json().dump(2) << '\n';
  return c.outcome(fmt::format("German Credit RF, 3 seeds x 300 evals, 12 pairs: pearson r = {:.4f} (>= 0.9), "
                               "mean regret = {:.4f} (<= 0.1), {:.1f} min",
                               r, cmp.mean_regret, minutes));
}

// 6 -------------------------------------------------------------------------

const std::vector<MetricId> kVocab{MetricId::kF1Obj, MetricId::kDdsp, MetricId::kDeod, MetricId::kDeop};

CollectionMember make_member(Formulation f, std::uint64_t seed, std::vector<Point> pts) {
  CollectionMember m;
  m.run_id = fmt::format("toy-rf_{}_s{}", f.label(), seed);
  m.dataset = "toy";
  m.formulation = std::move(f);
  m.seed = seed;
  for (std::size_t i = 0; i < pts.size(); ++i) m.eval_ids.push_back(i);
  m.points = std::move(pts);
  return m;
}

// Normalized (f1_obj, col) HV by inclusion-exclusion, bounds from `all`.
double oracle_bi_hv(const std::vector<Point>& pts, const std::vector<std::vector<Point>>& all, std::size_t col) {
  double lo[2] = {INFINITY, INFINITY}, hi[2] = {-INFINITY, -INFINITY};
  for (const auto& a : all) {
    for (const auto& p : a) {
      for (int k = 0; k < 2; ++k) {
        const double v = p[k == 0 ? 0 : col];
        lo[k] = std::min(lo[k], v);
        hi[k] = std::max(hi[k], v);
      }
    }
  }
  std::vector<oracle::Vec> proj;
  for (const auto& p : pts) {
    proj.push_back({(p[0] - lo[0]) / (hi[0] - lo[0]), (p[col] - lo[1]) / (hi[1] - lo[1])});
  }
  // Dominated points do not change the union, so no filtering is needed.
  return oracle::hv_inclusion_exclusion(proj);
}

Outcome contrast_properties() {
  Checker c;
  // Hand-computed case: unit-box bounds, direct front {(0.5,0.5)} -> 0.25,
  // indirect {(0.2,0.8)} -> 0.16.
  {
    RunCollection rc({MetricId::kF1Obj, MetricId::kDdsp, MetricId::kDeod});
    rc.add(make_member(Formulation::bio(MetricId::kDdsp), 0, {{0, 1, 1}, {1, 0, 1}, {0.2, 0.4, 0.8}}));
    rc.add(make_member(Formulation::bio(MetricId::kDeod), 0, {{0, 1, 1}, {1, 1, 0}, {0.5, 0.9, 0.5}}));
    const double got = contrast(rc, MetricId::kDdsp, MetricId::kDeod).mean;
    c.expect(std::abs(got - 0.09) <= 1e-9, fmt::format("hand case C(ddsp,deod) = {}", got));
  }
  std::mt19937_64 gen(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = 0.0;
  for (int t = 0; t < 100; ++t) {
    RunCollection rc(kVocab), padded(kVocab);
    std::vector<std::vector<Point>> archives;
    for (std::size_t f = 0; f < 3; ++f) {
      std::vector<Point> pts;
      for (std::size_t i = 0; i < 2 + gen() % 6; ++i) pts.push_back({u(gen), u(gen), u(gen), u(gen)});
      archives.push_back(pts);
    }
    for (std::size_t f = 0; f < 3; ++f) {
      const auto metric = kVocab[f + 1];
      rc.add(make_member(Formulation::bio(metric), 0, archives[f]));
      // Add a point dominated in every projection: an existing point pushed
      // up in all coordinates, kept below the group's maxima.
      auto more = archives[f];
      const auto& base = archives[f][gen() % archives[f].size()];
      Point worse(4);
      for (int k = 0; k < 4; ++k) {
        double hi = -INFINITY;
        for (const auto& a : archives) {
          for (const auto& p : a) hi = std::max(hi, p[k]);
        }
        worse[k] = base[k] + (hi - base[k]) * 0.5 * u(gen);
      }
      more.push_back(worse);
      padded.add(make_member(Formulation::bio(metric), 0, more));
    }
    const auto m = contrast_matrix(rc);
    const auto mp = contrast_matrix(padded);
    for (std::size_t j = 0; j < 3; ++j) {
      c.expect(m.cells[j][j].mean == 0.0, fmt::format("trial {} diagonal {} = {}", t, j, m.cells[j][j].mean));
      for (std::size_t i = 0; i < 3; ++i) {
        const std::size_t col = j + 1;
        const double want = i == j ? 0.0
                                   : oracle_bi_hv(archives[j], archives, col) - oracle_bi_hv(archives[i], archives, col);
        const double got = m.cells[j][i].mean;
        worst = std::max(worst, std::abs(got - want));
        c.expect(std::abs(got - want) <= 1e-9, fmt::format("trial {} C({},{}) = {} vs {}", t, i, j, got, want));
        c.expect(std::abs(mp.cells[j][i].mean - got) <= 1e-12,
                 fmt::format("trial {} dominated points moved C({},{})", t, i, j));
        c.expect(got >= -1.0 && got <= 1.0, "contrast outside [-1,1]");
      }
    }
  }
  return c.outcome(fmt::format("diagonal exactly 0, invariant to dominated points, 100 random grids match "
                               "inclusion-exclusion HV gaps (max error {:.1e}, tol 1e-9)",
                               worst));
}

// 7 -------------------------------------------------------------------------

Outcome lawschool_construction() {
  Checker c;
  const auto d = synth_lawschool(10000, 0);
  BinaryVector yhat = d.target;
  const PredictionSet perfect(d.target, yhat, d.protected_attr);
  const double expected = std::abs(0.50 / 0.92 - 0.01 / 0.08);
  const double dp0 = ddsp(perfect);
  c.expect(std::abs(dp0 - expected) <= 0.02, fmt::format("perfect ddsp {:.4f} vs {:.4f}", dp0, expected));
  c.expect(std::abs(dp0 - oracle::ddsp({d.target, yhat, d.protected_attr})) <= 1e-12, "ddsp differs from oracle");
  const double sim0 = invd_sim(perfect);

  // Accept the first 300 unqualified group-0 applicants (3% of m) and reject
  // the first 400 qualified group-1 applicants (4% of m), in row order.
  std::size_t accepted = 0, rejected = 0;
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (d.protected_attr[i] == 0 && d.target[i] == 0 && accepted < 300) {
      yhat[i] = 1;
      ++accepted;
    } else if (d.protected_attr[i] == 1 && d.target[i] == 1 && rejected < 400) {
      yhat[i] = 0;
      ++rejected;
    }
  }
  c.expect(accepted == 300 && rejected == 400, "not enough rows to modify");
  const PredictionSet modified(d.target, yhat, d.protected_attr);
  const double dp1 = ddsp(modified);
  const double sim1 = invd_sim(modified);
  const oracle::Labels ol{d.target, yhat, d.protected_attr};
  c.expect(dp1 <= 0.02, fmt::format("modified ddsp {:.4f} > 0.02", dp1));
  c.expect(sim1 > sim0, fmt::format("invd_sim did not increase ({} -> {})", sim0, sim1));
  c.expect(std::abs(sim1 - oracle::invd_sim(ol)) <= 1e-12, "invd_sim differs from oracle");
  return c.outcome(fmt::format("perfect ddsp {:.4f} (expected {:.4f} +- 0.02); modified ddsp {:.4f} (<= 0.02); "
                               "invd_sim {:.4f} -> {:.4f}",
                               dp0, expected, dp1, sim0, sim1));
}

// 8 -------------------------------------------------------------------------

Outcome selection_suite() {
  Checker c;
  {
    const Front f{{MetricId::kF1Obj, MetricId::kDdsp, MetricId::kInvd},
                  {{0, {0.30, 0.20, 0.10}}, {1, {0.25, 0.30, 0.30}}, {2, {0.40, 0.05, 0.05}}}};
    const auto r = scalarized_select(
        f, WeightVector({{MetricId::kF1Obj, 0.5}, {MetricId::kDdsp, 0.2}, {MetricId::kInvd, 0.3}}));
    c.expect(r.eval_id == 0 && std::abs(r.score - 0.22) <= 1e-12,
             fmt::format("worked example chose {} with {}", r.eval_id, r.score));
  }
  const std::vector<MetricId> metrics{MetricId::kF1Obj, MetricId::kDdsp, MetricId::kDeod, MetricId::kDeop,
                                      MetricId::kInvd};
  std::mt19937_64 gen(99);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::size_t scaled_checks = 0;
  for (int t = 0; t < 1000; ++t) {
    const std::size_t d = 2 + gen() % 4, n = 1 + gen() % 40;
    Front f{{metrics.begin(), metrics.begin() + d}, {}};
    std::vector<oracle::Vec> pts;
    std::vector<std::uint64_t> ids;
    for (std::size_t i = 0; i < n; ++i) {
      oracle::Vec p(d);
      for (auto& v : p) v = t % 5 == 0 ? std::floor(u(gen) * 3) / 3 : u(gen);
      pts.push_back(p);
      ids.push_back(gen() % 100000);
      f.members.push_back({ids.back(), p});
    }
    std::vector<double> raw(d);
    for (auto& w : raw) w = gen() % 4 == 0 ? 0.0 : u(gen);
    raw[gen() % d] += 0.05;
    std::vector<std::pair<MetricId, double>> entries;
    for (std::size_t k = 0; k < d; ++k) entries.emplace_back(f.metrics[k], raw[k]);
    const auto r = scalarized_select(f, WeightVector(entries));
    const auto want = ids[oracle::scan_select(pts, ids, raw, 0)];
    c.expect(r.eval_id == want, fmt::format("front {}: chose {} vs scan {}", t, r.eval_id, want));
    for (double s : {0.125, 3.0, 1000.0}) {
      auto scaled = entries;
      for (auto& e : scaled) e.second *= s;
      const auto rs = scalarized_select(f, WeightVector(scaled));
      c.expect(rs.eval_id == r.eval_id, fmt::format("front {}: scaling by {} moved the argmin", t, s));
      ++scaled_checks;
    }
  }
  return c.outcome(fmt::format("worked example picks a (0.22); 1000 random fronts equal exhaustive scan; "
                               "{} scaled-weight checks keep the argmin",
                               scaled_checks));
}

// 9 -------------------------------------------------------------------------

Outcome determinism() {
  Checker c;
  const fs::path root = g_work / "c9";
  fs::remove_all(root);
  struct Case {
    std::string formulation;
    LearnerId learner;
  };
  const Case cases[] = {{"bio:deop", LearnerId::kRandomForest},
                        {"mao", LearnerId::kGradBoost},
                        {"bio:invd", LearnerId::kMlp}};
  std::size_t compared = 0;
  for (const auto& cs : cases) {
    ExperimentConfig cfg;
    cfg.dataset.csv_path = FAIRHPO_SOURCE_DIR "/data/german_credit.csv";
    cfg.dataset.csv = CsvLoadOptions{"creditability", "sex", "good", "male", "german"};
    cfg.learner = cs.learner;
    cfg.formulation = Formulation::parse(cs.formulation);
    cfg.max_evals = cfg.formulation.kind == FormulationKind::kMaO ? 84 : 40;
    cfg.seeds = {5};
    cfg.k = 3;
    cfg.output_dir = root / "first";
    cfg.threads = 1;
    const auto first = run_experiment(cfg);
    const auto rel = fs::path("runs") / first[0].run_id / "archive.jsonl";

    auto rerun = config_from_manifest(first[0].manifest);
    rerun.output_dir = root / "rerun";
    run_experiment(rerun);
    auto parallel = cfg;
    parallel.output_dir = root / "parallel";
    parallel.threads = 4;
    run_experiment(parallel);

    const auto a = slurp(root / "first" / rel);
    c.expect(!a.empty(), first[0].run_id + " archive is empty");
    c.expect(a == slurp(root / "rerun" / rel), first[0].run_id + ": manifest rerun differs");
    c.expect(a == slurp(root / "parallel" / rel), first[0].run_id + ": 4-thread archive differs");
    compared += 2;
  }
  return c.outcome(fmt::format("{} archive pairs byte-identical (manifest rerun, 1 vs 4 threads; rf/gb/mlp)",
                               compared));
}

}  // namespace

int main(int argc, char** argv) {
  int only = 0;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--only") == 0 && i + 1 < argc) {
      only = std::atoi(argv[++i]);
    } else if (std::strcmp(argv[i], "--work-dir") == 0 && i + 1 < argc) {
      g_work = argv[++i];
    } else {
      std::cerr << "usage: fairhpo_acceptance [--only N] [--work-dir DIR]\n";
      return 2;
    }
  }
  spdlog::set_level(spdlog::level::warn);
  const std::function<Outcome()> criteria[] = {metric_oracle,        sorting_oracle,      hypervolume_check,
                                               nsga2_convergence,    bio_vs_mao,          contrast_properties,
                                               lawschool_construction, selection_suite,   determinism};
  int failed = 0;
  for (int n = 1; n <= 9; ++n) {
    if (only && n != only) continue;
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      fs::create_directories(g_work);
      o = criteria[n - 1]();
    } catch (const std::exception& e) {
      o = {false, fmt::format("exception: {}", e.what())};
    }
    const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::cout << fmt::format("criterion {}: {}  {} [{:.1f}s]", n, o.pass ? "PASS" : "FAIL", o.summary, s) << std::endl;
    failed += !o.pass;
  }
  return failed == 0 ? 0 : 1;
}
