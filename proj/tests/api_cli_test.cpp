// Copyright 2026 The fairhpo Authors.
// SPDX-License-Identifier: Apache-2.0

#include "fairhpo/api.hpp"

#include <memory>
#include <random>
#include <sstream>

#include <gmock/gmock.h>
#include <gtest/gtest.h>

#include "fairhpo/analysis.hpp"
#include "fairhpo/cli.hpp"
#include "fairhpo/session_log.hpp"
#include "test_util.hpp"

namespace fairhpo {
namespace {

using nlohmann::json;
using ::testing::HasSubstr;
using testing_util::TempDir;

const std::string kBiO = "synth_lawschool-rf_bio-ddsp_s0";
const std::string kMaO = "synth_lawschool-rf_mao-ddsp-deod_s0";

struct CliResult {
  int code;
  std::string out, err;
};

CliResult cli(std::vector<std::string> args) {
  args.insert(args.begin(), "fairhpo");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

class ApiTest : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    dir_ = std::make_unique<TempDir>();
    for (const auto* f : {"bio:ddsp", "bio:deod", "mao:ddsp,deod"}) {
      auto c = testing_util::small_config(dir_->path(), Formulation::parse(f), 44);
      if (c.formulation.kind == FormulationKind::kMaO) c.pop_size = 22;
      run_experiment(c);
    }
    service_ = std::make_unique<ApiService>(RunStore(dir_->path()));
  }
  static void TearDownTestSuite() {
    service_.reset();
    dir_.reset();
  }

  static ApiResponse get(const std::string& path, std::map<std::string, std::string> q = {}) {
    return service_->handle({"GET", path, std::move(q), ""});
  }
  static ApiResponse post(const std::string& path, const std::string& body) {
    return service_->handle({"POST", path, {}, body});
  }
  static std::string data_dir() { return dir_->path().string(); }

  static std::unique_ptr<TempDir> dir_;
  static std::unique_ptr<ApiService> service_;
};

std::unique_ptr<TempDir> ApiTest::dir_;
std::unique_ptr<ApiService> ApiTest::service_;

TEST_F(ApiTest, ListsRuns) {
  const auto r = get("/runs");
  ASSERT_EQ(r.status, 200);
  ASSERT_EQ(r.body.at("runs").size(), 3u);
  std::vector<std::string> ids;
  for (const auto& run : r.body.at("runs")) ids.push_back(run.at("run_id"));
  EXPECT_THAT(ids, ::testing::Contains(kBiO));
  EXPECT_THAT(ids, ::testing::Contains(kMaO));
  EXPECT_EQ(get("/runs/" + kBiO).body.at("run_id"), kBiO);
}

TEST_F(ApiTest, ArchivePaging) {
  const auto r = get("/runs/" + kBiO + "/archive", {{"offset", "40"}, {"limit", "10"}});
  ASSERT_EQ(r.status, 200);
  EXPECT_EQ(r.body.at("total"), 44);
  EXPECT_EQ(r.body.at("records").size(), 4u);
  EXPECT_EQ(r.body.at("records")[0].at("eval_id"), 40);
  EXPECT_EQ(get("/runs/" + kBiO + "/archive", {{"limit", "0"}}).status, 400);
  EXPECT_EQ(get("/runs/" + kBiO + "/archive", {{"offset", "-1"}}).status, 400);
}

TEST_F(ApiTest, FrontAndTernary) {
  const auto f = get("/runs/" + kMaO + "/front");
  ASSERT_EQ(f.status, 200);
  EXPECT_EQ(f.body.at("objectives").size(), 3u);
  EXPECT_FALSE(f.body.at("points").empty());
  EXPECT_EQ(get("/runs/" + kMaO + "/front", {{"objectives", "f1_obj"}}).status, 400);
  EXPECT_EQ(get("/runs/" + kMaO + "/front", {{"objectives", "f1_obj,eod"}}).status, 422);
  const auto t = get("/runs/" + kMaO + "/ternary", {{"objectives", "f1_obj,ddsp,deod"}});
  ASSERT_EQ(t.status, 200);
  for (const auto& p : t.body.at("points")) {
    EXPECT_GE(p.at("y").get<double>(), -1e-12);
  }
  EXPECT_EQ(get("/runs/" + kMaO + "/ternary", {{"objectives", "f1_obj,ddsp"}}).status, 400);
}

TEST_F(ApiTest, SelectAgreesWithLibraryAndCli) {
  const json w = {{"f1_obj", 0.5}, {"ddsp", 0.2}, {"deod", 0.3}};
  const auto r = post("/runs/" + kMaO + "/select", w.dump());
  ASSERT_EQ(r.status, 200);
  const auto run = service_->store().load(kMaO);
  const auto lib = scalarized_select(run_front(run), WeightVector::from_json(w));
  EXPECT_EQ(r.body.at("eval_id"), lib.eval_id);
  const auto c = cli({"--data-dir", data_dir(), "--json", "select", "--run", kMaO, "--weights", w.dump()});
  ASSERT_EQ(c.code, 0) << c.err;
  EXPECT_EQ(json::parse(c.out).at("eval_id"), lib.eval_id);
  const auto text = cli({"--data-dir", data_dir(), "select", "--run", kMaO, "--weights", w.dump()});
  EXPECT_THAT(text.out, HasSubstr("eval_id " + std::to_string(lib.eval_id) + " score"));
}

TEST_F(ApiTest, SelectErrors) {
  EXPECT_EQ(post("/runs/" + kMaO + "/select", "{not json").status, 400);
  EXPECT_EQ(post("/runs/" + kMaO + "/select", R"({"eod": 1})").status, 422);
  EXPECT_EQ(post("/runs/" + kMaO + "/select", R"({"invd": 1})").status, 422);
  EXPECT_EQ(post("/runs/" + kMaO + "/select", R"({"ddsp": -1})").status, 400);
  EXPECT_EQ(post("/runs/nope/select", R"({"ddsp": 1})").status, 404);
  const auto r = post("/runs/" + kMaO + "/select", R"({"ddsp": "x"})");
  EXPECT_EQ(r.body.at("error").at("kind"), "invalid_argument");
}

TEST_F(ApiTest, RandomWeightsMatchLibrary) {
  const auto run = service_->store().load(kMaO);
  const auto front = run_front(run);
  std::mt19937_64 gen(1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 20; ++i) {
    const json w = {{"f1_obj", u(gen)}, {"ddsp", u(gen)}, {"deod", u(gen)}};
    EXPECT_EQ(post("/runs/" + kMaO + "/select", w.dump()).body.at("eval_id"),
              scalarized_select(front, WeightVector::from_json(w)).eval_id);
  }
}

TEST_F(ApiTest, ContrastAndCompare) {
  const auto c = get("/collections/synth_lawschool-rf/contrast");
  ASSERT_EQ(c.status, 200) << c.body.dump();
  EXPECT_EQ(c.body.at("metrics").size(), 2u);
  const auto m = get("/collections/synth_lawschool-rf/compare");
  ASSERT_EQ(m.status, 200) << m.body.dump();
  EXPECT_EQ(m.body.at("pairs").size(), 2u);
  EXPECT_EQ(get("/collections/nothing/contrast").status, 404);
  const auto cli_c = cli({"--data-dir", data_dir(), "--json", "analyze", "contrast", "--collection",
                          "synth_lawschool-rf"});
  ASSERT_EQ(cli_c.code, 0) << cli_c.err;
  auto lib = json::parse(cli_c.out);
  EXPECT_EQ(lib.at("matrix"), c.body.at("matrix"));
}

TEST_F(ApiTest, Behavior) {
  const auto r = get("/runs/" + kBiO + "/behavior/5");
  ASSERT_EQ(r.status, 200);
  EXPECT_EQ(r.body.at("m"), 300);
  EXPECT_EQ(get("/runs/" + kBiO + "/behavior/500").status, 404);
  EXPECT_EQ(get("/runs/" + kBiO + "/behavior/x").status, 400);
}

TEST_F(ApiTest, UnknownRoutesAndRuns) {
  EXPECT_EQ(get("/nope").status, 404);
  EXPECT_EQ(get("/runs/missing").status, 404);
  EXPECT_EQ(get("/runs/" + kBiO + "/bogus").status, 404);
  EXPECT_EQ(get("/runs/missing").body.at("error").at("kind"), "not_found");
}

TEST(StatusForKind, Mapping) {
  EXPECT_EQ(status_for_kind("invalid_argument"), 400);
  EXPECT_EQ(status_for_kind("unknown_metric"), 422);
  EXPECT_EQ(status_for_kind("incomplete_grid"), 422);
  EXPECT_EQ(status_for_kind("not_found"), 404);
  EXPECT_EQ(status_for_kind("io_error"), 500);
}

TEST_F(ApiTest, SessionLogReplay) {
  const auto run = service_->store().load(kMaO);
  const auto front = run_front(run);
  json events = json::array();
  for (const auto& w : {json{{"f1_obj", 1}}, json{{"ddsp", 2}, {"deod", 1}}, json{{"f1_obj", 1}, {"deod", 1}}}) {
    events.push_back({{"t", "2026-10-16T12:00:00Z"},
                      {"weights", w},
                      {"selected_eval_id", scalarized_select(front, WeightVector::from_json(w)).eval_id}});
  }
  const json j = {{"version", 1}, {"run_id", kMaO}, {"events", events}};
  const auto log = SessionLog::from_json(j);
  const auto ids = replay(log, run);
  ASSERT_EQ(ids.size(), 3u);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ(ids[i], log.events[i].selected_eval_id);
  EXPECT_EQ(SessionLog::from_json(log.to_json()).to_json(), log.to_json());
  auto bad = j;
  bad["version"] = 2;
  EXPECT_THROW(SessionLog::from_json(bad), InvalidArgument);
  bad = j;
  bad["events"][0]["weights"] = {{"eod", 1}};
  EXPECT_THROW(SessionLog::from_json(bad), UnknownMetric);
  auto other = log;
  other.run_id = kBiO;
  EXPECT_THROW(replay(other, run), InvalidArgument);
}

TEST(Cli, ExitCodes) {
  TempDir tmp;
  const auto dd = tmp.path().string();
  EXPECT_EQ(cli({"--help"}).code, 0);
  EXPECT_EQ(cli({"frobnicate"}).code, 1);
  EXPECT_EQ(cli({"--data-dir", dd, "run", "--synth", "300", "--formulation", "bio:ddsp", "--k", "1"}).code, 1);
  EXPECT_EQ(cli({"--data-dir", dd, "run", "--synth", "300", "--formulation", "bio:eod"}).code, 1);
  EXPECT_EQ(cli({"--data-dir", dd, "run", "--csv", "/nonexistent.csv", "--target", "y", "--protected", "a",
                 "--positive", "1", "--privileged", "1", "--evals", "50"})
                .code,
            2);
  EXPECT_EQ(cli({"--data-dir", dd, "select", "--run", "missing", "--weights", R"({"ddsp":1})"}).code, 2);
  const auto j = cli({"--data-dir", dd, "--json", "select", "--run", "missing", "--weights", R"({"ddsp":1})"});
  EXPECT_EQ(json::parse(j.err).at("error").at("kind"), "not_found");
}

TEST(Cli, RunThenExport) {
  TempDir tmp;
  const auto dd = tmp.path().string();
  const auto r = cli({"--data-dir", dd, "--json", "run", "--synth", "300", "--formulation", "bio:invd", "--evals",
                      "20", "--k", "3", "--seeds", "1", "2"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto runs = json::parse(r.out).at("runs");
  ASSERT_EQ(runs.size(), 2u);
  const std::string id = runs[0].at("run_id");
  EXPECT_EQ(id, "synth_lawschool-rf_bio-invd_s1");
  const auto csv = cli({"--data-dir", dd, "export", "--run", id, "--what", "front", "--format", "csv"});
  ASSERT_EQ(csv.code, 0) << csv.err;
  EXPECT_THAT(csv.out, ::testing::StartsWith("eval_id,f1_obj,invd\n"));
  const auto again = cli({"--data-dir", (tmp.path() / "again").string(), "run", "--manifest",
                          (tmp.path() / "runs" / id / "manifest.json").string()});
  ASSERT_EQ(again.code, 0) << again.err;
  EXPECT_EQ(testing_util::slurp(tmp.path() / "runs" / id / "archive.jsonl"),
            testing_util::slurp(tmp.path() / "again" / "runs" / id / "archive.jsonl"));
}

}  // namespace
}  // namespace fairhpo
