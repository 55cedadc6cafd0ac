#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "phreg/errors.hpp"
#include "phreg/harness.hpp"
#include "phreg/regularizers.hpp"
#include "phreg/tda.hpp"

using namespace phreg;

namespace {

ExperimentConfig small(Variant v, std::size_t epochs = 20) {
  auto cfg = ExperimentConfig::preset(Shape::circle);
  cfg.dataset.total = 300;
  cfg.dataset.splits = {60, 40, 200};
  cfg.variant = v;
  cfg.epochs = epochs;
  cfg.seeds = {0, 1};
  cfg.hidden = 16;
  return cfg;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream f(p);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("config validation") {
  auto cfg = small(Variant::baseline);
  CHECK_NOTHROW(cfg.validate());
  cfg.epochs = 0;
  CHECK_THROWS_AS(cfg.validate(), InvalidInput);
  cfg = small(Variant::baseline);
  cfg.seeds.clear();
  CHECK_THROWS_AS(cfg.validate(), InvalidInput);
  cfg = small(Variant::lt);
  cfg.lambda_t = -1;
  CHECK_THROWS_AS(cfg.validate(), InvalidInput);
  cfg = small(Variant::lt);
  cfg.n_m = 61;
  CHECK_THROWS_AS(cfg.validate(), InvalidInput);
  CHECK(parse_variant("ld_plus_lt") == Variant::ld_plus_lt);
  CHECK(to_string(Variant::ld_prime) == "ld_prime");
  CHECK_THROWS_AS(parse_variant("dropout"), InvalidInput);
}

TEST_CASE("presets") {
  const auto swiss = ExperimentConfig::preset(Shape::swiss_roll);
  CHECK(swiss.lambda_d == 10.0);
  CHECK(swiss.lambda_t == 100.0);
  CHECK(ExperimentConfig::preset(Shape::circle).lambda_d == 1.0);
  CHECK(ExperimentConfig::preset(Shape::torus).lambda_d == 1.0);
  const auto mam = ExperimentConfig::preset(Shape::mammoth);
  CHECK(mam.lambda_d == 1.0);
  CHECK(mam.lambda_t == 10000.0);
  CHECK(swiss.epochs == 10000);
  CHECK(swiss.lr == 1e-3);
  CHECK(swiss.hidden == 100);
}

TEST_CASE("one epoch runs end to end for every variant") {
  for (auto v : {Variant::baseline, Variant::ld_prime, Variant::ld, Variant::lt, Variant::ld_plus_lt}) {
    auto cfg = small(v, 1);
    const auto report = run_experiment(cfg);
    CHECK(report.complete);
    CHECK(report.completed == 2);
    for (const auto& s : report.seeds) {
      CHECK(s.ok);
      CHECK(std::isfinite(s.test_mse));
      CHECK(s.best_epoch <= 1);
    }
    const auto j = report_to_json(report);
    CHECK(j.contains("mean_test_mse"));
    CHECK(j["seeds"].size() == 2);
  }
}

TEST_CASE("baseline never touches the topology code") {
  const auto mst_before = mst_invocations();
  const auto reg_before = regularizer_invocations();
  (void)run_experiment(small(Variant::baseline, 30));
  CHECK(mst_invocations() == mst_before);
  CHECK(regularizer_invocations() == reg_before);

  (void)run_experiment(small(Variant::lt, 3));
  CHECK(regularizer_invocations() > reg_before);
}

TEST_CASE("mean and std recompute from per-seed values") {
  auto cfg = small(Variant::lt, 15);
  cfg.seeds = {3, 4, 5};
  const auto report = run_experiment(cfg);
  std::vector<double> v;
  for (const auto& s : report.seeds) v.push_back(s.test_mse);
  double mean = (v[0] + v[1] + v[2]) / 3.0;
  double ss = 0;
  for (double x : v) ss += (x - mean) * (x - mean);
  CHECK(std::abs(report.mean_test_mse - mean) <= 1e-12);
  CHECK(std::abs(report.std_test_mse - std::sqrt(ss / 2.0)) <= 1e-12);
  const auto [m1, s1] = mean_std({2.0});
  CHECK(m1 == 2.0);
  CHECK(s1 == 0.0);
}

TEST_CASE("identical configs give identical reports") {
  auto cfg = small(Variant::ld_plus_lt, 12);
  cfg.track_id_every = 4;
  cfg.record_loss_trace = true;
  const auto a = run_experiment(cfg);
  cfg.workers = 2;
  const auto b = run_experiment(cfg);
  CHECK(report_to_json(a).dump(2) == report_to_json(b).dump(2));
  CHECK(report_csv(a) == report_csv(b));
  CHECK(trace_csv(a) == trace_csv(b));
}

TEST_CASE("ID trace has one point per k epochs plus epoch zero") {
  auto cfg = small(Variant::ld, 10);
  const auto trace = track_id(cfg, 3);
  REQUIRE(trace.size() == 10 / 3 + 1);
  CHECK(trace[0].epoch == 0);
  CHECK(trace.back().epoch == 9);
  for (const auto& p : trace) CHECK(std::isfinite(p.dimension));
  CHECK(track_id(cfg, 3).back().dimension == trace.back().dimension);
}

TEST_CASE("loss trace covers every epoch") {
  auto cfg = small(Variant::lt, 7);
  cfg.seeds = {0};
  cfg.record_loss_trace = true;
  const auto report = run_experiment(cfg);
  const auto& t = report.seeds[0].loss_trace;
  REQUIRE(t.size() >= 7);
  CHECK(t.back().epoch == 7);
}

TEST_CASE("embedding dumps") {
  auto cfg = small(Variant::baseline, 5);
  cfg.feature_dim = 3;
  const auto trained = train_seed(cfg, 0);
  const auto dir = std::filesystem::temp_directory_path() / "phreg_embed_test";
  std::filesystem::create_directories(dir);
  dump_embeddings(trained.best_model, trained.data, trained.splits.test, dir / "a.csv");
  dump_embeddings(trained.best_model, trained.data, trained.splits.test, dir / "b.csv");
  const auto text = slurp(dir / "a.csv");
  CHECK(text == slurp(dir / "b.csv"));
  const auto cloud = read_cloud_csv(dir / "a.csv");
  CHECK(cloud.n() == trained.splits.test.size());
  CHECK(cloud.d() == 3);
  CHECK_THROWS(dump_embeddings(trained.best_model, trained.data, trained.splits.test, dir / "no" / "such" / "x.csv"));
  std::filesystem::remove_all(dir);
}

TEST_CASE("smaller regularizer batches and efficiency counters") {
  auto cfg = small(Variant::ld_plus_lt, 5);
  cfg.n_m = 20;
  const auto report = run_experiment(cfg);
  CHECK(report.complete);
  CHECK(report.efficiency.n_m == 20);
  CHECK(report.efficiency.seconds_per_epoch > 0.0);
  CHECK(report.efficiency.regularizer_seconds_per_epoch > 0.0);
  CHECK(efficiency_to_json(report).contains("regularizer_seconds_per_epoch"));
  CHECK(!report_to_json(report).dump().empty());
}

TEST_CASE("failing seeds are reported, not thrown") {
  auto cfg = small(Variant::baseline, 2);
  cfg.dataset = SyntheticSpec{};
  cfg.dataset.shape = Shape::mammoth;
  cfg.dataset.mammoth_path = "/nonexistent/mammoth.csv";
  const auto report = run_experiment(cfg);
  CHECK(!report.complete);
  CHECK(report.completed == 0);
  for (const auto& s : report.seeds) {
    CHECK(!s.ok);
    CHECK(!s.error.empty());
  }
}
