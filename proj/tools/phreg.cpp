// phreg: dataset generation, regularized training, ID estimation and PH0.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "phreg/datasets.hpp"
#include "phreg/errors.hpp"
#include "phreg/harness.hpp"
#include "phreg/id_estimation.hpp"
#include "phreg/tda.hpp"

namespace fs = std::filesystem;
using phreg::Matrix;

namespace {

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

struct GenerateArgs {
  std::string shape = "swiss_roll";
  std::uint64_t seed = 0;
  std::string out;
  std::string mammoth;
};

int cmd_generate(const GenerateArgs& a) {
  phreg::SyntheticSpec spec;
  spec.shape = phreg::parse_shape(a.shape);
  spec.seed = a.seed;
  if (!a.mammoth.empty()) spec.mammoth_path = a.mammoth;
  spec.validate();

  // Same streams as the training harness, so `generate` reproduces a run's data.
  phreg::Rng data_rng = phreg::Rng::derive(a.seed, 1);
  const auto targets = phreg::sample_shape(spec, data_rng);
  const auto ds = phreg::encode(targets, data_rng);
  phreg::Rng split_rng = phreg::Rng::derive(a.seed, 2);
  const auto parts = phreg::split(spec.total, spec.splits, split_rng);

  const fs::path dir(a.out);
  fs::create_directories(dir);
  phreg::write_cloud_csv(dir / "targets.csv", ds.y.data(), {"y1", "y2", "y3"});
  phreg::write_cloud_csv(dir / "inputs.csv", ds.x);
  write_text(dir / "splits.json",
             nlohmann::json{{"train", parts.train}, {"val", parts.val}, {"test", parts.test}}.dump(2) + "\n");

  std::ostringstream digest;
  digest << std::hex << std::setw(16) << std::setfill('0') << phreg::noise_digest(ds.noise_assignment);
  nlohmann::json meta{{"shape", phreg::to_string(spec.shape)},
                      {"seed", spec.seed},
                      {"total", spec.total},
                      {"splits", {{"train", spec.splits.train}, {"val", spec.splits.val}, {"test", spec.splits.test}}},
                      {"input_dim", phreg::kInputDim},
                      {"signal_dims", phreg::kSignalDims},
                      {"noise_assignment_fnv1a64", digest.str()}};
  if (spec.mammoth_path) meta["mammoth_path"] = spec.mammoth_path->string();
  write_text(dir / "meta.json", meta.dump(2) + "\n");
  return 0;
}

struct TrainArgs {
  std::string dataset = "swiss_roll";
  std::string variant = "ld_plus_lt";
  std::optional<double> lambda_d;
  std::optional<double> lambda_t;
  std::size_t epochs = 10000;
  double lr = 1e-3;
  std::vector<std::uint64_t> seeds;
  std::optional<std::size_t> nm;
  std::size_t schedule_m = 4;
  std::size_t track_id = 0;
  bool dump_embeddings = false;
  bool loss_trace = false;
  bool pre_activation = false;
  std::optional<std::size_t> feature_dim;
  std::size_t workers = 1;
  std::string mammoth;
  std::string out = "run";
};

int cmd_train(const TrainArgs& a) {
  auto cfg = phreg::ExperimentConfig::preset(phreg::parse_shape(a.dataset));
  cfg.variant = phreg::parse_variant(a.variant);
  if (a.lambda_d) cfg.lambda_d = *a.lambda_d;
  if (a.lambda_t) cfg.lambda_t = *a.lambda_t;
  cfg.epochs = a.epochs;
  cfg.lr = a.lr;
  if (!a.seeds.empty()) cfg.seeds = a.seeds;
  cfg.n_m = a.nm;
  cfg.schedule_m = a.schedule_m;
  cfg.track_id_every = a.track_id;
  cfg.record_loss_trace = a.loss_trace;
  cfg.tap = a.pre_activation ? phreg::FeatureTap::pre_activation : phreg::FeatureTap::post_activation;
  cfg.feature_dim = a.feature_dim;
  cfg.workers = a.workers;
  if (!a.mammoth.empty()) cfg.dataset.mammoth_path = a.mammoth;
  cfg.validate();

  const fs::path dir(a.out);
  fs::create_directories(dir);
  const auto report = phreg::run_experiment(cfg);
  write_text(dir / "report.json", phreg::report_to_json(report).dump(2) + "\n");
  write_text(dir / "report.csv", phreg::report_csv(report));
  write_text(dir / "efficiency.json", phreg::efficiency_to_json(report).dump(2) + "\n");
  if (cfg.track_id_every > 0 || cfg.record_loss_trace) write_text(dir / "trace.csv", phreg::trace_csv(report));

  if (a.dump_embeddings) {
    // First seed's selected model on its test split; rerun is deterministic.
    const auto trained = phreg::train_seed(cfg, cfg.seeds.front());
    phreg::dump_embeddings(trained.best_model, trained.data, trained.splits.test, dir / "embeddings.csv", cfg.tap);
    Matrix targets(static_cast<Eigen::Index>(trained.splits.test.size()), 3);
    for (std::size_t k = 0; k < trained.splits.test.size(); ++k) {
      targets.row(static_cast<Eigen::Index>(k)) = trained.data.y.data().row(static_cast<Eigen::Index>(trained.splits.test[k]));
    }
    phreg::write_cloud_csv(dir / "embedding_targets.csv", targets, {"y1", "y2", "y3"});
  }

  std::cout << "variant=" << phreg::to_string(cfg.variant) << " dataset=" << phreg::to_string(cfg.dataset.shape)
            << " seeds=" << report.completed << "/" << cfg.seeds.size();
  if (report.completed > 0) {
    std::cout << " test_mse=" << report.mean_test_mse << " +- " << report.std_test_mse;
  }
  std::cout << " s/epoch=" << report.efficiency.seconds_per_epoch << '\n';
  for (const auto& s : report.seeds) {
    if (!s.ok) std::cerr << "seed " << s.seed << " failed: " << s.error << '\n';
  }
  return report.complete ? 0 : 1;
}

struct EstimateArgs {
  std::string cloud;
  std::string method = "twonn";
  std::uint64_t seed = 0;
  std::size_t reps = 5;
  double truncation = 0.1;
};

int cmd_estimate(const EstimateArgs& a) {
  const auto cloud = phreg::read_cloud_csv(a.cloud);
  phreg::IdEstimate est;
  if (a.method == "birdal") {
    phreg::Rng rng(a.seed);
    est = phreg::ph_dim_birdal(cloud, phreg::SubsetSchedule::for_estimation(cloud.n()), a.reps, rng);
    if (est.unbounded) std::cerr << "warning: PH slope >= 1, dimension unbounded\n";
  } else if (a.method == "twonn") {
    est = phreg::twonn(cloud, a.truncation);
  } else {
    throw phreg::InvalidInput("unknown method '" + a.method + "'");
  }
  std::cout << std::setprecision(17) << "method,slope,dimension\n"
            << phreg::to_string(est.method) << ',' << est.slope << ',' << est.dimension << '\n';
  return 0;
}

int cmd_ph0(const std::string& path) {
  const auto cloud = phreg::read_cloud_csv(path);
  const auto intervals = phreg::ph0(cloud);
  std::cout << std::setprecision(17) << "birth,death\n";
  double total = 0.0;
  for (const auto& iv : intervals) {
    std::cout << iv.birth << ',' << iv.death << '\n';
    total += iv.death - iv.birth;
  }
  if (cloud.n() < 2) {
    std::cerr << "E is undefined for a single point\n";
    return 0;
  }
  std::cout << "E," << total << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"phreg: persistent-homology regression regularizers"};
  app.require_subcommand(1);

  GenerateArgs gen;
  auto* generate = app.add_subcommand("generate", "Sample and encode a synthetic dataset");
  generate->add_option("--shape", gen.shape, "swiss_roll | torus | circle | mammoth")->capture_default_str();
  generate->add_option("--seed", gen.seed)->capture_default_str();
  generate->add_option("--out", gen.out, "Output directory")->required();
  generate->add_option("--mammoth", gen.mammoth, "3-D point CSV for the mammoth shape");

  TrainArgs tr;
  auto* train = app.add_subcommand("train", "Train and evaluate over seeds");
  train->add_option("--dataset", tr.dataset, "swiss_roll | torus | circle | mammoth")->capture_default_str();
  train->add_option("--variant", tr.variant, "baseline | ld_prime | ld | lt | ld_plus_lt")->capture_default_str();
  train->add_option("--lambda-d", tr.lambda_d, "Defaults to the dataset preset");
  train->add_option("--lambda-t", tr.lambda_t, "Defaults to the dataset preset");
  train->add_option("--epochs", tr.epochs)->capture_default_str()->check(CLI::PositiveNumber);
  train->add_option("--lr", tr.lr)->capture_default_str();
  train->add_option("--seeds", tr.seeds, "Seed list (default 0..9)")->delimiter(',');
  train->add_option("--nm", tr.nm, "Regularizer sample size (default: training-set size)");
  train->add_option("--schedule-m", tr.schedule_m)->capture_default_str();
  train->add_option("--track-id", tr.track_id, "TwoNN on test features every k epochs");
  train->add_flag("--dump-embeddings", tr.dump_embeddings, "Write test-set hidden features of the first seed");
  train->add_flag("--loss-trace", tr.loss_trace, "Record per-epoch losses in trace.csv");
  train->add_flag("--pre-activation", tr.pre_activation, "Regularize pre-activation hidden features");
  train->add_option("--feature-dim", tr.feature_dim, "Override hidden width (e.g. 3 for inspection)");
  train->add_option("--workers", tr.workers, "Seeds trained in parallel")->capture_default_str();
  train->add_option("--mammoth", tr.mammoth, "3-D point CSV for the mammoth dataset");
  train->add_option("--out", tr.out, "Output directory")->capture_default_str();

  EstimateArgs est;
  auto* estimate = app.add_subcommand("estimate-id", "Intrinsic dimension of a point cloud");
  estimate->add_option("cloud", est.cloud, "Point-cloud CSV")->required();
  estimate->add_option("--method", est.method, "birdal | twonn")->capture_default_str();
  estimate->add_option("--seed", est.seed)->capture_default_str();
  estimate->add_option("--reps", est.reps, "Subsets per size (birdal)")->capture_default_str();
  estimate->add_option("--truncation", est.truncation, "Censored fraction of ratios (twonn)")->capture_default_str();

  std::string ph0_path;
  auto* ph0 = app.add_subcommand("ph0", "0-dimensional persistence intervals and E");
  ph0->add_option("cloud", ph0_path, "Point-cloud CSV")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*generate) return cmd_generate(gen);
    if (*train) return cmd_train(tr);
    if (*estimate) return cmd_estimate(est);
    if (*ph0) return cmd_ph0(ph0_path);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
