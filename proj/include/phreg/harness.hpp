#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "phreg/datasets.hpp"
#include "phreg/nn.hpp"

namespace phreg {

enum class Variant { baseline, ld_prime, ld, lt, ld_plus_lt };

std::string to_string(Variant v);
Variant parse_variant(const std::string& name);

struct ExperimentConfig {
  SyntheticSpec dataset;  // dataset.seed is replaced by each run seed
  Variant variant = Variant::baseline;
  double lambda_d = 10.0;
  double lambda_t = 100.0;
  std::size_t epochs = 10000;
  double lr = 1e-3;
  double weight_decay = 0.01;
  std::optional<std::size_t> n_m;  // regularizer sample size; defaults to the training-set size
  std::size_t schedule_m = 4;
  std::vector<std::uint64_t> seeds{0, 1, 2, 3, 4, 5, 6, 7, 8, 9};
  std::size_t hidden = 100;
  std::optional<std::size_t> feature_dim;  // replaces `hidden` when set
  FeatureTap tap = FeatureTap::post_activation;
  std::size_t track_id_every = 0;  // 0 disables TwoNN tracking
  bool record_loss_trace = false;
  std::size_t workers = 1;

  /// Per-shape regularizer weights: lambda_d = 10, lambda_t = 100, except
  /// torus and circle (lambda_d = 1) and mammoth (lambda_d = 1, lambda_t = 1e4).
  static ExperimentConfig preset(Shape shape);

  std::size_t width() const { return feature_dim.value_or(hidden); }
  std::size_t effective_nm() const { return n_m.value_or(dataset.splits.train); }
  bool uses_regularizer() const;
  void validate() const;
};

struct IdTracePoint {
  std::size_t epoch;
  double dimension;
};

struct EpochRecord {
  std::size_t epoch;
  double train_mse;
  double regularizer;
  double val_mse;
};

struct SeedTiming {
  double seconds_per_epoch = 0.0;
  double regularizer_seconds_per_epoch = 0.0;
};

struct SeedResult {
  std::uint64_t seed = 0;
  bool ok = false;
  std::string error;
  double test_mse = 0.0;
  double best_val_mse = 0.0;
  std::size_t best_epoch = 0;
  std::vector<IdTracePoint> id_trace;
  std::vector<EpochRecord> loss_trace;
  SeedTiming timing;
};

struct Efficiency {
  double seconds_per_epoch = 0.0;
  double regularizer_seconds_per_epoch = 0.0;
  std::size_t n_m = 0;
  long peak_rss_kb = 0;
};

struct MetricsReport {
  ExperimentConfig config;
  std::vector<SeedResult> seeds;
  double mean_test_mse = 0.0;
  double std_test_mse = 0.0;  // sample standard deviation over completed seeds
  std::size_t completed = 0;
  bool complete = false;
  Efficiency efficiency;
};

struct TrainedSeed {
  SeedResult result;
  MlpModel best_model;
  EncodedDataset data;
  SplitIndices splits;
};

/// Full pipeline for one seed: data, training with validation-based model
/// selection, test evaluation. Component errors propagate.
TrainedSeed train_seed(const ExperimentConfig& cfg, std::uint64_t seed);

/// Runs every seed, captures per-seed failures, and aggregates mean and std.
MetricsReport run_experiment(const ExperimentConfig& cfg);

/// TwoNN dimension of test-set features at epoch 0 and every k epochs, for
/// the first configured seed.
std::vector<IdTracePoint> track_id(ExperimentConfig cfg, std::size_t every_k_epochs);

/// Hidden features of the given rows, one row per sample.
void dump_embeddings(const MlpModel& model, const EncodedDataset& data, const std::vector<std::size_t>& rows,
                     const std::filesystem::path& path, FeatureTap tap = FeatureTap::post_activation);

/// Sample mean and (n - 1)-normalised standard deviation.
std::pair<double, double> mean_std(const std::vector<double>& values);

/// Deterministic fields only unless include_timing is set.
nlohmann::json report_to_json(const MetricsReport& report, bool include_timing = false);
nlohmann::json efficiency_to_json(const MetricsReport& report);
nlohmann::json config_to_json(const ExperimentConfig& cfg);
/// One row per seed: seed,ok,test_mse,best_val_mse,best_epoch,error
std::string report_csv(const MetricsReport& report);
/// seed,epoch,train_mse,regularizer,val_mse,twonn_id
std::string trace_csv(const MetricsReport& report);

/// Process peak resident set size in KiB, 0 when unavailable.
long peak_rss_kb();

}  // namespace phreg
