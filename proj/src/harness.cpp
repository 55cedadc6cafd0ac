#include "phreg/harness.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <mutex>
#include <numeric>
#include <sstream>
#include <thread>

#include "phreg/errors.hpp"
#include "phreg/id_estimation.hpp"
#include "phreg/regularizers.hpp"

namespace phreg {

namespace {

// Independent random streams per seed.
enum Stream : std::uint64_t { kData = 1, kSplit = 2, kInit = 3, kRegularizer = 4 };

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

Matrix take_rows(const Matrix& m, const std::vector<std::size_t>& rows) {
  Matrix out(static_cast<Eigen::Index>(rows.size()), m.cols());
  for (std::size_t k = 0; k < rows.size(); ++k) {
    out.row(static_cast<Eigen::Index>(k)) = m.row(static_cast<Eigen::Index>(rows[k]));
  }
  return out;
}

double weight_d(const ExperimentConfig& c) {
  switch (c.variant) {
    case Variant::ld_prime:
    case Variant::ld:
    case Variant::ld_plus_lt: return c.lambda_d;
    default: return 0.0;
  }
}

double weight_t(const ExperimentConfig& c) {
  return (c.variant == Variant::lt || c.variant == Variant::ld_plus_lt) ? c.lambda_t : 0.0;
}

std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

}  // namespace

std::string to_string(Variant v) {
  switch (v) {
    case Variant::baseline: return "baseline";
    case Variant::ld_prime: return "ld_prime";
    case Variant::ld: return "ld";
    case Variant::lt: return "lt";
    case Variant::ld_plus_lt: return "ld_plus_lt";
  }
  return "unknown";
}

Variant parse_variant(const std::string& name) {
  if (name == "baseline") return Variant::baseline;
  if (name == "ld_prime") return Variant::ld_prime;
  if (name == "ld") return Variant::ld;
  if (name == "lt") return Variant::lt;
  if (name == "ld_plus_lt") return Variant::ld_plus_lt;
  throw InvalidInput("unknown variant '" + name + "'");
}

ExperimentConfig ExperimentConfig::preset(Shape shape) {
  ExperimentConfig c;
  c.dataset.shape = shape;
  c.lambda_d = 10.0;
  c.lambda_t = 100.0;
  if (shape == Shape::torus || shape == Shape::circle) c.lambda_d = 1.0;
  if (shape == Shape::mammoth) {
    c.lambda_d = 1.0;
    c.lambda_t = 10000.0;
  }
  return c;
}

bool ExperimentConfig::uses_regularizer() const { return weight_d(*this) > 0.0 || weight_t(*this) > 0.0; }

void ExperimentConfig::validate() const {
  dataset.validate();
  if (epochs < 1) throw InvalidInput("epochs must be >= 1");
  if (seeds.empty()) throw InvalidInput("at least one seed is required");
  if (!(lambda_d >= 0.0) || !(lambda_t >= 0.0)) throw InvalidInput("lambda values must be >= 0");
  if (!(lr > 0.0)) throw InvalidInput("learning rate must be positive");
  if (width() == 0) throw InvalidInput("hidden width must be positive");
  if (workers == 0) throw InvalidInput("workers must be >= 1");
  const std::size_t nm = effective_nm();
  if (nm > dataset.splits.train) throw InvalidInput("n_m exceeds the training-set size");
  if (uses_regularizer()) {
    if (nm < 3) throw InvalidInput("regularized training needs n_m >= 3");
    if (weight_d(*this) > 0.0) (void)SubsetSchedule::for_training(nm, schedule_m);
  }
}

std::pair<double, double> mean_std(const std::vector<double>& values) {
  if (values.empty()) return {std::numeric_limits<double>::quiet_NaN(), std::numeric_limits<double>::quiet_NaN()};
  const double n = static_cast<double>(values.size());
  const double mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  if (values.size() < 2) return {mean, 0.0};
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return {mean, std::sqrt(ss / (n - 1.0))};
}

TrainedSeed train_seed(const ExperimentConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  SyntheticSpec spec = cfg.dataset;
  spec.seed = seed;

  Rng data_rng = Rng::derive(seed, kData);
  const PointCloud targets = sample_shape(spec, data_rng);
  EncodedDataset data = encode(targets, data_rng);
  Rng split_rng = Rng::derive(seed, kSplit);
  SplitIndices splits = split(spec.total, spec.splits, split_rng);

  const Matrix& y_all = data.y.data();
  const Matrix x_train = take_rows(data.x, splits.train);
  const Matrix y_train = take_rows(y_all, splits.train);
  const Matrix x_val = take_rows(data.x, splits.val);
  const Matrix y_val = take_rows(y_all, splits.val);
  const Matrix x_test = take_rows(data.x, splits.test);
  const Matrix y_test = take_rows(y_all, splits.test);

  Rng init_rng = Rng::derive(seed, kInit);
  MlpModel model = MlpModel::init(kInputDim, cfg.width(), 3, init_rng);
  AdamWState opt = AdamWState::for_model(model, {cfg.lr, 0.9, 0.999, 1e-8, cfg.weight_decay});
  Rng reg_rng = Rng::derive(seed, kRegularizer);

  const double lambda_d = weight_d(cfg);
  const double lambda_t = weight_t(cfg);
  const bool regularized = cfg.uses_regularizer();
  const std::size_t n_train = splits.train.size();
  const std::size_t nm = cfg.effective_nm();
  const auto dim_loss = cfg.variant == Variant::ld_prime ? DimensionLoss::ld_prime : DimensionLoss::ld;
  // The topology-only variant never reads the subsets, a two-size schedule suffices.
  const SubsetSchedule schedule =
      lambda_d > 0.0 ? SubsetSchedule::for_training(nm, cfg.schedule_m) : SubsetSchedule({2, nm});

  TrainedSeed out{{}, model, std::move(data), std::move(splits)};
  SeedResult& res = out.result;
  res.seed = seed;

  auto record_id = [&](std::size_t epoch) {
    const auto feats = forward(model, x_test).features(cfg.tap);
    res.id_trace.push_back({epoch, twonn(PointCloud(feats)).dimension});
  };

  double best_val = mse_loss(forward(model, x_val).yhat, y_val).value;
  res.best_epoch = 0;
  if (cfg.track_id_every > 0) record_id(0);

  double reg_seconds = 0.0;
  const auto t_start = Clock::now();
  for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
    const ForwardTrace trace = forward(model, x_train);
    const MseResult task = mse_loss(trace.yhat, y_train);
    Matrix grad_features;
    double reg_value = 0.0;
    if (regularized) {
      const auto t0 = Clock::now();
      std::vector<std::size_t> rows;
      if (nm < n_train) {
        rows = sample_indices(n_train, nm, reg_rng);
      } else {
        rows.resize(n_train);
        std::iota(rows.begin(), rows.end(), std::size_t{0});
      }
      const Matrix& feats = trace.features(cfg.tap);
      BatchPair pair = BatchPair::draw(PointCloud(take_rows(feats, rows)), PointCloud(take_rows(y_train, rows)),
                                       schedule, reg_rng);
      const RegularizerOutput reg = combined_loss(pair, lambda_d, lambda_t, dim_loss);
      reg_value = reg.value;
      grad_features = Matrix::Zero(feats.rows(), feats.cols());
      for (std::size_t k = 0; k < rows.size(); ++k) {
        grad_features.row(static_cast<Eigen::Index>(rows[k])) += reg.grad_z.row(static_cast<Eigen::Index>(k));
      }
      reg_seconds += seconds_since(t0);
    }
    const MlpGradients grads = backward(model, trace, task.grad, grad_features, cfg.tap);
    adamw_step(model, grads, opt);

    const double val = mse_loss(forward(model, x_val).yhat, y_val).value;
    if (!std::isfinite(val)) throw DegenerateInput("training diverged at epoch " + std::to_string(epoch));
    if (val < best_val) {
      best_val = val;
      res.best_epoch = epoch;
      out.best_model = model;
    }
    if (cfg.record_loss_trace) res.loss_trace.push_back({epoch, task.value, reg_value, val});
    if (cfg.track_id_every > 0 && epoch % cfg.track_id_every == 0) record_id(epoch);
  }
  const double total = seconds_since(t_start);
  res.timing.seconds_per_epoch = total / static_cast<double>(cfg.epochs);
  res.timing.regularizer_seconds_per_epoch = reg_seconds / static_cast<double>(cfg.epochs);

  res.best_val_mse = best_val;
  res.test_mse = mse_loss(forward(out.best_model, x_test).yhat, y_test).value;
  res.ok = true;
  return out;
}

MetricsReport run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  MetricsReport report;
  report.config = cfg;
  report.seeds.resize(cfg.seeds.size());

  auto run_one = [&](std::size_t k) {
    SeedResult r;
    try {
      r = train_seed(cfg, cfg.seeds[k]).result;
    } catch (const std::exception& e) {
      r = SeedResult{};
      r.seed = cfg.seeds[k];
      r.ok = false;
      r.error = e.what();
    }
    report.seeds[k] = std::move(r);
  };

  const std::size_t workers = std::min(cfg.workers, cfg.seeds.size());
  if (workers <= 1) {
    for (std::size_t k = 0; k < cfg.seeds.size(); ++k) run_one(k);
  } else {
    std::mutex mu;
    std::size_t next = 0;
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (;;) {
          std::size_t k;
          {
            std::lock_guard lock(mu);
            if (next >= cfg.seeds.size()) return;
            k = next++;
          }
          run_one(k);
        }
      });
    }
    for (auto& t : pool) t.join();
  }

  std::vector<double> mses;
  double epoch_s = 0.0;
  double reg_s = 0.0;
  for (const auto& s : report.seeds) {
    if (!s.ok) continue;
    mses.push_back(s.test_mse);
    epoch_s += s.timing.seconds_per_epoch;
    reg_s += s.timing.regularizer_seconds_per_epoch;
  }
  report.completed = mses.size();
  report.complete = report.completed == cfg.seeds.size();
  std::tie(report.mean_test_mse, report.std_test_mse) = mean_std(mses);
  if (!mses.empty()) {
    report.efficiency.seconds_per_epoch = epoch_s / static_cast<double>(mses.size());
    report.efficiency.regularizer_seconds_per_epoch = reg_s / static_cast<double>(mses.size());
  }
  report.efficiency.n_m = cfg.uses_regularizer() ? cfg.effective_nm() : 0;
  report.efficiency.peak_rss_kb = peak_rss_kb();
  return report;
}

std::vector<IdTracePoint> track_id(ExperimentConfig cfg, std::size_t every_k_epochs) {
  if (every_k_epochs == 0) throw InvalidInput("ID tracking interval must be >= 1");
  cfg.track_id_every = every_k_epochs;
  return train_seed(cfg, cfg.seeds.at(0)).result.id_trace;
}

void dump_embeddings(const MlpModel& model, const EncodedDataset& data, const std::vector<std::size_t>& rows,
                     const std::filesystem::path& path, FeatureTap tap) {
  const Matrix feats = forward(model, take_rows(data.x, rows)).features(tap);
  std::vector<std::string> header;
  for (Eigen::Index k = 0; k < feats.cols(); ++k) header.push_back("z" + std::to_string(k + 1));
  write_cloud_csv(path, feats, header);
}

nlohmann::json config_to_json(const ExperimentConfig& cfg) {
  nlohmann::json j;
  j["dataset"] = {{"shape", to_string(cfg.dataset.shape)},
                  {"total", cfg.dataset.total},
                  {"train", cfg.dataset.splits.train},
                  {"val", cfg.dataset.splits.val},
                  {"test", cfg.dataset.splits.test}};
  if (cfg.dataset.mammoth_path) j["dataset"]["mammoth_path"] = cfg.dataset.mammoth_path->string();
  j["variant"] = to_string(cfg.variant);
  j["lambda_d"] = cfg.lambda_d;
  j["lambda_t"] = cfg.lambda_t;
  j["epochs"] = cfg.epochs;
  j["lr"] = cfg.lr;
  j["weight_decay"] = cfg.weight_decay;
  j["n_m"] = cfg.effective_nm();
  j["schedule_m"] = cfg.schedule_m;
  j["seeds"] = cfg.seeds;
  j["hidden"] = cfg.width();
  j["features"] = cfg.tap == FeatureTap::post_activation ? "post_activation" : "pre_activation";
  j["track_id_every"] = cfg.track_id_every;
  return j;
}

nlohmann::json report_to_json(const MetricsReport& report, bool include_timing) {
  nlohmann::json j;
  j["config"] = config_to_json(report.config);
  nlohmann::json seeds = nlohmann::json::array();
  for (const auto& s : report.seeds) {
    nlohmann::json e{{"seed", s.seed}, {"ok", s.ok}};
    if (s.ok) {
      e["test_mse"] = s.test_mse;
      e["best_val_mse"] = s.best_val_mse;
      e["best_epoch"] = s.best_epoch;
    } else {
      e["error"] = s.error;
    }
    if (!s.id_trace.empty()) {
      nlohmann::json trace = nlohmann::json::array();
      for (const auto& p : s.id_trace) trace.push_back({{"epoch", p.epoch}, {"twonn_id", p.dimension}});
      e["id_trace"] = std::move(trace);
    }
    if (include_timing) {
      e["seconds_per_epoch"] = s.timing.seconds_per_epoch;
      e["regularizer_seconds_per_epoch"] = s.timing.regularizer_seconds_per_epoch;
    }
    seeds.push_back(std::move(e));
  }
  j["seeds"] = std::move(seeds);
  j["completed"] = report.completed;
  j["complete"] = report.complete;
  if (report.completed > 0) {
    j["mean_test_mse"] = report.mean_test_mse;
    j["std_test_mse"] = report.std_test_mse;
  }
  if (include_timing) j["efficiency"] = efficiency_to_json(report);
  return j;
}

nlohmann::json efficiency_to_json(const MetricsReport& report) {
  const auto& e = report.efficiency;
  return {{"n_m", e.n_m},
          {"seconds_per_epoch", e.seconds_per_epoch},
          {"regularizer_seconds_per_epoch", e.regularizer_seconds_per_epoch},
          {"peak_rss_kb", e.peak_rss_kb}};
}

std::string report_csv(const MetricsReport& report) {
  std::ostringstream os;
  os << "seed,ok,test_mse,best_val_mse,best_epoch,error\n";
  for (const auto& s : report.seeds) {
    os << s.seed << ',' << (s.ok ? 1 : 0) << ',';
    if (s.ok) os << fmt(s.test_mse) << ',' << fmt(s.best_val_mse) << ',' << s.best_epoch << ',';
    else os << ",,,";
    std::string err = s.error;
    for (char& c : err) {
      if (c == ',' || c == '\n') c = ';';
    }
    os << err << '\n';
  }
  return os.str();
}

std::string trace_csv(const MetricsReport& report) {
  std::ostringstream os;
  os << "seed,epoch,train_mse,regularizer,val_mse,twonn_id\n";
  for (const auto& s : report.seeds) {
    std::size_t id_pos = 0;
    auto id_at = [&](std::size_t epoch) -> std::string {
      while (id_pos < s.id_trace.size() && s.id_trace[id_pos].epoch < epoch) ++id_pos;
      if (id_pos < s.id_trace.size() && s.id_trace[id_pos].epoch == epoch) return fmt(s.id_trace[id_pos].dimension);
      return "";
    };
    if (!s.loss_trace.empty()) {
      if (!s.id_trace.empty() && s.id_trace.front().epoch == 0) os << s.seed << ",0,,,," << id_at(0) << '\n';
      for (const auto& r : s.loss_trace) {
        os << s.seed << ',' << r.epoch << ',' << fmt(r.train_mse) << ',' << fmt(r.regularizer) << ','
           << fmt(r.val_mse) << ',' << id_at(r.epoch) << '\n';
      }
    } else {
      for (const auto& p : s.id_trace) os << s.seed << ',' << p.epoch << ",,,," << fmt(p.dimension) << '\n';
    }
  }
  return os.str();
}

long peak_rss_kb() {
  std::ifstream status("/proc/self/status");
  std::string line;
  while (std::getline(status, line)) {
    if (line.rfind("VmHWM:", 0) == 0) {
      std::istringstream is(line.substr(6));
      long kb = 0;
      is >> kb;
      return kb;
    }
  }
  return 0;
}

}  // namespace phreg
