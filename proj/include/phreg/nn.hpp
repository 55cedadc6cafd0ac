#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>

#include "phreg/geometry.hpp"
#include "phreg/random.hpp"

namespace phreg {

using RowVector = Eigen::RowVectorXd;

/// Two-layer regression network: yhat = relu(x W1 + b1) W2 + b2.
struct MlpModel {
  Matrix w1;  // d_in x hidden
  RowVector b1;
  Matrix w2;  // hidden x d_out
  RowVector b2;

  std::size_t d_in() const { return static_cast<std::size_t>(w1.rows()); }
  std::size_t hidden() const { return static_cast<std::size_t>(w1.cols()); }
  std::size_t d_out() const { return static_cast<std::size_t>(w2.cols()); }

  static MlpModel zeros(std::size_t d_in, std::size_t hidden, std::size_t d_out);

  /// Fan-in uniform init: every weight and bias of a layer with fan-in f is
  /// drawn from U(-1/sqrt(f), 1/sqrt(f)).
  static MlpModel init(std::size_t d_in, std::size_t hidden, std::size_t d_out, Rng& rng);
};

/// Which hidden tensor the regularizers see.
enum class FeatureTap { post_activation, pre_activation };

struct ForwardTrace {
  Matrix x;
  Matrix pre;   // x W1 + b1
  Matrix z;     // relu(pre)
  Matrix yhat;

  const Matrix& features(FeatureTap tap) const { return tap == FeatureTap::post_activation ? z : pre; }
};

ForwardTrace forward(const MlpModel& model, const Matrix& x);

struct MseResult {
  double value;
  Matrix grad;  // d value / d yhat
};

/// Mean over rows of the squared L2 error.
MseResult mse_loss(const Matrix& yhat, const Matrix& y);

/// Parameter-shaped tensors; also used for optimizer moments.
struct MlpGradients {
  Matrix w1;
  RowVector b1;
  Matrix w2;
  RowVector b2;

  static MlpGradients zeros_like(const MlpModel& model);
};

/// Reverse pass for a loss with gradient grad_yhat at the output and
/// grad_features at the tapped hidden tensor (empty matrix when unused).
MlpGradients backward(const MlpModel& model, const ForwardTrace& trace, const Matrix& grad_yhat,
                      const Matrix& grad_features, FeatureTap tap = FeatureTap::post_activation);

struct AdamWConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double weight_decay = 0.01;
};

struct AdamWState {
  AdamWConfig config;
  MlpGradients m;
  MlpGradients v;
  std::uint64_t step = 0;

  static AdamWState for_model(const MlpModel& model, AdamWConfig config);
};

/// One decoupled-weight-decay Adam update on a flat parameter block.
/// `step` is the 1-based step number after incrementing.
void adamw_update(std::span<double> params, std::span<const double> grads, std::span<double> m,
                  std::span<double> v, std::uint64_t step, const AdamWConfig& config);

void adamw_step(MlpModel& model, const MlpGradients& grads, AdamWState& state);

// Checkpoint format (text):
//   phreg-mlp 1
//   <d_in> <hidden> <d_out>
// followed by w1, b1, w2, b2, one row per line, row-major, %.17g.
void save_model(const MlpModel& model, const std::filesystem::path& path);
MlpModel load_model(const std::filesystem::path& path);

}  // namespace phreg
