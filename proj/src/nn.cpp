#include "phreg/nn.hpp"

#include <cmath>
#include <fstream>
#include <string>

#include "phreg/errors.hpp"

namespace phreg {

namespace {

template <typename M>
std::span<double> flat(M& m) {
  return {m.data(), static_cast<std::size_t>(m.size())};
}

template <typename M>
std::span<const double> flat(const M& m) {
  return {m.data(), static_cast<std::size_t>(m.size())};
}

}  // namespace

MlpModel MlpModel::zeros(std::size_t d_in, std::size_t hidden, std::size_t d_out) {
  const auto i = static_cast<Eigen::Index>(d_in);
  const auto h = static_cast<Eigen::Index>(hidden);
  const auto o = static_cast<Eigen::Index>(d_out);
  return {Matrix::Zero(i, h), RowVector::Zero(h), Matrix::Zero(h, o), RowVector::Zero(o)};
}

MlpModel MlpModel::init(std::size_t d_in, std::size_t hidden, std::size_t d_out, Rng& rng) {
  if (d_in == 0 || hidden == 0 || d_out == 0) throw InvalidInput("layer widths must be positive");
  auto model = zeros(d_in, hidden, d_out);
  auto fill = [&rng](auto& m, double fan_in) {
    const double bound = 1.0 / std::sqrt(fan_in);
    for (auto& w : flat(m)) w = rng.uniform(-bound, bound);
  };
  fill(model.w1, static_cast<double>(d_in));
  fill(model.b1, static_cast<double>(d_in));
  fill(model.w2, static_cast<double>(hidden));
  fill(model.b2, static_cast<double>(hidden));
  return model;
}

ForwardTrace forward(const MlpModel& model, const Matrix& x) {
  if (static_cast<std::size_t>(x.cols()) != model.d_in()) {
    throw InvalidInput("input has " + std::to_string(x.cols()) + " columns, model expects " +
                       std::to_string(model.d_in()));
  }
  ForwardTrace t;
  t.x = x;
  t.pre = (x * model.w1).rowwise() + model.b1;
  t.z = t.pre.cwiseMax(0.0);
  t.yhat = (t.z * model.w2).rowwise() + model.b2;
  return t;
}

MseResult mse_loss(const Matrix& yhat, const Matrix& y) {
  if (yhat.rows() != y.rows() || yhat.cols() != y.cols()) throw InvalidInput("mse: shape mismatch");
  if (y.rows() == 0) throw InvalidInput("mse: empty batch");
  const double n = static_cast<double>(y.rows());
  Matrix diff = yhat - y;
  return {diff.squaredNorm() / n, (2.0 / n) * diff};
}

MlpGradients MlpGradients::zeros_like(const MlpModel& model) {
  return {Matrix::Zero(model.w1.rows(), model.w1.cols()), RowVector::Zero(model.b1.size()),
          Matrix::Zero(model.w2.rows(), model.w2.cols()), RowVector::Zero(model.b2.size())};
}

MlpGradients backward(const MlpModel& model, const ForwardTrace& trace, const Matrix& grad_yhat,
                      const Matrix& grad_features, FeatureTap tap) {
  if (grad_yhat.rows() != trace.yhat.rows() || grad_yhat.cols() != trace.yhat.cols()) {
    throw InvalidInput("backward: output gradient shape mismatch");
  }
  const bool has_features = grad_features.size() != 0;
  if (has_features && (grad_features.rows() != trace.z.rows() || grad_features.cols() != trace.z.cols())) {
    throw InvalidInput("backward: feature gradient shape mismatch");
  }
  MlpGradients g;
  g.w2 = trace.z.transpose() * grad_yhat;
  g.b2 = grad_yhat.colwise().sum();
  Matrix grad_hidden = grad_yhat * model.w2.transpose();
  if (has_features && tap == FeatureTap::post_activation) grad_hidden += grad_features;
  Matrix grad_pre = (trace.pre.array() > 0.0).select(grad_hidden, 0.0);
  if (has_features && tap == FeatureTap::pre_activation) grad_pre += grad_features;
  g.w1 = trace.x.transpose() * grad_pre;
  g.b1 = grad_pre.colwise().sum();
  return g;
}

AdamWState AdamWState::for_model(const MlpModel& model, AdamWConfig config) {
  return {config, MlpGradients::zeros_like(model), MlpGradients::zeros_like(model), 0};
}

void adamw_update(std::span<double> params, std::span<const double> grads, std::span<double> m,
                  std::span<double> v, std::uint64_t step, const AdamWConfig& c) {
  if (grads.size() != params.size() || m.size() != params.size() || v.size() != params.size()) {
    throw InvalidInput("adamw: state shape mismatch");
  }
  const double t = static_cast<double>(step);
  const double bc1 = 1.0 - std::pow(c.beta1, t);
  const double bc2 = 1.0 - std::pow(c.beta2, t);
  const double decay = 1.0 - c.lr * c.weight_decay;
  for (std::size_t k = 0; k < params.size(); ++k) {
    params[k] *= decay;
    m[k] = c.beta1 * m[k] + (1.0 - c.beta1) * grads[k];
    v[k] = c.beta2 * v[k] + (1.0 - c.beta2) * grads[k] * grads[k];
    const double m_hat = m[k] / bc1;
    const double v_hat = v[k] / bc2;
    params[k] -= c.lr * m_hat / (std::sqrt(v_hat) + c.eps);
  }
}

void adamw_step(MlpModel& model, const MlpGradients& grads, AdamWState& state) {
  ++state.step;
  adamw_update(flat(model.w1), flat(grads.w1), flat(state.m.w1), flat(state.v.w1), state.step, state.config);
  adamw_update(flat(model.b1), flat(grads.b1), flat(state.m.b1), flat(state.v.b1), state.step, state.config);
  adamw_update(flat(model.w2), flat(grads.w2), flat(state.m.w2), flat(state.v.w2), state.step, state.config);
  adamw_update(flat(model.b2), flat(grads.b2), flat(state.m.b2), flat(state.v.b2), state.step, state.config);
}

void save_model(const MlpModel& model, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write checkpoint " + path.string());
  out.precision(17);
  out << "phreg-mlp 1\n" << model.d_in() << ' ' << model.hidden() << ' ' << model.d_out() << '\n';
  auto dump = [&out](const auto& m) {
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      for (Eigen::Index c = 0; c < m.cols(); ++c) out << (c ? " " : "") << m(r, c);
      out << '\n';
    }
  };
  dump(model.w1);
  dump(model.b1);
  dump(model.w2);
  dump(model.b2);
  if (!out) throw std::runtime_error("checkpoint write failed: " + path.string());
}

MlpModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IngestionError("cannot open checkpoint " + path.string());
  std::string magic;
  int version = 0;
  std::size_t d_in = 0, hidden = 0, d_out = 0;
  in >> magic >> version >> d_in >> hidden >> d_out;
  if (!in || magic != "phreg-mlp" || version != 1) throw IngestionError("not a phreg checkpoint: " + path.string());
  auto model = MlpModel::zeros(d_in, hidden, d_out);
  auto read = [&in](auto& m) {
    for (auto& w : flat(m)) in >> w;
  };
  read(model.w1);
  read(model.b1);
  read(model.w2);
  read(model.b2);
  if (!in) throw IngestionError("truncated checkpoint: " + path.string());
  return model;
}

}  // namespace phreg
