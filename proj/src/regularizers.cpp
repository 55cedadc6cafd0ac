#include "phreg/regularizers.hpp"

#include <atomic>
#include <cmath>
#include <string>

#include "phreg/errors.hpp"
#include "phreg/tda.hpp"

namespace phreg {

namespace {

std::atomic<std::uint64_t> g_calls{0};

// Adds coeff * d|z_a - z_b| / dz to grad. Zero-length edges are skipped.
void add_edge_gradient(const Matrix& z, std::size_t a, std::size_t b, double length, double coeff,
                       Matrix& grad) {
  if (!(length > 0.0) || coeff == 0.0) return;
  const auto ia = static_cast<Eigen::Index>(a);
  const auto ib = static_cast<Eigen::Index>(b);
  const double s = coeff / length;
  for (Eigen::Index k = 0; k < z.cols(); ++k) {
    const double g = s * (z(ia, k) - z(ib, k));
    grad(ia, k) += g;
    grad(ib, k) -= g;
  }
}

struct SubsetTree {
  MstResult tree;               // local indices
  const std::vector<std::size_t>* rows;  // local -> batch row
};

std::vector<double> log_sizes(const SubsetSchedule& s) {
  std::vector<double> out;
  for (std::size_t n : s.sizes()) out.push_back(std::log(static_cast<double>(n)));
  return out;
}

std::vector<SubsetTree> subset_trees(const DistanceMatrix& dm, const BatchPair& batch) {
  std::vector<SubsetTree> out;
  out.reserve(batch.subset_indices.size());
  for (const auto& idx : batch.subset_indices) out.push_back({mst(dm.restrict(idx)), &idx});
  return out;
}

// dL/dE_i coefficients are applied along each subset's MST edges.
void accumulate_subset_grads(const Matrix& z, const std::vector<SubsetTree>& trees,
                             const std::vector<double>& d_value_d_e, Matrix& grad) {
  for (std::size_t k = 0; k < trees.size(); ++k) {
    const auto& rows = *trees[k].rows;
    for (const auto& e : trees[k].tree.edges) {
      add_edge_gradient(z, rows[e.i], rows[e.j], e.length, d_value_d_e[k], grad);
    }
  }
}

double checked_log_total(const SubsetTree& t, std::size_t size, const char* space) {
  const double e = t.tree.total_length;
  if (!(e > 0.0)) {
    throw DegenerateInput(std::string("total persistence of ") + space + " subset of size " +
                          std::to_string(size) + " is zero");
  }
  return std::log(e);
}

}  // namespace

BatchPair::BatchPair(PointCloud features, PointCloud targets, SubsetSchedule sched,
                     std::vector<std::vector<std::size_t>> subsets)
    : z(std::move(features)), y(std::move(targets)), schedule(std::move(sched)),
      subset_indices(std::move(subsets)) {
  if (z.n() != y.n()) throw InvalidInput("feature and target batches differ in size");
  if (schedule.largest() > z.n()) throw InvalidInput("schedule exceeds batch size");
  if (subset_indices.size() != schedule.m()) throw InvalidInput("one subset per schedule size expected");
  for (std::size_t k = 0; k < schedule.m(); ++k) {
    if (subset_indices[k].size() != schedule.sizes()[k]) throw InvalidInput("subset size mismatch");
    for (std::size_t r : subset_indices[k]) {
      if (r >= z.n()) throw InvalidInput("subset index out of range");
    }
  }
}

BatchPair BatchPair::draw(PointCloud features, PointCloud targets, SubsetSchedule sched, Rng& rng) {
  std::vector<std::vector<std::size_t>> subsets;
  subsets.reserve(sched.m());
  for (std::size_t size : sched.sizes()) subsets.push_back(sample_indices(features.n(), size, rng));
  return BatchPair(std::move(features), std::move(targets), std::move(sched), std::move(subsets));
}

RegularizerOutput loss_ld_prime(const BatchPair& batch) {
  g_calls.fetch_add(1, std::memory_order_relaxed);
  const Matrix& z = batch.z.data();
  const auto trees = subset_trees(pairwise_distances(z), batch);
  const auto xs = log_sizes(batch.schedule);
  std::vector<double> log_e;
  for (std::size_t k = 0; k < trees.size(); ++k) {
    log_e.push_back(checked_log_total(trees[k], batch.schedule.sizes()[k], "feature"));
  }
  const auto w = ls_slope_weights(xs);
  RegularizerOutput out;
  out.value = ls_slope(xs, log_e);
  std::vector<double> coeff(trees.size());
  for (std::size_t k = 0; k < trees.size(); ++k) coeff[k] = w[k] / trees[k].tree.total_length;
  out.grad_z = Matrix::Zero(z.rows(), z.cols());
  accumulate_subset_grads(z, trees, coeff, out.grad_z);
  return out;
}

RegularizerOutput loss_ld(const BatchPair& batch) {
  g_calls.fetch_add(1, std::memory_order_relaxed);
  const Matrix& z = batch.z.data();
  const auto z_trees = subset_trees(pairwise_distances(z), batch);
  const auto y_trees = subset_trees(pairwise_distances(batch.y.data()), batch);
  const auto xs = log_sizes(batch.schedule);

  std::vector<double> ratio;
  std::vector<double> log_ey;
  for (std::size_t k = 0; k < z_trees.size(); ++k) {
    const std::size_t size = batch.schedule.sizes()[k];
    const double ly = checked_log_total(y_trees[k], size, "target");
    if (std::abs(ly) < kTargetLogGuard) {
      throw DegenerateTarget("log E(Y) of target subset of size " + std::to_string(size) +
                                 " is within the guard band around 0",
                             size);
    }
    const double lz = checked_log_total(z_trees[k], size, "feature");
    log_ey.push_back(ly);
    ratio.push_back(lz / ly);
  }
  const auto w = ls_slope_weights(xs);
  const double slope = ls_slope(xs, ratio);
  RegularizerOutput out;
  out.value = std::abs(slope);
  out.grad_z = Matrix::Zero(z.rows(), z.cols());
  const double sign = slope > 0.0 ? 1.0 : (slope < 0.0 ? -1.0 : 0.0);
  if (sign == 0.0) return out;
  std::vector<double> coeff(z_trees.size());
  for (std::size_t k = 0; k < z_trees.size(); ++k) {
    coeff[k] = sign * w[k] / (log_ey[k] * z_trees[k].tree.total_length);
  }
  accumulate_subset_grads(z, z_trees, coeff, out.grad_z);
  return out;
}

RegularizerOutput loss_lt(const BatchPair& batch) {
  g_calls.fetch_add(1, std::memory_order_relaxed);
  const Matrix& z = batch.z.data();
  if (z.rows() < 2) throw InvalidInput("topology loss needs at least two points");
  const auto dz = pairwise_distances(z);
  const auto dy = pairwise_distances(batch.y.data());
  const auto tree_z = mst(dz);
  const auto tree_y = mst(dy);

  RegularizerOutput out;
  out.grad_z = Matrix::Zero(z.rows(), z.cols());
  for (const auto* tree : {&tree_z, &tree_y}) {
    for (const auto& e : tree->edges) {
      const double lz = dz(e.i, e.j);
      const double diff = lz - dy(e.i, e.j);
      out.value += diff * diff;
      add_edge_gradient(z, e.i, e.j, lz, 2.0 * diff, out.grad_z);
    }
  }
  return out;
}

RegularizerOutput combined_loss(const BatchPair& batch, double lambda_d, double lambda_t,
                                DimensionLoss variant) {
  if (!(lambda_d >= 0.0) || !(lambda_t >= 0.0)) throw InvalidInput("regularizer weights must be >= 0");
  RegularizerOutput out;
  out.grad_z = Matrix::Zero(batch.z.data().rows(), batch.z.data().cols());
  if (lambda_t > 0.0) {
    const auto t = loss_lt(batch);
    out.value += lambda_t * t.value;
    out.grad_z += lambda_t * t.grad_z;
  }
  if (lambda_d > 0.0) {
    const auto d = variant == DimensionLoss::ld ? loss_ld(batch) : loss_ld_prime(batch);
    out.value += lambda_d * d.value;
    out.grad_z += lambda_d * d.grad_z;
  }
  return out;
}

std::uint64_t regularizer_invocations() { return g_calls.load(std::memory_order_relaxed); }

}  // namespace phreg
