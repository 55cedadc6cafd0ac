#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "phreg/geometry.hpp"
#include "phreg/id_estimation.hpp"
#include "phreg/random.hpp"

namespace phreg {

struct RegularizerOutput {
  double value = 0.0;
  Matrix grad_z;  // d value / d Z, same shape as the feature batch
};

/// Paired feature/target batch with the random subsets the dimension losses
/// evaluate. subset_indices[k] has schedule.sizes()[k] rows and indexes z and y alike.
struct BatchPair {
  PointCloud z;
  PointCloud y;
  SubsetSchedule schedule;
  std::vector<std::vector<std::size_t>> subset_indices;

  BatchPair(PointCloud features, PointCloud targets, SubsetSchedule sched,
            std::vector<std::vector<std::size_t>> subsets);

  /// Draws one independent subset per schedule size.
  static BatchPair draw(PointCloud features, PointCloud targets, SubsetSchedule sched, Rng& rng);
};

/// |log E(Y_n)| below this is rejected by loss_ld.
inline constexpr double kTargetLogGuard = 1e-3;

/// Slope of log E(Z_{n_i}) against log n_i.
RegularizerOutput loss_ld_prime(const BatchPair& batch);

/// |slope| of e_i = log E(Z_{n_i}) / log E(Y_{n_i}) against log n_i.
RegularizerOutput loss_ld(const BatchPair& batch);

/// Squared mismatch of feature and target distances on the MST edges of
/// each space, over the full batch.
RegularizerOutput loss_lt(const BatchPair& batch);

enum class DimensionLoss { ld, ld_prime };

/// lambda_t * L_t + lambda_d * (L_d or L'_d). A component whose weight is
/// zero is not evaluated.
RegularizerOutput combined_loss(const BatchPair& batch, double lambda_d, double lambda_t,
                                DimensionLoss variant = DimensionLoss::ld);

/// Count of regularizer evaluations in this process.
std::uint64_t regularizer_invocations();

}  // namespace phreg
