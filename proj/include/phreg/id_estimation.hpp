#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "phreg/geometry.hpp"
#include "phreg/random.hpp"

namespace phreg {

/// Strictly increasing subset sizes n_1 < ... < n_m with m >= 2 and n_1 >= 2.
class SubsetSchedule {
 public:
  explicit SubsetSchedule(std::vector<std::size_t> sizes);

  const std::vector<std::size_t>& sizes() const { return sizes_; }
  std::size_t m() const { return sizes_.size(); }
  std::size_t largest() const { return sizes_.back(); }

  /// Eight sizes evenly spaced from ceil(n/8) to n.
  static SubsetSchedule for_estimation(std::size_t n);

  /// ceil(k*n/m) for k = 1..m, deduplicated and floored at 2. Batches too small
  /// for that collapse to {2, ..., n}; fewer than two distinct sizes throws.
  static SubsetSchedule for_training(std::size_t n, std::size_t m = 4);

 private:
  std::vector<std::size_t> sizes_;
};

enum class IdMethod { ph_birdal, twonn };

std::string to_string(IdMethod method);

struct IdEstimate {
  double slope = 0.0;
  double dimension = 0.0;
  IdMethod method = IdMethod::ph_birdal;
  /// Set when the PH slope is >= 1; dimension is then +infinity.
  bool unbounded = false;
};

/// Least-squares slope of ys against xs.
/// Throws DegenerateInput when xs has zero variance.
double ls_slope(std::span<const double> xs, std::span<const double> ys);

/// Per-point coefficients c_i with ls_slope(xs, ys) = sum_i c_i * ys_i.
std::vector<double> ls_slope_weights(std::span<const double> xs);

/// PH-dimension estimate from the growth of total MST length over random
/// subsets: slope of mean log E(S_n) against log n, dimension = 1 / (1 - slope).
IdEstimate ph_dim_birdal(const PointCloud& cloud, const SubsetSchedule& schedule, std::size_t reps,
                         Rng& rng);

/// TwoNN estimate from ratios mu = r2 / r1 of the two nearest-neighbour
/// distances. The largest `truncation` fraction of mu values is treated as
/// right-censored in the Pareto likelihood. Exact duplicate points are
/// dropped first.
IdEstimate twonn(const PointCloud& cloud, double truncation = 0.1);

}  // namespace phreg
