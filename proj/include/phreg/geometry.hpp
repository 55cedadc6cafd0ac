#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "phreg/random.hpp"

namespace phreg {

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// n points in d-dimensional Euclidean space, stored row-major.
///
/// Construction validates the invariants (n >= 1, d >= 1, every coordinate
/// finite) and throws InvalidInput otherwise, so every PointCloud in flight
/// is usable by the downstream algorithms.
class PointCloud {
 public:
  PointCloud(std::size_t n, std::size_t d, std::span<const double> values);
  explicit PointCloud(Matrix values);

  std::size_t n() const { return static_cast<std::size_t>(data_.rows()); }
  std::size_t d() const { return static_cast<std::size_t>(data_.cols()); }
  const Matrix& data() const { return data_; }
  double operator()(std::size_t i, std::size_t k) const { return data_(i, k); }

  /// Rows selected by index, in the given order.
  PointCloud select(std::span<const std::size_t> indices) const;

 private:
  Matrix data_;
};

/// Dense symmetric Euclidean distance matrix with zero diagonal.
class DistanceMatrix {
 public:
  explicit DistanceMatrix(Matrix values);

  std::size_t n() const { return static_cast<std::size_t>(values_.rows()); }
  double operator()(std::size_t i, std::size_t j) const { return values_(i, j); }
  const Matrix& values() const { return values_; }

  /// Principal submatrix over the given indices (local index k maps to indices[k]).
  DistanceMatrix restrict(std::span<const std::size_t> indices) const;

 private:
  Matrix values_;
};

DistanceMatrix pairwise_distances(const PointCloud& cloud);

/// Same computation on raw rows; throws InvalidInput on non-finite entries.
DistanceMatrix pairwise_distances(const Matrix& rows);

/// `size` distinct indices drawn uniformly from [0, n), in draw order.
std::vector<std::size_t> sample_indices(std::size_t n, std::size_t size, Rng& rng);

struct Subsample {
  PointCloud cloud;
  std::vector<std::size_t> indices;
};

/// Uniform sample without replacement. The index list lets callers take the
/// same rows from a paired cloud.
Subsample subsample(const PointCloud& cloud, std::size_t size, Rng& rng);

// CSV: one point per row, comma separated, lines starting with '#' skipped.
PointCloud read_cloud_csv(const std::filesystem::path& path);
void write_cloud_csv(const std::filesystem::path& path, const Matrix& rows,
                     const std::vector<std::string>& header = {});

}  // namespace phreg
