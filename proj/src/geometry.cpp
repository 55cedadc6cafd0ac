#include "phreg/geometry.hpp"

#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>

#include "phreg/errors.hpp"

namespace phreg {

namespace {

void check_finite(const Matrix& m) {
  if (!m.allFinite()) throw InvalidInput("point cloud contains a non-finite coordinate");
}

}  // namespace

PointCloud::PointCloud(std::size_t n, std::size_t d, std::span<const double> values) {
  if (n == 0 || d == 0) throw InvalidInput("point cloud needs n >= 1 and d >= 1");
  if (values.size() != n * d) {
    throw InvalidInput("point cloud data length " + std::to_string(values.size()) +
                       " != n*d = " + std::to_string(n * d));
  }
  data_ = Eigen::Map<const Matrix>(values.data(), static_cast<Eigen::Index>(n),
                                   static_cast<Eigen::Index>(d));
  check_finite(data_);
}

PointCloud::PointCloud(Matrix values) : data_(std::move(values)) {
  if (data_.rows() == 0 || data_.cols() == 0) {
    throw InvalidInput("point cloud needs n >= 1 and d >= 1");
  }
  check_finite(data_);
}

PointCloud PointCloud::select(std::span<const std::size_t> indices) const {
  Matrix out(static_cast<Eigen::Index>(indices.size()), data_.cols());
  for (std::size_t k = 0; k < indices.size(); ++k) {
    if (indices[k] >= n()) throw InvalidInput("row index out of range");
    out.row(static_cast<Eigen::Index>(k)) = data_.row(static_cast<Eigen::Index>(indices[k]));
  }
  return PointCloud(std::move(out));
}

DistanceMatrix::DistanceMatrix(Matrix values) : values_(std::move(values)) {
  if (values_.rows() != values_.cols()) throw InvalidInput("distance matrix must be square");
}

DistanceMatrix DistanceMatrix::restrict(std::span<const std::size_t> indices) const {
  const auto m = static_cast<Eigen::Index>(indices.size());
  Matrix out(m, m);
  for (Eigen::Index a = 0; a < m; ++a) {
    const auto ia = static_cast<Eigen::Index>(indices[a]);
    for (Eigen::Index b = 0; b < m; ++b) {
      out(a, b) = values_(ia, static_cast<Eigen::Index>(indices[b]));
    }
  }
  return DistanceMatrix(std::move(out));
}

DistanceMatrix pairwise_distances(const Matrix& rows) {
  check_finite(rows);
  const Eigen::Index n = rows.rows();
  const Eigen::Index d = rows.cols();
  Matrix out = Matrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double* pi = rows.data() + i * d;
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double* pj = rows.data() + j * d;
      double acc = 0.0;
      for (Eigen::Index k = 0; k < d; ++k) {
        const double diff = pi[k] - pj[k];
        acc += diff * diff;
      }
      const double dist = std::sqrt(acc);
      out(i, j) = dist;
      out(j, i) = dist;
    }
  }
  return DistanceMatrix(std::move(out));
}

DistanceMatrix pairwise_distances(const PointCloud& cloud) { return pairwise_distances(cloud.data()); }

std::vector<std::size_t> sample_indices(std::size_t n, std::size_t size, Rng& rng) {
  if (size == 0 || size > n) {
    throw InvalidInput("sample size " + std::to_string(size) + " outside [1, " + std::to_string(n) + "]");
  }
  // Partial Fisher-Yates.
  std::vector<std::size_t> pool(n);
  for (std::size_t i = 0; i < n; ++i) pool[i] = i;
  for (std::size_t k = 0; k < size; ++k) {
    const std::size_t pick = k + rng.below(n - k);
    std::swap(pool[k], pool[pick]);
  }
  pool.resize(size);
  return pool;
}

Subsample subsample(const PointCloud& cloud, std::size_t size, Rng& rng) {
  auto indices = sample_indices(cloud.n(), size, rng);
  auto picked = cloud.select(indices);
  return {std::move(picked), std::move(indices)};
}

PointCloud read_cloud_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IngestionError("cannot open point cloud file " + path.string());
  std::vector<double> values;
  std::size_t d = 0;
  std::size_t n = 0;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    std::size_t fields = 0;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      try {
        std::size_t used = 0;
        values.push_back(std::stod(cell, &used));
        while (used < cell.size() && std::isspace(static_cast<unsigned char>(cell[used]))) ++used;
        if (used != cell.size()) throw std::invalid_argument(cell);
      } catch (const std::exception&) {
        throw IngestionError(path.string() + ":" + std::to_string(lineno) + ": bad field '" + cell + "'");
      }
      ++fields;
    }
    if (d == 0) d = fields;
    if (fields != d) {
      throw IngestionError(path.string() + ":" + std::to_string(lineno) + ": expected " +
                           std::to_string(d) + " fields, got " + std::to_string(fields));
    }
    ++n;
  }
  if (n == 0) throw IngestionError(path.string() + ": no points");
  try {
    return PointCloud(n, d, values);
  } catch (const InvalidInput& e) {
    throw IngestionError(path.string() + ": " + e.what());
  }
}

void write_cloud_csv(const std::filesystem::path& path, const Matrix& rows,
                     const std::vector<std::string>& header) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out.precision(17);
  if (!header.empty()) {
    out << '#';
    for (std::size_t k = 0; k < header.size(); ++k) out << (k ? "," : "") << header[k];
    out << '\n';
  }
  for (Eigen::Index i = 0; i < rows.rows(); ++i) {
    for (Eigen::Index k = 0; k < rows.cols(); ++k) out << (k ? "," : "") << rows(i, k);
    out << '\n';
  }
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

}  // namespace phreg
