#include "phreg/datasets.hpp"

#include <cmath>

#include "phreg/errors.hpp"

namespace phreg {

std::string to_string(Shape shape) {
  switch (shape) {
    case Shape::swiss_roll: return "swiss_roll";
    case Shape::torus: return "torus";
    case Shape::circle: return "circle";
    case Shape::mammoth: return "mammoth";
  }
  return "unknown";
}

Shape parse_shape(const std::string& name) {
  if (name == "swiss_roll" || name == "swissroll") return Shape::swiss_roll;
  if (name == "torus") return Shape::torus;
  if (name == "circle") return Shape::circle;
  if (name == "mammoth") return Shape::mammoth;
  throw InvalidInput("unknown shape '" + name + "'");
}

void SyntheticSpec::validate() const {
  if (splits.train + splits.val + splits.test != total) {
    throw InvalidInput("split sizes must sum to the dataset total");
  }
  if (splits.train < 2 || splits.val < 1 || splits.test < 1) {
    throw InvalidInput("need at least 2 training, 1 validation and 1 test point");
  }
  if (shape == Shape::mammoth && !mammoth_path) throw InvalidInput("mammoth needs a point-cloud file");
}

namespace {

Matrix swiss_roll(std::size_t n, Rng& rng) {
  // Area element is proportional to sqrt(1 + t^2); rejection-sample t.
  const double peak = std::sqrt(1.0 + kSwissRollTMax * kSwissRollTMax);
  Matrix out(static_cast<Eigen::Index>(n), 3);
  for (Eigen::Index i = 0; i < out.rows(); ++i) {
    double t = 0.0;
    do {
      t = rng.uniform(kSwissRollTMin, kSwissRollTMax);
    } while (rng.uniform() * peak > std::sqrt(1.0 + t * t));
    const double h = rng.uniform(0.0, kSwissRollHeight);
    out.row(i) << t * std::cos(t), h, t * std::sin(t);
  }
  return out;
}

Matrix torus(std::size_t n, Rng& rng) {
  // Area element is proportional to R + r cos(theta); rejection-sample theta.
  constexpr double kTwoPi = 2.0 * 3.14159265358979323846;
  Matrix out(static_cast<Eigen::Index>(n), 3);
  for (Eigen::Index i = 0; i < out.rows(); ++i) {
    double theta = 0.0;
    do {
      theta = rng.uniform(0.0, kTwoPi);
    } while (rng.uniform() * (kTorusMajor + kTorusMinor) > kTorusMajor + kTorusMinor * std::cos(theta));
    const double phi = rng.uniform(0.0, kTwoPi);
    const double ring = kTorusMajor + kTorusMinor * std::cos(theta);
    out.row(i) << ring * std::cos(phi), ring * std::sin(phi), kTorusMinor * std::sin(theta);
  }
  return out;
}

Matrix circle(std::size_t n, Rng& rng) {
  constexpr double kTwoPi = 2.0 * 3.14159265358979323846;
  Matrix out(static_cast<Eigen::Index>(n), 3);
  for (Eigen::Index i = 0; i < out.rows(); ++i) {
    const double a = rng.uniform(0.0, kTwoPi);
    out.row(i) << kCircleRadius * std::cos(a), kCircleRadius * std::sin(a), 0.0;
  }
  return out;
}

Matrix mammoth(const SyntheticSpec& spec, Rng& rng) {
  const PointCloud raw = read_cloud_csv(*spec.mammoth_path);
  if (raw.d() != 3) throw IngestionError("mammoth file must hold 3-D points, got d = " + std::to_string(raw.d()));
  if (raw.n() < spec.total) {
    throw IngestionError("mammoth file has " + std::to_string(raw.n()) + " points, need " +
                         std::to_string(spec.total));
  }
  return raw.select(sample_indices(raw.n(), spec.total, rng)).data();
}

}  // namespace

PointCloud sample_shape(const SyntheticSpec& spec, Rng& rng) {
  spec.validate();
  switch (spec.shape) {
    case Shape::swiss_roll: return PointCloud(swiss_roll(spec.total, rng));
    case Shape::torus: return PointCloud(torus(spec.total, rng));
    case Shape::circle: return PointCloud(circle(spec.total, rng));
    case Shape::mammoth: return PointCloud(mammoth(spec, rng));
  }
  throw InvalidInput("unknown shape");
}

std::array<double, kSignalDims> signal_code(double y1, double y2, double y3) {
  return {y1 + y2 + y3, y1 + y2 - y3, y1 - y2 + y3, -y1 + y2 + y3};
}

EncodedDataset encode(const PointCloud& targets, Rng& rng) {
  if (targets.d() != 3) throw InvalidInput("encode expects 3-D targets");
  const std::size_t n = targets.n();
  if (n < 2) throw InvalidInput("encode needs at least two samples to draw noise from");
  const Matrix& y = targets.data();
  EncodedDataset ds{Matrix(static_cast<Eigen::Index>(n), kInputDim), targets, {}};
  ds.noise_assignment.reserve(n * kNoiseDims);
  for (std::size_t i = 0; i < n; ++i) {
    const auto ii = static_cast<Eigen::Index>(i);
    const auto code = signal_code(y(ii, 0), y(ii, 1), y(ii, 2));
    for (std::size_t k = 0; k < kSignalDims; ++k) ds.x(ii, static_cast<Eigen::Index>(k)) = code[k];
    for (std::size_t k = 0; k < kNoiseDims; ++k) {
      const auto fn = static_cast<std::uint8_t>(rng.below(kSignalDims));
      std::size_t src = rng.below(n - 1);
      if (src >= i) ++src;
      const auto si = static_cast<Eigen::Index>(src);
      ds.x(ii, static_cast<Eigen::Index>(kSignalDims + k)) = signal_code(y(si, 0), y(si, 1), y(si, 2))[fn];
      ds.noise_assignment.push_back({fn, static_cast<std::uint32_t>(src)});
    }
  }
  return ds;
}

SplitIndices split(std::size_t n, const SplitSizes& sizes, Rng& rng) {
  if (sizes.train + sizes.val + sizes.test != n) {
    throw InvalidInput("split sizes sum to " + std::to_string(sizes.train + sizes.val + sizes.test) +
                       ", dataset has " + std::to_string(n));
  }
  auto perm = sample_indices(n, n, rng);
  SplitIndices out;
  out.train.assign(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(sizes.train));
  out.val.assign(perm.begin() + static_cast<std::ptrdiff_t>(sizes.train),
                 perm.begin() + static_cast<std::ptrdiff_t>(sizes.train + sizes.val));
  out.test.assign(perm.begin() + static_cast<std::ptrdiff_t>(sizes.train + sizes.val), perm.end());
  return out;
}

std::uint64_t noise_digest(const std::vector<NoiseSource>& assignment) {
  std::uint64_t h = 1469598103934665603ULL;
  auto mix = [&h](std::uint8_t byte) {
    h ^= byte;
    h *= 1099511628211ULL;
  };
  for (const auto& a : assignment) {
    mix(a.function);
    for (int s = 0; s < 32; s += 8) mix(static_cast<std::uint8_t>(a.source >> s));
  }
  return h;
}

}  // namespace phreg
