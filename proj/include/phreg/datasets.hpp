#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "phreg/geometry.hpp"
#include "phreg/random.hpp"

namespace phreg {

enum class Shape { swiss_roll, torus, circle, mammoth };

std::string to_string(Shape shape);
Shape parse_shape(const std::string& name);

struct SplitSizes {
  std::size_t train = 100;
  std::size_t val = 100;
  std::size_t test = 2800;
};

struct SyntheticSpec {
  Shape shape = Shape::swiss_roll;
  std::size_t total = 3000;
  SplitSizes splits;
  std::uint64_t seed = 0;
  std::optional<std::filesystem::path> mammoth_path;

  void validate() const;
};

// Shape parameters.
inline constexpr double kSwissRollTMin = 1.5 * 3.14159265358979323846;
inline constexpr double kSwissRollTMax = 4.5 * 3.14159265358979323846;
inline constexpr double kSwissRollHeight = 21.0;
inline constexpr double kTorusMajor = 2.0;
inline constexpr double kTorusMinor = 1.0;
inline constexpr double kCircleRadius = 1.0;

/// spec.total points drawn uniformly (by area / arc length) on the shape, as
/// an n x 3 cloud. Swiss roll: (t cos t, h, t sin t). Circle lies in z = 0.
PointCloud sample_shape(const SyntheticSpec& spec, Rng& rng);

inline constexpr std::size_t kInputDim = 100;
inline constexpr std::size_t kSignalDims = 4;
inline constexpr std::size_t kNoiseDims = kInputDim - kSignalDims;

/// f_1..f_4: signed sums of the three target coordinates.
std::array<double, kSignalDims> signal_code(double y1, double y2, double y3);

struct NoiseSource {
  std::uint8_t function;  // 0..3 for f_1..f_4
  std::uint32_t source;   // row of the sample fed to it, never the row itself
};

struct EncodedDataset {
  Matrix x;    // n x 100
  PointCloud y;  // n x 3
  /// n x 96, row-major: noise_assignment[i * 96 + k] drives x(i, 4 + k).
  std::vector<NoiseSource> noise_assignment;
};

EncodedDataset encode(const PointCloud& targets, Rng& rng);

struct SplitIndices {
  std::vector<std::size_t> train;
  std::vector<std::size_t> val;
  std::vector<std::size_t> test;
};

/// Seeded shuffle of [0, n) cut into train/val/test.
SplitIndices split(std::size_t n, const SplitSizes& sizes, Rng& rng);

/// 64-bit FNV-1a digest of the noise assignment.
std::uint64_t noise_digest(const std::vector<NoiseSource>& assignment);

}  // namespace phreg
