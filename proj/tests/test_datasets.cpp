#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>

#include "oracles.hpp"
#include "phreg/datasets.hpp"
#include "phreg/errors.hpp"

using namespace phreg;

namespace {

PointCloud shape_cloud(Shape shape, std::uint64_t seed = 0) {
  SyntheticSpec spec;
  spec.shape = shape;
  Rng rng(seed);
  return sample_shape(spec, rng);
}

}  // namespace

TEST_CASE("circle samples satisfy the defining equation") {
  const auto c = shape_cloud(Shape::circle);
  CHECK(c.n() == 3000);
  for (std::size_t i = 0; i < c.n(); ++i) {
    const auto r = c.data().row(static_cast<Eigen::Index>(i));
    CHECK(std::abs(r(0) * r(0) + r(1) * r(1) - kCircleRadius * kCircleRadius) <= 1e-9);
    CHECK(r(2) == 0.0);
  }
}

TEST_CASE("torus samples satisfy the defining equation") {
  const auto c = shape_cloud(Shape::torus);
  double outer = 0;
  for (std::size_t i = 0; i < c.n(); ++i) {
    const auto r = c.data().row(static_cast<Eigen::Index>(i));
    const double rho = std::hypot(r(0), r(1));
    CHECK(std::abs((rho - kTorusMajor) * (rho - kTorusMajor) + r(2) * r(2) - kTorusMinor * kTorusMinor) <= 1e-9);
    if (rho > kTorusMajor) ++outer;
  }
  // Area-uniform sampling puts (R + 2r/pi) / (2R) of the mass on the outer half.
  const double expected = (kTorusMajor + 2 * kTorusMinor / 3.14159265358979323846) / (2 * kTorusMajor);
  CHECK(std::abs(outer / 3000.0 - expected) <= 0.03);
}

TEST_CASE("swiss roll inverse map recovers in-range parameters") {
  const auto c = shape_cloud(Shape::swiss_roll);
  for (std::size_t i = 0; i < c.n(); ++i) {
    const auto r = c.data().row(static_cast<Eigen::Index>(i));
    const double t = std::hypot(r(0), r(2));
    CHECK(t >= kSwissRollTMin - 1e-9);
    CHECK(t <= kSwissRollTMax + 1e-9);
    CHECK(std::abs(r(0) - t * std::cos(t)) <= 1e-9);
    CHECK(std::abs(r(2) - t * std::sin(t)) <= 1e-9);
    CHECK(r(1) >= 0.0);
    CHECK(r(1) <= kSwissRollHeight);
  }
}

TEST_CASE("shape sampling is deterministic per seed") {
  CHECK(shape_cloud(Shape::torus, 3).data() == shape_cloud(Shape::torus, 3).data());
  CHECK(shape_cloud(Shape::torus, 3).data() != shape_cloud(Shape::torus, 4).data());
}

TEST_CASE("signal code") {
  CHECK(signal_code(1, 1, 1) == std::array<double, 4>{3, 1, 1, 1});
  CHECK(signal_code(0, 0, 0) == std::array<double, 4>{0, 0, 0, 0});

  Eigen::Matrix<double, 4, 3> a;
  a << 1, 1, 1, 1, 1, -1, 1, -1, 1, -1, 1, 1;
  Eigen::JacobiSVD<Eigen::Matrix<double, 4, 3>> svd(a);
  CHECK(svd.rank() == 3);

  Rng rng(1);
  const auto y = shape_cloud(Shape::swiss_roll, 1);
  const auto ds = encode(y, rng);
  const Matrix signal = ds.x.leftCols(4);
  const Matrix decoded = (a.transpose() * a).ldlt().solve(a.transpose() * signal.transpose()).transpose();
  CHECK((decoded - y.data()).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("noise dims come from other rows") {
  SyntheticSpec spec;
  spec.shape = Shape::circle;
  spec.total = 60;
  spec.splits = {20, 20, 20};
  Rng rng(2);
  const auto y = sample_shape(spec, rng);
  const auto ds = encode(y, rng);
  REQUIRE(ds.noise_assignment.size() == 60 * kNoiseDims);
  std::array<int, 4> fn_counts{};
  for (std::size_t i = 0; i < 60; ++i)
    for (std::size_t k = 0; k < kNoiseDims; ++k) {
      const auto& a = ds.noise_assignment[i * kNoiseDims + k];
      CHECK(a.source != i);
      CHECK(a.function < 4);
      ++fn_counts[a.function];
      const auto s = y.data().row(a.source);
      CHECK(ds.x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(4 + k)) ==
            signal_code(s(0), s(1), s(2))[a.function]);
    }
  for (int c : fn_counts) CHECK(c > 60 * 96 / 4 * 0.85);

  Rng a(5), b(5);
  const auto e1 = encode(y, a);
  const auto e2 = encode(y, b);
  CHECK(e1.x == e2.x);
  CHECK(noise_digest(e1.noise_assignment) == noise_digest(e2.noise_assignment));
  Rng c(6);
  CHECK(noise_digest(encode(y, c).noise_assignment) != noise_digest(e1.noise_assignment));
}

TEST_CASE("encode rejects bad input") {
  Rng rng(0);
  CHECK_THROWS_AS(encode(PointCloud(Matrix::Zero(1, 3)), rng), InvalidInput);
  CHECK_THROWS_AS(encode(PointCloud(Matrix::Zero(5, 2)), rng), InvalidInput);
}

TEST_CASE("split is a seeded disjoint partition") {
  Rng rng(7);
  const auto s = split(3000, SplitSizes{}, rng);
  CHECK(s.train.size() == 100);
  CHECK(s.val.size() == 100);
  CHECK(s.test.size() == 2800);
  std::vector<std::size_t> all;
  for (const auto* part : {&s.train, &s.val, &s.test}) all.insert(all.end(), part->begin(), part->end());
  std::sort(all.begin(), all.end());
  std::vector<std::size_t> expected(3000);
  std::iota(expected.begin(), expected.end(), 0);
  CHECK(all == expected);

  Rng again(7);
  const auto s2 = split(3000, SplitSizes{}, again);
  CHECK(s2.train == s.train);
  CHECK(s2.test == s.test);
  CHECK_THROWS_AS(split(2999, SplitSizes{}, rng), InvalidInput);
}

TEST_CASE("spec validation") {
  SyntheticSpec spec;
  CHECK_NOTHROW(spec.validate());
  spec.total = 2999;
  CHECK_THROWS_AS(spec.validate(), InvalidInput);
  spec.total = 3000;
  spec.shape = Shape::mammoth;
  CHECK_THROWS_AS(spec.validate(), InvalidInput);
  CHECK(parse_shape("swiss_roll") == Shape::swiss_roll);
  CHECK(to_string(Shape::torus) == "torus");
  CHECK_THROWS_AS(parse_shape("sphere"), InvalidInput);
}

TEST_CASE("mammoth ingestion") {
  const auto dir = std::filesystem::temp_directory_path() / "phreg_mammoth_test";
  std::filesystem::create_directories(dir);
  SyntheticSpec spec;
  spec.shape = Shape::mammoth;
  spec.total = 30;
  spec.splits = {10, 10, 10};
  Rng rng(1);

  spec.mammoth_path = dir / "missing.csv";
  CHECK_THROWS_AS(sample_shape(spec, rng), IngestionError);

  {
    std::ofstream f(dir / "small.csv");
    for (int i = 0; i < 10; ++i) f << i << ",0,1\n";
  }
  spec.mammoth_path = dir / "small.csv";
  CHECK_THROWS_AS(sample_shape(spec, rng), IngestionError);

  {
    std::ofstream f(dir / "flat.csv");
    for (int i = 0; i < 40; ++i) f << i << ",0\n";
  }
  spec.mammoth_path = dir / "flat.csv";
  CHECK_THROWS_AS(sample_shape(spec, rng), IngestionError);

  {
    std::ofstream f(dir / "ok.csv");
    f << "# x,y,z\n";
    for (int i = 0; i < 50; ++i) f << i << "," << 2 * i << "," << -i << "\n";
  }
  spec.mammoth_path = dir / "ok.csv";
  const auto cloud = sample_shape(spec, rng);
  CHECK(cloud.n() == 30);
  for (std::size_t i = 0; i < cloud.n(); ++i) {
    const auto r = cloud.data().row(static_cast<Eigen::Index>(i));
    CHECK(r(1) == 2 * r(0));
    CHECK(r(2) == -r(0));
  }
  std::filesystem::remove_all(dir);
}
