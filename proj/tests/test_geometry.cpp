#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>

#include "oracles.hpp"
#include "phreg/errors.hpp"
#include "phreg/geometry.hpp"

using namespace phreg;

TEST_CASE("3-4-5 triangle") {
  const std::vector<double> v{0, 0, 3, 4};
  const auto dm = pairwise_distances(PointCloud(2, 2, v));
  CHECK(dm(0, 1) == 5.0);
  CHECK(dm(1, 0) == 5.0);
  CHECK(dm(0, 0) == 0.0);
}

TEST_CASE("single point gives a 1x1 zero matrix") {
  const std::vector<double> v{1.5, -2.0, 7.0};
  const auto dm = pairwise_distances(PointCloud(1, 3, v));
  REQUIRE(dm.n() == 1);
  CHECK(dm(0, 0) == 0.0);
}

TEST_CASE("matches a double-loop computation") {
  Rng rng(11);
  const Matrix p = oracle::random_matrix(10, 4, rng);
  const auto dm = pairwise_distances(PointCloud(p));
  const auto ref = oracle::distances(p);
  for (std::size_t a = 0; a < 10; ++a)
    for (std::size_t b = 0; b < 10; ++b) CHECK(std::abs(dm(a, b) - ref[a][b]) <= 1e-12);
}

TEST_CASE("distance matrix invariants on random clouds") {
  Rng rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const Matrix p = oracle::random_matrix(12, 3, rng, -5, 5);
    const auto dm = pairwise_distances(PointCloud(p));
    for (std::size_t a = 0; a < 12; ++a) {
      CHECK(dm(a, a) == 0.0);
      for (std::size_t b = 0; b < 12; ++b) {
        CHECK(dm(a, b) == dm(b, a));
        CHECK(dm(a, b) >= 0.0);
      }
    }
    for (int k = 0; k < 50; ++k) {
      const auto a = rng.below(12), b = rng.below(12), c = rng.below(12);
      CHECK(dm(a, c) <= dm(a, b) + dm(b, c) + 1e-9);
    }
  }
}

TEST_CASE("distances are invariant under rotation and translation") {
  Rng rng(8);
  const Matrix p = oracle::random_matrix(15, 3, rng);
  const Eigen::Matrix3d q = Eigen::Quaterniond(Eigen::Vector4d(rng.uniform(), rng.uniform(), rng.uniform(), rng.uniform()).normalized()).toRotationMatrix();
  Matrix moved = p * q.transpose();
  moved.rowwise() += Eigen::RowVector3d(3.0, -1.0, 0.5);
  const auto d0 = pairwise_distances(PointCloud(p));
  const auto d1 = pairwise_distances(PointCloud(moved));
  CHECK((d0.values() - d1.values()).cwiseAbs().maxCoeff() <= 1e-9);
}

TEST_CASE("non-finite coordinates are rejected") {
  std::vector<double> v{0, 1, std::numeric_limits<double>::quiet_NaN(), 2};
  CHECK_THROWS_AS(PointCloud(2, 2, v), InvalidInput);
  Matrix m = Matrix::Zero(2, 2);
  m(1, 1) = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(pairwise_distances(m), InvalidInput);
  CHECK_THROWS_AS(PointCloud(0, 2, std::vector<double>{}), InvalidInput);
  CHECK_THROWS_AS(PointCloud(2, 2, std::vector<double>{1, 2, 3}), InvalidInput);
}

TEST_CASE("subsample") {
  Rng data(1);
  const PointCloud cloud(oracle::random_matrix(20, 2, data));

  SUBCASE("size n is a permutation") {
    Rng rng(3);
    auto s = subsample(cloud, 20, rng);
    auto idx = s.indices;
    std::sort(idx.begin(), idx.end());
    for (std::size_t k = 0; k < 20; ++k) CHECK(idx[k] == k);
    for (std::size_t k = 0; k < 20; ++k) CHECK(s.cloud.data().row(k) == cloud.data().row(s.indices[k]));
  }
  SUBCASE("size 1 is one valid row") {
    Rng rng(3);
    auto s = subsample(cloud, 1, rng);
    REQUIRE(s.indices.size() == 1);
    CHECK(s.indices[0] < 20);
    CHECK(s.cloud.n() == 1);
  }
  SUBCASE("same seed, same indices") {
    Rng a(42), b(42);
    CHECK(subsample(cloud, 7, a).indices == subsample(cloud, 7, b).indices);
  }
  SUBCASE("oversized request") {
    Rng rng(3);
    CHECK_THROWS_AS(subsample(cloud, 21, rng), InvalidInput);
    CHECK_THROWS_AS(subsample(cloud, 0, rng), InvalidInput);
  }
}

TEST_CASE("restricted distance matrix") {
  Rng rng(2);
  const Matrix p = oracle::random_matrix(9, 3, rng);
  const auto dm = pairwise_distances(PointCloud(p));
  const std::vector<std::size_t> idx{4, 1, 7};
  const auto sub = dm.restrict(idx);
  const auto direct = pairwise_distances(PointCloud(p).select(idx));
  CHECK(sub.values() == direct.values());
}

TEST_CASE("cloud CSV round trip and errors") {
  const auto dir = std::filesystem::temp_directory_path() / "phreg_geometry_test";
  std::filesystem::create_directories(dir);
  Rng rng(4);
  const Matrix p = oracle::random_matrix(6, 3, rng);
  write_cloud_csv(dir / "c.csv", p, {"a", "b", "c"});
  const auto back = read_cloud_csv(dir / "c.csv");
  CHECK(back.data() == p);

  std::ofstream(dir / "ragged.csv") << "1,2,3\n4,5\n";
  CHECK_THROWS_AS(read_cloud_csv(dir / "ragged.csv"), IngestionError);
  std::ofstream(dir / "text.csv") << "# header\n1,x\n";
  CHECK_THROWS_AS(read_cloud_csv(dir / "text.csv"), IngestionError);
  CHECK_THROWS_AS(read_cloud_csv(dir / "missing.csv"), IngestionError);
}
