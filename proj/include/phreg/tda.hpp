#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "phreg/geometry.hpp"

namespace phreg {

/// Disjoint-set forest with path compression and union by rank.
class UnionFind {
 public:
  explicit UnionFind(std::size_t n);

  std::size_t find(std::size_t x);
  /// Merges the sets of a and b; false if they were already joined.
  bool unite(std::size_t a, std::size_t b);
  std::size_t components() const { return components_; }

 private:
  std::vector<std::size_t> parent_;
  std::vector<std::uint8_t> rank_;
  std::size_t components_;
};

struct MstEdge {
  std::size_t i;  // i < j
  std::size_t j;
  double length;
};

struct MstResult {
  std::vector<MstEdge> edges;  // in acceptance order, i.e. non-decreasing length
  double total_length = 0.0;
};

/// Kruskal over the complete graph. Ties are broken by (length, i, j).
MstResult mst(const DistanceMatrix& dm);

struct PersistenceInterval {
  double birth;
  double death;
};

/// Finite 0-dimensional Vietoris-Rips persistence intervals, sorted by death.
/// The component that never dies is not reported.
std::vector<PersistenceInterval> ph0(const PointCloud& cloud);

/// Sum of finite PH0 interval lengths (= MST weight). Requires n >= 2.
double total_persistence(const PointCloud& cloud);

/// Number of mst() calls made by this process; used to verify that
/// regularizer-free training never touches the topology code.
std::uint64_t mst_invocations();

}  // namespace phreg
