#include "phreg/tda.hpp"

#include <algorithm>
#include <atomic>
#include <numeric>

#include "phreg/errors.hpp"

namespace phreg {

namespace {
std::atomic<std::uint64_t> g_mst_calls{0};
}

UnionFind::UnionFind(std::size_t n) : parent_(n), rank_(n, 0), components_(n) {
  std::iota(parent_.begin(), parent_.end(), std::size_t{0});
}

std::size_t UnionFind::find(std::size_t x) {
  std::size_t root = x;
  while (parent_[root] != root) root = parent_[root];
  while (parent_[x] != root) {
    const std::size_t next = parent_[x];
    parent_[x] = root;
    x = next;
  }
  return root;
}

bool UnionFind::unite(std::size_t a, std::size_t b) {
  a = find(a);
  b = find(b);
  if (a == b) return false;
  if (rank_[a] < rank_[b]) std::swap(a, b);
  parent_[b] = a;
  if (rank_[a] == rank_[b]) ++rank_[a];
  --components_;
  return true;
}

MstResult mst(const DistanceMatrix& dm) {
  g_mst_calls.fetch_add(1, std::memory_order_relaxed);
  const std::size_t n = dm.n();
  if (n == 0) throw InvalidInput("mst needs at least one point");

  struct Candidate {
    double length;
    std::uint32_t i;
    std::uint32_t j;
  };
  std::vector<Candidate> candidates;
  candidates.reserve(n * (n - 1) / 2);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      candidates.push_back({dm(i, j), static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j)});
    }
  }
  std::sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
    if (a.length != b.length) return a.length < b.length;
    if (a.i != b.i) return a.i < b.i;
    return a.j < b.j;
  });

  MstResult result;
  result.edges.reserve(n - 1);
  UnionFind forest(n);
  for (const auto& c : candidates) {
    if (!forest.unite(c.i, c.j)) continue;
    result.edges.push_back({c.i, c.j, c.length});
    result.total_length += c.length;
    if (result.edges.size() + 1 == n) break;
  }
  return result;
}

std::vector<PersistenceInterval> ph0(const PointCloud& cloud) {
  const auto tree = mst(pairwise_distances(cloud));
  std::vector<PersistenceInterval> intervals;
  intervals.reserve(tree.edges.size());
  // Kruskal accepts edges in non-decreasing length: each accepted edge is a merge,
  // i.e. the death of one component born at 0.
  for (const auto& e : tree.edges) intervals.push_back({0.0, e.length});
  return intervals;
}

double total_persistence(const PointCloud& cloud) {
  if (cloud.n() < 2) throw InvalidInput("total persistence is undefined for fewer than 2 points");
  return mst(pairwise_distances(cloud)).total_length;
}

std::uint64_t mst_invocations() { return g_mst_calls.load(std::memory_order_relaxed); }

}  // namespace phreg
