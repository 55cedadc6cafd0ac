#include "phreg/id_estimation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "phreg/errors.hpp"
#include "phreg/tda.hpp"

namespace phreg {

SubsetSchedule::SubsetSchedule(std::vector<std::size_t> sizes) : sizes_(std::move(sizes)) {
  if (sizes_.size() < 2) throw InvalidInput("subset schedule needs at least two sizes");
  if (sizes_.front() < 2) throw InvalidInput("smallest subset size must be >= 2");
  for (std::size_t k = 1; k < sizes_.size(); ++k) {
    if (sizes_[k] <= sizes_[k - 1]) throw InvalidInput("subset sizes must be strictly increasing");
  }
}

SubsetSchedule SubsetSchedule::for_estimation(std::size_t n) {
  constexpr std::size_t kSteps = 8;
  const std::size_t lo = std::max<std::size_t>(2, (n + kSteps - 1) / kSteps);
  std::vector<std::size_t> sizes;
  for (std::size_t k = 0; k < kSteps; ++k) {
    const double t = static_cast<double>(k) / (kSteps - 1);
    const auto s = static_cast<std::size_t>(std::llround(static_cast<double>(lo) + t * static_cast<double>(n - std::min(n, lo))));
    if (sizes.empty() || s > sizes.back()) sizes.push_back(s);
  }
  return SubsetSchedule(std::move(sizes));
}

SubsetSchedule SubsetSchedule::for_training(std::size_t n, std::size_t m) {
  if (m < 2) throw InvalidInput("schedule needs m >= 2");
  std::vector<std::size_t> sizes;
  if (n < 4) {
    for (std::size_t s = 2; s <= n; ++s) sizes.push_back(s);
  } else {
    for (std::size_t k = 1; k <= m; ++k) {
      const std::size_t s = std::max<std::size_t>(2, (k * n + m - 1) / m);
      if (sizes.empty() || s > sizes.back()) sizes.push_back(s);
    }
  }
  if (sizes.size() < 2) {
    throw InvalidInput("batch of " + std::to_string(n) + " points yields fewer than two subset sizes");
  }
  return SubsetSchedule(std::move(sizes));
}

std::string to_string(IdMethod method) {
  return method == IdMethod::ph_birdal ? "birdal" : "twonn";
}

std::vector<double> ls_slope_weights(std::span<const double> xs) {
  const std::size_t m = xs.size();
  if (m < 2) throw InvalidInput("slope fit needs at least two points");
  const double md = static_cast<double>(m);
  double sx = 0.0;
  double sxx = 0.0;
  for (double x : xs) {
    sx += x;
    sxx += x * x;
  }
  const double denom = md * sxx - sx * sx;
  // Relative check: the expression cancels catastrophically for constant xs.
  if (!(std::abs(denom) > 1e-12 * std::max(1.0, md * sxx))) {
    throw DegenerateInput("slope fit: abscissae have zero variance");
  }
  std::vector<double> w(m);
  for (std::size_t i = 0; i < m; ++i) w[i] = (md * xs[i] - sx) / denom;
  return w;
}

double ls_slope(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size()) throw InvalidInput("slope fit: xs and ys differ in length");
  const std::size_t m = xs.size();
  if (m < 2) throw InvalidInput("slope fit needs at least two points");
  const double md = static_cast<double>(m);
  double sx = 0.0, sy = 0.0, sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    sx += xs[i];
    sy += ys[i];
    sxy += xs[i] * ys[i];
    sxx += xs[i] * xs[i];
  }
  const double denom = md * sxx - sx * sx;
  if (!(std::abs(denom) > 1e-12 * std::max(1.0, md * sxx))) {
    throw DegenerateInput("slope fit: abscissae have zero variance");
  }
  return (md * sxy - sx * sy) / denom;
}

IdEstimate ph_dim_birdal(const PointCloud& cloud, const SubsetSchedule& schedule, std::size_t reps,
                         Rng& rng) {
  if (reps == 0) throw InvalidInput("ph_dim_birdal needs reps >= 1");
  if (schedule.largest() > cloud.n()) {
    throw InvalidInput("schedule size " + std::to_string(schedule.largest()) + " exceeds cloud size " +
                       std::to_string(cloud.n()));
  }
  const auto dm = pairwise_distances(cloud);
  std::vector<double> log_n;
  std::vector<double> mean_log_e;
  for (std::size_t size : schedule.sizes()) {
    double acc = 0.0;
    for (std::size_t r = 0; r < reps; ++r) {
      const auto idx = sample_indices(cloud.n(), size, rng);
      const double e = mst(dm.restrict(idx)).total_length;
      if (!(e > 0.0)) {
        throw DegenerateInput("ph_dim_birdal: subset of size " + std::to_string(size) +
                              " has zero total persistence");
      }
      acc += std::log(e);
    }
    log_n.push_back(std::log(static_cast<double>(size)));
    mean_log_e.push_back(acc / static_cast<double>(reps));
  }
  IdEstimate est;
  est.method = IdMethod::ph_birdal;
  est.slope = ls_slope(log_n, mean_log_e);
  if (est.slope >= 1.0) {
    est.unbounded = true;
    est.dimension = std::numeric_limits<double>::infinity();
  } else {
    est.dimension = std::max(0.0, 1.0 / (1.0 - est.slope));
  }
  return est;
}

IdEstimate twonn(const PointCloud& cloud, double truncation) {
  if (!(truncation >= 0.0 && truncation < 1.0)) throw InvalidInput("twonn truncation must lie in [0, 1)");

  // Drop exact duplicates, keeping first occurrences.
  const Matrix& raw = cloud.data();
  std::vector<std::size_t> order(cloud.n());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    for (Eigen::Index k = 0; k < raw.cols(); ++k) {
      const auto ia = static_cast<Eigen::Index>(a);
      const auto ib = static_cast<Eigen::Index>(b);
      if (raw(ia, k) != raw(ib, k)) return raw(ia, k) < raw(ib, k);
    }
    return a < b;
  });
  std::vector<std::size_t> keep;
  for (std::size_t k = 0; k < order.size(); ++k) {
    if (k > 0 && raw.row(static_cast<Eigen::Index>(order[k])) == raw.row(static_cast<Eigen::Index>(order[k - 1]))) {
      continue;
    }
    keep.push_back(order[k]);
  }
  std::sort(keep.begin(), keep.end());
  if (keep.size() < 3) throw DegenerateInput("twonn needs at least 3 distinct points");

  const Matrix pts = cloud.select(keep).data();
  const auto n = static_cast<Eigen::Index>(keep.size());
  const Eigen::Index d = pts.cols();
  std::vector<double> log_mu;
  log_mu.reserve(keep.size());
  for (Eigen::Index i = 0; i < n; ++i) {
    double r1 = std::numeric_limits<double>::infinity();
    double r2 = std::numeric_limits<double>::infinity();
    for (Eigen::Index j = 0; j < n; ++j) {
      if (j == i) continue;
      double acc = 0.0;
      for (Eigen::Index k = 0; k < d; ++k) {
        const double diff = pts(i, k) - pts(j, k);
        acc += diff * diff;
      }
      if (acc < r1) {
        r2 = r1;
        r1 = acc;
      } else if (acc < r2) {
        r2 = acc;
      }
    }
    if (!(r1 > 0.0)) throw DegenerateInput("twonn: zero nearest-neighbour distance");
    log_mu.push_back(0.5 * std::log(r2 / r1));
  }

  std::sort(log_mu.begin(), log_mu.end());
  const std::size_t total = log_mu.size();
  const auto dropped = static_cast<std::size_t>(std::floor(truncation * static_cast<double>(total)));
  const std::size_t kept = total - dropped;
  // log(mu) ~ Exp(d). Values above the cut are censored at the cut.
  double sum = 0.0;
  for (std::size_t k = 0; k < kept; ++k) sum += log_mu[k];
  if (dropped > 0) sum += static_cast<double>(dropped) * log_mu[kept - 1];
  if (!(sum > 0.0)) throw DegenerateInput("twonn: all neighbour ratios equal 1");

  IdEstimate est;
  est.method = IdMethod::twonn;
  est.dimension = static_cast<double>(kept) / sum;
  est.slope = est.dimension;
  return est;
}

}  // namespace phreg
