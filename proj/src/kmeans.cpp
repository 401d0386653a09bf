#include "srdl/kmeans.hpp"

#include "srdl/errors.hpp"
#include "srdl/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace srdl {

void KMeansConfig::validate() const {
  if (clusters < 1) {
    throw input_error("kmeans: clusters must be >= 1, got " + std::to_string(clusters));
  }
  if (max_iters < 1) {
    throw input_error("kmeans: max_iters must be >= 1, got " + std::to_string(max_iters));
  }
  if (!(rel_tol >= 0.0) || !std::isfinite(rel_tol)) {
    throw input_error("kmeans: rel_tol must be finite and >= 0");
  }
}

namespace {

// Index drawn proportionally to the (nonnegative) weights.
int weighted_draw(const Eigen::VectorXd& weights, double total, Rng& rng) {
  const double target = rng.uniform01() * total;
  double acc = 0.0;
  int last = -1;
  for (int i = 0; i < weights.size(); ++i) {
    if (weights[i] <= 0.0) continue;
    acc += weights[i];
    last = i;
    if (acc >= target) return i;
  }
  return last; // rounding spill: the last positive-weight index
}

Eigen::VectorXd sq_dist_to_point(const Eigen::MatrixXd& X,
                                 const Eigen::VectorXd& sq_norms, int idx) {
  return (sq_norms.array() + X.row(idx).squaredNorm() -
          2.0 * (X * X.row(idx).transpose()).array())
      .max(0.0)
      .matrix();
}

} // namespace

KMeansResult kmeans(const Eigen::MatrixXd& X, const KMeansConfig& cfg) {
  cfg.validate();
  const int n = static_cast<int>(X.rows());
  const int d = static_cast<int>(X.cols());
  const int k = cfg.clusters;
  if (n < 1) throw input_error("kmeans: empty data");
  if (k > n) {
    throw input_error("kmeans: clusters=" + std::to_string(k) + " exceeds " +
                      std::to_string(n) + " points");
  }
  if (!X.allFinite()) throw input_error("kmeans: non-finite input");

  Rng rng(cfg.seed);
  const Eigen::VectorXd sq_norms = X.rowwise().squaredNorm();

  // Greedy ++ seeding.
  Eigen::MatrixXd centroids(k, d);
  const int seed_idx = static_cast<int>(rng.below(static_cast<uint64_t>(n)));
  centroids.row(0) = X.row(seed_idx);
  Eigen::VectorXd best_d2 = sq_dist_to_point(X, sq_norms, seed_idx);
  const int trials = 2 + static_cast<int>(std::floor(std::log(static_cast<double>(k))));
  for (int c = 1; c < k; ++c) {
    double total = best_d2.sum();
    int chosen = -1;
    Eigen::VectorXd chosen_d2;
    double chosen_pot = std::numeric_limits<double>::infinity();
    for (int trial = 0; trial < trials; ++trial) {
      int cand;
      if (total > 0.0) {
        cand = weighted_draw(best_d2, total, rng);
      } else {
        // All remaining points coincide with chosen centers.
        cand = static_cast<int>(rng.below(static_cast<uint64_t>(n)));
      }
      const Eigen::VectorXd cand_d2 = best_d2.cwiseMin(sq_dist_to_point(X, sq_norms, cand));
      const double pot = cand_d2.sum();
      if (pot < chosen_pot) {
        chosen_pot = pot;
        chosen = cand;
        chosen_d2 = cand_d2;
      }
    }
    centroids.row(c) = X.row(chosen);
    best_d2 = chosen_d2;
  }

  // Lloyd iterations.
  KMeansResult res;
  res.labels.assign(static_cast<size_t>(n), 0);
  Eigen::MatrixXd gram(n, k);
  Eigen::VectorXd cent_sq(k);
  double prev_inertia = std::numeric_limits<double>::infinity();
  for (int iter = 1; iter <= cfg.max_iters; ++iter) {
    res.iters = iter;
    gram.noalias() = X * centroids.transpose();
    cent_sq = centroids.rowwise().squaredNorm();

    double inertia = 0.0;
    for (int i = 0; i < n; ++i) {
      double best = std::numeric_limits<double>::infinity();
      int arg = 0;
      for (int c = 0; c < k; ++c) {
        const double d2 = std::max(0.0, sq_norms[i] + cent_sq[c] - 2.0 * gram(i, c));
        if (d2 < best) {
          best = d2;
          arg = c;
        }
      }
      res.labels[static_cast<size_t>(i)] = arg + 1;
      inertia += best;
    }
    res.inertia = inertia;

    Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(k, d);
    Eigen::VectorXi counts = Eigen::VectorXi::Zero(k);
    for (int i = 0; i < n; ++i) {
      sums.row(res.labels[static_cast<size_t>(i)] - 1) += X.row(i);
      counts[res.labels[static_cast<size_t>(i)] - 1] += 1;
    }
    for (int c = 0; c < k; ++c) {
      if (counts[c] > 0) {
        centroids.row(c) = sums.row(c) / counts[c];
        continue;
      }
      // Empty cluster: seize the point farthest from its current centroid.
      double worst = -1.0;
      int take = 0;
      for (int i = 0; i < n; ++i) {
        const int ci = res.labels[static_cast<size_t>(i)] - 1;
        if (counts[ci] <= 1) continue; // don't empty another singleton
        const double d2 = (X.row(i) - centroids.row(ci)).squaredNorm();
        if (d2 > worst) {
          worst = d2;
          take = i;
        }
      }
      centroids.row(c) = X.row(take);
    }

    if (prev_inertia - inertia <= cfg.rel_tol * std::max(prev_inertia, 1e-300) &&
        std::isfinite(prev_inertia)) {
      res.converged = true;
      break;
    }
    prev_inertia = inertia;
  }

  res.centroids = centroids;
  return res;
}

KMeansResult kmeans(const HsiCube& cube, const KMeansConfig& cfg) {
  const Eigen::MatrixXd X = cube.spectra();
  return kmeans(X, cfg);
}

} // namespace srdl
