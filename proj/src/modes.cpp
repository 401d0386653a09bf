#include "srdl/modes.hpp"

#include "srdl/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <utility>

namespace srdl {

void KdeConfig::validate() const {
  if (knn < 1) {
    throw input_error("kde: knn must be >= 1, got " + std::to_string(knn));
  }
  if (bandwidth < 0.0 || !std::isfinite(bandwidth)) {
    throw input_error("kde: bandwidth must be finite and >= 0, got " +
                      std::to_string(bandwidth));
  }
}

Eigen::VectorXd kde(const HsiCube& cube, const KdeConfig& cfg,
                    double* bandwidth_out) {
  cfg.validate();
  const int n = cube.pixels();
  if (n < 2) throw input_error("kde: need at least 2 pixels");
  const int kappa = std::min(cfg.knn, n - 1);

  const auto X = cube.spectra();
  const Eigen::VectorXd sq = X.rowwise().squaredNorm();

  // Squared distances to each pixel's kappa nearest spectral neighbors,
  // ascending. Gram blocks keep the n^2 distance pass in GEMM.
  Eigen::MatrixXd knn_sq(n, kappa);
  const int block = 256;
  std::vector<std::pair<double, int>> cand(static_cast<size_t>(n));
  Eigen::MatrixXd gram;
  for (int i0 = 0; i0 < n; i0 += block) {
    const int rows = std::min(block, n - i0);
    gram.noalias() = X.middleRows(i0, rows) * X.transpose();
    for (int li = 0; li < rows; ++li) {
      const int i = i0 + li;
      for (int j = 0; j < n; ++j) {
        const double d2 =
            j == i ? std::numeric_limits<double>::infinity()
                   : std::max(0.0, sq[i] + sq[j] - 2.0 * gram(li, j));
        cand[static_cast<size_t>(j)] = {d2, j};
      }
      std::partial_sort(cand.begin(), cand.begin() + kappa, cand.end());
      for (int q = 0; q < kappa; ++q) knn_sq(i, q) = cand[q].first;
    }
  }

  double sigma = cfg.bandwidth;
  if (sigma == 0.0) {
    sigma = knn_sq.col(kappa - 1).array().sqrt().mean();
    if (sigma == 0.0) {
      // degenerate data, not a usage mistake: route to the numeric exit code
      throw numeric_error(
          "kde: all spectra identical (zero bandwidth); perturb the data with "
          "jitter_duplicates before clustering");
    }
  }
  if (bandwidth_out) *bandwidth_out = sigma;

  Eigen::VectorXd p =
      (-knn_sq / (sigma * sigma)).array().exp().rowwise().sum();
  // Flat-index perturbation makes equal densities strictly ordered
  // (higher index wins); scale 1e-12 is far below any genuine gap.
  for (int i = 0; i < n; ++i) p[i] += 1e-12 * i;
  p /= p.maxCoeff();
  return p;
}

std::vector<int> density_order(const Eigen::VectorXd& p) {
  std::vector<int> order(static_cast<size_t>(p.size()));
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (p[a] != p[b]) return p[a] > p[b];
    return a > b;
  });
  return order;
}

void rho_and_parent(const Eigen::VectorXd& p, const DiffusionCoords& c,
                    Eigen::VectorXd& rho_t, std::vector<int>& parent) {
  const int n = static_cast<int>(p.size());
  if (n != c.n) {
    std::ostringstream err;
    err << "rho_and_parent: " << n << " densities vs " << c.n << " embedded points";
    throw input_error(err.str());
  }
  if (n < 2) throw input_error("rho_and_parent: need at least 2 points");

  const std::vector<int> order = density_order(p);
  rho_t.resize(n);
  parent.assign(static_cast<size_t>(n), -1);

  // Coordinates permuted into density order so each pixel scans a prefix.
  Eigen::MatrixXd pc(n, c.m);
  for (int s = 0; s < n; ++s) pc.row(s) = c.coords.row(order[s]);

  Eigen::VectorXd d2(n);
  for (int s = 1; s < n; ++s) {
    const int x = order[s];
    d2.head(s) = (pc.topRows(s).rowwise() - pc.row(s)).rowwise().squaredNorm();
    double best = std::numeric_limits<double>::infinity();
    int best_flat = -1;
    for (int q = 0; q < s; ++q) {
      const int y = order[q];
      if (d2[q] < best || (d2[q] == best && y < best_flat)) {
        best = d2[q];
        best_flat = y;
      }
    }
    rho_t[x] = std::sqrt(best);
    parent[x] = best_flat;
  }
  // Convention for the density maximizer: the largest gap seen anywhere.
  const int top = order[0];
  rho_t[top] = 0.0;
  for (int s = 1; s < n; ++s) rho_t[top] = std::max(rho_t[top], rho_t[order[s]]);
  return;
}

std::vector<int> select_modes(const Eigen::VectorXd& d_t, int K) {
  const int n = static_cast<int>(d_t.size());
  if (K < 1 || K > n) {
    std::ostringstream err;
    err << "select_modes: K=" << K << " out of range [1," << n << "]";
    throw input_error(err.str());
  }
  std::vector<int> idx(static_cast<size_t>(n));
  std::iota(idx.begin(), idx.end(), 0);
  std::partial_sort(idx.begin(), idx.begin() + K, idx.end(), [&](int a, int b) {
    if (d_t[a] != d_t[b]) return d_t[a] > d_t[b];
    return a < b;
  });
  idx.resize(static_cast<size_t>(K));
  return idx;
}

int estimate_k(const Eigen::VectorXd& d_t, int k_max, bool* degenerate) {
  if (degenerate) *degenerate = false;
  const int n = static_cast<int>(d_t.size());
  if (n < 1) throw input_error("estimate_k: empty scores");
  if (k_max < 2) {
    throw input_error("estimate_k: k_max must be >= 2, got " + std::to_string(k_max));
  }
  std::vector<double> s(d_t.data(), d_t.data() + n);
  std::sort(s.begin(), s.end(), std::greater<double>());
  if (s.front() == s.back()) {
    if (degenerate) *degenerate = true;
    return 1;
  }
  const int last = std::min(k_max - 1, n - 1); // ratios s_j / s_{j+1}, 1-based j
  int best_j = 1;
  double best_ratio = -1.0;
  for (int j = 1; j <= last; ++j) {
    const double a = s[static_cast<size_t>(j - 1)];
    const double b = s[static_cast<size_t>(j)];
    double ratio;
    if (b > 0.0) {
      ratio = a / b;
    } else {
      ratio = a > 0.0 ? std::numeric_limits<double>::infinity() : 1.0;
    }
    if (ratio > best_ratio) {
      best_ratio = ratio;
      best_j = j;
    }
  }
  return best_j;
}

ModeModel detect_modes(const HsiCube& cube, const DiffusionCoords& c,
                       const KdeConfig& cfg, int K, int k_max) {
  if (K < 0 || K > cube.pixels()) {
    std::ostringstream err;
    err << "detect_modes: K=" << K << " out of range [0," << cube.pixels() << "]";
    throw input_error(err.str());
  }
  ModeModel m;
  m.p = kde(cube, cfg, &m.kde_bandwidth);
  rho_and_parent(m.p, c, m.rho_t, m.parent);
  m.d_t = m.p.cwiseProduct(m.rho_t);
  m.k_hat = estimate_k(m.d_t, k_max, &m.k_degenerate);
  m.modes = select_modes(m.d_t, K > 0 ? K : m.k_hat);
  return m;
}

} // namespace srdl
