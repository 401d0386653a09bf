#include "srdl/spectral.hpp"

#include "srdl/errors.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>
#include <vector>

namespace srdl {

namespace {

constexpr int kDenseThreshold = 2000;
constexpr double kLanczosTol = 1e-10;
constexpr double kResidualTol = 1e-8;

// indices sorted by |lambda| descending, sign-descending on magnitude ties.
// Ties are detected up to a relative 1e-12 band after the exact sort: on
// bipartite graphs +1 and -1 are both present and rounding would otherwise
// order -1 first. (The band is applied in a second pass over adjacent runs
// so the sort comparator itself stays a strict weak ordering.)
std::vector<int> magnitude_order(const Eigen::VectorXd& vals) {
  std::vector<int> idx(vals.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](int a, int b) {
    const double ma = std::abs(vals[a]), mb = std::abs(vals[b]);
    if (ma != mb) return ma > mb;
    if (vals[a] != vals[b]) return vals[a] > vals[b];
    return a < b;
  });
  size_t lo = 0;
  while (lo < idx.size()) {
    size_t hi = lo + 1;
    while (hi < idx.size() &&
           std::abs(vals[idx[hi - 1]]) - std::abs(vals[idx[hi]]) <=
               1e-12 * std::abs(vals[idx[lo]])) {
      ++hi;
    }
    std::sort(idx.begin() + lo, idx.begin() + hi, [&](int a, int b) {
      if (vals[a] != vals[b]) return vals[a] > vals[b];
      return a < b;
    });
    lo = hi;
  }
  return idx;
}

void fix_sign(Eigen::Ref<Eigen::VectorXd> v) {
  int arg = 0;
  double best = std::abs(v[0]);
  for (int i = 1; i < v.size(); ++i) {
    if (std::abs(v[i]) > best) {
      best = std::abs(v[i]);
      arg = i;
    }
  }
  if (v[arg] < 0.0) v = -v;
}

// y = S x with S = D^-1/2 W D^-1/2, without forming S
struct ConjugateOp {
  const SparseMarkov& g;
  Eigen::VectorXd dis; // deg^-1/2

  explicit ConjugateOp(const SparseMarkov& graph)
      : g(graph), dis(graph.deg.array().rsqrt()) {}

  Eigen::VectorXd apply(const Eigen::VectorXd& x) const {
    return dis.asDiagonal() * (g.W * (dis.asDiagonal() * x));
  }
};

// Lanczos with full reorthogonalization; returns >= want converged extreme
// Ritz pairs (by |theta|) of S.
void lanczos(const ConjugateOp& op, int n, int want, Eigen::VectorXd* theta,
             Eigen::MatrixXd* vecs) {
  const int cap = std::min<long>(n, 10L * want * static_cast<long>(std::sqrt(double(n))) + 2);

  Eigen::MatrixXd basis(n, std::min(cap + 1, n));
  Eigen::VectorXd alpha(cap), beta(cap);

  std::mt19937_64 engine(0x5eedf00dULL); // fixed: eigendecompose is a pure function
  auto random_unit = [&]() {
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i) {
      v[i] = static_cast<double>(engine() >> 11) * 0x1.0p-53 - 0.5;
    }
    return v.normalized();
  };

  basis.col(0) = random_unit();
  int j = 0;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> tri;

  auto converged = [&](int steps) {
    // A restart step stores an exact 0 in beta; its zero residual bound says
    // nothing about directions outside the invariant subspace just escaped.
    if (beta[steps - 1] == 0.0 && steps < cap && steps + 1 < n) return false;
    tri.computeFromTridiagonal(alpha.head(steps), beta.head(steps - 1));
    if (tri.info() != Eigen::Success) return false;
    const auto order = magnitude_order(tri.eigenvalues());
    const int take = std::min(want, steps);
    const double edge = std::abs(beta[steps - 1]);
    for (int i = 0; i < take; ++i) {
      const double bound = edge * std::abs(tri.eigenvectors()(steps - 1, order[i]));
      if (bound > kLanczosTol) return false;
    }
    return true;
  };

  bool done = false;
  while (j < cap && j + 1 < n && !done) {
    Eigen::VectorXd wv = op.apply(basis.col(j));
    alpha[j] = basis.col(j).dot(wv);
    wv -= alpha[j] * basis.col(j);
    if (j > 0) wv -= beta[j - 1] * basis.col(j - 1);
    // full reorthogonalization, two sweeps
    for (int sweep = 0; sweep < 2; ++sweep) {
      wv -= basis.leftCols(j + 1) * (basis.leftCols(j + 1).transpose() * wv);
    }
    beta[j] = wv.norm();
    if (beta[j] < 1e-14) {
      // invariant subspace; continue the Krylov space from a fresh direction
      Eigen::VectorXd fresh = random_unit();
      for (int sweep = 0; sweep < 2; ++sweep) {
        fresh -= basis.leftCols(j + 1) * (basis.leftCols(j + 1).transpose() * fresh);
      }
      const double nrm = fresh.norm();
      if (nrm < 1e-14) { ++j; break; } // space exhausted
      basis.col(j + 1) = fresh / nrm;
      beta[j] = 0.0;
    } else {
      basis.col(j + 1) = wv / beta[j];
    }
    ++j;
    if (j >= want + 2 && (j % 10 == 0 || j == cap || j + 1 >= n)) done = converged(j);
  }

  if (!done && j > 0) done = converged(j);
  if (!done) {
    double worst = 0.0;
    if (j > 1) {
      tri.computeFromTridiagonal(alpha.head(j), beta.head(j - 1));
      const auto order = magnitude_order(tri.eigenvalues());
      for (int i = 0; i < std::min(want, j); ++i) {
        worst = std::max(worst,
                         std::abs(beta[j - 1]) * std::abs(tri.eigenvectors()(j - 1, order[i])));
      }
    }
    std::ostringstream err;
    err << "eigensolver did not converge within " << cap
        << " Lanczos iterations (worst residual bound " << worst << ")";
    throw numeric_error(err.str());
  }

  const auto order = magnitude_order(tri.eigenvalues());
  const int take = std::min(want, j);
  theta->resize(take);
  vecs->resize(n, take);
  for (int i = 0; i < take; ++i) {
    (*theta)[i] = tri.eigenvalues()[order[i]];
    vecs->col(i) = basis.leftCols(j) * tri.eigenvectors().col(order[i]);
    vecs->col(i).normalize();
  }
}

// Maps eigenvectors of S back to eigenvectors of P, normalizes, and enforces
// the exactness guarantees (lambda_1 = 1, |lambda| <= 1, residuals).
EigenPairs finalize_pairs(const SparseMarkov& g, const Eigen::VectorXd& theta,
                          const Eigen::MatrixXd& svecs) {
  EigenPairs out;
  out.lambdas = theta;
  out.phis.resize(g.n, theta.size());
  const Eigen::VectorXd dis = g.deg.array().rsqrt();
  for (int i = 0; i < theta.size(); ++i) {
    Eigen::VectorXd phi = dis.asDiagonal() * svecs.col(i);
    phi.normalize();
    fix_sign(phi);
    out.phis.col(i) = phi;
  }

  if (std::abs(out.lambdas[0] - 1.0) > kResidualTol) {
    std::ostringstream err;
    err << "leading eigenvalue " << out.lambdas[0] << " deviates from 1";
    throw numeric_error(err.str());
  }
  for (int i = 0; i < out.lambdas.size(); ++i) {
    if (std::abs(out.lambdas[i]) > 1.0 + kResidualTol) {
      throw numeric_error("eigenvalue magnitude exceeds 1");
    }
    const double res = (g.P * out.phis.col(i) - out.lambdas[i] * out.phis.col(i))
                           .cwiseAbs()
                           .maxCoeff();
    if (res > kResidualTol) {
      std::ostringstream err;
      err << "eigenpair " << i << " residual " << res << " exceeds " << kResidualTol;
      throw numeric_error(err.str());
    }
  }
  return out;
}

void check_max_m(int max_m, int n) {
  if (max_m < 1 || max_m > n) {
    throw input_error("eigendecompose: need 1 <= max_m <= n");
  }
}

} // namespace

EigenPairs eigendecompose_lanczos(const SparseMarkov& g, int max_m) {
  check_max_m(max_m, g.n);
  Eigen::VectorXd theta;
  Eigen::MatrixXd svecs;
  lanczos(ConjugateOp(g), g.n, max_m, &theta, &svecs);
  return finalize_pairs(g, theta, svecs);
}

EigenPairs eigendecompose(const SparseMarkov& g, int max_m) {
  const int n = g.n;
  check_max_m(max_m, n);
  if (n > kDenseThreshold) return eigendecompose_lanczos(g, max_m);

  const Eigen::VectorXd dis = g.deg.array().rsqrt();
  Eigen::MatrixXd S = dis.asDiagonal() * Eigen::MatrixXd(g.W) * dis.asDiagonal();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(S);
  if (es.info() != Eigen::Success) {
    throw numeric_error("dense symmetric eigensolver failed");
  }
  const auto order = magnitude_order(es.eigenvalues());
  Eigen::VectorXd theta(max_m);
  Eigen::MatrixXd svecs(n, max_m);
  for (int i = 0; i < max_m; ++i) {
    theta[i] = es.eigenvalues()[order[i]];
    svecs.col(i) = es.eigenvectors().col(order[i]);
  }
  return finalize_pairs(g, theta, svecs);
}

int select_m(const Eigen::VectorXd& lambdas, int t, int cap, double tau) {
  const int count = static_cast<int>(lambdas.size());
  if (count < 3) throw input_error("select_m: need at least 3 eigenvalues");
  if (cap < 2) throw input_error("select_m: cap must be >= 2");

  const double base = std::abs(lambdas[1]);
  if (base == 0.0) return 2;
  const int hi = std::min(count - 1, cap);
  for (int n = 2; n <= hi; ++n) {
    const double ratio = std::abs(lambdas[n]) / base; // lambdas[n] is lambda_{n+1}
    if (std::pow(ratio, t) < tau) return n;
  }
  return std::min(cap, count);
}

DiffusionEmbedding make_embedding(const EigenPairs& pairs, int m, int t) {
  if (m < 2 || m > pairs.lambdas.size()) {
    throw input_error("make_embedding: m out of range");
  }
  DiffusionEmbedding e;
  e.m = m;
  e.lambdas = pairs.lambdas.head(m);
  e.phis = pairs.phis.leftCols(m);
  e.t = t;
  return e;
}

} // namespace srdl
