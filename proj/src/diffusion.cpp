#include "srdl/diffusion.hpp"

#include "srdl/errors.hpp"

#include <cmath>

namespace srdl {

namespace {
constexpr int kBruteForceLimit = 600;
}

DiffusionCoords embed(const DiffusionEmbedding& e) {
  DiffusionCoords c;
  c.n = static_cast<int>(e.phis.rows());
  c.m = e.m;
  c.coords.resize(c.n, c.m);
  for (int i = 0; i < c.m; ++i) {
    c.coords.col(i) = std::pow(e.lambdas[i], static_cast<double>(e.t)) * e.phis.col(i);
  }
  return c;
}

double diffusion_distance(const DiffusionCoords& c, int x, int y) {
  if (x < 0 || x >= c.n || y < 0 || y >= c.n) {
    throw input_error("diffusion_distance: index out of range");
  }
  return (c.coords.row(x) - c.coords.row(y)).norm();
}

Eigen::MatrixXd dense_transition_power(const SparseMarkov& g, int t) {
  if (t < 1) throw input_error("transition power needs t >= 1");
  if (g.n > kBruteForceLimit) {
    throw input_error("dense transition power limited to n <= " +
                      std::to_string(kBruteForceLimit));
  }
  Eigen::MatrixXd base = Eigen::MatrixXd(g.P);
  Eigen::MatrixXd result = Eigen::MatrixXd::Identity(g.n, g.n);
  int e = t;
  while (e > 0) {
    if (e & 1) result = result * base;
    e >>= 1;
    if (e > 0) base = base * base;
  }
  return result;
}

double diffusion_distance_bruteforce(const SparseMarkov& g, int t, int x, int y) {
  if (x < 0 || x >= g.n || y < 0 || y >= g.n) {
    throw input_error("diffusion_distance_bruteforce: index out of range");
  }
  const Eigen::MatrixXd pt = dense_transition_power(g, t);
  return (pt.row(x) - pt.row(y)).norm();
}

} // namespace srdl
