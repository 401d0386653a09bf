#pragma once

#include "srdl/cube.hpp"

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include <limits>
#include <string>
#include <vector>

namespace srdl {

inline constexpr double kRadiusInf = std::numeric_limits<double>::infinity();

struct GraphConfig {
  int k = 100;                 // spectral nearest neighbors per pixel
  double radius = kRadiusInf;  // spatial radius in pixels; inf = unconstrained
  enum class SigmaMode { adaptive, fixed };
  SigmaMode sigma_mode = SigmaMode::adaptive;
  double sigma = 0.0;              // kernel scale when fixed
  double sigma_multiplier = 1.0;   // adaptive: multiplier on mean retained-edge distance
  bool allow_disconnected = false; // proceed on a disconnected graph

  void validate() const;
};

// Symmetrized kernel graph over pixels and its random-walk transition matrix.
// W is exactly symmetric (the shared kernel value is stored on both
// orientations), zero diagonal, entries in [0,1]. P = D^-1 W is row
// stochastic. `sigma` is the kernel scale actually used.
struct SparseMarkov {
  int n = 0;
  Eigen::SparseMatrix<double, Eigen::RowMajor> W;
  Eigen::VectorXd deg;
  Eigen::SparseMatrix<double, Eigen::RowMajor> P;
  double sigma = 0.0;
};

// Gaussian kernel exp(-|x-y|^2 / sigma^2). Throws on non-finite input.
double kernel_weight(const Eigen::VectorXd& x, const Eigen::VectorXd& y, double sigma);

// All pixels q != p within Euclidean grid distance <= radius of p.
std::vector<PixelIndex> spatial_candidates(int height, int width, const PixelIndex& p,
                                           double radius);
std::vector<PixelIndex> spatial_candidates(const HsiCube& cube, const PixelIndex& p,
                                           double radius);

// Builds W, deg and P per the spatially constrained k-NN construction: each
// pixel connects to the k spectrally nearest pixels inside its spatial disk
// (all of them when fewer than k exist), weights exp(-d^2/sigma^2), W
// symmetrized by elementwise max. Adaptive sigma is the mean spectral
// distance over all retained directed edges, times cfg.sigma_multiplier.
// Throws numeric_error for isolated pixels or (unless allowed) a
// disconnected graph.
SparseMarkov build_graph(const HsiCube& cube, const GraphConfig& cfg);

// Wraps an arbitrary symmetric nonnegative weight matrix (zero diagonal) as a
// SparseMarkov; validates symmetry and positive degrees.
SparseMarkov markov_from_weights(const Eigen::SparseMatrix<double>& W, double sigma = 1.0);

// True iff the symmetric sparsity pattern has a single connected component.
bool is_connected(const SparseMarkov& g);

// Coordinate-list text dump (row col value per line) for cross-checking.
void dump_coo(const Eigen::SparseMatrix<double, Eigen::RowMajor>& m, const std::string& path);

} // namespace srdl
