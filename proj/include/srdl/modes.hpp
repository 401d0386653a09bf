#pragma once

#include "srdl/cube.hpp"
#include "srdl/diffusion.hpp"

#include <Eigen/Dense>

#include <vector>

namespace srdl {

struct KdeConfig {
  int knn = 20;           // spectral neighbors contributing to each density
  double bandwidth = 0.0; // kernel width; 0 = mean distance to the knn-th neighbor
  void validate() const;
};

// Gaussian kernel density over the knn spectral nearest neighbors of each
// pixel (no spatial constraint), rescaled to max 1. Ties are broken by a
// flat-index perturbation so the returned densities are strictly ordered.
Eigen::VectorXd kde(const HsiCube& cube, const KdeConfig& cfg,
                    double* bandwidth_out = nullptr);

// For every pixel, the distance (in the embedded coordinates) to the nearest
// strictly denser pixel and that pixel's index. The density maximizer gets
// the maximum of all other rho values and parent -1.
void rho_and_parent(const Eigen::VectorXd& p, const DiffusionCoords& c,
                    Eigen::VectorXd& rho_t, std::vector<int>& parent);

// Pixel indices sorted by strictly decreasing density. Exact ties (precluded
// by kde's perturbation, but possible for raw caller-supplied densities) rank
// the higher flat index as denser, matching the perturbation's direction.
std::vector<int> density_order(const Eigen::VectorXd& p);

// Indices of the K largest scores, descending, ties by lower flat index.
std::vector<int> select_modes(const Eigen::VectorXd& d_t, int K);

// Cluster-count estimate: the 1-based position j < k_max maximizing the
// ratio s_j / s_{j+1} of the descending-sorted scores. All-equal scores are
// degenerate: returns 1 and sets *degenerate.
int estimate_k(const Eigen::VectorXd& d_t, int k_max,
               bool* degenerate = nullptr);

struct ModeModel {
  Eigen::VectorXd p;       // per-pixel density in (0,1], exactly one pixel at 1
  Eigen::VectorXd rho_t;   // distance to nearest denser pixel
  Eigen::VectorXd d_t;     // p .* rho_t
  std::vector<int> parent; // nearest denser pixel; -1 at the density maximizer
  std::vector<int> modes;  // cluster exemplars, by decreasing d_t
  int k_hat = 0;           // estimated cluster count (always computed)
  bool k_degenerate = false;
  double kde_bandwidth = 0.0;
};

// kde + rho_and_parent + estimate_k + select_modes. K = 0 selects k_hat modes.
ModeModel detect_modes(const HsiCube& cube, const DiffusionCoords& c,
                       const KdeConfig& cfg, int K, int k_max);

} // namespace srdl
