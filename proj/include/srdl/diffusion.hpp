#pragma once

#include "srdl/graph.hpp"
#include "srdl/spectral.hpp"

#include <Eigen/Core>

namespace srdl {

// Diffusion coordinates: row x is (lambda_1^t Phi_1(x), ..., lambda_M^t Phi_M(x)).
struct DiffusionCoords {
  int n = 0;
  int m = 0;
  Eigen::MatrixXd coords; // n x m
};

DiffusionCoords embed(const DiffusionEmbedding& e);

// Euclidean distance between coordinate rows x and y.
double diffusion_distance(const DiffusionCoords& c, int x, int y);

// Dense t-step transition matrix P^t (exponentiation by squaring). Size
// guarded; test oracle territory.
Eigen::MatrixXd dense_transition_power(const SparseMarkov& g, int t);

// sqrt(sum_u (P^t(x,u) - P^t(y,u))^2) via the explicit dense power.
double diffusion_distance_bruteforce(const SparseMarkov& g, int t, int x, int y);

} // namespace srdl
