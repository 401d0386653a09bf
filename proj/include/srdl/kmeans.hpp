#pragma once

#include "srdl/cube.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <vector>

namespace srdl {

struct KMeansConfig {
  int clusters = 0; // required, >= 1
  int max_iters = 100;
  double rel_tol = 1e-6; // relative inertia improvement that counts as converged
  uint64_t seed = 0;
  void validate() const;
};

struct KMeansResult {
  std::vector<int> labels; // 1..K
  Eigen::MatrixXd centroids; // K x D
  double inertia = 0.0;
  int iters = 0;
  bool converged = false;
};

// Seeded Lloyd iterations with greedy ++-style init (the candidate pool per
// new center is 2 + floor(log K), each drawn proportionally to squared
// distance from the chosen centers; the candidate with the lowest resulting
// potential wins). Deterministic for a fixed seed.
KMeansResult kmeans(const Eigen::MatrixXd& X, const KMeansConfig& cfg);
KMeansResult kmeans(const HsiCube& cube, const KMeansConfig& cfg);

} // namespace srdl
