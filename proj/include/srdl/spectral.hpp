#pragma once

#include "srdl/graph.hpp"

#include <Eigen/Core>

namespace srdl {

// Right eigenpairs of P sorted by |lambda| non-increasing (lambda descending
// on magnitude ties, so +1 precedes -1). Eigenvectors have unit Euclidean
// norm and deterministic sign (largest-magnitude entry positive).
struct EigenPairs {
  Eigen::VectorXd lambdas;
  Eigen::MatrixXd phis; // n x m, column i pairs with lambdas[i]
};

// Top max_m eigenpairs of P by |lambda|, computed through the symmetric
// conjugate S = D^-1/2 W D^-1/2 (v of S maps to Phi = D^-1/2 v). Dense solve
// for n <= 2000, Lanczos with full reorthogonalization above. Throws
// numeric_error with the residual if any retained pair fails
// ||P Phi - lambda Phi||_inf <= 1e-8.
EigenPairs eigendecompose(const SparseMarkov& g, int max_m);

// The iterative large-n path on its own, exposed so tests can cross-check it
// against the dense solver on sizes where both run.
EigenPairs eigendecompose_lanczos(const SparseMarkov& g, int max_m);

// Truncation index from eigenvalue decay: smallest n >= 2 with
// (|lambda_{n+1}| / |lambda_2|)^t < tau, clamped to [2, cap] and to the
// available count. Needs at least 3 eigenvalues, sorted by |lambda|.
int select_m(const Eigen::VectorXd& lambdas, int t, int cap = 50, double tau = 1e-2);

// Retained eigenpairs plus the diffusion time.
struct DiffusionEmbedding {
  int m = 0;
  Eigen::VectorXd lambdas; // m entries
  Eigen::MatrixXd phis;    // n x m
  int t = 30;
};

DiffusionEmbedding make_embedding(const EigenPairs& pairs, int m, int t);

} // namespace srdl
