#pragma once

#include <utility>

#include "nrl/types.hpp"

namespace nrl {

// Row-stochasticity check used by the solvers below.
bool is_row_stochastic(const Matrix& q, double tol = kDistributionTol);

// Stationary distribution of an ergodic row-stochastic chain via a direct
// linear solve of (Q^T - I) p = 0 with the normalization row appended.
// Throws NumericalError (naming the residual) if ||pQ - p||_1 > 1e-8.
Vector stationary(const Matrix& q);

// Independent oracle: enumerate all directed spanning trees rooted at each
// node and return (Sigma_1/Sigma, ..., Sigma_n/Sigma) where Sigma_i sums the
// edge-weight products over trees rooted at i. Exponential; n <= 6 only.
Vector tree_stationary(const Matrix& q);

// Minimal per-row multiplicative certificate between two chains:
// eta_i = max_j |q_ij / q'_ij - 1|. Throws CertificateError if some q'_ij is
// zero while q_ij is not.
Vector certify_multiplicative(const Matrix& q, const Matrix& q_prime);

// (l1 gap of the two stationary distributions, 8 * sum of certificate etas).
std::pair<double, double> perturbation_gap(const Matrix& q, const Matrix& q_prime);

}  // namespace nrl
