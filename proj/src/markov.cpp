#include "nrl/markov.hpp"

#include <cmath>
#include <sstream>
#include <vector>

namespace nrl {

namespace {

constexpr double kResidualHardLimit = 1e-8;

void require_square(const Matrix& q, const char* who) {
  if (q.rows() != q.cols() || q.rows() < 1) {
    throw std::invalid_argument(std::string(who) + ": matrix must be square and nonempty");
  }
}

// Primitivity test for chains with zero entries: the 0/1 pattern of Q^k is
// all-positive for some k iff the chain is irreducible and aperiodic. Checks
// Q^(2^12), which covers the Wielandt bound for n <= 64.
bool is_primitive(const Matrix& q) {
  const int n = static_cast<int>(q.rows());
  using BoolMat = Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>;
  BoolMat pattern = (q.array() > 0.0);
  for (int step = 0; step < 12; ++step) {
    if (pattern.all()) return true;
    BoolMat next = BoolMat::Constant(n, n, false);
    for (int i = 0; i < n; ++i) {
      for (int k = 0; k < n; ++k) {
        if (!pattern(i, k)) continue;
        for (int j = 0; j < n; ++j) next(i, j) = next(i, j) || pattern(k, j);
      }
    }
    pattern.swap(next);
  }
  return pattern.all();
}

void require_ergodic(const Matrix& q, const char* who) {
  require_square(q, who);
  if (!is_row_stochastic(q)) {
    throw std::invalid_argument(std::string(who) + ": matrix is not row-stochastic");
  }
  if ((q.array() < 0.0).any()) {
    throw std::invalid_argument(std::string(who) + ": negative entry");
  }
  if (q.minCoeff() > 0.0) return;  // strictly positive, trivially ergodic
  if (!is_primitive(q)) {
    throw NumericalError(std::string(who) + ": chain is not ergodic");
  }
}

}  // namespace

bool is_row_stochastic(const Matrix& q, double tol) {
  if (q.rows() != q.cols() || q.rows() < 1) return false;
  if ((q.array() < -tol).any()) return false;
  for (Eigen::Index i = 0; i < q.rows(); ++i) {
    if (std::abs(q.row(i).sum() - 1.0) > tol) return false;
  }
  return true;
}

Vector stationary(const Matrix& q) {
  require_ergodic(q, "stationary");
  const int n = static_cast<int>(q.rows());

  // (Q^T - I) p = 0 with the normalization row sum(p) = 1 appended.
  Matrix a(n + 1, n);
  a.topRows(n) = q.transpose() - Matrix::Identity(n, n);
  a.row(n) = Eigen::RowVectorXd::Ones(n);
  Vector b = Vector::Zero(n + 1);
  b[n] = 1.0;

  Vector p = a.colPivHouseholderQr().solve(b);
  const double residual = (q.transpose() * p - p).cwiseAbs().sum();
  if (!(residual <= kResidualHardLimit)) {
    std::ostringstream msg;
    msg << "stationary: solver residual " << residual << " exceeds " << kResidualHardLimit;
    throw NumericalError(msg.str());
  }
  p = p.cwiseMax(0.0);
  p /= p.sum();
  return p;
}

namespace {

// Recursive in-edge assignment: every node except the root picks one
// outgoing edge; a partial assignment is pruned as soon as following the
// chosen edges from the new node leads back to it (a cycle).
void enumerate_trees(const Matrix& q, int root, int node, std::vector<int>& out_edge, double weight,
                     double& total) {
  const int n = static_cast<int>(q.rows());
  if (node == n) {
    total += weight;
    return;
  }
  if (node == root) {
    enumerate_trees(q, root, node + 1, out_edge, weight, total);
    return;
  }
  for (int target = 0; target < n; ++target) {
    if (target == node || q(node, target) == 0.0) continue;
    // walk the assigned edges from target; a return to `node` closes a cycle
    int cursor = target;
    bool cycle = false;
    while (cursor != root && out_edge[cursor] >= 0) {
      cursor = out_edge[cursor];
      if (cursor == node) {
        cycle = true;
        break;
      }
    }
    if (cycle) continue;
    out_edge[node] = target;
    enumerate_trees(q, root, node + 1, out_edge, weight * q(node, target), total);
    out_edge[node] = -1;
  }
}

}  // namespace

Vector tree_stationary(const Matrix& q) {
  require_square(q, "tree_stationary");
  const int n = static_cast<int>(q.rows());
  if (n > 6) throw CapacityError("tree_stationary: n > 6");
  if (!is_row_stochastic(q)) {
    throw std::invalid_argument("tree_stationary: matrix is not row-stochastic");
  }
  Vector sigma(n);
  for (int root = 0; root < n; ++root) {
    std::vector<int> out_edge(n, -1);
    double total = 0.0;
    enumerate_trees(q, root, 0, out_edge, 1.0, total);
    sigma[root] = total;
  }
  const double sum = sigma.sum();
  if (!(sum > 0.0)) throw NumericalError("tree_stationary: zero total tree weight");
  return sigma / sum;
}

Vector certify_multiplicative(const Matrix& q, const Matrix& q_prime) {
  require_square(q, "certify_multiplicative");
  if (q.rows() != q_prime.rows() || q.cols() != q_prime.cols()) {
    throw std::invalid_argument("certify_multiplicative: dimension mismatch");
  }
  const int n = static_cast<int>(q.rows());
  Vector etas = Vector::Zero(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (q_prime(i, j) == 0.0) {
        if (q(i, j) != 0.0) {
          throw CertificateError("certify_multiplicative: q' has a zero where q does not");
        }
        continue;
      }
      etas[i] = std::max(etas[i], std::abs(q(i, j) / q_prime(i, j) - 1.0));
    }
  }
  return etas;
}

std::pair<double, double> perturbation_gap(const Matrix& q, const Matrix& q_prime) {
  const Vector p = stationary(q);
  const Vector p_prime = stationary(q_prime);
  const Vector etas = certify_multiplicative(q, q_prime);
  return {l1_distance(p, p_prime), 8.0 * etas.sum()};
}

}  // namespace nrl
