#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace nrl {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// A mixed strategy is a probability vector over n actions.
using MixedStrategy = Eigen::VectorXd;

// A loss vector holds the expected loss of each pure action, entries in [0,1]
// when expressed in unit scale.
using LossVector = Eigen::VectorXd;

constexpr double kDistributionTol = 1e-12;
constexpr double kLossRangeTol = 1e-9;

// Instance exceeds the desk-scale limits (exhaustive enumeration, dense
// tensors, full swap-expert sets).
struct CapacityError : std::runtime_error {
  explicit CapacityError(const std::string& what) : std::runtime_error(what) {}
};

// A numerical procedure failed its residual / conditioning check.
struct NumericalError : std::runtime_error {
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

// No finite multiplicative certificate exists for the given pair of chains.
struct CertificateError : std::runtime_error {
  explicit CertificateError(const std::string& what) : std::runtime_error(what) {}
};

inline bool is_distribution(const Vector& p, double tol = kDistributionTol) {
  if (p.size() == 0) return false;
  if ((p.array() < 0.0).any()) return false;
  return std::abs(p.sum() - 1.0) <= tol;
}

inline void require_distribution(const Vector& p, const char* who) {
  if (!is_distribution(p)) {
    throw std::invalid_argument(std::string(who) + ": not a probability distribution");
  }
}

inline double l1_distance(const Vector& a, const Vector& b) {
  return (a - b).cwiseAbs().sum();
}

inline double linf_distance(const Vector& a, const Vector& b) {
  return (a - b).cwiseAbs().maxCoeff();
}

}  // namespace nrl
