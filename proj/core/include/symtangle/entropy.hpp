#pragma once

#include <Eigen/Dense>

#include "symtangle/operator.hpp"

namespace symtangle {

// Entropies are computed in nats internally; `bits` divides by ln 2 on output.
enum class LogBase { nats, bits };

// Multiplicative conversion factor from nats to the requested base.
double base_factor(LogBase base);

// eta(t) = -t ln t, continuously extended by eta(0) = 0.
double eta(double t);

// Binary (Shannon) entropy of {p, 1-p}.  DomainError outside [0, 1].
double binary_entropy(double p, LogBase base = LogBase::nats);

// Shannon entropy of a probability vector (entries clamped at zero).
double shannon_entropy(const Eigen::VectorXd& p, LogBase base = LogBase::nats);

// Eigenvalues in ascending order.  NotHermitian if the input is not Hermitian
// within 1e-10 (max-abs of A - A^dagger).
Eigen::VectorXd hermitian_spectrum(const Operator& a);

struct HermitianEigen {
  Eigen::VectorXd values;    // ascending
  Eigen::MatrixXcd vectors;  // columns
};
HermitianEigen hermitian_eigen(const Operator& a);

// Von Neumann entropy S(rho) = -tr(rho ln rho).
double von_neumann_entropy(const DensityMatrix& rho, LogBase base = LogBase::nats);

// Quantum relative entropy S(rho||sigma) = tr(rho ln rho - rho ln sigma).
// Returns +infinity when rho has support outside the support of sigma
// (support cut at eigenvalues <= 1e-12, leakage threshold 1e-12).
double relative_entropy(const DensityMatrix& rho, const DensityMatrix& sigma,
                        LogBase base = LogBase::nats);

// Entanglement of a pure bipartite state: entropy of either reduced state,
// i.e. Shannon entropy of the squared Schmidt coefficients.
double schmidt_entanglement(const PureStateVector& psi, LogBase base = LogBase::nats);

}  // namespace symtangle
