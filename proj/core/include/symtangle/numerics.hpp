#pragma once

#include <cstdint>
#include <functional>

#include <Eigen/Dense>

#include "symtangle/errors.hpp"

namespace symtangle::num {

// min ||A x - b||^2 subject to x >= 0 (Lawson-Hanson active set).
Eigen::VectorXd nnls(const Eigen::MatrixXd& A, const Eigen::VectorXd& b);

// min ||Q x - b||^2 subject to E x = f and x >= 0.  Throws Infeasible when
// the constraint set is empty (within `feas_tol`).  E may have zero rows.
Eigen::VectorXd constrained_lsq_nonneg(const Eigen::MatrixXd& Q, const Eigen::VectorXd& b,
                                       const Eigen::MatrixXd& E, const Eigen::VectorXd& f,
                                       double feas_tol = 1e-9);

// Distance from x to the convex hull of the columns of V, together with the
// optimal barycentric weights.
struct SimplexFit {
  Eigen::VectorXd lambda;
  double dist = 0.0;
};
SimplexFit simplex_fit(const Eigen::MatrixXd& V, const Eigen::VectorXd& x);

// Derivative-free minimization (Nelder-Mead downhill simplex).
struct NelderMeadResult {
  Eigen::VectorXd x;
  double value = 0.0;
  int evals = 0;
};
NelderMeadResult nelder_mead(const std::function<double(const Eigen::VectorXd&)>& fn,
                             const Eigen::VectorXd& x0, double step, int max_iter,
                             double ftol = 1e-12);

// First-order minimization with the Adam update rule.  `fn` returns the value
// and writes the gradient.
struct AdamOptions {
  double lr = 0.05;
  int iters = 2000;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};
Eigen::VectorXd adam(const std::function<double(const Eigen::VectorXd&, Eigen::VectorXd&)>& fn,
                     Eigen::VectorXd x, const AdamOptions& opt);

// Minimization of a convex function over the probability simplex by
// exponentiated-gradient (entropic mirror descent) iterations.
struct SimplexMinOptions {
  double step = 0.5;
  int iters = 20000;
  double grad_tol = 1e-10;  // stop when the Frank-Wolfe gap drops below this
};
struct SimplexMinResult {
  Eigen::VectorXd weights;
  double value = 0.0;
  double gap = 0.0;  // final Frank-Wolfe optimality gap
  int iters = 0;
};
SimplexMinResult minimize_on_simplex(
    int n, const std::function<double(const Eigen::VectorXd&, Eigen::VectorXd&)>& fn,
    const SimplexMinOptions& opt);

// Deterministically seeded engine for reproducible sweeps: mixes a base seed
// with a stream index.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index);

}  // namespace symtangle::num
