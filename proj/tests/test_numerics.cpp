#include "doctest.h"

#include <cmath>

#include <symtangle/errors.hpp>
#include <symtangle/numerics.hpp>

using namespace symtangle;
using Eigen::MatrixXd;
using Eigen::VectorXd;

TEST_CASE("nnls clips the unconstrained optimum at zero") {
  MatrixXd a(2, 2);
  a << 1, 0, 0, 1;
  VectorXd b(2);
  b << 2.0, -3.0;
  const VectorXd x = num::nnls(a, b);
  CHECK(x(0) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(x(1) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("nnls solves a random overdetermined system with known solution") {
  std::srand(7);
  MatrixXd a = MatrixXd::Random(8, 3).cwiseAbs();
  VectorXd truth(3);
  truth << 0.5, 0.0, 1.5;
  const VectorXd x = num::nnls(a, a * truth);
  CHECK((x - truth).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("constrained nonnegative least squares meets equality constraints") {
  // min ||x - b||^2 over the probability simplex in R^3.
  const MatrixXd q = MatrixXd::Identity(3, 3);
  VectorXd b(3);
  b << 0.8, 0.5, -0.4;
  MatrixXd e(1, 3);
  e.setOnes();
  VectorXd f(1);
  f << 1.0;
  const VectorXd x = num::constrained_lsq_nonneg(q, b, e, f);
  CHECK(x.sum() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(x.minCoeff() >= -1e-14);
  CHECK(x(2) == doctest::Approx(0.0).epsilon(1e-12));  // clipped coordinate

  // Infeasible: nonnegative combination cannot make a negative sum.
  VectorXd fbad(1);
  fbad << -1.0;
  CHECK_THROWS_AS(num::constrained_lsq_nonneg(q, b, e, fbad), Infeasible);
}

TEST_CASE("simplex_fit detects interior and exterior points") {
  MatrixXd v(2, 3);  // triangle (0,0), (1,0), (0,1)
  v << 0, 1, 0,
       0, 0, 1;
  VectorXd inside(2);
  inside << 0.25, 0.25;
  auto fit = num::simplex_fit(v, inside);
  CHECK(fit.dist < 1e-12);
  CHECK(fit.lambda.sum() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK((v * fit.lambda - inside).norm() < 1e-12);

  VectorXd outside(2);
  outside << 1.0, 1.0;
  fit = num::simplex_fit(v, outside);
  CHECK(fit.dist == doctest::Approx(std::sqrt(0.5)).epsilon(1e-10));
}

TEST_CASE("nelder_mead minimizes a shifted quadratic") {
  const auto fn = [](const VectorXd& x) {
    return (x(0) - 1.0) * (x(0) - 1.0) + 2.0 * (x(1) + 0.5) * (x(1) + 0.5);
  };
  const auto r = num::nelder_mead(fn, VectorXd::Zero(2), 0.5, 500);
  CHECK(r.x(0) == doctest::Approx(1.0).epsilon(1e-5));
  CHECK(r.x(1) == doctest::Approx(-0.5).epsilon(1e-5));
  CHECK(r.value == doctest::Approx(0.0).epsilon(1e-8));
}

TEST_CASE("adam minimizes a quadratic with analytic gradient") {
  const auto fn = [](const VectorXd& x, VectorXd& g) {
    g = 2.0 * x;
    g(0) -= 6.0;
    return x.squaredNorm() - 6.0 * x(0) + 9.0;
  };
  num::AdamOptions opt;
  opt.iters = 4000;
  opt.lr = 0.05;
  const VectorXd x = num::adam(fn, VectorXd::Zero(3), opt);
  CHECK(x(0) == doctest::Approx(3.0).epsilon(1e-4));
  CHECK(std::abs(x(1)) < 1e-6);
}

TEST_CASE("minimize_on_simplex solves a linear program to a vertex") {
  VectorXd c(4);
  c << 3.0, 1.0, 2.0, 5.0;
  const auto fn = [&](const VectorXd& w, VectorXd& g) {
    g = c;
    return c.dot(w);
  };
  const auto r = num::minimize_on_simplex(4, fn, {});
  CHECK(r.value == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(r.weights(1) == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(r.gap < 1e-8);
}

TEST_CASE("minimize_on_simplex solves an entropic objective with interior optimum") {
  // min sum w_i log(w_i / q_i) has the closed-form solution w = q.
  VectorXd q(3);
  q << 0.5, 0.3, 0.2;
  const auto fn = [&](const VectorXd& w, VectorXd& g) {
    double v = 0.0;
    g.resize(3);
    for (int i = 0; i < 3; ++i) {
      const double wi = std::max(w(i), 1e-300);
      v += wi * std::log(wi / q(i));
      g(i) = std::log(wi / q(i)) + 1.0;
    }
    return v;
  };
  const auto r = num::minimize_on_simplex(3, fn, {});
  CHECK((r.weights - q).cwiseAbs().maxCoeff() < 1e-8);
  CHECK(r.value == doctest::Approx(0.0).epsilon(1e-10));
}

TEST_CASE("mix_seed separates streams and is deterministic") {
  CHECK(num::mix_seed(7, 0) == num::mix_seed(7, 0));
  CHECK(num::mix_seed(7, 0) != num::mix_seed(7, 1));
  CHECK(num::mix_seed(7, 0) != num::mix_seed(8, 0));
}
