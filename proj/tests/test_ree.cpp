#include "doctest.h"

#include <cmath>
#include <random>

#include <symtangle/entropy.hpp>
#include <symtangle/errors.hpp>
#include <symtangle/geometry.hpp>
#include <symtangle/groups.hpp>
#include <symtangle/ree.hpp>

using namespace symtangle;
using Eigen::Vector4d;
using Eigen::VectorXd;

namespace {

VectorXd coords1(double x) { return VectorXd::Constant(1, x); }

VectorXd weights4(double a, double b, double c, double d) {
  VectorXd w(4);
  w << a, b, c, d;
  return w;
}

DensityMatrix state_from_weights(const CommutantBasis& basis, const VectorXd& w) {
  Operator acc = (w(0) / basis.minimal_projections[0].trace().real()) *
                 basis.minimal_projections[0];
  for (int i = 1; i < w.size(); ++i) {
    acc = acc + (w(i) / basis.minimal_projections[i].trace().real()) *
                    basis.minimal_projections[i];
  }
  return DensityMatrix(acc);
}

}  // namespace

TEST_CASE("closest-separable distance closed forms: frozen values") {
  CHECK(ree_werner(-1.0) == doctest::Approx(std::log(2.0)).epsilon(1e-14));
  CHECK(ree_werner(-0.5) == doctest::Approx(0.13081203594113699).epsilon(1e-14));
  CHECK(ree_werner(0.0) == 0.0);
  CHECK(ree_werner(0.7) == 0.0);
  CHECK_THROWS_AS(ree_werner(1.5), DomainError);

  for (int d = 2; d <= 5; ++d) {
    CHECK(ree_isotropic(double(d), d) == doctest::Approx(std::log(d)).epsilon(1e-12));
    CHECK(ree_isotropic(0.5, d) == 0.0);
    CHECK(ree_isotropic(1.0, d) == 0.0);
  }
  CHECK(ree_isotropic(2.0, 3) == doctest::Approx(0.23104906018664861).epsilon(1e-14));
  CHECK_THROWS_AS(ree_isotropic(3.5, 3), DomainError);
}

TEST_CASE("two-coordinate closest-separable distance by region") {
  const ReeOoResult sq = ree_oo(0.5, 0.5, 3);
  CHECK(sq.value == 0.0);
  CHECK((sq.minimizer - Eigen::Vector2d(0.5, 0.5)).cwiseAbs().maxCoeff() < 1e-12);

  const ReeOoResult left = ree_oo(-0.5, 0.3, 3);
  CHECK(left.value == doctest::Approx(ree_werner(-0.5)).epsilon(1e-12));
  CHECK(left.minimizer(0) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(left.minimizer(1) == doctest::Approx(0.6).epsilon(1e-12));

  const ReeOoResult top = ree_oo(0.5, 2.0, 3);
  CHECK(top.value == doctest::Approx(ree_isotropic(2.0, 3)).epsilon(1e-12));
  CHECK((top.minimizer - Eigen::Vector2d(0.0, 1.0)).cwiseAbs().maxCoeff() < 1e-12);

  // Upper-left region: frozen regression value.
  const ReeOoResult mid = ree_oo(-0.5, 0.7, 3);
  CHECK(mid.value == doctest::Approx(0.1824982592788516).epsilon(1e-12));
  CHECK((mid.minimizer - Eigen::Vector2d(0.0, 1.0)).cwiseAbs().maxCoeff() < 1e-12);

  CHECK_THROWS_AS(ree_oo(-0.5, 2.0, 3), OutsideStateSpace);

  // The minimizer is always separable and never beats the reported value.
  const Region sep = separable_region(GroupSpec::oo(3));
  for (const auto& r : {sq, left, top, mid}) {
    CHECK(region_membership(sep, VectorXd(r.minimizer), 1e-9));
  }
}

TEST_CASE("projection-weight states validate their distributions") {
  const GroupSpec g = GroupSpec::uu(3);
  CHECK_THROWS_AS(AbelianState(g, weights4(1.2, -0.2, 0.0, 0.0).head(2)), InvalidDistribution);
  CHECK_THROWS_AS(AbelianState(g, weights4(0.3, 0.3, 0.0, 0.0).head(2)), InvalidDistribution);

  const DensityMatrix rho = state_from_coords(g, coords1(-0.2));
  const AbelianState st = AbelianState::from_density(g, rho);
  REQUIRE(st.weights().size() == 2);
  CHECK(st.weights()(0) == doctest::Approx(0.4).epsilon(1e-12));  // symmetric block
  CHECK(st.weights()(1) == doctest::Approx(0.6).epsilon(1e-12));  // antisymmetric block

  const DensityMatrix mixed((1.0 / 9.0) * Operator::identity(Dims{3, 3}));
  CHECK_THROWS_AS(AbelianState::from_density(GroupSpec::weyl(3), mixed), NonAbelianUnsupported);
}

TEST_CASE("weight-space relative entropy equals the matrix relative entropy") {
  std::mt19937_64 rng(29);
  std::uniform_real_distribution<double> uni(0.05, 1.0);
  for (const GroupSpec& g :
       {GroupSpec::uu(3), GroupSpec::uubar(3), GroupSpec::oo(3), GroupSpec::bell()}) {
    const CommutantBasis basis = commutant_basis(g);
    const int k = static_cast<int>(basis.minimal_projections.size());
    for (int trial = 0; trial < 4; ++trial) {
      VectorXd p(k), q(k);
      for (int i = 0; i < k; ++i) {
        p(i) = uni(rng);
        q(i) = uni(rng);
      }
      p /= p.sum();
      q /= q.sum();
      const double from_weights = relative_entropy_abelian(AbelianState(g, p), AbelianState(g, q));
      const double from_matrices =
          relative_entropy(state_from_weights(basis, p), state_from_weights(basis, q));
      CHECK(from_weights == doctest::Approx(from_matrices).epsilon(1e-9));
    }
  }

  const AbelianState wa(GroupSpec::uu(3), weights4(0.4, 0.6, 0, 0).head(2));
  const AbelianState wb(GroupSpec::uubar(3), weights4(0.4, 0.6, 0, 0).head(2));
  CHECK_THROWS_AS(relative_entropy_abelian(wa, wb), GroupMismatch);

  // Support mismatch diverges; bits rescale by 1/log 2.
  const AbelianState pure(GroupSpec::uu(2), weights4(1, 0, 0, 0).head(2));
  const AbelianState anti(GroupSpec::uu(2), weights4(0, 1, 0, 0).head(2));
  CHECK(std::isinf(relative_entropy_abelian(pure, anti)));
  const AbelianState half(GroupSpec::uu(2), weights4(0.5, 0.5, 0, 0).head(2));
  CHECK(relative_entropy_abelian(pure, half, LogBase::bits) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("separable minimization reproduces the closed forms on a grid") {
  const GroupSpec uu = GroupSpec::uu(3);
  const Region sep_uu = separable_region(uu);
  for (int i = 0; i <= 10; ++i) {
    const double f = -1.0 + 2.0 * i / 10.0;
    const ReeResult r = ree_numeric(uu, coords1(f), sep_uu);
    CHECK(std::abs(r.value - ree_werner(f)) < 1e-6);
    CHECK(region_membership(sep_uu, r.minimizer, 1e-6));
    if (f < 0.0) {
      CHECK(r.endpoint_verified);
      CHECK(std::abs(r.minimizer(0)) < 1e-9);
    }
  }

  const GroupSpec ub = GroupSpec::uubar(4);
  const Region sep_ub = separable_region(ub);
  for (int i = 0; i <= 10; ++i) {
    const double fhat = 4.0 * i / 10.0;
    const ReeResult r = ree_numeric(ub, coords1(fhat), sep_ub);
    CHECK(std::abs(r.value - ree_isotropic(fhat, 4)) < 1e-6);
    if (fhat > 1.0) {
      CHECK(r.endpoint_verified);
      CHECK(std::abs(r.minimizer(0) - 1.0) < 1e-9);
    }
  }

  CHECK_THROWS_AS(ree_numeric(uu, coords1(1.5), sep_uu), OutsideStateSpace);
  CHECK_THROWS_AS(ree_numeric(GroupSpec::weyl(3), coords1(0.5), sep_uu), NonAbelianUnsupported);
}

TEST_CASE("Bell-diagonal closest-separable distance matches the entropy form") {
  const GroupSpec g = GroupSpec::bell();
  const CommutantBasis basis = commutant_basis(g);
  const Region sep = separable_region(g);
  const auto coords_of = [&](const VectorXd& w) {
    return invariant_coords(basis, state_from_weights(basis, w).op());
  };

  for (const VectorXd& w : {weights4(0.7, 0.1, 0.1, 0.1), weights4(0.55, 0.25, 0.1, 0.1),
                            weights4(0.9, 0.1, 0.0, 0.0), weights4(0.62, 0.2, 0.1, 0.08)}) {
    const double lmax = w.maxCoeff();
    const double expected = std::log(2.0) - binary_entropy(lmax);
    const ReeResult r = ree_numeric(g, coords_of(w), sep);
    CHECK(std::abs(r.value - expected) < 1e-9);
    CHECK(region_membership(sep, r.minimizer, 1e-8));
  }

  // Inside the octahedron the distance vanishes.
  const ReeResult zero = ree_numeric(g, coords_of(weights4(0.4, 0.3, 0.2, 0.1)), sep);
  CHECK(std::abs(zero.value) < 1e-9);
}

TEST_CASE("restricting the minimization to invariant states is harmless") {
  // Candidate separable states on the invariant line never beat the closed
  // form, and the closed form is attained on that line.
  for (double f : {-1.0, -0.7, -0.3}) {
    const DensityMatrix rho = state_from_coords(GroupSpec::uu(3), coords1(f));
    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i <= 40; ++i) {
      const DensityMatrix sigma = state_from_coords(GroupSpec::uu(3), coords1(i / 40.0));
      best = std::min(best, relative_entropy(rho, sigma));
    }
    CHECK(best >= ree_werner(f) - 1e-9);
    CHECK(best <= ree_werner(f) + 1e-3);  // 41-point grid resolution
  }
}

TEST_CASE("pair-state distance falls short of twice the single-copy distance") {
  const CounterexampleReport r3 = additivity_counterexample(3);
  CHECK(r3.d == 3);
  CHECK(r3.e_single == doctest::Approx(std::log(2.0)).epsilon(1e-12));
  CHECK(r3.e_pair_expected == doctest::Approx(2.0 * std::log(2.0)).epsilon(1e-12));
  CHECK(r3.e_pair_actual == doctest::Approx(std::log(3.0)).epsilon(1e-9));
  CHECK(r3.violation == doctest::Approx(std::log(4.0 / 3.0)).epsilon(1e-9));
  CHECK((r3.minimizer_coords - Eigen::Vector3d(1.0 / 3.0, 1.0 / 3.0, 1.0)).cwiseAbs().maxCoeff() <
        1e-9);

  const CounterexampleReport r2 = additivity_counterexample(2);
  CHECK(r2.e_pair_actual == doctest::Approx(2.0 * std::log(2.0)).epsilon(1e-12));
  CHECK(std::abs(r2.violation) < 1e-9);
  CHECK((r2.minimizer_coords - Eigen::Vector3d(0.25, 0.25, 0.5)).cwiseAbs().maxCoeff() < 1e-9);

  // The analytic pair value log(2d / (d - 1)) for larger d.
  const CounterexampleReport r10 = additivity_counterexample(10);
  CHECK(r10.e_pair_actual == doctest::Approx(std::log(20.0 / 9.0)).epsilon(1e-9));
  const CounterexampleReport r100 = additivity_counterexample(100);
  CHECK(r100.e_pair_actual == doctest::Approx(0.70319751641344674).epsilon(1e-9));
  CHECK(r100.violation > r10.violation);
  CHECK(r10.violation > r3.violation);

  CHECK_THROWS_AS(additivity_counterexample(1), DomainError);
}
