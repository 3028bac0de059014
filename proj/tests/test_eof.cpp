#include "doctest.h"

#include <cmath>
#include <vector>

#include <symtangle/entropy.hpp>
#include <symtangle/eof.hpp>
#include <symtangle/errors.hpp>
#include <symtangle/groups.hpp>

using namespace symtangle;
using Eigen::Vector4d;
using Eigen::VectorXd;

namespace {

VectorXd coords1(double x) { return VectorXd::Constant(1, x); }

DensityMatrix bell_state_from_weights(const Eigen::Vector4d& w) {
  const CommutantBasis basis = commutant_basis(GroupSpec::bell());
  Operator acc = w(0) * basis.minimal_projections[0];
  for (int i = 1; i < 4; ++i) acc = acc + w(i) * basis.minimal_projections[i];
  return DensityMatrix(acc);
}

// Ensemble bookkeeping: weights sum to one, weighted pure-state entanglement
// reproduces the value, weighted coordinates reproduce the target state.
void check_witness(const GroupSpec& g, const VectorXd& target, const EofResult& r) {
  REQUIRE_FALSE(r.decomposition.empty());
  const CommutantBasis basis = commutant_basis(g);
  double wsum = 0.0, esum = 0.0;
  VectorXd csum = VectorXd::Zero(target.size());
  for (const auto& [w, psi] : r.decomposition) {
    CHECK(w > 0.0);
    wsum += w;
    esum += w * schmidt_entanglement(psi);
    csum += w * invariant_coords(basis, psi.projector());
  }
  CHECK(std::abs(wsum - 1.0) < 1e-10);
  CHECK(std::abs(esum - r.value) < 1e-8);
  CHECK((csum - target).cwiseAbs().maxCoeff() < 1e-8);
}

}  // namespace

TEST_CASE("flip-symmetric pure-state minimum: frozen values and range checks") {
  CHECK(epsilon_werner(-1.0) == doctest::Approx(0.69314718055994529).epsilon(1e-14));
  CHECK(epsilon_werner(-0.5) == doctest::Approx(0.24577536666847116).epsilon(1e-14));
  CHECK(epsilon_werner(0.0) == 0.0);
  CHECK(epsilon_werner(0.7) == 0.0);
  CHECK_THROWS_AS(epsilon_werner(1.5), DomainError);
  CHECK_THROWS_AS(epsilon_werner(-1.0 - 1e-6), DomainError);
}

TEST_CASE("isotropic pure-state minimum: frozen values, zero plateau, concavity") {
  CHECK(epsilon_isotropic(2.0, 3) == doctest::Approx(0.4258484492385809).epsilon(1e-14));
  CHECK(epsilon_isotropic(0.7, 4) == 0.0);
  CHECK(epsilon_isotropic(1.0, 3) == 0.0);
  CHECK(epsilon_isotropic(3.0, 3) == doctest::Approx(std::log(3.0)).epsilon(1e-14));
  CHECK_THROWS_AS(epsilon_isotropic(-0.1, 3), DomainError);
  CHECK_THROWS_AS(epsilon_isotropic(3.1, 3), DomainError);

  // The curve bends the wrong way near fhat = d once d >= 3.
  const double second =
      epsilon_isotropic(2.9, 3) + epsilon_isotropic(3.0, 3) - 2.0 * epsilon_isotropic(2.95, 3);
  CHECK(second < 0.0);
}

TEST_CASE("flip-symmetric formation value is convex and dimension independent") {
  const int n = 41;
  std::vector<double> e(n);
  for (int i = 0; i < n; ++i) e[i] = epsilon_werner(-1.0 + i / double(n - 1));
  for (int i = 1; i + 1 < n; ++i) {
    CHECK(e[i - 1] + e[i + 1] - 2.0 * e[i] >= -1e-10);
  }

  const double ref = eof_werner(-0.6, 2).value;
  for (int d = 3; d <= 5; ++d) {
    CHECK(eof_werner(-0.6, d).value == doctest::Approx(ref).epsilon(1e-14));
  }
  CHECK(eof_werner(-0.8, 3).value == doctest::Approx(0.50040242353818798).epsilon(1e-14));
  CHECK(eof_werner(0.4, 3).value == 0.0);
  CHECK(eof_werner(-0.8, 3).method == EofMethod::closed_form);
}

TEST_CASE("formation ensembles are valid witnesses") {
  check_witness(GroupSpec::uu(3), coords1(-0.8), eof_werner(-0.8, 3));
  check_witness(GroupSpec::uu(2), coords1(0.4), eof_werner(0.4, 2));
  check_witness(GroupSpec::uubar(3), coords1(2.0), eof_isotropic(2.0, 3));
  check_witness(GroupSpec::uubar(3), coords1(2.8), eof_isotropic(2.8, 3));
  check_witness(GroupSpec::uubar(2), coords1(1.6), eof_isotropic(1.6, 2));
}

TEST_CASE("isotropic formation: boundary values and the d=3 flat piece") {
  for (int d = 2; d <= 5; ++d) {
    CHECK(std::abs(eof_isotropic(1.0, d).value) < 1e-12);
    CHECK(eof_isotropic(double(d), d).value == doctest::Approx(std::log(d)).epsilon(1e-12));
  }
  CHECK(eof_isotropic(2.0, 2).value == doctest::Approx(std::log(2.0)).epsilon(1e-12));

  const EnvelopeResult env = isotropic_envelope(3);
  REQUIRE(env.flat_pieces.size() == 1);
  CHECK(env.flat_pieces[0].x1 == 2.666015625);  // grid point 910 of 1025 on [0, 3]
  CHECK(env.flat_pieces[0].x2 == 3.0);

  const EofResult inside = eof_isotropic(2.8, 3);
  CHECK(inside.method == EofMethod::envelope);
  REQUIRE(inside.flat_piece.has_value());
  CHECK(inside.flat_piece->x1 == 2.666015625);
  CHECK(inside.flat_piece->x2 == 3.0);
  CHECK(inside.value == doctest::Approx(0.95998285823391627).epsilon(1e-12));
  // Linear interpolation between the endpoints of the flat piece.
  const double lam = (3.0 - 2.8) / (3.0 - 2.666015625);
  const double interp = lam * epsilon_isotropic(2.666015625, 3) + (1 - lam) * std::log(3.0);
  CHECK(inside.value == doctest::Approx(interp).epsilon(1e-14));

  const EofResult outside = eof_isotropic(2.0, 3);
  CHECK(outside.method == EofMethod::closed_form);
  CHECK_FALSE(outside.flat_piece.has_value());
  CHECK(outside.value == doctest::Approx(0.4258484492385809).epsilon(1e-12));
}

TEST_CASE("two-coordinate formation dispatches by region") {
  // Separable square: zero with an explicit product ensemble.
  const EofResult sq = eof_oo(0.3, 0.6, 3);
  CHECK(sq.value == 0.0);
  VectorXd target(2);
  target << 0.3, 0.6;
  check_witness(GroupSpec::oo(3), target, sq);

  // Left triangle: value depends on f alone.
  CHECK(eof_oo(-0.5, 0.3, 3).value ==
        doctest::Approx(epsilon_werner(-0.5)).epsilon(1e-14));
  CHECK(eof_oo(-1.0, 0.0, 3).value == doctest::Approx(std::log(2.0)).epsilon(1e-14));

  // Top triangle: value depends on fhat alone.
  CHECK(eof_oo(0.8, 2.0, 3).value ==
        doctest::Approx(eof_isotropic(2.0, 3).value).epsilon(1e-14));
  CHECK(eof_oo(1.0, 3.0, 3).value == doctest::Approx(std::log(3.0)).epsilon(1e-12));

  // Central triangle: no formula.
  CHECK_THROWS_AS(eof_oo(-0.5, 0.7, 3), UnsupportedRegion);
  CHECK_THROWS_AS(eof_oo(0.05, 1.2, 3), UnsupportedRegion);

  // Outside the state triangle entirely.
  CHECK_THROWS_AS(eof_oo(-0.5, 2.0, 3), OutsideStateSpace);
  CHECK_THROWS_AS(eof_oo(1.2, 0.5, 3), OutsideStateSpace);
}

TEST_CASE("Bell-diagonal formation: closed form and exact zeros") {
  CHECK(eof_bell_diagonal(Vector4d(1, 0, 0, 0)).value ==
        doctest::Approx(std::log(2.0)).epsilon(1e-14));
  CHECK(eof_bell_diagonal(Vector4d(0.25, 0.25, 0.25, 0.25)).value == 0.0);
  CHECK(eof_bell_diagonal(Vector4d(0.5, 0.3, 0.1, 0.1)).value == 0.0);
  CHECK(eof_bell_diagonal(Vector4d(0.6, 0.2, 0.1, 0.1)).value ==
        doctest::Approx(0.056469948745477512).epsilon(1e-12));

  // Maximal weight in any slot, not just the first.
  CHECK(eof_bell_diagonal(Vector4d(0.1, 0.1, 0.2, 0.6)).value ==
        doctest::Approx(0.056469948745477512).epsilon(1e-12));

  CHECK_THROWS_AS(eof_bell_diagonal(Vector4d(0.5, 0.5, 0.5, -0.5)), InvalidDistribution);
  CHECK_THROWS_AS(eof_bell_diagonal(Vector4d(0.3, 0.3, 0.3, 0.3)), InvalidDistribution);
}

TEST_CASE("Bell-diagonal ensembles are valid witnesses") {
  const GroupSpec g = GroupSpec::bell();
  for (const Vector4d& w : {Vector4d(0.6, 0.2, 0.1, 0.1), Vector4d(0.7, 0.1, 0.1, 0.1),
                            Vector4d(0.4, 0.3, 0.2, 0.1), Vector4d(1.0, 0.0, 0.0, 0.0)}) {
    const EofResult r = eof_bell_diagonal(w);
    const VectorXd target = invariant_coords(g, bell_state_from_weights(w));
    check_witness(g, target, r);
  }
}

TEST_CASE("constrained pure-state search approaches the closed forms") {
  PureSearchOptions opt;
  opt.restarts = 48;
  opt.iters = 700;
  const double ew = epsilon_numeric(GroupSpec::uu(2), coords1(-1.0), opt).value;
  CHECK(std::abs(ew - std::log(2.0)) < 1e-2);
  CHECK(ew >= std::log(2.0) - 1e-6);  // upper bound up to feasibility slack

  const double ei = epsilon_numeric(GroupSpec::uubar(3), coords1(2.0), opt).value;
  CHECK(std::abs(ei - epsilon_isotropic(2.0, 3)) < 1e-2);

  CHECK_THROWS_AS(epsilon_numeric(GroupSpec::uu(2), coords1(1.5), opt), OutsideStateSpace);
  VectorXd two(2);
  two << 0.0, 0.0;
  CHECK_THROWS_AS(epsilon_numeric(GroupSpec::uu(2), two, opt), DimensionMismatch);
}

TEST_CASE("ensemble search brackets the closed forms from above") {
  const auto gap = [](const GroupSpec& g, const VectorXd& c, double closed, RoofSearchOptions o) {
    const EofResult r = eof_bruteforce(g, c, o);
    if (!r.decomposition.empty()) check_witness(g, c, r);
    return r.value - closed;
  };

  RoofSearchOptions opt;  // defaults
  CHECK(gap(GroupSpec::uu(2), coords1(-1.0), std::log(2.0), opt) < 1e-2);
  CHECK(gap(GroupSpec::uu(2), coords1(-1.0), std::log(2.0), opt) > -1e-3);
  CHECK(std::abs(eof_bruteforce(GroupSpec::uu(3), coords1(0.0), opt).value) < 1e-2);
  CHECK(std::abs(gap(GroupSpec::uubar(3), coords1(2.0), eof_isotropic(2.0, 3).value, opt)) < 1e-2);

  VectorXd bellc = invariant_coords(
      GroupSpec::bell(), bell_state_from_weights(Vector4d(0.7, 0.1, 0.1, 0.1)));
  const double closed = eof_bell_diagonal(Vector4d(0.7, 0.1, 0.1, 0.1)).value;
  CHECK(std::abs(gap(GroupSpec::bell(), bellc, closed, opt)) < 1e-2);
}

TEST_CASE("ensemble search improves on average with budget") {
  const GroupSpec g = GroupSpec::uu(2);
  const VectorXd c = coords1(-0.5);
  double small_sum = 0.0, large_sum = 0.0;
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    RoofSearchOptions lo;
    lo.iters = 300;
    lo.restarts = 1;
    lo.seed = seed;
    RoofSearchOptions hi;
    hi.iters = 3000;
    hi.restarts = 2;
    hi.seed = seed;
    small_sum += eof_bruteforce(g, c, lo).value;
    large_sum += eof_bruteforce(g, c, hi).value;
  }
  CHECK(large_sum <= small_sum + 1e-4);
  CHECK(large_sum / 3.0 >= epsilon_werner(-0.5) - 1e-3);
}

TEST_CASE("flip filtering certifies the closed form for negative flip states") {
  const DensityMatrix rho = state_from_coords(GroupSpec::uu(2), coords1(-0.5));
  const ExtensionResult res = extension_applies_werner(rho);
  CHECK(res.verdict == ExtensionResult::Verdict::yes);
  CHECK(res.applies());
  CHECK(std::abs(expectation(res.rho_tilde, flip_operator(2))) < 1e-9);

  const DensityMatrix sep = state_from_coords(GroupSpec::uu(2), coords1(0.3));
  CHECK_THROWS_AS(extension_applies_werner(sep), FlipExpectationOutOfRange);
  const DensityMatrix edge = state_from_coords(GroupSpec::uu(2), coords1(-1.0));
  CHECK_THROWS_AS(extension_applies_werner(edge), FlipExpectationOutOfRange);
}
