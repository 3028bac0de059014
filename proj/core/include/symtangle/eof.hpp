#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "symtangle/entropy.hpp"
#include "symtangle/geometry.hpp"
#include "symtangle/groups.hpp"

namespace symtangle {

enum class EofMethod { closed_form, envelope, oracle_upper_bound, extension };

struct WeightedPure {
  double weight;
  PureStateVector psi;
};

// Entanglement of formation of an invariant state, in nats.  When present,
// `decomposition` is an ensemble of pure states whose weighted entanglement
// equals `value` and whose weighted coordinates reproduce the input.
struct EofResult {
  double value = 0.0;
  EofMethod method = EofMethod::closed_form;
  std::vector<WeightedPure> decomposition;
  std::optional<FlatPiece> flat_piece;  // linear segment of the convex roof
};

// Minimum pure-state entanglement at fixed flip expectation f in [-1, 1].
// Zero for f >= 0.  Already convex in f, so it equals its convex hull.
double epsilon_werner(double f);

// Minimum pure-state entanglement at fixed coordinate fhat in [0, d].
// Zero for fhat <= 1; not convex near fhat = d once d >= 3.
double epsilon_isotropic(double fhat, int d);

// The curve above sampled on a uniform grid over [0, d], with its convex
// envelope and flat pieces.
EnvelopeResult isotropic_envelope(int d, int grid_points = 1025);

EofResult eof_werner(double f, int d);
EofResult eof_isotropic(double fhat, int d);

// Flip/orthogonal-invariant states with coordinates (f, fhat).  The value is
// assembled per region of the triangular state space; the central triangle
// has no known formula (UnsupportedRegion).
EofResult eof_oo(double f, double fhat, int d);

// Bell-diagonal two-qubit states given by their four Bell weights (ordered as
// the Bell family's minimal projections).
EofResult eof_bell_diagonal(const Eigen::Vector4d& weights);

// Direct minimization of pure-state entanglement under coordinate
// constraints (penalized Nelder-Mead over the unit sphere).  Throws
// Infeasible when no pure state attains the coordinates within `feas_tol`.
struct PureSearchOptions {
  int restarts = 128;
  int iters = 900;
  std::uint64_t seed = 7;
  double feas_tol = 1e-6;
};
struct EpsilonNumericResult {
  double value;
  PureStateVector psi;  // best witness found
};
EpsilonNumericResult epsilon_numeric(const GroupSpec& g, const Eigen::VectorXd& coords,
                                     const PureSearchOptions& opt = {});

// Convex-roof upper bound by direct optimization over weighted pure-state
// ensembles: a weight simplex plus unnormalized vectors renormalized per
// evaluation, constraints enforced by a staged quadratic penalty, weights
// projected exactly onto the constraint set afterwards.
struct RoofSearchOptions {
  int ensemble_size = 0;  // 0 selects (d1 d2)^2
  int iters = 3000;       // gradient steps per restart, split across stages
  int restarts = 2;
  std::uint64_t seed = 11;
};
EofResult eof_bruteforce(const GroupSpec& g, const Eigen::VectorXd& coords,
                         const RoofSearchOptions& opt = {});

// Local filtering (1 + rF) rho (1 + rF), r chosen so the filtered state has
// flip expectation zero.  If the filtered state is separable, the flip-only
// formula applies to rho itself.  Requires tr(rho F) in (-1, 0).
struct ProductSearchOptions {
  int terms = 0;  // 0 selects 4 (d1 d2)^2
  int rounds = 40;
  std::uint64_t seed = 5;
  double yes_threshold = 1e-7;
};
struct ExtensionResult {
  enum class Verdict { yes, no, unknown };
  DensityMatrix rho_tilde;
  Verdict verdict = Verdict::unknown;
  double fit_residual = 0.0;  // Frobenius residual of the product fit
  bool applies() const { return verdict == Verdict::yes; }
};
ExtensionResult extension_applies_werner(const DensityMatrix& rho,
                                         const ProductSearchOptions& opt = {});

}  // namespace symtangle
