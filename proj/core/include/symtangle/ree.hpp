#pragma once

#include <cstdint>

#include "symtangle/entropy.hpp"
#include "symtangle/geometry.hpp"
#include "symtangle/groups.hpp"

namespace symtangle {

// An invariant state of a family with abelian commutant, reduced to its
// weights over the minimal projections (the unique convex representation).
class AbelianState {
 public:
  AbelianState(GroupSpec group, Eigen::VectorXd weights);
  static AbelianState from_density(const GroupSpec& g, const DensityMatrix& rho);

  const GroupSpec& group() const { return group_; }
  const Eigen::VectorXd& weights() const { return weights_; }

 private:
  GroupSpec group_;
  Eigen::VectorXd weights_;
};

// Relative entropy between two states of the same family, computed from the
// projection weights alone: sum_a p_a (log p_a - log q_a), with the usual
// 0 log 0 = 0 convention and +infinity on support mismatch.
double relative_entropy_abelian(const AbelianState& rho, const AbelianState& sigma,
                                LogBase base = LogBase::nats);

// Relative entropy of entanglement (nats) closed forms.
double ree_werner(double f);
double ree_isotropic(double fhat, int d);

// Flip/orthogonal-invariant states: value plus the closest separable point in
// (f, fhat) coordinates, found by the line construction toward the separable
// square's boundary edges.
struct ReeOoResult {
  double value = 0.0;
  Eigen::Vector2d minimizer;
};
ReeOoResult ree_oo(double f, double fhat, int d);

// Minimization of S(rho || sigma) over sigma in a separable region given as
// an interval or polytope in the family's invariant coordinates.  Convex in
// the vertex weights, solved by exponentiated-gradient descent with an exact
// boundary polish.
struct ReeResult {
  double value = 0.0;
  Eigen::VectorXd minimizer;      // invariant coordinates of the argmin
  bool endpoint_verified = false; // interval regions: argmin at a boundary
};
ReeResult ree_numeric(const GroupSpec& g, const Eigen::VectorXd& coords, const Region& sep,
                      int iters = 20000);

// Additivity failure of the relative entropy of entanglement for the
// extreme flip-antisymmetric state paired with itself.
struct CounterexampleReport {
  int d = 0;
  double e_single = 0.0;         // one copy
  double e_pair_expected = 0.0;  // 2 * e_single
  double e_pair_actual = 0.0;    // joint minimization over the pair family
  double violation = 0.0;        // e_pair_expected - e_pair_actual, >= 0
  Eigen::Vector3d minimizer_coords;  // (f1, f2, f12) of the closest separable state
};
CounterexampleReport additivity_counterexample(int d);

}  // namespace symtangle
