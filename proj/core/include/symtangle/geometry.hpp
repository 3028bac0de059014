#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "symtangle/groups.hpp"

namespace symtangle {

// A sampled scalar function on a strictly increasing grid.
struct CurveSamples {
  Eigen::VectorXd xs;
  Eigen::VectorXd ys;
  std::string label;
};

// Interval [x1, x2] on which a convex envelope lies strictly below its curve.
struct FlatPiece {
  double x1 = 0.0;
  double x2 = 0.0;
};

struct EnvelopeResult {
  CurveSamples envelope;              // greatest convex minorant on the same grid
  std::vector<FlatPiece> flat_pieces; // maximal intervals where envelope < curve
};

// Greatest convex function below the sampled curve (lower convex hull of the
// sample points, evaluated on the same grid).  Throws UnsortedGrid unless xs
// is strictly increasing.
EnvelopeResult lower_convex_envelope(const CurveSamples& curve);

// A subset of invariant-coordinate space.
struct Region {
  enum class Kind { interval, polytope, sampled };

  Kind kind = Kind::interval;
  double lo = 0.0, hi = 0.0;               // interval bounds (1-d regions)
  std::vector<Eigen::VectorXd> vertices;   // polytope vertices or sample cloud
  std::vector<std::string> labels;         // coordinate labels
  bool exact = true;                       // sampled regions are inner bounds

  static Region interval(double lo, double hi, std::vector<std::string> labels,
                         bool exact = true);
  static Region polytope(std::vector<Eigen::VectorXd> vertices,
                         std::vector<std::string> labels, bool exact = true);
  static Region sampled(std::vector<Eigen::VectorXd> points, std::vector<std::string> labels);
};

// Membership in the region (for sampled regions: membership in the convex
// hull of the samples, an inner approximation).
bool region_membership(const Region& r, const Eigen::VectorXd& x, double tol = 1e-9);

// Coordinates of all invariant states: the simplex spanned by the normalized
// minimal projections.  Unsupported when the commutant is not abelian.
Region invariant_state_space(const GroupSpec& g);

// Image of the partner-group state space under partial transposition,
// expressed in this group's coordinates.  May extend beyond the state space.
Region ppt_image(const GroupSpec& g);

// Invariant states with positive partial transpose: the intersection of the
// state space with ppt_image.
Region ppt_region(const GroupSpec& g);

// Invariant states that are convex mixtures of product states.  Known in
// closed form for several families; otherwise a sampled inner approximation
// built from `sample_budget` random product states.
Region separable_region(const GroupSpec& g, int sample_budget = 2000,
                        std::uint64_t seed = 20020426);

// Invariant coordinates of the product state |phi><phi| (x) |psi><psi|.
Eigen::VectorXd product_expectations(const GroupSpec& g, const Eigen::VectorXcd& phi,
                                     const Eigen::VectorXcd& psi);

// Subset of `pts` that are extreme points of their convex hull.
std::vector<Eigen::VectorXd> extreme_points(const std::vector<Eigen::VectorXd>& pts,
                                            double tol = 1e-9);

// Vertices of the intersection of two simplices with nonempty interior in
// R^n (n <= 3), each given by n+1 affinely independent vertices.
std::vector<Eigen::VectorXd> simplex_intersection(const std::vector<Eigen::VectorXd>& a,
                                                  const std::vector<Eigen::VectorXd>& b,
                                                  double tol = 1e-9);

}  // namespace symtangle
