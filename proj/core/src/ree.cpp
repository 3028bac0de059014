#include "symtangle/ree.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "symtangle/numerics.hpp"

namespace symtangle {

namespace {

constexpr double kWeightFloor = 1e-14;  // keeps mirror-descent iterates interior

Eigen::VectorXd validated_weights(Eigen::VectorXd w) {
  for (int i = 0; i < w.size(); ++i) {
    if (w(i) < -1e-12) throw InvalidDistribution("projection weights must be nonnegative");
  }
  if (std::abs(w.sum() - 1.0) > 1e-12) {
    throw InvalidDistribution("projection weights must sum to one");
  }
  return w.cwiseMax(0.0);
}

double weight_relative_entropy(const Eigen::VectorXd& p, const Eigen::VectorXd& q) {
  double v = 0.0;
  for (int a = 0; a < p.size(); ++a) {
    if (p(a) <= 1e-15) continue;
    if (q(a) <= 1e-300) return std::numeric_limits<double>::infinity();
    v += p(a) * (std::log(p(a)) - std::log(q(a)));
  }
  return v;
}

// min over mu in the simplex of sum_a p_a (log p_a - log (W mu)_a): convex,
// solved by exponentiated gradient plus an exact evaluation at the snapped
// solution and at every vertex.
struct WeightSimplexSolution {
  double value = 0.0;
  Eigen::VectorXd mu;
};

WeightSimplexSolution minimize_weight_simplex(const Eigen::MatrixXd& w_cols,
                                              const Eigen::VectorXd& p, int iters) {
  const int nv = static_cast<int>(w_cols.cols());
  const auto fn = [&](const Eigen::VectorXd& mu, Eigen::VectorXd& grad) {
    const Eigen::VectorXd sigma = (w_cols * mu).cwiseMax(kWeightFloor);
    double v = 0.0;
    Eigen::VectorXd q = Eigen::VectorXd::Zero(p.size());
    for (int a = 0; a < p.size(); ++a) {
      if (p(a) <= 1e-15) continue;
      v += p(a) * (std::log(p(a)) - std::log(sigma(a)));
      q(a) = -p(a) / sigma(a);
    }
    grad = w_cols.transpose() * q;
    return v;
  };

  num::SimplexMinOptions opt;
  opt.iters = iters;
  const num::SimplexMinResult eg = num::minimize_on_simplex(nv, fn, opt);

  WeightSimplexSolution best;
  best.mu = eg.weights;
  best.value = weight_relative_entropy(p, w_cols * eg.weights);

  const auto consider = [&](const Eigen::VectorXd& mu) {
    const double v = weight_relative_entropy(p, w_cols * mu);
    if (v < best.value - 1e-12) {
      best.value = v;
      best.mu = mu;
    }
  };

  Eigen::VectorXd snapped = eg.weights.unaryExpr([](double x) { return x < 1e-10 ? 0.0 : x; });
  if (snapped.sum() > 0.0) consider(snapped / snapped.sum());
  for (int j = 0; j < nv; ++j) consider(Eigen::VectorXd::Unit(nv, j));
  return best;
}

}  // namespace

AbelianState::AbelianState(GroupSpec group, Eigen::VectorXd weights)
    : group_(std::move(group)), weights_(validated_weights(std::move(weights))) {}

AbelianState AbelianState::from_density(const GroupSpec& g, const DensityMatrix& rho) {
  const CommutantBasis basis = commutant_basis(g);
  if (!basis.abelian) {
    throw NonAbelianUnsupported("projection weights require an abelian commutant");
  }
  Eigen::VectorXd w(basis.minimal_projections.size());
  for (int a = 0; a < w.size(); ++a) {
    w(a) = hs_inner(basis.minimal_projections[a], Operator(rho.dims(), rho.mat())).real();
  }
  // Twirling preserves the weights; tiny negative values are projection noise.
  w = w.cwiseMax(0.0);
  w /= w.sum();
  return AbelianState(g, std::move(w));
}

double relative_entropy_abelian(const AbelianState& rho, const AbelianState& sigma, LogBase base) {
  if (!(rho.group() == sigma.group())) {
    throw GroupMismatch("states belong to different symmetry families");
  }
  return weight_relative_entropy(rho.weights(), sigma.weights()) * base_factor(base);
}

double ree_werner(double f) {
  if (!(f >= -1.0 - 1e-12 && f <= 1.0 + 1e-12)) {
    throw DomainError("flip expectation must lie in [-1, 1]");
  }
  f = std::clamp(f, -1.0, 1.0);
  if (f >= 0.0) return 0.0;
  return std::log(2.0) - binary_entropy(0.5 * (1.0 + f));
}

double ree_isotropic(double fhat, int d) {
  if (d < 2) throw DomainError("local dimension must be at least 2");
  if (!(fhat >= -1e-12 && fhat <= d + 1e-12)) throw DomainError("fhat must lie in [0, d]");
  fhat = std::clamp(fhat, 0.0, double(d));
  if (fhat <= 1.0) return 0.0;
  const double t = fhat / d;
  return std::log(double(d)) - (1.0 - t) * std::log(d - 1.0) - binary_entropy(t);
}

namespace {

// Weights of an OO state over (Fhat/d, (1-F)/2, (1+F)/2 - Fhat/d).
Eigen::Vector3d oo_weights(double f, double fhat, int d) {
  return {fhat / d, 0.5 * (1.0 - f), 0.5 * (1.0 + f) - fhat / d};
}

}  // namespace

ReeOoResult ree_oo(double f, double fhat, int d) {
  if (d < 2) throw DomainError("local dimension must be at least 2");
  Eigen::MatrixXd tri(2, 3);
  tri << -1, 1, 1, 0, 0, double(d);
  if (num::simplex_fit(tri, Eigen::Vector2d(f, fhat)).dist > 1e-9 * std::max(1.0, double(d))) {
    throw OutsideStateSpace("(f, fhat) is outside the invariant triangle");
  }

  const double tol = 1e-9;
  ReeOoResult r;
  if (f >= -tol && f <= 1.0 + tol && fhat >= -tol && fhat <= 1.0 + tol) {
    r.value = 0.0;
    r.minimizer = {std::clamp(f, 0.0, 1.0), std::clamp(fhat, 0.0, 1.0)};
    return r;
  }

  if (f <= tol && fhat <= 1.0 + f + tol) {
    // Line from the apex (-1, 0) through the state onto the edge f = 0.
    const double y = f > -1.0 + 1e-12 ? fhat / (1.0 + f) : 0.0;
    r.minimizer = {0.0, std::clamp(y, 0.0, 1.0)};
  } else if (fhat >= 1.0 - tol && fhat <= 1.0 + (d - 1.0) * f + tol) {
    // Line from the apex (1, d) through the state onto the edge fhat = 1.
    const double x = fhat < d - 1e-12 ? 1.0 + (d - 1.0) * (f - 1.0) / (d - fhat) : 1.0;
    r.minimizer = {std::clamp(x, 0.0, 1.0), 1.0};
  } else {
    r.minimizer = {0.0, 1.0};  // one corner serves the whole central triangle
  }

  const Eigen::Vector3d p = oo_weights(f, fhat, d).cwiseMax(0.0);
  const Eigen::Vector3d q = oo_weights(r.minimizer(0), r.minimizer(1), d).cwiseMax(0.0);
  r.value = weight_relative_entropy(p, q);
  return r;
}

ReeResult ree_numeric(const GroupSpec& g, const Eigen::VectorXd& coords, const Region& sep,
                      int iters) {
  const CommutantBasis basis = commutant_basis(g);
  if (!basis.abelian) {
    throw NonAbelianUnsupported("separable minimization requires an abelian commutant");
  }
  const int np = static_cast<int>(basis.minimal_projections.size());
  const int nc = static_cast<int>(basis.coord_ops.size());
  if (coords.size() != nc) throw DimensionMismatch("coordinate count does not match the family");

  // Coordinates of the normalized minimal projections; every invariant state
  // is a unique convex mixture of these, so barycentric weights with respect
  // to them are exactly the projection weights.
  Eigen::MatrixXd q(nc, np);
  for (int k = 0; k < np; ++k) {
    const Operator& pk = basis.minimal_projections[k];
    const Operator nk = (1.0 / pk.trace().real()) * pk;
    q.col(k) = invariant_coords(basis, nk);
  }

  const auto to_weights = [&](const Eigen::VectorXd& c) {
    const num::SimplexFit fit = num::simplex_fit(q, c);
    if (fit.dist > 1e-8 * std::max(1.0, c.cwiseAbs().maxCoeff())) {
      throw OutsideStateSpace("coordinates are outside the invariant state space");
    }
    Eigen::VectorXd w = fit.lambda.cwiseMax(0.0);
    return Eigen::VectorXd(w / w.sum());
  };

  const Eigen::VectorXd p = to_weights(coords);

  std::vector<Eigen::VectorXd> verts;
  if (sep.kind == Region::Kind::interval) {
    verts.push_back(Eigen::VectorXd::Constant(1, sep.lo));
    verts.push_back(Eigen::VectorXd::Constant(1, sep.hi));
  } else if (sep.kind == Region::Kind::polytope) {
    verts = sep.vertices;
  } else {
    throw DomainError("separable region must be an interval or a polytope");
  }

  const int nv = static_cast<int>(verts.size());
  Eigen::MatrixXd w_cols(np, nv);
  for (int j = 0; j < nv; ++j) w_cols.col(j) = to_weights(verts[j]);

  const WeightSimplexSolution sol = minimize_weight_simplex(w_cols, p, iters);

  ReeResult r;
  r.value = sol.value;
  r.minimizer = Eigen::VectorXd::Zero(coords.size());
  for (int j = 0; j < nv; ++j) r.minimizer += sol.mu(j) * verts[j];
  if (sep.kind == Region::Kind::interval) {
    const double s = r.minimizer(0);
    r.endpoint_verified = std::abs(s - sep.lo) <= 1e-6 || std::abs(s - sep.hi) <= 1e-6;
  }
  return r;
}

CounterexampleReport additivity_counterexample(int d) {
  if (d < 2) throw DomainError("local dimension must be at least 2");

  CounterexampleReport rep;
  rep.d = d;
  rep.e_single = ree_werner(-1.0);
  rep.e_pair_expected = 2.0 * rep.e_single;

  // Work in the symmetric slice (f, f12) of the pair family.  Projection
  // weights over (P+ (x) P+, mixed, P- (x) P-) are affine in the slice
  // coordinates and independent of d, so no matrices are needed.
  const auto slice_weights = [](const Eigen::Vector2d& c) {
    const double f = c(0), f12 = c(1);
    return Eigen::Vector3d{0.25 * (1.0 + f12) + 0.5 * f, 0.5 * (1.0 - f12),
                           0.25 * (1.0 + f12) - 0.5 * f};
  };

  // Separable slice: projection of the five-vertex product polytope.
  const std::vector<Eigen::Vector2d> sep = {
      {0.0, 0.0}, {0.5, 0.0}, {1.0, 1.0}, {1.0 / d, 1.0}};
  Eigen::MatrixXd w_cols(3, sep.size());
  for (int j = 0; j < static_cast<int>(sep.size()); ++j) {
    w_cols.col(j) = slice_weights(sep[j]).cwiseMax(0.0);
  }

  // Two antisymmetric factors: all weight on P- (x) P-, slice coords (-1, 1).
  const Eigen::Vector3d p{0.0, 0.0, 1.0};
  const WeightSimplexSolution sol = minimize_weight_simplex(w_cols, p, 20000);

  rep.e_pair_actual = sol.value;
  rep.violation = rep.e_pair_expected - rep.e_pair_actual;

  Eigen::Vector2d slice = Eigen::Vector2d::Zero();
  for (int j = 0; j < static_cast<int>(sep.size()); ++j) slice += sol.mu(j) * sep[j];
  rep.minimizer_coords = {slice(0), slice(0), slice(1)};
  return rep;
}

}  // namespace symtangle
