#include "symtangle/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include <Eigen/SVD>

#include "symtangle/numerics.hpp"

namespace symtangle {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

}  // namespace

// ---------------------------------------------------------------------------
// Convex envelope of a sampled curve

EnvelopeResult lower_convex_envelope(const CurveSamples& curve) {
  const int n = static_cast<int>(curve.xs.size());
  if (n != curve.ys.size()) throw DimensionMismatch("lower_convex_envelope: xs/ys length");
  if (n < 2) throw UnsortedGrid("lower_convex_envelope: need at least two samples");
  for (int i = 1; i < n; ++i) {
    if (!(curve.xs(i) > curve.xs(i - 1))) {
      throw UnsortedGrid("lower_convex_envelope: grid must be strictly increasing");
    }
  }

  // Monotone-chain lower hull over the sample points (collinear points are
  // dropped; they do not affect the envelope values).
  std::vector<int> hull;
  for (int i = 0; i < n; ++i) {
    while (hull.size() >= 2) {
      const int a = hull[hull.size() - 2], b = hull[hull.size() - 1];
      const double cross = (curve.xs(b) - curve.xs(a)) * (curve.ys(i) - curve.ys(a)) -
                           (curve.xs(i) - curve.xs(a)) * (curve.ys(b) - curve.ys(a));
      if (cross <= 0.0) {
        hull.pop_back();
      } else {
        break;
      }
    }
    hull.push_back(i);
  }

  EnvelopeResult result;
  result.envelope.xs = curve.xs;
  result.envelope.ys.resize(n);
  result.envelope.label = curve.label;
  const double gap_tol = 1e-12 * std::max(1.0, curve.ys.cwiseAbs().maxCoeff());
  for (std::size_t seg = 0; seg + 1 < hull.size(); ++seg) {
    const int a = hull[seg], b = hull[seg + 1];
    double max_gap = 0.0;
    for (int i = a; i <= b; ++i) {
      const double t = (curve.xs(i) - curve.xs(a)) / (curve.xs(b) - curve.xs(a));
      const double env = curve.ys(a) + t * (curve.ys(b) - curve.ys(a));
      result.envelope.ys(i) = env;
      max_gap = std::max(max_gap, curve.ys(i) - env);
    }
    if (b > a + 1 && max_gap > gap_tol) {
      result.flat_pieces.push_back(FlatPiece{curve.xs(a), curve.xs(b)});
    }
  }
  return result;
}

// ---------------------------------------------------------------------------
// Regions

Region Region::interval(double lo, double hi, std::vector<std::string> labels, bool exact) {
  Region r;
  r.kind = Kind::interval;
  r.lo = lo;
  r.hi = hi;
  r.labels = std::move(labels);
  r.exact = exact;
  return r;
}

Region Region::polytope(std::vector<Eigen::VectorXd> vertices, std::vector<std::string> labels,
                        bool exact) {
  Region r;
  r.kind = Kind::polytope;
  r.vertices = std::move(vertices);
  r.labels = std::move(labels);
  r.exact = exact;
  return r;
}

Region Region::sampled(std::vector<Eigen::VectorXd> points, std::vector<std::string> labels) {
  Region r;
  r.kind = Kind::sampled;
  r.vertices = std::move(points);
  r.labels = std::move(labels);
  r.exact = false;
  return r;
}

bool region_membership(const Region& r, const Eigen::VectorXd& x, double tol) {
  if (r.kind == Region::Kind::interval) {
    if (x.size() != 1) throw DimensionMismatch("region_membership: interval regions are 1-d");
    return x(0) >= r.lo - tol && x(0) <= r.hi + tol;
  }
  if (r.vertices.empty()) return false;
  const int dim = static_cast<int>(r.vertices.front().size());
  if (x.size() != dim) throw DimensionMismatch("region_membership: coordinate dimension");
  MatrixXd v(dim, static_cast<int>(r.vertices.size()));
  for (std::size_t i = 0; i < r.vertices.size(); ++i) v.col(static_cast<int>(i)) = r.vertices[i];
  return num::simplex_fit(v, x).dist <= tol;
}

// ---------------------------------------------------------------------------
// Polytope utilities

std::vector<Eigen::VectorXd> extreme_points(const std::vector<Eigen::VectorXd>& pts, double tol) {
  std::vector<Eigen::VectorXd> out;
  if (pts.empty()) return out;
  const int dim = static_cast<int>(pts.front().size());
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (pts.size() == 1) {
      out.push_back(pts[i]);
      continue;
    }
    MatrixXd v(dim, static_cast<int>(pts.size()) - 1);
    int c = 0;
    for (std::size_t j = 0; j < pts.size(); ++j) {
      if (j != i) v.col(c++) = pts[j];
    }
    if (num::simplex_fit(v, pts[i]).dist > tol) out.push_back(pts[i]);
  }
  return out;
}

namespace {

struct Halfspace {
  VectorXd normal;  // unit normal, constraint normal . x <= offset
  double offset = 0.0;
};

std::vector<Halfspace> simplex_halfspaces(const std::vector<VectorXd>& verts) {
  const int dim = static_cast<int>(verts.front().size());
  if (static_cast<int>(verts.size()) != dim + 1) {
    throw DimensionMismatch("simplex_halfspaces: expected dim+1 vertices");
  }
  std::vector<Halfspace> hs;
  for (int omit = 0; omit <= dim; ++omit) {
    std::vector<int> facet;
    for (int i = 0; i <= dim; ++i) {
      if (i != omit) facet.push_back(i);
    }
    MatrixXd edges(dim - 1, dim);
    for (int k = 1; k < dim; ++k) edges.row(k - 1) = (verts[facet[k]] - verts[facet[0]]).transpose();
    VectorXd normal;
    if (dim == 1) {
      normal = VectorXd::Ones(1);
    } else {
      Eigen::JacobiSVD<MatrixXd> svd(edges, Eigen::ComputeFullV);
      normal = svd.matrixV().col(dim - 1);
      if (dim >= 2 && svd.singularValues()(dim - 2) <
                          1e-10 * std::max(1.0, svd.singularValues()(0))) {
        throw Error("simplex_halfspaces: degenerate simplex");
      }
    }
    double offset = normal.dot(verts[facet[0]]);
    if (normal.dot(verts[omit]) > offset) {
      normal = -normal;
      offset = -offset;
    }
    hs.push_back(Halfspace{normal, offset});
  }
  return hs;
}

}  // namespace

std::vector<Eigen::VectorXd> simplex_intersection(const std::vector<Eigen::VectorXd>& a,
                                                  const std::vector<Eigen::VectorXd>& b,
                                                  double tol) {
  const int dim = static_cast<int>(a.front().size());
  std::vector<Halfspace> hs = simplex_halfspaces(a);
  for (const auto& h : simplex_halfspaces(b)) hs.push_back(h);

  double scale = 1.0;
  for (const auto& v : a) scale = std::max(scale, v.cwiseAbs().maxCoeff());
  for (const auto& v : b) scale = std::max(scale, v.cwiseAbs().maxCoeff());

  // Candidate vertices: every 0-dimensional intersection of `dim` facet
  // hyperplanes that satisfies all constraints.
  std::vector<VectorXd> verts;
  const int m = static_cast<int>(hs.size());
  std::vector<int> pick(dim);
  const auto consider = [&](const std::vector<int>& sel) {
    MatrixXd A(dim, dim);
    VectorXd rhs(dim);
    for (int i = 0; i < dim; ++i) {
      A.row(i) = hs[sel[i]].normal.transpose();
      rhs(i) = hs[sel[i]].offset;
    }
    Eigen::FullPivLU<MatrixXd> lu(A);
    lu.setThreshold(1e-10);
    if (lu.rank() < dim) return;
    const VectorXd x = lu.solve(rhs);
    for (const auto& h : hs) {
      if (h.normal.dot(x) > h.offset + tol * scale) return;
    }
    for (const auto& v : verts) {
      if ((v - x).norm() < 1e-8 * scale) return;
    }
    verts.push_back(x);
  };
  // Enumerate combinations (dim <= 3 keeps this tiny).
  std::vector<int> sel;
  const std::function<void(int)> rec = [&](int start) {
    if (static_cast<int>(sel.size()) == dim) {
      consider(sel);
      return;
    }
    for (int i = start; i < m; ++i) {
      sel.push_back(i);
      rec(i + 1);
      sel.pop_back();
    }
  };
  rec(0);

  std::sort(verts.begin(), verts.end(), [](const VectorXd& u, const VectorXd& v) {
    for (int i = 0; i < u.size(); ++i) {
      if (u(i) != v(i)) return u(i) < v(i);
    }
    return false;
  });
  return verts;
}

// ---------------------------------------------------------------------------
// State-space, PPT and separable regions

Region invariant_state_space(const GroupSpec& g) {
  const CommutantBasis basis = commutant_basis(g);
  if (!basis.abelian) {
    throw Unsupported("invariant_state_space: commutant of " + g.name() + " is not abelian");
  }
  std::vector<VectorXd> verts;
  for (const auto& p : basis.minimal_projections) {
    const double tr = p.trace().real();
    verts.push_back(invariant_coords(basis, (1.0 / tr) * p));
  }
  if (basis.coord_ops.size() == 1) {
    double lo = verts.front()(0), hi = lo;
    for (const auto& v : verts) {
      lo = std::min(lo, v(0));
      hi = std::max(hi, v(0));
    }
    return Region::interval(lo, hi, basis.labels);
  }
  return Region::polytope(std::move(verts), basis.labels);
}

namespace {

// Partner states reflected by partial transposition, expressed in this
// group's coordinates.  The map is affine, so mapping the partner simplex
// vertices maps the whole simplex.
std::vector<VectorXd> ppt_image_vertices(const GroupSpec& g, const CommutantBasis& basis) {
  const GroupSpec partner = partial_conjugate(g);
  const CommutantBasis partner_basis = commutant_basis(partner);
  if (!partner_basis.abelian) {
    throw Unsupported("ppt_image: partner commutant of " + g.name() + " is not abelian");
  }
  std::vector<VectorXd> image;
  for (const auto& q : partner_basis.minimal_projections) {
    const double tr = q.trace().real();
    image.push_back(invariant_coords(basis, partial_transpose((1.0 / tr) * q)));
  }
  return image;
}

}  // namespace

Region ppt_image(const GroupSpec& g) {
  const CommutantBasis basis = commutant_basis(g);
  std::vector<VectorXd> image = ppt_image_vertices(g, basis);
  if (image.front().size() == 1) {
    double lo = image.front()(0), hi = lo;
    for (const auto& v : image) {
      lo = std::min(lo, v(0));
      hi = std::max(hi, v(0));
    }
    return Region::interval(lo, hi, basis.labels);
  }
  return Region::polytope(extreme_points(image), basis.labels);
}

Region ppt_region(const GroupSpec& g) {
  const CommutantBasis basis = commutant_basis(g);
  const std::vector<VectorXd> image = ppt_image_vertices(g, basis);
  const Region space = invariant_state_space(g);
  if (space.kind == Region::Kind::interval) {
    double lo = image.front()(0), hi = lo;
    for (const auto& v : image) {
      lo = std::min(lo, v(0));
      hi = std::max(hi, v(0));
    }
    return Region::interval(std::max(space.lo, lo), std::min(space.hi, hi), basis.labels);
  }
  return Region::polytope(simplex_intersection(space.vertices, image), basis.labels);
}

Eigen::VectorXd product_expectations(const GroupSpec& g, const Eigen::VectorXcd& phi,
                                     const Eigen::VectorXcd& psi) {
  const Dims dims = g.dims();
  if (phi.size() != dims.d1 || psi.size() != dims.d2) {
    throw DimensionMismatch("product_expectations: factor dimensions");
  }
  const Eigen::MatrixXcd proj =
      kron(Eigen::MatrixXcd(phi * phi.adjoint()), Eigen::MatrixXcd(psi * psi.adjoint()));
  const double n1 = phi.squaredNorm(), n2 = psi.squaredNorm();
  return invariant_coords(commutant_basis(g), Operator(dims, proj / (n1 * n2)));
}

namespace {

bool is_uu_pair(const GroupSpec& g) {
  return g.family() == GroupSpec::Family::tensor &&
         g.part(0).family() == GroupSpec::Family::uu &&
         g.part(1).family() == GroupSpec::Family::uu &&
         g.part(0).local_dim() == g.part(1).local_dim();
}

}  // namespace

Region separable_region(const GroupSpec& g, int sample_budget, std::uint64_t seed) {
  using Family = GroupSpec::Family;
  const auto vec = [](std::initializer_list<double> v) {
    VectorXd x(static_cast<int>(v.size()));
    int i = 0;
    for (double t : v) x(i++) = t;
    return x;
  };
  switch (g.family()) {
    case Family::uu:
      return Region::interval(0.0, 1.0, {"F"});
    case Family::uubar:
      return Region::interval(0.0, 1.0, {"Fhat"});
    case Family::oo:
      return Region::polytope({vec({0, 0}), vec({1, 0}), vec({1, 1}), vec({0, 1})},
                              {"F", "Fhat"});
    case Family::bell: {
      std::vector<VectorXd> verts;
      for (int k = 0; k < 3; ++k) {
        for (double s : {1.0, -1.0}) {
          VectorXd v = VectorXd::Zero(3);
          v(k) = s;
          verts.push_back(v);
        }
      }
      return Region::polytope(std::move(verts), {"x1", "x2", "x3"});
    }
    case Family::tensor_flip: {
      const double d = g.local_dim();
      return Region::polytope(
          {vec({0, 0}), vec({0.5, 0}), vec({1, 1}), vec({1.0 / d, 1})}, {"Fbar", "F12"});
    }
    case Family::tensor:
      if (is_uu_pair(g)) {
        const double d = g.part(0).local_dim();
        return Region::polytope({vec({0, 0, 0}), vec({1, 0, 0}), vec({0, 1, 0}),
                                 vec({1, 1, 1}), vec({1.0 / d, 1.0 / d, 1})},
                                {"F1", "F2", "F1*F2"});
      }
      break;
    case Family::weyl:
      if (g.local_dim() >= 3) {
        throw Unsupported("separable_region: not characterized for " + g.name());
      }
      break;
    default:
      break;
  }

  // Sampled inner approximation: invariant coordinates of random product
  // states, plus projected gradient ascent pushing product vectors toward
  // candidate extreme directions of the hull.
  const CommutantBasis basis = commutant_basis(g);
  std::mt19937_64 rng(seed);
  const Dims dims = g.dims();
  const int nc = static_cast<int>(basis.coord_ops.size());

  const auto coords_of = [&](const Eigen::VectorXcd& phi, const Eigen::VectorXcd& psi) {
    const Eigen::MatrixXcd proj =
        kron(Eigen::MatrixXcd(phi * phi.adjoint()), Eigen::MatrixXcd(psi * psi.adjoint()));
    return invariant_coords(basis, Operator(dims, proj));
  };

  std::vector<VectorXd> pts;
  pts.reserve(sample_budget);
  for (int i = 0; i < sample_budget; ++i) {
    pts.push_back(coords_of(random_unit_vector(dims.d1, rng), random_unit_vector(dims.d2, rng)));
  }

  std::vector<VectorXd> dirs;
  for (int a = 0; a < nc; ++a) {
    dirs.push_back(VectorXd::Unit(nc, a));
    dirs.push_back(-VectorXd::Unit(nc, a));
  }
  std::normal_distribution<double> gauss;
  for (int k = 0; k < 6; ++k) {
    VectorXd c(nc);
    for (int a = 0; a < nc; ++a) c(a) = gauss(rng);
    dirs.push_back(c.normalized());
  }

  const int restarts = std::clamp(sample_budget / 200, 4, 64);
  for (const VectorXd& c : dirs) {
    Eigen::MatrixXcd hc = Eigen::MatrixXcd::Zero(dims.total(), dims.total());
    for (int a = 0; a < nc; ++a) hc += c(a) * basis.coord_ops[a].mat();

    for (int r = 0; r < restarts; ++r) {
      Eigen::VectorXcd phi = random_unit_vector(dims.d1, rng);
      Eigen::VectorXcd psi = random_unit_vector(dims.d2, rng);
      const auto objective = [&](const Eigen::VectorXcd& u, const Eigen::VectorXcd& w) {
        const Eigen::VectorXcd v = kron(Eigen::MatrixXcd(u), Eigen::MatrixXcd(w));
        return (v.adjoint() * hc * v).value().real();
      };
      double best = objective(phi, psi);
      double step = 0.25;
      for (int it = 0; it < 120 && step > 1e-6; ++it) {
        const Eigen::VectorXcd v = kron(Eigen::MatrixXcd(phi), Eigen::MatrixXcd(psi));
        const Eigen::VectorXcd hv = hc * v;
        Eigen::VectorXcd gphi = Eigen::VectorXcd::Zero(dims.d1);
        Eigen::VectorXcd gpsi = Eigen::VectorXcd::Zero(dims.d2);
        for (int i = 0; i < dims.d1; ++i) {
          for (int a = 0; a < dims.d2; ++a) {
            gphi(i) += std::conj(psi(a)) * hv(i * dims.d2 + a);
            gpsi(a) += std::conj(phi(i)) * hv(i * dims.d2 + a);
          }
        }
        const Eigen::VectorXcd nphi = (phi + step * gphi).normalized();
        const Eigen::VectorXcd npsi = (psi + step * gpsi).normalized();
        const double cand = objective(nphi, npsi);
        if (cand >= best - 1e-12) {
          phi = nphi;
          psi = npsi;
          best = cand;
          step = std::min(0.5, step * 1.1);
        } else {
          step *= 0.5;
        }
      }
      pts.push_back(coords_of(phi, psi));
    }
  }
  return Region::sampled(std::move(pts), basis.labels);
}

}  // namespace symtangle
