#include "symtangle/groups.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>

#include <Eigen/Eigenvalues>

namespace symtangle {

namespace {

using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::VectorXcd;
using Eigen::VectorXd;

constexpr Complex kI{0.0, 1.0};

MatrixXcd pauli(int k) {
  MatrixXcd s(2, 2);
  switch (k) {
    case 1: s << 0, 1, 1, 0; break;
    case 2: s << 0, -kI, kI, 0; break;
    default: s << 1, 0, 0, -1; break;
  }
  return s;
}

}  // namespace

// ---------------------------------------------------------------------------
// GroupSpec

GroupSpec GroupSpec::uu(int d) {
  if (d < 2) throw DomainError("uu: d must be at least 2");
  GroupSpec g;
  g.family_ = Family::uu;
  g.d_ = d;
  return g;
}

GroupSpec GroupSpec::uubar(int d) {
  if (d < 2) throw DomainError("uubar: d must be at least 2");
  GroupSpec g;
  g.family_ = Family::uubar;
  g.d_ = d;
  return g;
}

GroupSpec GroupSpec::oo(int d) {
  if (d < 2) throw DomainError("oo: d must be at least 2");
  GroupSpec g;
  g.family_ = Family::oo;
  g.d_ = d;
  return g;
}

GroupSpec GroupSpec::bell() {
  GroupSpec g;
  g.family_ = Family::bell;
  g.d_ = 2;
  return g;
}

GroupSpec GroupSpec::weyl(int d) {
  if (d < 2) throw DomainError("weyl: d must be at least 2");
  GroupSpec g;
  g.family_ = Family::weyl;
  g.d_ = d;
  return g;
}

GroupSpec GroupSpec::weyl_conj(int d) {
  if (d < 2) throw DomainError("weyl_conj: d must be at least 2");
  GroupSpec g;
  g.family_ = Family::weyl_conj;
  g.d_ = d;
  return g;
}

GroupSpec GroupSpec::su2(int two_j1, int two_j2) {
  if (two_j1 < 1 || two_j2 < 1) throw DomainError("su2: spins must be positive");
  GroupSpec g;
  g.family_ = Family::su2;
  g.two_j1_ = two_j1;
  g.two_j2_ = two_j2;
  return g;
}

GroupSpec GroupSpec::tensor(GroupSpec a, GroupSpec b) {
  GroupSpec g;
  g.family_ = Family::tensor;
  g.parts_.push_back(std::move(a));
  g.parts_.push_back(std::move(b));
  return g;
}

GroupSpec GroupSpec::tensor_flip(int d) {
  if (d < 2) throw DomainError("tensor_flip: d must be at least 2");
  GroupSpec g;
  g.family_ = Family::tensor_flip;
  g.d_ = d;
  return g;
}

Dims GroupSpec::dims() const {
  switch (family_) {
    case Family::uu:
    case Family::uubar:
    case Family::oo:
    case Family::weyl:
    case Family::weyl_conj:
      return Dims{d_, d_};
    case Family::bell:
      return Dims{2, 2};
    case Family::su2:
      return Dims{two_j1_ + 1, two_j2_ + 1};
    case Family::tensor: {
      const Dims a = parts_[0].dims(), b = parts_[1].dims();
      return Dims{a.d1 * b.d1, a.d2 * b.d2};
    }
    case Family::tensor_flip:
      return Dims{d_ * d_, d_ * d_};
  }
  throw Error("GroupSpec::dims: unreachable");
}

std::string GroupSpec::name() const {
  switch (family_) {
    case Family::uu: return "uu(" + std::to_string(d_) + ")";
    case Family::uubar: return "uubar(" + std::to_string(d_) + ")";
    case Family::oo: return "oo(" + std::to_string(d_) + ")";
    case Family::bell: return "bell";
    case Family::weyl: return "weyl(" + std::to_string(d_) + ")";
    case Family::weyl_conj: return "weyl_conj(" + std::to_string(d_) + ")";
    case Family::su2:
      return "su2(" + std::to_string(two_j1_) + "," + std::to_string(two_j2_) + ")";
    case Family::tensor: return "tensor(" + parts_[0].name() + "," + parts_[1].name() + ")";
    case Family::tensor_flip: return "tensor_flip(" + std::to_string(d_) + ")";
  }
  return "?";
}

bool operator==(const GroupSpec& a, const GroupSpec& b) {
  return a.family_ == b.family_ && a.d_ == b.d_ && a.two_j1_ == b.two_j1_ &&
         a.two_j2_ == b.two_j2_ && a.parts_ == b.parts_;
}

// ---------------------------------------------------------------------------
// Discrete Weyl unitaries

Eigen::MatrixXcd weyl_operator(int d, int x, int y) {
  if (d < 1) throw DomainError("weyl_operator: d must be positive");
  const auto mod = [d](int a) { return ((a % d) + d) % d; };
  MatrixXcd w = MatrixXcd::Zero(d, d);
  const double twopi = 2.0 * std::numbers::pi;
  for (int z = 0; z < d; ++z) {
    const Complex phase = std::exp(kI * (twopi * mod(x) * z / d));
    w(mod(z - y), z) = phase;
  }
  return w;
}

// ---------------------------------------------------------------------------
// SU(2) irreps (doubled-spin convention)

namespace {

// Basis change from the spherical basis (m = j..-j) to the real tesseral
// basis, defined for integer spin.  Rows are the real basis vectors.  In this
// basis rotation matrices are real orthogonal and the two-spin singlet has an
// amplitude matrix proportional to the identity.
MatrixXcd tesseral_transform(int two_j) {
  const int j = two_j / 2;
  const int n = two_j + 1;
  const auto col = [j](int m) { return j - m; };  // index of |j,m>
  MatrixXcd t = MatrixXcd::Zero(n, n);
  int r = 0;
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  for (int m = 1; m <= j; ++m) {  // cosine-type combinations
    t(r, col(-m)) = inv_sqrt2;
    t(r, col(m)) = (m % 2 == 0 ? 1.0 : -1.0) * inv_sqrt2;
    ++r;
  }
  t(r, col(0)) = 1.0;
  ++r;
  for (int m = 1; m <= j; ++m) {  // sine-type combinations
    t(r, col(-m)) = kI * inv_sqrt2;
    t(r, col(m)) = (m % 2 == 0 ? -1.0 : 1.0) * kI * inv_sqrt2;
    ++r;
  }
  return t;
}

}  // namespace

std::array<Eigen::MatrixXcd, 3> su2_generators(int two_j) {
  if (two_j < 1) throw DomainError("su2_generators: two_j must be positive");
  const int n = two_j + 1;
  const double j = two_j / 2.0;
  MatrixXcd jz = MatrixXcd::Zero(n, n);
  MatrixXcd jp = MatrixXcd::Zero(n, n);  // raising operator
  for (int k = 0; k < n; ++k) {
    const double m = j - k;
    jz(k, k) = m;
    if (k >= 1) jp(k - 1, k) = std::sqrt(j * (j + 1) - m * (m + 1));
  }
  const MatrixXcd jm = jp.adjoint();
  MatrixXcd jx = 0.5 * (jp + jm);
  MatrixXcd jy = -0.5 * kI * (jp - jm);
  if (two_j % 2 == 0) {
    const MatrixXcd t = tesseral_transform(two_j);
    jx = t * jx * t.adjoint();
    jy = t * jy * t.adjoint();
    jz = t * jz * t.adjoint();
  }
  return {jx, jy, jz};
}

Eigen::MatrixXcd su2_rotation(int two_j, const Eigen::Vector4d& quaternion) {
  const Eigen::Vector4d q = quaternion / quaternion.norm();
  const double vec_norm = q.tail<3>().norm();
  const int n = two_j + 1;
  if (vec_norm < 1e-300) return MatrixXcd::Identity(n, n);
  const double theta = 2.0 * std::atan2(vec_norm, q(0));
  const Eigen::Vector3d axis = q.tail<3>() / vec_norm;
  const auto gen = su2_generators(two_j);
  const MatrixXcd h = axis(0) * gen[0] + axis(1) * gen[1] + axis(2) * gen[2];
  Eigen::SelfAdjointEigenSolver<MatrixXcd> es(h);
  VectorXcd phases(n);
  for (int k = 0; k < n; ++k) phases(k) = std::exp(-kI * theta * es.eigenvalues()(k));
  return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

std::vector<Operator> su2_projections(int two_j1, int two_j2) {
  const Dims dims{two_j1 + 1, two_j2 + 1};
  const auto g1 = su2_generators(two_j1);
  const auto g2 = su2_generators(two_j2);
  const int n = dims.total();
  MatrixXcd casimir = MatrixXcd::Zero(n, n);
  for (int k = 0; k < 3; ++k) {
    const MatrixXcd jk = kron(g1[k], MatrixXcd::Identity(dims.d2, dims.d2)) +
                         kron(MatrixXcd::Identity(dims.d1, dims.d1), g2[k]);
    casimir += jk * jk;
  }
  Eigen::SelfAdjointEigenSolver<MatrixXcd> es(casimir);
  std::vector<Operator> projections;
  for (int two_s = std::abs(two_j1 - two_j2); two_s <= two_j1 + two_j2; two_s += 2) {
    const double s = two_s / 2.0;
    const double target = s * (s + 1.0);
    MatrixXcd p = MatrixXcd::Zero(n, n);
    int count = 0;
    for (int k = 0; k < n; ++k) {
      if (std::abs(es.eigenvalues()(k) - target) < 0.25) {
        p += es.eigenvectors().col(k) * es.eigenvectors().col(k).adjoint();
        ++count;
      }
    }
    if (count != two_s + 1) {
      throw Error("su2_projections: unexpected multiplet dimension");
    }
    projections.emplace_back(dims, std::move(p));
  }
  return projections;
}

// ---------------------------------------------------------------------------
// Random sampling

Eigen::MatrixXcd haar_unitary(int d, std::mt19937_64& rng) {
  std::normal_distribution<double> n01(0.0, 1.0);
  MatrixXcd g(d, d);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) g(i, j) = Complex(n01(rng), n01(rng)) / std::sqrt(2.0);
  }
  Eigen::HouseholderQR<MatrixXcd> qr(g);
  MatrixXcd q = qr.householderQ();
  const MatrixXcd r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < d; ++j) {
    const Complex rjj = r(j, j);
    q.col(j) *= (std::abs(rjj) > 0 ? rjj / std::abs(rjj) : 1.0);
  }
  return q;
}

Eigen::MatrixXd haar_orthogonal(int d, std::mt19937_64& rng) {
  std::normal_distribution<double> n01(0.0, 1.0);
  MatrixXd g(d, d);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) g(i, j) = n01(rng);
  }
  Eigen::HouseholderQR<MatrixXd> qr(g);
  MatrixXd q = qr.householderQ();
  const MatrixXd r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < d; ++j) q.col(j) *= (r(j, j) < 0 ? -1.0 : 1.0);
  return q;
}

Eigen::Vector4d random_quaternion(std::mt19937_64& rng) {
  std::normal_distribution<double> n01(0.0, 1.0);
  Eigen::Vector4d q;
  do {
    for (int i = 0; i < 4; ++i) q(i) = n01(rng);
  } while (q.norm() < 1e-12);
  return q / q.norm();
}

Eigen::VectorXcd random_unit_vector(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> n01(0.0, 1.0);
  VectorXcd v(n);
  do {
    for (int i = 0; i < n; ++i) v(i) = Complex(n01(rng), n01(rng));
  } while (v.norm() < 1e-12);
  return v / v.norm();
}

DensityMatrix random_density(Dims dims, std::mt19937_64& rng) {
  std::normal_distribution<double> n01(0.0, 1.0);
  const int n = dims.total();
  MatrixXcd g(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) g(i, j) = Complex(n01(rng), n01(rng));
  }
  MatrixXcd rho = g * g.adjoint();
  rho /= rho.trace();
  return DensityMatrix(Operator(dims, std::move(rho)));
}

Operator haar_sample(const GroupSpec& g, std::mt19937_64& rng) {
  switch (g.family()) {
    case GroupSpec::Family::uu: {
      const MatrixXcd u = haar_unitary(g.local_dim(), rng);
      return Operator(g.dims(), kron(u, u));
    }
    case GroupSpec::Family::uubar: {
      const MatrixXcd u = haar_unitary(g.local_dim(), rng);
      return Operator(g.dims(), kron(u, u.conjugate()));
    }
    case GroupSpec::Family::oo: {
      const MatrixXd o = haar_orthogonal(g.local_dim(), rng);
      return Operator(g.dims(), kron(o.cast<Complex>(), o.cast<Complex>()));
    }
    case GroupSpec::Family::bell: {
      const int k = static_cast<int>(rng() % 4);
      if (k == 0) return Operator::identity(g.dims());
      return Operator(g.dims(), -kron(pauli(k), pauli(k)));
    }
    case GroupSpec::Family::weyl: {
      const int d = g.local_dim();
      const int x = static_cast<int>(rng() % d), y = static_cast<int>(rng() % d);
      return Operator(g.dims(), kron(weyl_operator(d, x, y), weyl_operator(d, x, y)));
    }
    case GroupSpec::Family::weyl_conj: {
      const int d = g.local_dim();
      const int x = static_cast<int>(rng() % d), y = static_cast<int>(rng() % d);
      const MatrixXcd w = weyl_operator(d, x, y);
      return Operator(g.dims(), kron(w, w.conjugate()));
    }
    case GroupSpec::Family::su2: {
      const Eigen::Vector4d q = random_quaternion(rng);
      return Operator(g.dims(),
                      kron(su2_rotation(g.two_j1(), q), su2_rotation(g.two_j2(), q)));
    }
    case GroupSpec::Family::tensor: {
      const Operator a = haar_sample(g.part(0), rng);
      const Operator b = haar_sample(g.part(1), rng);
      return tensor(a, b);
    }
    case GroupSpec::Family::tensor_flip: {
      const int d = g.local_dim();
      const GroupSpec inner = GroupSpec::uu(d);
      Operator el = tensor(haar_sample(inner, rng), haar_sample(inner, rng));
      if (rng() % 2 == 1) {
        const MatrixXcd f = flip_operator(d).mat();
        el = Operator(g.dims(), kron(f, f)) * el;
      }
      return el;
    }
  }
  throw Error("haar_sample: unreachable");
}

// ---------------------------------------------------------------------------
// Commutant bases

namespace {

struct WeylIndexPairs {
  // Lexicographic representatives of {(x,y), (-x,-y)} orbits, excluding (0,0).
  std::vector<std::pair<int, int>> reps;
  std::vector<std::pair<int, int>> all_nonzero;
};

WeylIndexPairs weyl_index_pairs(int d) {
  WeylIndexPairs out;
  const auto mod = [d](int a) { return ((a % d) + d) % d; };
  for (int x = 0; x < d; ++x) {
    for (int y = 0; y < d; ++y) {
      if (x == 0 && y == 0) continue;
      out.all_nonzero.emplace_back(x, y);
      const std::pair<int, int> neg{mod(-x), mod(-y)};
      if (std::pair<int, int>{x, y} <= neg) out.reps.emplace_back(x, y);
    }
  }
  return out;
}

void append_hermitian_parts(const Operator& b, const std::string& tag,
                            std::vector<Operator>* coord_ops, std::vector<std::string>* labels) {
  const Operator re(b.dims(), 0.5 * (b.mat() + b.mat().adjoint()));
  const Operator im(b.dims(), -0.5 * kI * (b.mat() - b.mat().adjoint()));
  if (re.mat().cwiseAbs().maxCoeff() > 1e-9) {
    coord_ops->push_back(re);
    labels->push_back("Re" + tag);
  }
  if (im.mat().cwiseAbs().maxCoeff() > 1e-9) {
    coord_ops->push_back(im);
    labels->push_back("Im" + tag);
  }
}

bool commutes_pairwise(const std::vector<Operator>& ops) {
  double scale = 1e-300;
  for (const auto& a : ops) scale = std::max(scale, a.mat().cwiseAbs().maxCoeff());
  for (std::size_t i = 0; i < ops.size(); ++i) {
    for (std::size_t j = i + 1; j < ops.size(); ++j) {
      const MatrixXcd comm = ops[i].mat() * ops[j].mat() - ops[j].mat() * ops[i].mat();
      if (comm.cwiseAbs().maxCoeff() > 1e-10 * scale * scale) return false;
    }
  }
  return true;
}

// Minimal projections of an abelian commutant: joint eigenspaces, found by
// diagonalizing a generic Hermitian combination of the coordinate operators.
// Ordered by ascending eigenvalue of that combination.
std::vector<Operator> generic_minimal_projections(const Dims& dims,
                                                  const std::vector<Operator>& coord_ops,
                                                  std::size_t algebra_dim) {
  const int n = dims.total();
  for (int attempt = 0; attempt < 8; ++attempt) {
    MatrixXcd h = MatrixXcd::Zero(n, n);
    for (std::size_t k = 0; k < coord_ops.size(); ++k) {
      h += std::pow(static_cast<double>(k) + 1.3, attempt + 1.0) * coord_ops[k].mat();
    }
    Eigen::SelfAdjointEigenSolver<MatrixXcd> es(h);
    const VectorXd& ev = es.eigenvalues();
    const double tol = 1e-8 * std::max(1.0, ev.cwiseAbs().maxCoeff());
    std::vector<Operator> projections;
    int start = 0;
    for (int k = 1; k <= n; ++k) {
      if (k == n || ev(k) - ev(k - 1) > tol) {
        MatrixXcd p = MatrixXcd::Zero(n, n);
        for (int i = start; i < k; ++i) {
          p += es.eigenvectors().col(i) * es.eigenvectors().col(i).adjoint();
        }
        projections.emplace_back(dims, std::move(p));
        start = k;
      }
    }
    if (projections.size() == algebra_dim) return projections;
  }
  throw Error("generic_minimal_projections: failed to separate joint eigenspaces");
}

CommutantBasis finalize(CommutantBasis basis) {
  const int n = static_cast<int>(basis.ops.size());
  basis.gram.resize(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) basis.gram(i, j) = hs_inner(basis.ops[i], basis.ops[j]);
  }
  basis.abelian = commutes_pairwise(basis.ops);
  if (basis.abelian && basis.minimal_projections.empty()) {
    basis.minimal_projections =
        generic_minimal_projections(basis.ops.front().dims(), basis.coord_ops, basis.ops.size());
  }
  if (!basis.abelian) basis.minimal_projections.clear();
  return basis;
}

}  // namespace

CommutantBasis commutant_basis(const GroupSpec& g) {
  CommutantBasis basis;
  const Dims dims = g.dims();
  switch (g.family()) {
    case GroupSpec::Family::uu: {
      const Operator f = flip_operator(g.local_dim());
      const Operator id = Operator::identity(dims);
      basis.ops = {f, id};
      basis.coord_ops = {f};
      basis.labels = {"F"};
      basis.minimal_projections = {0.5 * (id + f), 0.5 * (id - f)};
      break;
    }
    case GroupSpec::Family::uubar: {
      const Operator fh = phihat_operator(g.local_dim());
      const Operator id = Operator::identity(dims);
      basis.ops = {fh, id};
      basis.coord_ops = {fh};
      basis.labels = {"Fhat"};
      basis.minimal_projections = {(1.0 / g.local_dim()) * fh,
                                   id - (1.0 / g.local_dim()) * fh};
      break;
    }
    case GroupSpec::Family::oo: {
      const int d = g.local_dim();
      const Operator f = flip_operator(d);
      const Operator fh = phihat_operator(d);
      const Operator id = Operator::identity(dims);
      basis.ops = {f, fh, id};
      basis.coord_ops = {f, fh};
      basis.labels = {"F", "Fhat"};
      basis.minimal_projections = {(1.0 / d) * fh, 0.5 * (id - f),
                                   0.5 * (id + f) - (1.0 / d) * fh};
      break;
    }
    case GroupSpec::Family::bell: {
      const Operator id = Operator::identity(dims);
      std::vector<Operator> elems;
      for (int k = 1; k <= 3; ++k) {
        elems.emplace_back(dims, -kron(pauli(k), pauli(k)));
      }
      basis.ops = {elems[0], elems[1], elems[2], id};
      basis.coord_ops = {elems[0], elems[1], elems[2]};
      basis.labels = {"x1", "x2", "x3"};
      VectorXcd psi0(4);
      psi0 << 1, 0, 0, 1;
      psi0 /= std::sqrt(2.0);
      basis.minimal_projections.emplace_back(dims, psi0 * psi0.adjoint());
      for (int k = 1; k <= 3; ++k) {
        const VectorXcd psik = kI * kron(MatrixXcd::Identity(2, 2), pauli(k)) * psi0;
        basis.minimal_projections.emplace_back(dims, psik * psik.adjoint());
      }
      break;
    }
    case GroupSpec::Family::weyl: {
      const int d = g.local_dim();
      const auto idx = weyl_index_pairs(d);
      for (const auto& [x, y] : idx.all_nonzero) {
        basis.ops.emplace_back(dims, kron(weyl_operator(d, x, y), weyl_operator(d, -x, -y)));
      }
      basis.ops.push_back(Operator::identity(dims));
      for (const auto& [x, y] : idx.reps) {
        const Operator b(dims, kron(weyl_operator(d, x, y), weyl_operator(d, -x, -y)));
        append_hermitian_parts(b, "W(" + std::to_string(x) + "," + std::to_string(y) + ")",
                               &basis.coord_ops, &basis.labels);
      }
      break;
    }
    case GroupSpec::Family::weyl_conj: {
      const int d = g.local_dim();
      const auto idx = weyl_index_pairs(d);
      for (const auto& [x, y] : idx.all_nonzero) {
        const MatrixXcd w = weyl_operator(d, x, y);
        basis.ops.emplace_back(dims, kron(w, w.conjugate()));
      }
      basis.ops.push_back(Operator::identity(dims));
      for (const auto& [x, y] : idx.reps) {
        const MatrixXcd w = weyl_operator(d, x, y);
        const Operator b(dims, kron(w, w.conjugate()));
        append_hermitian_parts(b, "V(" + std::to_string(x) + "," + std::to_string(y) + ")",
                               &basis.coord_ops, &basis.labels);
      }
      // Characters of Z_d x Z_d give the joint eigenprojections directly.
      const double twopi = 2.0 * std::numbers::pi;
      for (int a = 0; a < d; ++a) {
        for (int b = 0; b < d; ++b) {
          MatrixXcd p = MatrixXcd::Zero(dims.total(), dims.total());
          for (int x = 0; x < d; ++x) {
            for (int y = 0; y < d; ++y) {
              const MatrixXcd w = weyl_operator(d, x, y);
              const Complex chi = std::exp(-kI * (twopi * (a * x + b * y) / d));
              p += chi * kron(w, w.conjugate());
            }
          }
          basis.minimal_projections.emplace_back(dims, p / static_cast<double>(d * d));
        }
      }
      break;
    }
    case GroupSpec::Family::su2: {
      auto projections = su2_projections(g.two_j1(), g.two_j2());
      basis.minimal_projections = projections;
      int two_s = std::abs(g.two_j1() - g.two_j2());
      for (std::size_t k = 0; k + 1 < projections.size(); ++k, two_s += 2) {
        basis.ops.push_back(projections[k]);
        basis.coord_ops.push_back(projections[k]);
        basis.labels.push_back(two_s % 2 == 0 ? "P" + std::to_string(two_s / 2)
                                              : "P" + std::to_string(two_s) + "/2");
      }
      basis.ops.push_back(Operator::identity(dims));
      break;
    }
    case GroupSpec::Family::tensor: {
      const CommutantBasis a = commutant_basis(g.part(0));
      const CommutantBasis b = commutant_basis(g.part(1));
      const Operator& ia = a.ops.back();
      const Operator& ib = b.ops.back();
      for (std::size_t i = 0; i + 1 < a.ops.size(); ++i) basis.ops.push_back(tensor(a.ops[i], ib));
      for (std::size_t j = 0; j + 1 < b.ops.size(); ++j) basis.ops.push_back(tensor(ia, b.ops[j]));
      for (std::size_t i = 0; i + 1 < a.ops.size(); ++i) {
        for (std::size_t j = 0; j + 1 < b.ops.size(); ++j) {
          basis.ops.push_back(tensor(a.ops[i], b.ops[j]));
        }
      }
      basis.ops.push_back(tensor(ia, ib));
      for (std::size_t i = 0; i < a.coord_ops.size(); ++i) {
        basis.coord_ops.push_back(tensor(a.coord_ops[i], ib));
        basis.labels.push_back(a.labels[i] + "1");
      }
      for (std::size_t j = 0; j < b.coord_ops.size(); ++j) {
        basis.coord_ops.push_back(tensor(ia, b.coord_ops[j]));
        basis.labels.push_back(b.labels[j] + "2");
      }
      for (std::size_t i = 0; i < a.coord_ops.size(); ++i) {
        for (std::size_t j = 0; j < b.coord_ops.size(); ++j) {
          basis.coord_ops.push_back(tensor(a.coord_ops[i], b.coord_ops[j]));
          basis.labels.push_back(a.labels[i] + "1*" + b.labels[j] + "2");
        }
      }
      if (!a.minimal_projections.empty() && !b.minimal_projections.empty()) {
        for (const auto& pa : a.minimal_projections) {
          for (const auto& pb : b.minimal_projections) {
            basis.minimal_projections.push_back(tensor(pa, pb));
          }
        }
      }
      break;
    }
    case GroupSpec::Family::tensor_flip: {
      const int d = g.local_dim();
      const Operator f = flip_operator(d);
      const Operator idl = Operator::identity(Dims{d, d});
      const Operator fbar = 0.5 * (tensor(f, idl) + tensor(idl, f));
      const Operator f12 = tensor(f, f);
      basis.ops = {fbar, f12, Operator::identity(dims)};
      basis.coord_ops = {fbar, f12};
      basis.labels = {"Fbar", "F12"};
      const Operator pp = 0.5 * (idl + f);
      const Operator pm = 0.5 * (idl - f);
      basis.minimal_projections = {tensor(pp, pp), tensor(pp, pm) + tensor(pm, pp),
                                   tensor(pm, pm)};
      break;
    }
  }
  return finalize(std::move(basis));
}

// ---------------------------------------------------------------------------
// Twirl and invariant coordinates

Operator twirl(const CommutantBasis& basis, const Operator& a) {
  if (!(basis.ops.front().dims() == a.dims())) {
    throw DimensionMismatch("twirl: operator does not match the group's space");
  }
  const int n = static_cast<int>(basis.ops.size());
  VectorXcd rhs(n);
  for (int i = 0; i < n; ++i) rhs(i) = hs_inner(basis.ops[i], a);
  const VectorXcd c = basis.gram.ldlt().solve(rhs);
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(a.mat().rows(), a.mat().cols());
  for (int i = 0; i < n; ++i) m += c(i) * basis.ops[i].mat();
  return Operator(a.dims(), std::move(m));
}

Operator twirl(const GroupSpec& g, const Operator& a) { return twirl(commutant_basis(g), a); }

Eigen::VectorXd invariant_coords(const CommutantBasis& basis, const Operator& a) {
  VectorXd c(static_cast<int>(basis.coord_ops.size()));
  for (std::size_t i = 0; i < basis.coord_ops.size(); ++i) {
    c(static_cast<int>(i)) = (basis.coord_ops[i].mat() * a.mat()).trace().real();
  }
  return c;
}

Eigen::VectorXd invariant_coords(const GroupSpec& g, const DensityMatrix& rho) {
  if (!(g.dims() == rho.dims())) {
    throw DimensionMismatch("invariant_coords: state does not match the group's space");
  }
  return invariant_coords(commutant_basis(g), rho.op());
}

DensityMatrix state_from_coords(const GroupSpec& g, const Eigen::VectorXd& coords) {
  const CommutantBasis basis = commutant_basis(g);
  const int k = static_cast<int>(basis.coord_ops.size());
  if (coords.size() != k) {
    throw DimensionMismatch("state_from_coords: expected " + std::to_string(k) +
                            " coordinates for " + g.name());
  }
  std::vector<const Operator*> herms;
  for (const auto& op : basis.coord_ops) herms.push_back(&op);
  const Operator id = Operator::identity(g.dims());
  herms.push_back(&id);

  const int n = k + 1;
  MatrixXd gram(n, n);
  VectorXd rhs(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      gram(i, j) = (herms[i]->mat() * herms[j]->mat()).trace().real();
    }
    rhs(i) = i < k ? coords(i) : 1.0;
  }
  const VectorXd a = gram.ldlt().solve(rhs);
  MatrixXcd m = MatrixXcd::Zero(g.dims().total(), g.dims().total());
  for (int i = 0; i < n; ++i) m += a(i) * herms[i]->mat();
  return DensityMatrix(Operator(g.dims(), std::move(m)));
}

GroupSpec partial_conjugate(const GroupSpec& g) {
  switch (g.family()) {
    case GroupSpec::Family::uu: return GroupSpec::uubar(g.local_dim());
    case GroupSpec::Family::uubar: return GroupSpec::uu(g.local_dim());
    case GroupSpec::Family::oo: return GroupSpec::oo(g.local_dim());
    case GroupSpec::Family::bell: return GroupSpec::bell();
    case GroupSpec::Family::weyl: return GroupSpec::weyl_conj(g.local_dim());
    case GroupSpec::Family::weyl_conj: return GroupSpec::weyl(g.local_dim());
    case GroupSpec::Family::tensor:
      return GroupSpec::tensor(partial_conjugate(g.part(0)), partial_conjugate(g.part(1)));
    case GroupSpec::Family::su2:
    case GroupSpec::Family::tensor_flip:
      throw Unsupported("partial_conjugate: not available for " + g.name());
  }
  throw Error("partial_conjugate: unreachable");
}

}  // namespace symtangle
