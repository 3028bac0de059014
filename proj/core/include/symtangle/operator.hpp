#pragma once

#include <complex>

#include <Eigen/Dense>

#include "symtangle/errors.hpp"

namespace symtangle {

using Complex = std::complex<double>;

// Bipartite factor dimensions (d1, d2).  Product basis is row-major:
// |i j> maps to index i*d2 + j.
struct Dims {
  int d1 = 0;
  int d2 = 0;

  int total() const { return d1 * d2; }
  friend bool operator==(const Dims&, const Dims&) = default;
};

// A linear operator on C^{d1} (x) C^{d2}.  Dimensions are fixed at
// construction; the matrix is exposed read-only.
class Operator {
 public:
  Operator(Dims dims, Eigen::MatrixXcd mat);

  static Operator identity(Dims dims);
  static Operator zero(Dims dims);

  const Dims& dims() const { return dims_; }
  const Eigen::MatrixXcd& mat() const { return mat_; }

  Complex trace() const { return mat_.trace(); }
  Operator adjoint() const { return Operator(dims_, mat_.adjoint()); }
  bool is_hermitian(double tol = 1e-10) const;

  friend Operator operator+(const Operator& a, const Operator& b);
  friend Operator operator-(const Operator& a, const Operator& b);
  friend Operator operator*(const Operator& a, const Operator& b);
  friend Operator operator*(Complex c, const Operator& a);
  friend Operator operator*(double c, const Operator& a);

 private:
  Dims dims_;
  Eigen::MatrixXcd mat_;
};

// A unit vector in C^{d1} (x) C^{d2}.
class PureStateVector {
 public:
  PureStateVector(Dims dims, Eigen::VectorXcd amp, double norm_tol = 1e-12);

  const Dims& dims() const { return dims_; }
  const Eigen::VectorXcd& amp() const { return amp_; }

  // Amplitudes reshaped to a d1 x d2 matrix M with M(i,j) = <ij|psi>.
  Eigen::MatrixXcd amplitude_matrix() const;
  Operator projector() const;

 private:
  Dims dims_;
  Eigen::VectorXcd amp_;
};

// A density matrix: Hermitian, unit trace, PSD within `psd_tol`.
class DensityMatrix {
 public:
  explicit DensityMatrix(Operator op, double psd_tol = 1e-9);
  static DensityMatrix from_pure(const PureStateVector& psi);

  const Dims& dims() const { return op_.dims(); }
  const Operator& op() const { return op_; }
  const Eigen::MatrixXcd& mat() const { return op_.mat(); }

 private:
  Operator op_;
};

// Plain Kronecker product of raw matrices.
Eigen::MatrixXcd kron(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b);

// Tensor product of bipartite operators with factors re-sorted so the result
// is again bipartite: A on H1(x)H2, B on K1(x)K2 gives an operator on
// (H1 K1) (x) (H2 K2), i.e. first factors grouped together.
Operator tensor(const Operator& a, const Operator& b);
PureStateVector tensor(const PureStateVector& a, const PureStateVector& b);

// Tensor product without re-sorting: the result is bipartite with respect to
// the split (whole space of a) (x) (whole space of b).
Operator tensor_unsorted(const Operator& a, const Operator& b);

// Transposition of the second factor: <ij|T(A)|kl> = <il|A|kj>.
Operator partial_transpose(const Operator& a);

// Flip (swap) operator F on C^d (x) C^d: F |ij> = |ji>.
Operator flip_operator(int d);

// Rank-one companion of the flip: Fhat = sum_ij |ii><jj|, the unnormalized
// projector onto the maximally entangled vector.  Fhat = T(F).
Operator phihat_operator(int d);

// Hilbert-Schmidt inner product tr(a^dagger b).
Complex hs_inner(const Operator& a, const Operator& b);

// tr(rho a); real part only, valid for Hermitian a.
double expectation(const DensityMatrix& rho, const Operator& a);

}  // namespace symtangle
