#include "symtangle/operator.hpp"

#include <unsupported/Eigen/KroneckerProduct>

#include <Eigen/Eigenvalues>

namespace symtangle {

Operator::Operator(Dims dims, Eigen::MatrixXcd mat) : dims_(dims), mat_(std::move(mat)) {
  if (dims_.d1 < 1 || dims_.d2 < 1) {
    throw DimensionMismatch("Operator: factor dimensions must be positive");
  }
  const int n = dims_.total();
  if (mat_.rows() != n || mat_.cols() != n) {
    throw DimensionMismatch("Operator: matrix is " + std::to_string(mat_.rows()) + "x" +
                            std::to_string(mat_.cols()) + " but dims give " + std::to_string(n));
  }
}

Operator Operator::identity(Dims dims) {
  const int n = dims.total();
  return Operator(dims, Eigen::MatrixXcd::Identity(n, n));
}

Operator Operator::zero(Dims dims) {
  const int n = dims.total();
  return Operator(dims, Eigen::MatrixXcd::Zero(n, n));
}

bool Operator::is_hermitian(double tol) const {
  return (mat_ - mat_.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

namespace {

void check_same_dims(const Operator& a, const Operator& b, const char* what) {
  if (!(a.dims() == b.dims())) {
    throw DimensionMismatch(std::string(what) + ": operands live on different spaces");
  }
}

}  // namespace

Operator operator+(const Operator& a, const Operator& b) {
  check_same_dims(a, b, "operator+");
  return Operator(a.dims(), a.mat() + b.mat());
}

Operator operator-(const Operator& a, const Operator& b) {
  check_same_dims(a, b, "operator-");
  return Operator(a.dims(), a.mat() - b.mat());
}

Operator operator*(const Operator& a, const Operator& b) {
  check_same_dims(a, b, "operator*");
  return Operator(a.dims(), a.mat() * b.mat());
}

Operator operator*(Complex c, const Operator& a) { return Operator(a.dims(), c * a.mat()); }

Operator operator*(double c, const Operator& a) { return Operator(a.dims(), c * a.mat()); }

PureStateVector::PureStateVector(Dims dims, Eigen::VectorXcd amp, double norm_tol)
    : dims_(dims), amp_(std::move(amp)) {
  if (amp_.size() != dims_.total()) {
    throw DimensionMismatch("PureStateVector: amplitude length does not match dims");
  }
  if (std::abs(amp_.norm() - 1.0) > norm_tol) {
    throw NotAState("PureStateVector: vector is not normalized");
  }
}

Eigen::MatrixXcd PureStateVector::amplitude_matrix() const {
  Eigen::MatrixXcd m(dims_.d1, dims_.d2);
  for (int i = 0; i < dims_.d1; ++i) {
    for (int j = 0; j < dims_.d2; ++j) {
      m(i, j) = amp_(i * dims_.d2 + j);
    }
  }
  return m;
}

Operator PureStateVector::projector() const {
  return Operator(dims_, amp_ * amp_.adjoint());
}

DensityMatrix::DensityMatrix(Operator op, double psd_tol) : op_(std::move(op)) {
  const Eigen::MatrixXcd& m = op_.mat();
  if ((m - m.adjoint()).cwiseAbs().maxCoeff() > 1e-10) {
    throw NotAState("DensityMatrix: not Hermitian");
  }
  if (std::abs(m.trace().real() - 1.0) > 1e-10 || std::abs(m.trace().imag()) > 1e-10) {
    throw NotAState("DensityMatrix: trace is not one");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -psd_tol) {
    throw NotAState("DensityMatrix: negative eigenvalue " +
                    std::to_string(es.eigenvalues().minCoeff()));
  }
}

DensityMatrix DensityMatrix::from_pure(const PureStateVector& psi) {
  return DensityMatrix(psi.projector());
}

Eigen::MatrixXcd kron(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
  return Eigen::kroneckerProduct(a, b);
}

namespace {

// Permutation taking the plain Kronecker index (i j k l) with i,j on a and
// k,l on b to the factor-sorted index (i k j l).
std::vector<int> sort_permutation(Dims a, Dims b) {
  std::vector<int> perm(a.total() * b.total());
  for (int i = 0; i < a.d1; ++i) {
    for (int j = 0; j < a.d2; ++j) {
      for (int k = 0; k < b.d1; ++k) {
        for (int l = 0; l < b.d2; ++l) {
          const int plain = ((i * a.d2 + j) * b.d1 + k) * b.d2 + l;
          const int sorted = ((i * b.d1 + k) * a.d2 + j) * b.d2 + l;
          perm[plain] = sorted;
        }
      }
    }
  }
  return perm;
}

}  // namespace

Operator tensor(const Operator& a, const Operator& b) {
  const Dims out{a.dims().d1 * b.dims().d1, a.dims().d2 * b.dims().d2};
  const Eigen::MatrixXcd plain = kron(a.mat(), b.mat());
  const std::vector<int> perm = sort_permutation(a.dims(), b.dims());
  const int n = out.total();
  Eigen::MatrixXcd m(n, n);
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) {
      m(perm[r], perm[c]) = plain(r, c);
    }
  }
  return Operator(out, std::move(m));
}

PureStateVector tensor(const PureStateVector& a, const PureStateVector& b) {
  const Dims out{a.dims().d1 * b.dims().d1, a.dims().d2 * b.dims().d2};
  Eigen::VectorXcd plain = kron(Eigen::MatrixXcd(a.amp()), Eigen::MatrixXcd(b.amp()));
  const std::vector<int> perm = sort_permutation(a.dims(), b.dims());
  Eigen::VectorXcd v(out.total());
  for (int r = 0; r < out.total(); ++r) {
    v(perm[r]) = plain(r);
  }
  return PureStateVector(out, std::move(v));
}

Operator tensor_unsorted(const Operator& a, const Operator& b) {
  return Operator(Dims{a.dims().total(), b.dims().total()}, kron(a.mat(), b.mat()));
}

Operator partial_transpose(const Operator& a) {
  const int d1 = a.dims().d1;
  const int d2 = a.dims().d2;
  Eigen::MatrixXcd m(a.mat().rows(), a.mat().cols());
  for (int i = 0; i < d1; ++i) {
    for (int j = 0; j < d2; ++j) {
      for (int k = 0; k < d1; ++k) {
        for (int l = 0; l < d2; ++l) {
          m(i * d2 + j, k * d2 + l) = a.mat()(i * d2 + l, k * d2 + j);
        }
      }
    }
  }
  return Operator(a.dims(), std::move(m));
}

Operator flip_operator(int d) {
  if (d < 1) throw DomainError("flip_operator: d must be positive");
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(d * d, d * d);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      m(i * d + j, j * d + i) = 1.0;
    }
  }
  return Operator(Dims{d, d}, std::move(m));
}

Operator phihat_operator(int d) {
  if (d < 1) throw DomainError("phihat_operator: d must be positive");
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(d * d, d * d);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      m(i * d + i, j * d + j) = 1.0;
    }
  }
  return Operator(Dims{d, d}, std::move(m));
}

Complex hs_inner(const Operator& a, const Operator& b) {
  check_same_dims(a, b, "hs_inner");
  return (a.mat().adjoint() * b.mat()).trace();
}

double expectation(const DensityMatrix& rho, const Operator& a) {
  if (!(rho.dims() == a.dims())) {
    throw DimensionMismatch("expectation: state and operator live on different spaces");
  }
  return (rho.mat() * a.mat()).trace().real();
}

}  // namespace symtangle
