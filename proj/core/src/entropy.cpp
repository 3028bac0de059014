#include "symtangle/entropy.hpp"

#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

namespace symtangle {

namespace {
constexpr double kSupportCut = 1e-12;  // sigma eigenvalues below this count as zero
constexpr double kLeakTol = 1e-12;     // rho mass allowed outside supp(sigma)
}  // namespace

double base_factor(LogBase base) {
  return base == LogBase::bits ? 1.0 / std::log(2.0) : 1.0;
}

double eta(double t) { return t > 0.0 ? -t * std::log(t) : 0.0; }

double binary_entropy(double p, LogBase base) {
  if (p < 0.0 || p > 1.0) throw DomainError("binary_entropy: p outside [0,1]");
  return (eta(p) + eta(1.0 - p)) * base_factor(base);
}

double shannon_entropy(const Eigen::VectorXd& p, LogBase base) {
  double s = 0.0;
  for (int i = 0; i < p.size(); ++i) s += eta(std::max(p(i), 0.0));
  return s * base_factor(base);
}

Eigen::VectorXd hermitian_spectrum(const Operator& a) {
  return hermitian_eigen(a).values;
}

HermitianEigen hermitian_eigen(const Operator& a) {
  if (!a.is_hermitian(1e-10)) throw NotHermitian("hermitian_eigen: input is not Hermitian");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(a.mat());
  return HermitianEigen{es.eigenvalues(), es.eigenvectors()};
}

double von_neumann_entropy(const DensityMatrix& rho, LogBase base) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(rho.mat(), Eigen::EigenvaluesOnly);
  double s = 0.0;
  for (int i = 0; i < es.eigenvalues().size(); ++i) s += eta(std::max(es.eigenvalues()(i), 0.0));
  return s * base_factor(base);
}

double relative_entropy(const DensityMatrix& rho, const DensityMatrix& sigma, LogBase base) {
  if (!(rho.dims() == sigma.dims())) {
    throw DimensionMismatch("relative_entropy: states live on different spaces");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(sigma.mat());
  const Eigen::VectorXd& q = es.eigenvalues();
  const Eigen::MatrixXcd& v = es.eigenvectors();

  // Projection of rho onto sigma's eigenbasis; mass on null directions means
  // the relative entropy diverges.
  double s_cross = 0.0;  // -tr(rho ln sigma)
  double mass_on_support = 0.0;
  for (int j = 0; j < q.size(); ++j) {
    const double w = (v.col(j).adjoint() * rho.mat() * v.col(j))(0, 0).real();
    if (q(j) > kSupportCut) {
      mass_on_support += w;
      s_cross -= w * std::log(q(j));
    }
  }
  if (1.0 - mass_on_support > kLeakTol) {
    return std::numeric_limits<double>::infinity();
  }
  const double s_rho = von_neumann_entropy(rho, LogBase::nats);
  return (s_cross - s_rho) * base_factor(base);
}

double schmidt_entanglement(const PureStateVector& psi, LogBase base) {
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(psi.amplitude_matrix());
  double s = 0.0;
  for (int i = 0; i < svd.singularValues().size(); ++i) {
    const double sv = svd.singularValues()(i);
    s += eta(sv * sv);
  }
  return s * base_factor(base);
}

}  // namespace symtangle
