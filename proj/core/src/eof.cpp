#include "symtangle/eof.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "symtangle/numerics.hpp"

namespace symtangle {

namespace {

constexpr double kPi = 3.14159265358979323846;

double clamp01(double x) { return std::min(1.0, std::max(0.0, x)); }

void check_f_range(double f) {
  if (!(f >= -1.0 - 1e-12 && f <= 1.0 + 1e-12)) {
    throw DomainError("flip expectation must lie in [-1, 1]");
  }
}

void check_fhat_range(double fhat, int d) {
  if (d < 2) throw DomainError("local dimension must be at least 2");
  if (!(fhat >= -1e-12 && fhat <= d + 1e-12)) {
    throw DomainError("fhat must lie in [0, d]");
  }
}

Eigen::VectorXcd basis_state(int n, int i) {
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(n);
  v(i) = 1.0;
  return v;
}

// |phi> (x) |chi> in row-major product indexing.
Eigen::VectorXcd product_amp(const Eigen::VectorXcd& phi, const Eigen::VectorXcd& chi) {
  const int d1 = static_cast<int>(phi.size());
  const int d2 = static_cast<int>(chi.size());
  Eigen::VectorXcd v(d1 * d2);
  for (int i = 0; i < d1; ++i) v.segment(i * d2, d2) = phi(i) * chi;
  return v;
}

// Equal-weight Haar orbit of one seed vector; every member shares the seed's
// invariant coordinates, so the mixture reproduces them exactly.
std::vector<WeightedPure> orbit_decomposition(const GroupSpec& g, const Eigen::VectorXcd& amp,
                                              int members, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<WeightedPure> out;
  out.reserve(members);
  for (int k = 0; k < members; ++k) {
    const Operator u = haar_sample(g, rng);
    out.push_back({1.0 / members, PureStateVector(g.dims(), u.mat() * amp)});
  }
  return out;
}

// Minimizing vector x|01> + y|10> at flip expectation f < 0.
Eigen::VectorXcd werner_pair_amp(double f, int d) {
  const double s = std::sqrt(std::max(0.0, 1.0 - f * f));
  const double x = std::sqrt(clamp01(0.5 * (1.0 - s)));
  const double y = -std::sqrt(clamp01(0.5 * (1.0 + s)));
  return x * product_amp(basis_state(d, 0), basis_state(d, 1)) +
         y * product_amp(basis_state(d, 1), basis_state(d, 0));
}

// Minimizing vector of the fhat-constrained problem: sqrt(gamma)|00> +
// sqrt((1-gamma)/(d-1)) sum_{i>0} |ii> for fhat >= 1, a product state below.
Eigen::VectorXcd isotropic_amp(double fhat, int d) {
  if (fhat <= 1.0) {
    Eigen::VectorXcd chi = Eigen::VectorXcd::Zero(d);
    chi(0) = std::sqrt(clamp01(fhat));
    chi(1) = std::sqrt(clamp01(1.0 - fhat));
    return product_amp(basis_state(d, 0), chi);
  }
  const double gamma =
      clamp01(std::pow(std::sqrt(fhat) + std::sqrt((d - 1.0) * (d - fhat)), 2) / (double(d) * d));
  const double x = std::sqrt(gamma);
  const double y = std::sqrt(clamp01((1.0 - gamma) / (d - 1.0)));
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(d * d);
  v(0) = x;
  for (int i = 1; i < d; ++i) v(i * d + i) = y;
  return v;
}

Eigen::MatrixXcd amp_matrix(const Eigen::VectorXcd& v, Dims dims) {
  using RowMat = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  return Eigen::Map<const RowMat>(v.data(), dims.d1, dims.d2);
}

Eigen::VectorXcd flatten(const Eigen::MatrixXcd& m) {
  using RowMat = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  RowMat r = m;
  return Eigen::Map<const Eigen::VectorXcd>(r.data(), r.size());
}

// Entanglement entropy (nats) of an unnormalized vector, via the singular
// values of its amplitude matrix.
double pure_entanglement(const Eigen::VectorXcd& v, Dims dims) {
  const Eigen::VectorXd s =
      Eigen::JacobiSVD<Eigen::MatrixXcd>(amp_matrix(v, dims)).singularValues();
  const double n = s.squaredNorm();
  if (n <= 0.0) return 0.0;
  double e = 0.0;
  for (int k = 0; k < s.size(); ++k) e += eta(s(k) * s(k) / n);
  return e;
}

// Checks coordinates against the invariant state space when the family has
// one (abelian commutant); silently passes otherwise.
void require_inside_state_space(const GroupSpec& g, const Eigen::VectorXd& c) {
  Region ss;
  try {
    ss = invariant_state_space(g);
  } catch (const Unsupported&) {
    return;
  }
  if (!region_membership(ss, c, 1e-9)) {
    throw OutsideStateSpace("coordinates are outside the invariant state space");
  }
}

}  // namespace

double epsilon_werner(double f) {
  check_f_range(f);
  f = std::clamp(f, -1.0, 1.0);
  if (f >= 0.0) return 0.0;
  return binary_entropy(0.5 * (1.0 - std::sqrt(1.0 - f * f)));
}

double epsilon_isotropic(double fhat, int d) {
  check_fhat_range(fhat, d);
  fhat = std::clamp(fhat, 0.0, double(d));
  if (fhat <= 1.0) return 0.0;
  const double gamma =
      clamp01(std::pow(std::sqrt(fhat) + std::sqrt((d - 1.0) * (d - fhat)), 2) / (double(d) * d));
  return binary_entropy(gamma) + (1.0 - gamma) * std::log(d - 1.0);
}

EnvelopeResult isotropic_envelope(int d, int grid_points) {
  if (d < 2) throw DomainError("local dimension must be at least 2");
  if (grid_points < 2) throw DomainError("envelope grid needs at least 2 points");
  CurveSamples curve;
  curve.xs = Eigen::VectorXd::LinSpaced(grid_points, 0.0, double(d));
  curve.ys.resize(grid_points);
  for (int i = 0; i < grid_points; ++i) curve.ys(i) = epsilon_isotropic(curve.xs(i), d);
  curve.label = "isotropic pure-state minimum, d=" + std::to_string(d);
  return lower_convex_envelope(curve);
}

EofResult eof_werner(double f, int d) {
  check_f_range(f);
  if (d < 2) throw DomainError("local dimension must be at least 2");
  f = std::clamp(f, -1.0, 1.0);

  EofResult r;
  r.value = epsilon_werner(f);
  r.method = EofMethod::closed_form;
  const Eigen::VectorXcd seed_amp = f >= 0.0
                                        ? [&] {
                                            Eigen::VectorXcd chi = Eigen::VectorXcd::Zero(d);
                                            chi(0) = std::sqrt(f);
                                            chi(1) = std::sqrt(1.0 - f);
                                            return product_amp(basis_state(d, 0), chi);
                                          }()
                                        : werner_pair_amp(f, d);
  r.decomposition = orbit_decomposition(GroupSpec::uu(d), seed_amp, 6, 137);
  return r;
}

EofResult eof_isotropic(double fhat, int d) {
  check_fhat_range(fhat, d);
  fhat = std::clamp(fhat, 0.0, double(d));

  EofResult r;
  const GroupSpec g = GroupSpec::uubar(d);
  const EnvelopeResult env = isotropic_envelope(d);
  for (const FlatPiece& fp : env.flat_pieces) {
    if (fhat > fp.x1 + 1e-12 && fhat < fp.x2 - 1e-12) {
      const double lam = (fp.x2 - fhat) / (fp.x2 - fp.x1);
      r.value = lam * epsilon_isotropic(fp.x1, d) + (1.0 - lam) * epsilon_isotropic(fp.x2, d);
      r.method = EofMethod::envelope;
      r.flat_piece = fp;
      for (const auto& [x, w] : {std::pair{fp.x1, lam}, std::pair{fp.x2, 1.0 - lam}}) {
        for (auto& item : orbit_decomposition(g, isotropic_amp(x, d), 4, 733)) {
          item.weight *= w;
          r.decomposition.push_back(std::move(item));
        }
      }
      return r;
    }
  }
  r.value = epsilon_isotropic(fhat, d);
  r.method = EofMethod::closed_form;
  r.decomposition = orbit_decomposition(g, isotropic_amp(fhat, d), 6, 733);
  return r;
}

EofResult eof_oo(double f, double fhat, int d) {
  if (d < 2) throw DomainError("local dimension must be at least 2");
  const double tol = 1e-9;

  Eigen::MatrixXd tri(2, 3);
  tri << -1, 1, 1, 0, 0, double(d);
  Eigen::Vector2d pt(f, fhat);
  if (num::simplex_fit(tri, pt).dist > tol * std::max(1.0, double(d))) {
    throw OutsideStateSpace("(f, fhat) is outside the invariant triangle");
  }

  // Separable square [0,1]^2: mixture of the four corner product states with
  // bilinear weights.
  if (f >= -tol && f <= 1.0 + tol && fhat >= -tol && fhat <= 1.0 + tol) {
    const double fc = clamp01(f), hc = clamp01(fhat);
    EofResult r;
    r.value = 0.0;
    r.method = EofMethod::closed_form;
    const Complex i1(0.0, 1.0);
    Eigen::VectorXcd e0 = basis_state(d, 0), e1 = basis_state(d, 1);
    Eigen::VectorXcd plus = (e0 + i1 * e1) / std::sqrt(2.0);
    Eigen::VectorXcd minus = (e0 - i1 * e1) / std::sqrt(2.0);
    const Dims dims{d, d};
    const std::array<std::pair<double, Eigen::VectorXcd>, 4> corners = {{
        {(1 - fc) * (1 - hc), product_amp(e0, e1)},   // (f, fhat) = (0, 0)
        {fc * (1 - hc), product_amp(plus, plus)},     // (1, 0)
        {(1 - fc) * hc, product_amp(plus, minus)},    // (0, 1)
        {fc * hc, product_amp(e0, e0)},               // (1, 1)
    }};
    for (const auto& [w, amp] : corners) {
      if (w > 1e-15) r.decomposition.push_back({w, PureStateVector(dims, amp)});
    }
    return r;
  }

  // Triangle reached from the square's left edge: value depends only on f.
  if (f <= tol && fhat <= 1.0 + f + tol) {
    EofResult r;
    r.value = epsilon_werner(std::min(f, 0.0));
    r.method = EofMethod::closed_form;
    return r;
  }

  // Triangle reached from the square's top edge: value depends only on fhat.
  if (fhat >= 1.0 - tol && fhat <= 1.0 + (d - 1.0) * f + tol) {
    EofResult iso = eof_isotropic(std::clamp(fhat, 0.0, double(d)), d);
    EofResult r;
    r.value = iso.value;
    r.method = iso.method;
    r.flat_piece = iso.flat_piece;
    if (f >= 1.0 - tol) r.decomposition = std::move(iso.decomposition);
    return r;
  }

  throw UnsupportedRegion("no formula is known on the central triangle");
}

namespace {

// Bell basis in the minimal-projection order of the Bell family; the phases
// make it a conjugation basis: the pure-state tangle is |sum_j c_j^2| for
// amplitudes c in this basis.
std::array<Eigen::Vector4cd, 4> bell_conjugation_basis() {
  const Complex i1(0.0, 1.0);
  const double s = 1.0 / std::sqrt(2.0);
  std::array<Eigen::Vector4cd, 4> m;
  m[0] << s, 0, 0, s;            // (|00> + |11>)/sqrt2
  m[1] << 0, i1 * s, i1 * s, 0;  // i(|01> + |10>)/sqrt2
  m[2] << 0, -s, s, 0;           // (|10> - |01>)/sqrt2
  m[3] << i1 * s, 0, 0, -i1 * s; // i(|00> - |11>)/sqrt2
  return m;
}

// Unit phases u_j with |sum_j w_j u_j| = max(0, 2 max w - 1), by closing the
// weight polygon when the maximum weight is at most 1/2.
std::array<Complex, 4> tangle_phases(const Eigen::Vector4d& w) {
  std::array<int, 4> idx = {0, 1, 2, 3};
  std::sort(idx.begin(), idx.end(), [&](int a, int b) { return w(a) > w(b); });
  const double a = w(idx[0]), b = w(idx[1]), c = w(idx[2]), e = w(idx[3]);

  std::array<Complex, 4> u;
  if (2.0 * a - 1.0 > 0.0) {
    // One dominant weight: align it against the rest.
    u[idx[0]] = 1.0;
    u[idx[1]] = u[idx[2]] = u[idx[3]] = -1.0;
    return u;
  }

  // Close the quadrilateral a + b e^{iA} + c u_c + e u_e = 0.  The (c, e) arm
  // is given total length L, feasible because a <= b + c + e and a >= b.
  const double L = std::max(c - e, a - b);
  Complex ub(1.0, 0.0);
  if (a > 1e-15 && b > 1e-15) {
    const double cosA = std::clamp((a * a + b * b - L * L) / (2.0 * a * b), -1.0, 1.0);
    ub = std::polar(1.0, kPi - std::acos(cosA));
  }
  const Complex rest = -(a + b * ub);  // must equal c u_c + e u_e, |rest| = L
  Complex uc(0.0, 1.0), ue(0.0, -1.0);
  if (std::abs(rest) > 1e-15 && c > 1e-15) {
    const double cosP = std::clamp((c * c + L * L - e * e) / (2.0 * c * L), -1.0, 1.0);
    uc = std::polar(1.0, std::arg(rest) + std::acos(cosP));
    ue = e > 1e-15 ? (rest - c * uc) / e : Complex(1.0, 0.0);
  } else if (c <= 1e-15) {
    uc = ue = Complex(1.0, 0.0);
  }
  u[idx[0]] = 1.0;
  u[idx[1]] = ub;
  u[idx[2]] = uc / std::max(std::abs(uc), 1e-300);
  u[idx[3]] = ue / std::max(std::abs(ue), 1e-300);
  return u;
}

}  // namespace

EofResult eof_bell_diagonal(const Eigen::Vector4d& weights) {
  for (int j = 0; j < 4; ++j) {
    if (weights(j) < -1e-12) throw InvalidDistribution("Bell weights must be nonnegative");
  }
  if (std::abs(weights.sum() - 1.0) > 1e-10) {
    throw InvalidDistribution("Bell weights must sum to one");
  }
  Eigen::Vector4d w = weights.cwiseMax(0.0);
  w /= w.sum();

  const double concurrence = std::max(0.0, 2.0 * w.maxCoeff() - 1.0);
  EofResult r;
  r.value = binary_entropy(0.5 * (1.0 + std::sqrt(1.0 - concurrence * concurrence)));
  r.method = EofMethod::closed_form;

  // Four ensemble members mixing the Bell weights with Hadamard signs; every
  // member has tangle equal to the concurrence, hence entanglement equal to
  // the convex-roof value.
  const auto basis = bell_conjugation_basis();
  const auto phase = tangle_phases(w);
  Eigen::Vector4cd coeff;  // c_j with c_j^2 = w_j u_j
  for (int j = 0; j < 4; ++j) {
    coeff(j) = std::sqrt(w(j)) * std::polar(1.0, 0.5 * std::arg(phase[j]));
  }
  const std::array<std::array<double, 4>, 4> hadamard = {
      {{1, 1, 1, 1}, {1, 1, -1, -1}, {1, -1, 1, -1}, {1, -1, -1, 1}}};
  for (int k = 0; k < 4; ++k) {
    Eigen::Vector4cd amp = Eigen::Vector4cd::Zero();
    for (int j = 0; j < 4; ++j) amp += hadamard[k][j] * coeff(j) * basis[j];
    r.decomposition.push_back({0.25, PureStateVector(Dims{2, 2}, amp)});
  }
  return r;
}

EpsilonNumericResult epsilon_numeric(const GroupSpec& g, const Eigen::VectorXd& coords,
                                     const PureSearchOptions& opt) {
  const CommutantBasis basis = commutant_basis(g);
  const int nc = static_cast<int>(basis.coord_ops.size());
  if (coords.size() != nc) throw DimensionMismatch("coordinate count does not match the family");
  require_inside_state_space(g, coords);

  const Dims dims = g.dims();
  const int n = dims.total();
  std::vector<Eigen::MatrixXcd> h(nc);
  for (int a = 0; a < nc; ++a) h[a] = basis.coord_ops[a].mat();

  const auto residuals = [&](const Eigen::VectorXcd& psi, Eigen::VectorXd& out) {
    out.resize(nc);
    for (int a = 0; a < nc; ++a) out(a) = (psi.adjoint() * h[a] * psi).value().real() - coords(a);
  };

  double best = std::numeric_limits<double>::infinity();
  Eigen::VectorXcd best_psi;
  Eigen::VectorXd resid;

  for (int restart = 0; restart < opt.restarts; ++restart) {
    std::mt19937_64 rng(num::mix_seed(opt.seed, restart));
    std::normal_distribution<double> gauss;
    Eigen::VectorXd x(2 * n);
    for (int i = 0; i < 2 * n; ++i) x(i) = gauss(rng);

    for (const double mu : {1e2, 1e4, 1e6}) {
      const auto fn = [&](const Eigen::VectorXd& v) {
        Eigen::VectorXcd psi = v.head(n) + Complex(0, 1) * v.tail(n);
        const double nrm = psi.norm();
        if (nrm < 1e-8) return 1e9;
        psi /= nrm;
        Eigen::VectorXd res;
        residuals(psi, res);
        return pure_entanglement(psi, dims) + mu * res.squaredNorm();
      };
      x = num::nelder_mead(fn, x, mu == 1e2 ? 0.4 : 0.08, opt.iters).x;
    }

    Eigen::VectorXcd psi = x.head(n) + Complex(0, 1) * x.tail(n);
    const double nrm = psi.norm();
    if (nrm < 1e-8) continue;
    psi /= nrm;
    residuals(psi, resid);
    if (resid.lpNorm<Eigen::Infinity>() > opt.feas_tol) continue;
    const double e = pure_entanglement(psi, dims);
    if (e < best) {
      best = e;
      best_psi = psi;
    }
  }

  if (!std::isfinite(best)) {
    throw Infeasible("no pure state attains the requested coordinates");
  }
  return {best, PureStateVector(dims, best_psi)};
}

namespace {

struct RoofObjective {
  Dims dims;
  int n, terms;
  const std::vector<Eigen::MatrixXcd>* h;
  Eigen::VectorXd target;
  double mu = 0.0;

  Eigen::VectorXcd member(const Eigen::VectorXd& x, int i) const {
    return x.segment(2 * n * i, n) + Complex(0, 1) * x.segment(2 * n * i + n, n);
  }

  // Value and gradient of sum_i lambda_i E(psi_i) + mu * penalty, where
  // lambda_i = |v_i|^2 / N and psi_i = v_i / |v_i| (renormalized ensemble).
  double eval(const Eigen::VectorXd& x, Eigen::VectorXd& grad) const {
    const int nc = static_cast<int>(h->size());
    std::vector<Eigen::MatrixXcd> m(terms), u(terms), v(terms);
    std::vector<Eigen::VectorXd> sv(terms);
    Eigen::VectorXd ni(terms), ti(terms);
    Eigen::MatrixXd q(terms, nc);

    double bign = 0.0, bigt = 0.0;
    for (int i = 0; i < terms; ++i) {
      const Eigen::VectorXcd vi = member(x, i);
      m[i] = amp_matrix(vi, dims);
      Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m[i], Eigen::ComputeThinU | Eigen::ComputeThinV);
      u[i] = svd.matrixU();
      v[i] = svd.matrixV();
      sv[i] = svd.singularValues();
      ni(i) = sv[i].squaredNorm();
      double t = ni(i) > 1e-300 ? ni(i) * std::log(ni(i)) : 0.0;
      for (int k = 0; k < sv[i].size(); ++k) {
        const double s2 = sv[i](k) * sv[i](k);
        if (s2 > 1e-300) t -= s2 * std::log(s2);
      }
      ti(i) = t;
      for (int a = 0; a < nc; ++a) {
        q(i, a) = (vi.adjoint() * (*h)[a] * vi).value().real();
      }
      bign += ni(i);
      bigt += t;
    }
    if (bign < 1e-12) {
      grad = -2.0 * x;
      return 1e9;
    }

    Eigen::VectorXd r(nc);
    for (int a = 0; a < nc; ++a) r(a) = q.col(a).sum() / bign - target(a);
    const double value = bigt / bign + mu * r.squaredNorm();
    const double rq = r.dot(q.colwise().sum().transpose());  // sum_a r_a Q_a

    grad.resize(x.size());
    for (int i = 0; i < terms; ++i) {
      const Eigen::VectorXcd vi = member(x, i);
      Eigen::VectorXd gs(sv[i].size());
      for (int k = 0; k < sv[i].size(); ++k) {
        const double s = sv[i](k), s2 = std::max(s * s, 1e-300);
        gs(k) = s * (std::log(s2) + 1.0);
      }
      const double logn = std::log(std::max(ni(i), 1e-300));
      Eigen::MatrixXcd gmat =
          ((logn + 1.0) * m[i] - u[i] * gs.asDiagonal() * v[i].adjoint()) / bign -
          (bigt / (bign * bign)) * m[i] - (2.0 * mu / (bign * bign)) * rq * m[i];
      Eigen::VectorXcd hv = Eigen::VectorXcd::Zero(n);
      for (int a = 0; a < static_cast<int>(h->size()); ++a) hv += r(a) * ((*h)[a] * vi);
      Eigen::VectorXcd g = flatten(gmat) + (2.0 * mu / bign) * hv;
      grad.segment(2 * n * i, n) = 2.0 * g.real();
      grad.segment(2 * n * i + n, n) = 2.0 * g.imag();
    }
    return value;
  }
};

}  // namespace

EofResult eof_bruteforce(const GroupSpec& g, const Eigen::VectorXd& coords,
                         const RoofSearchOptions& opt) {
  const CommutantBasis basis = commutant_basis(g);
  const int nc = static_cast<int>(basis.coord_ops.size());
  if (coords.size() != nc) throw DimensionMismatch("coordinate count does not match the family");
  require_inside_state_space(g, coords);

  const Dims dims = g.dims();
  const int n = dims.total();
  const int terms = opt.ensemble_size > 0 ? opt.ensemble_size : n * n;
  if (terms < 2) throw DomainError("ensemble must have at least two members");

  std::vector<Eigen::MatrixXcd> h(nc);
  for (int a = 0; a < nc; ++a) h[a] = basis.coord_ops[a].mat();

  RoofObjective obj{dims, n, terms, &h, coords, 0.0};
  const int stages = 5;
  const int iters_per_stage = std::max(1, opt.iters / stages);

  EofResult best;
  best.value = std::numeric_limits<double>::infinity();
  best.method = EofMethod::oracle_upper_bound;

  for (int restart = 0; restart < opt.restarts; ++restart) {
    std::mt19937_64 rng(num::mix_seed(opt.seed, 1000 + restart));
    std::normal_distribution<double> gauss(0.0, 1.0 / std::sqrt(2.0 * n * terms));
    Eigen::VectorXd x(2 * n * terms);
    for (int i = 0; i < x.size(); ++i) x(i) = gauss(rng);

    double lr = 0.03;
    for (int stage = 0; stage < stages; ++stage) {
      obj.mu = 10.0 * std::pow(10.0, stage);
      num::AdamOptions ao;
      ao.lr = lr;
      ao.iters = iters_per_stage;
      x = num::adam([&](const Eigen::VectorXd& y, Eigen::VectorXd& grad) { return obj.eval(y, grad); },
                    x, ao);
      lr *= 0.7;
    }

    // Extract the ensemble and project the weights exactly onto the
    // constraint set (sum one, coordinates reproduced).
    std::vector<Eigen::VectorXcd> psis;
    std::vector<double> raw;
    for (int i = 0; i < terms; ++i) {
      Eigen::VectorXcd vi = obj.member(x, i);
      const double nrm2 = vi.squaredNorm();
      if (nrm2 < 1e-12) continue;
      psis.push_back(vi / std::sqrt(nrm2));
      raw.push_back(nrm2);
    }
    if (psis.empty()) continue;
    const int k = static_cast<int>(psis.size());
    Eigen::VectorXd lam0 = Eigen::Map<Eigen::VectorXd>(raw.data(), k);
    lam0 /= lam0.sum();

    Eigen::MatrixXd em(nc + 1, k);
    Eigen::VectorXd ef(nc + 1);
    em.row(0).setOnes();
    ef(0) = 1.0;
    for (int a = 0; a < nc; ++a) {
      for (int i = 0; i < k; ++i) {
        em(a + 1, i) = (psis[i].adjoint() * h[a] * psis[i]).value().real();
      }
      ef(a + 1) = coords(a);
    }
    // Exact projection when the member coordinates bracket the target;
    // otherwise fall back to the penalized weights (still an upper-bound
    // estimate, off by at most the final penalty residual).
    Eigen::VectorXd lam = lam0;
    for (const double tol : {1e-7, 1e-5}) {
      try {
        lam = num::constrained_lsq_nonneg(Eigen::MatrixXd::Identity(k, k), lam0, em, ef, tol);
        break;
      } catch (const Infeasible&) {
      }
    }
    if (lam.sum() > 1e-12) lam /= lam.sum();

    double value = 0.0;
    for (int i = 0; i < k; ++i) value += lam(i) * pure_entanglement(psis[i], dims);
    if (value < best.value) {
      best.value = value;
      best.decomposition.clear();
      // Attach the ensemble only when it meets the witness contract.
      const double resid = (em * lam - ef).cwiseAbs().maxCoeff();
      if (resid <= 1e-8) {
        for (int i = 0; i < k; ++i) {
          if (lam(i) > 1e-12) best.decomposition.push_back({lam(i), PureStateVector(dims, psis[i])});
        }
      }
    }
  }
  return best;
}

ExtensionResult extension_applies_werner(const DensityMatrix& rho, const ProductSearchOptions& opt) {
  const Dims dims = rho.dims();
  if (dims.d1 != dims.d2) throw DimensionMismatch("filtering requires equal local dimensions");
  const int d = dims.d1;
  const int n = dims.total();

  const Operator flip = flip_operator(d);
  const double f = expectation(rho, flip);
  if (!(f > -1.0 && f < 0.0)) {
    throw FlipExpectationOutOfRange("filtering requires tr(rho F) in (-1, 0)");
  }

  // (1 + rF) rho (1 + rF) has flip expectation (1 + r^2) f + 2 r; the stable
  // root of the quadratic in r is -f / (1 + sqrt(1 - f^2)).
  const double r = -f / (1.0 + std::sqrt(1.0 - f * f));
  const Eigen::MatrixXcd a =
      Eigen::MatrixXcd::Identity(n, n) + r * flip.mat();
  Eigen::MatrixXcd filtered = a * rho.mat() * a;
  filtered /= filtered.trace().real();

  ExtensionResult result{DensityMatrix(Operator(dims, filtered)), ExtensionResult::Verdict::unknown,
                         0.0};

  const Eigen::VectorXd spec = hermitian_spectrum(partial_transpose(result.rho_tilde.op()));
  const bool ppt = spec(0) >= -1e-10;
  if (d == 2) {
    result.verdict = ppt ? ExtensionResult::Verdict::yes : ExtensionResult::Verdict::no;
    return result;
  }
  if (!ppt) {
    result.verdict = ExtensionResult::Verdict::no;
    return result;
  }

  // Nonnegative least-squares fit of the filtered state by product
  // projectors; iteratively re-seeded around the surviving terms.
  const int terms = opt.terms > 0 ? opt.terms : 4 * n * n;
  std::mt19937_64 rng(opt.seed);

  const auto embed = [&](const Eigen::MatrixXcd& mm, Eigen::Ref<Eigen::VectorXd> col) {
    const Eigen::VectorXcd v = flatten(mm);
    col.head(n * n) = v.real();
    col.tail(n * n) = v.imag();
  };

  Eigen::VectorXd b(2 * n * n);
  embed(filtered, b);

  struct Term {
    Eigen::VectorXcd phi, chi;
  };
  const auto random_term = [&](bool orthogonal) {
    Term t;
    t.phi = random_unit_vector(d, rng);
    t.chi = random_unit_vector(d, rng);
    if (orthogonal) {
      t.chi -= (t.phi.adjoint() * t.chi).value() * t.phi;
      const double nrm = t.chi.norm();
      t.chi = nrm > 1e-8 ? Eigen::VectorXcd(t.chi / nrm) : random_unit_vector(d, rng);
    }
    return t;
  };

  std::vector<Term> pool;
  pool.reserve(terms);
  for (int i = 0; i < terms; ++i) pool.push_back(random_term(i % 2 == 0));

  double best_resid = std::numeric_limits<double>::infinity();
  Eigen::MatrixXd cols(2 * n * n, terms);
  std::normal_distribution<double> gauss;

  for (int round = 0; round < opt.rounds; ++round) {
    for (int i = 0; i < static_cast<int>(pool.size()); ++i) {
      const Eigen::MatrixXcd proj =
          kron(pool[i].phi * pool[i].phi.adjoint(), pool[i].chi * pool[i].chi.adjoint());
      embed(proj, cols.col(i));
    }
    const Eigen::VectorXd w = num::nnls(cols.leftCols(pool.size()), b);
    const double resid = (cols.leftCols(pool.size()) * w - b).norm();
    best_resid = std::min(best_resid, resid);
    if (best_resid <= 0.3 * opt.yes_threshold) break;

    std::vector<Term> next;
    const double sigma = 0.5 * std::pow(0.85, round);
    for (int i = 0; i < static_cast<int>(pool.size()); ++i) {
      if (w(i) > 1e-12) next.push_back(pool[i]);
    }
    const int kept = static_cast<int>(next.size());
    for (int i = 0; i < kept && static_cast<int>(next.size()) < terms; ++i) {
      Term t = next[i];
      for (int j = 0; j < d; ++j) {
        t.phi(j) += sigma * Complex(gauss(rng), gauss(rng));
        t.chi(j) += sigma * Complex(gauss(rng), gauss(rng));
      }
      t.phi.normalize();
      t.chi.normalize();
      next.push_back(t);
    }
    while (static_cast<int>(next.size()) < terms) next.push_back(random_term(rng() % 2 == 0));
    pool = std::move(next);
  }

  result.fit_residual = best_resid;
  result.verdict = best_resid <= opt.yes_threshold ? ExtensionResult::Verdict::yes
                                                   : ExtensionResult::Verdict::unknown;
  return result;
}

}  // namespace symtangle
