// Acceptance gate: one line per criterion, nonzero exit code on any failure.
// Each criterion prints PASS/FAIL with the measured residuals and, where a
// runtime budget applies, the wall time.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include <sys/wait.h>

#include <json.hpp>
#include <symtangle/entropy.hpp>
#include <symtangle/eof.hpp>
#include <symtangle/geometry.hpp>
#include <symtangle/groups.hpp>
#include <symtangle/numerics.hpp>
#include <symtangle/operator.hpp>
#include <symtangle/ree.hpp>

using namespace symtangle;
using nlohmann::json;
using Eigen::MatrixXcd;
using Eigen::VectorXcd;
using Eigen::VectorXd;

namespace {

struct Timer {
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  }
};

std::string fmt(const char* pattern, ...) {
  char buf[512];
  va_list args;
  va_start(args, pattern);
  std::vsnprintf(buf, sizeof(buf), pattern, args);
  va_end(args);
  return buf;
}

MatrixXcd ginibre(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss;
  MatrixXcd m(n, n);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) m(r, c) = Complex(gauss(rng), gauss(rng)) / std::sqrt(2.0 * n);
  return m;
}

// 1. Bruteforce convex-roof search and constrained pure-state search bracket
//    the flip closed form on two local dimensions.
bool crit_werner_oracle(std::string& detail) {
  Timer timer;
  double worst_gap_lo = 0.0, worst_gap_hi = 0.0, worst_eps = 0.0;
  PureSearchOptions eps_opt;
  eps_opt.restarts = 192;
  eps_opt.iters = 1200;
  for (int d : {2, 3}) {
    for (double f : {-1.0, -0.8, -0.5, -0.2}) {
      const VectorXd c = VectorXd::Constant(1, f);
      const double closed = eof_werner(f, d).value;
      const double gap = eof_bruteforce(GroupSpec::uu(d), c).value - closed;
      worst_gap_lo = std::min(worst_gap_lo, gap);
      worst_gap_hi = std::max(worst_gap_hi, gap);
      const double eps = epsilon_numeric(GroupSpec::uu(d), c, eps_opt).value;
      worst_eps = std::max(worst_eps, std::abs(eps - epsilon_werner(f)));
    }
  }
  const double secs = timer.seconds();
  const bool pass =
      worst_gap_hi <= 1e-2 && worst_gap_lo >= -1e-3 && worst_eps <= 1e-3 && secs < 300.0;
  detail = fmt("ensemble-search gap in [%.2e, %.2e] (need [-1e-3, 1e-2]), "
               "pure-search residual %.2e (need <= 1e-3), %.1fs (budget 300s)",
               worst_gap_lo, worst_gap_hi, worst_eps, secs);
  return pass;
}

// 2. Isotropic formation endpoints, thresholds, and the d=3 envelope shape.
bool crit_isotropic_endpoints(std::string& detail) {
  double worst = std::abs(eof_isotropic(2.0, 2).value - std::log(2.0));
  for (int d = 2; d <= 5; ++d) {
    worst = std::max(worst, std::abs(eof_isotropic(1.0, d).value));
  }
  const EnvelopeResult env = isotropic_envelope(3);
  const bool has_flat = !env.flat_pieces.empty() &&
                        std::abs(env.flat_pieces.back().x2 - 3.0) <= 1e-12;
  const double x1 = has_flat ? env.flat_pieces.back().x1 : 2.0;
  const double mid = 0.5 * (x1 + 3.0);
  const double h = 0.5 * (3.0 - x1) * 0.5;
  const double second = epsilon_isotropic(mid - h, 3) + epsilon_isotropic(mid + h, 3) -
                        2.0 * epsilon_isotropic(mid, 3);
  const bool pass = worst <= 1e-12 && has_flat && second < 0.0;
  detail = fmt("endpoint/threshold residual %.2e (need <= 1e-12), flat piece right end %s, "
               "second difference %.2e (need < 0)",
               worst, has_flat ? "3" : "missing", second);
  return pass;
}

// 3. The pair-state additivity gap, exercised through the command-line tool.
bool crit_counterexample_cli(std::string& detail) {
  Timer timer;
  const auto run = [](const std::string& args, json& out) {
    const std::string cmd = std::string(SYMTANGLE_CLI_PATH) + " " + args + " 2>/dev/null";
    FILE* pipe = popen(cmd.c_str(), "r");
    if (!pipe) return false;
    std::string text;
    char buf[4096];
    std::size_t got = 0;
    while ((got = fread(buf, 1, sizeof(buf), pipe)) > 0) text.append(buf, got);
    const int status = pclose(pipe);
    if (!WIFEXITED(status) || WEXITSTATUS(status) != 0) return false;
    out = json::parse(text, nullptr, false);
    return !out.is_discarded();
  };

  json j3, j2;
  if (!run("counterexample --d 3", j3) || !run("counterexample --d 2", j2)) {
    detail = "command failed";
    return false;
  }
  const double pair_res = std::abs(j3["e_pair_actual"].get<double>() - std::log(3.0));
  const double viol_res = std::abs(j3["violation"].get<double>() - std::log(4.0 / 3.0));
  const double min_res =
      std::max({std::abs(j3["minimizer_coords"]["F1"].get<double>() - 1.0 / 3.0),
                std::abs(j3["minimizer_coords"]["F2"].get<double>() - 1.0 / 3.0),
                std::abs(j3["minimizer_coords"]["F1*F2"].get<double>() - 1.0)});
  const double viol2 = std::abs(j2["violation"].get<double>());
  const double secs = timer.seconds();
  const bool pass =
      pair_res <= 1e-6 && viol_res <= 1e-6 && min_res <= 1e-6 && viol2 <= 1e-9 && secs < 30.0;
  detail = fmt("pair value residual %.2e, gap residual %.2e, minimizer residual %.2e "
               "(need <= 1e-6), d=2 gap %.2e (need <= 1e-9), %.1fs (budget 30s)",
               pair_res, viol_res, min_res, viol2, secs);
  return pass;
}

// 4. Closest-separable-distance closed forms and their numeric reproduction.
bool crit_ree_closed_forms(std::string& detail) {
  double worst_exact = std::abs(ree_werner(-1.0) - std::log(2.0));
  for (int d = 2; d <= 5; ++d) {
    worst_exact = std::max(worst_exact, std::abs(ree_isotropic(double(d), d) - std::log(d)));
  }

  double worst_grid = 0.0;
  const GroupSpec uu = GroupSpec::uu(3);
  const Region sep_uu = separable_region(uu);
  for (int i = 0; i <= 10; ++i) {
    const double f = -1.0 + 2.0 * i / 10.0;
    const double num = ree_numeric(uu, VectorXd::Constant(1, f), sep_uu).value;
    worst_grid = std::max(worst_grid, std::abs(num - ree_werner(f)));
  }
  const GroupSpec ub = GroupSpec::uubar(3);
  const Region sep_ub = separable_region(ub);
  for (int i = 0; i <= 10; ++i) {
    const double fhat = 3.0 * i / 10.0;
    const double num = ree_numeric(ub, VectorXd::Constant(1, fhat), sep_ub).value;
    worst_grid = std::max(worst_grid, std::abs(num - ree_isotropic(fhat, 3)));
  }
  const bool pass = worst_exact <= 1e-12 && worst_grid <= 1e-6;
  detail = fmt("closed-form residual %.2e (need <= 1e-12), 11-point grid residual %.2e "
               "(need <= 1e-6)",
               worst_exact, worst_grid);
  return pass;
}

// 5. Projection algebra: idempotence, invariance, self-adjointness, and the
//    partial-transpose intertwining relation, 50 samples per family.
bool crit_twirl_algebra(std::string& detail) {
  Timer timer;
  const int samples = 50;
  double worst = 0.0;
  std::string worst_name = "none";
  const auto track = [&](const std::string& name, double r) {
    if (r > worst) {
      worst = r;
      worst_name = name;
    }
  };

  const std::vector<GroupSpec> families = {
      GroupSpec::uu(2),    GroupSpec::uu(3), GroupSpec::uubar(2), GroupSpec::uubar(3),
      GroupSpec::oo(3),    GroupSpec::bell(), GroupSpec::weyl(2),  GroupSpec::weyl(3)};
  std::uint64_t stream = 0;
  for (const GroupSpec& g : families) {
    const CommutantBasis basis = commutant_basis(g);
    const GroupSpec partner = partial_conjugate(g);
    const CommutantBasis partner_basis = commutant_basis(partner);
    std::mt19937_64 rng(num::mix_seed(20020426, stream++));
    const int n = g.dims().total();
    for (int k = 0; k < samples; ++k) {
      const Operator a(g.dims(), ginibre(n, rng));
      const Operator b(g.dims(), ginibre(n, rng));
      const Operator ta = twirl(basis, a);
      track("idempotence " + g.name(), (twirl(basis, ta).mat() - ta.mat()).cwiseAbs().maxCoeff());
      track("duality " + g.name(),
            std::abs((ta.mat() * b.mat()).trace() - (a.mat() * twirl(basis, b).mat()).trace()));
      const Operator u = haar_sample(g, rng);
      track("invariance " + g.name(),
            (u.mat() * ta.mat() * u.mat().adjoint() - ta.mat()).cwiseAbs().maxCoeff());
      track("intertwining " + g.name() + "<->" + partner.name(),
            (partial_transpose(ta).mat() - twirl(partner_basis, partial_transpose(a)).mat())
                .cwiseAbs()
                .maxCoeff());
    }
  }
  const double secs = timer.seconds();
  const bool pass = worst <= 1e-9 && secs < 120.0;
  detail = fmt("max residual %.2e at %s (need <= 1e-9), %.1fs (budget 120s)", worst,
               worst_name.c_str(), secs);
  return pass;
}

// 6. Bell-diagonal geometry: the half-weight condition, positivity of the
//    partial transpose, and octahedron membership agree on 10^4 samples.
bool crit_bell_geometry(std::string& detail) {
  const GroupSpec g = GroupSpec::bell();
  const CommutantBasis basis = commutant_basis(g);
  const Region octa = separable_region(g);
  std::mt19937_64 rng(424242);
  std::exponential_distribution<double> expo(1.0);

  int disagreements = 0;
  int zero_set = 0;
  double worst_zero = 0.0;
  for (int trial = 0; trial < 10000; ++trial) {
    Eigen::Vector4d w;
    for (int i = 0; i < 4; ++i) w(i) = expo(rng);
    w /= w.sum();

    const bool half = w.maxCoeff() <= 0.5 + 1e-10;

    MatrixXcd m = MatrixXcd::Zero(4, 4);
    for (int i = 0; i < 4; ++i) m += w(i) * basis.minimal_projections[i].mat();
    const Operator rho(g.dims(), std::move(m));
    const VectorXd spectrum = hermitian_spectrum(partial_transpose(rho));
    const bool ppt = spectrum(0) >= -1e-10;

    const bool inside = region_membership(octa, invariant_coords(basis, rho), 1e-10);

    if (half != ppt || ppt != inside) ++disagreements;
    if (half) {
      ++zero_set;
      worst_zero = std::max(worst_zero, std::abs(eof_bell_diagonal(w).value));
    }
  }
  const bool pass = disagreements == 0 && worst_zero == 0.0;
  detail = fmt("%d disagreements over 10000 samples (need 0), formation on the %d-sample "
               "separable subset max |value| = %.17g (need exactly 0)",
               disagreements, zero_set, worst_zero);
  return pass;
}

// 7. Orthogonal-family square corners from explicit product vectors.
bool crit_oo_corners(std::string& detail) {
  const GroupSpec g = GroupSpec::oo(3);
  VectorXcd e0 = VectorXcd::Zero(3), e1 = VectorXcd::Zero(3);
  e0(0) = 1.0;
  e1(1) = 1.0;
  const Complex i1(0.0, 1.0);
  const VectorXcd plus = (e0 + i1 * e1) / std::sqrt(2.0);
  const VectorXcd minus = (e0 - i1 * e1) / std::sqrt(2.0);

  double worst = 0.0;
  const auto corner = [&](const VectorXcd& phi, const VectorXcd& chi, double f, double fhat) {
    const VectorXd c = product_expectations(g, phi, chi);
    worst = std::max({worst, std::abs(c(0) - f), std::abs(c(1) - fhat)});
  };
  corner(e0, e0, 1.0, 1.0);
  corner(e0, e1, 0.0, 0.0);
  corner(plus, plus, 1.0, 0.0);
  corner(plus, minus, 0.0, 1.0);
  const bool pass = worst <= 1e-12;
  detail = fmt("max corner residual %.2e (need <= 1e-12)", worst);
  return pass;
}

// 8. A doubled maximally entangled pair twirls onto the sharp separable
//    vertex of the two-pair family.
bool crit_pair_vertex(std::string& detail) {
  const int d = 3;
  const GroupSpec pair = GroupSpec::tensor(GroupSpec::uu(d), GroupSpec::uu(d));
  const CommutantBasis basis = commutant_basis(pair);

  // Alice holds (a1, a2), Bob (b1, b2); Alice's two systems are maximally
  // entangled with each other, as are Bob's, so the vector is a product
  // across the Alice-Bob cut and the state it carries is separable.
  const Dims dims{d * d, d * d};
  VectorXcd psi = VectorXcd::Zero(dims.total());
  double amp_residual = 0.0;
  for (int a1 = 0; a1 < d; ++a1)
    for (int a2 = 0; a2 < d; ++a2)
      for (int b1 = 0; b1 < d; ++b1)
        for (int b2 = 0; b2 < d; ++b2) {
          const int idx = (a1 * d + a2) * d * d + b1 * d + b2;
          const double expected = (a1 == a2 && b1 == b2) ? 1.0 / d : 0.0;
          if (a1 == a2 && b1 == b2) psi(idx) = 1.0 / d;
          amp_residual = std::max(amp_residual, std::abs(psi(idx).real() - expected));
        }
  const PureStateVector state(dims, psi);

  double f1 = 0.0;
  for (std::size_t a = 0; a < basis.labels.size(); ++a) {
    if (basis.labels[a] == "F1") {
      f1 = (psi.adjoint() * basis.coord_ops[a].mat() * psi).value().real();
    }
  }

  const VectorXd coords = invariant_coords(basis, state.projector());
  Eigen::Vector3d sharp(1.0 / d, 1.0 / d, 1.0);
  const double coord_res = (coords - VectorXd(sharp)).cwiseAbs().maxCoeff();
  const bool separable =
      region_membership(separable_region(pair), coords, 1e-10);

  const bool pass = coord_res <= 1e-10 && std::abs(f1 - 1.0 / d) <= 1e-12 && separable &&
                    amp_residual == 0.0;
  detail = fmt("twirl coordinate residual %.2e (need <= 1e-10), single-pair flip "
               "expectation residual %.2e (need <= 1e-12), separable membership %s",
               coord_res, std::abs(f1 - 1.0 / d), separable ? "yes" : "no");
  return pass;
}

// 9. Spin-1 x spin-1 total-spin projections coincide with the orthogonal
//    family's minimal projections on a 3x3 system.
bool crit_spin_projections(std::string& detail) {
  const std::vector<Operator> su2 = su2_projections(2, 2);
  const CommutantBasis oo = commutant_basis(GroupSpec::oo(3));
  if (su2.size() != oo.minimal_projections.size()) {
    detail = fmt("projection count %zu vs %zu", su2.size(), oo.minimal_projections.size());
    return false;
  }
  double worst = 0.0;
  for (const Operator& p : su2) {
    double best = std::numeric_limits<double>::infinity();
    for (const Operator& q : oo.minimal_projections) {
      best = std::min(best, (p.mat() - q.mat()).cwiseAbs().maxCoeff());
    }
    worst = std::max(worst, best);
  }
  const bool pass = worst <= 1e-9;
  detail = fmt("max matched-projection difference %.2e (need <= 1e-9)", worst);
  return pass;
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    bool (*run)(std::string&);
  };
  const Criterion criteria[] = {
      {"werner closed form vs oracle", crit_werner_oracle},
      {"isotropic endpoints and envelope", crit_isotropic_endpoints},
      {"pair additivity gap via cli", crit_counterexample_cli},
      {"separable-distance closed forms", crit_ree_closed_forms},
      {"twirl and partial-transpose algebra", crit_twirl_algebra},
      {"bell octahedron equivalences", crit_bell_geometry},
      {"orthogonal-family square corners", crit_oo_corners},
      {"doubled-pair sharp vertex", crit_pair_vertex},
      {"spin projections match the 3x3 family", crit_spin_projections},
  };

  int failures = 0;
  int index = 0;
  for (const Criterion& c : criteria) {
    ++index;
    std::string detail;
    bool pass = false;
    try {
      pass = c.run(detail);
    } catch (const std::exception& e) {
      detail = std::string("exception: ") + e.what();
    }
    if (!pass) ++failures;
    std::printf("criterion %d (%s): %s — %s\n", index, c.name, pass ? "PASS" : "FAIL",
                detail.c_str());
    std::fflush(stdout);
  }
  return failures;
}
