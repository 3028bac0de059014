#include "symtangle/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include <Eigen/SVD>

namespace symtangle::num {

namespace {

// Minimum-norm least-squares solve with rank detection.
Eigen::VectorXd lsq_solve(const Eigen::MatrixXd& A, const Eigen::VectorXd& b) {
  if (A.rows() == 0 || A.cols() == 0) return Eigen::VectorXd::Zero(A.cols());
  return A.bdcSvd(Eigen::ComputeThinU | Eigen::ComputeThinV).solve(b);
}

// Orthonormal basis of the nullspace of A (columns), empty when A has full
// column rank.
Eigen::MatrixXd nullspace(const Eigen::MatrixXd& A) {
  if (A.rows() == 0) return Eigen::MatrixXd::Identity(A.cols(), A.cols());
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeFullV);
  const double cutoff =
      svd.singularValues().size() ? svd.singularValues()(0) * 1e-12 : 0.0;
  int rank = 0;
  for (int i = 0; i < svd.singularValues().size(); ++i) {
    if (svd.singularValues()(i) > cutoff) ++rank;
  }
  return svd.matrixV().rightCols(A.cols() - rank);
}

Eigen::MatrixXd select_cols(const Eigen::MatrixXd& A, const std::vector<int>& idx) {
  Eigen::MatrixXd out(A.rows(), static_cast<int>(idx.size()));
  for (std::size_t k = 0; k < idx.size(); ++k) out.col(static_cast<int>(k)) = A.col(idx[k]);
  return out;
}

}  // namespace

Eigen::VectorXd constrained_lsq_nonneg(const Eigen::MatrixXd& Q, const Eigen::VectorXd& b,
                                       const Eigen::MatrixXd& E, const Eigen::VectorXd& f,
                                       double feas_tol) {
  const int n = static_cast<int>(Q.cols());
  const int me = static_cast<int>(E.rows());
  constexpr double kPinTol = 1e-13;
  constexpr double kKktTol = 1e-10;

  Eigen::VectorXd x;
  if (me == 0) {
    x = Eigen::VectorXd::Zero(n);
  } else {
    if (E.cols() != n || f.size() != me) {
      throw DimensionMismatch("constrained_lsq_nonneg: constraint shape mismatch");
    }
    x = nnls(E, f);
    if ((E * x - f).norm() > feas_tol * std::max(1.0, f.norm())) {
      throw Infeasible("constrained_lsq_nonneg: equality constraints unreachable with x >= 0");
    }
  }

  std::vector<bool> is_free(n);
  for (int i = 0; i < n; ++i) is_free[i] = x(i) > kPinTol;

  const double scale = std::max(1.0, (Q.transpose() * b).cwiseAbs().maxCoeff());

  for (int outer = 0; outer < 6 * n + 60; ++outer) {
    // Inner loop: optimize over the free variables with actives pinned at 0,
    // restoring nonnegativity by moving along the segment to the subproblem
    // optimum (Lawson-Hanson step).
    for (int inner = 0; inner < 4 * n + 40; ++inner) {
      std::vector<int> freev;
      for (int i = 0; i < n; ++i) {
        if (is_free[i]) freev.push_back(i);
      }
      if (freev.empty()) break;
      const Eigen::MatrixXd Qf = select_cols(Q, freev);
      Eigen::VectorXd z;
      if (me == 0) {
        z = lsq_solve(Qf, b);
      } else {
        const Eigen::MatrixXd Ef = select_cols(E, freev);
        const Eigen::VectorXd xp = lsq_solve(Ef, f);
        const Eigen::MatrixXd N = nullspace(Ef);
        z = xp;
        if (N.cols() > 0) z += N * lsq_solve(Qf * N, b - Qf * xp);
      }
      if (z.minCoeff() >= -kPinTol) {
        for (std::size_t k = 0; k < freev.size(); ++k) x(freev[k]) = std::max(z(static_cast<int>(k)), 0.0);
        break;
      }
      double alpha = 1.0;
      for (std::size_t k = 0; k < freev.size(); ++k) {
        const double zk = z(static_cast<int>(k));
        if (zk < 0.0) {
          const double xk = x(freev[k]);
          alpha = std::min(alpha, xk / (xk - zk));
        }
      }
      for (std::size_t k = 0; k < freev.size(); ++k) {
        const int i = freev[k];
        x(i) += alpha * (z(static_cast<int>(k)) - x(i));
        if (x(i) <= kPinTol) {
          x(i) = 0.0;
          is_free[i] = false;
        }
      }
    }

    // KKT multipliers on the pinned variables; release the worst violator.
    const Eigen::VectorXd g = Q.transpose() * (Q * x - b);
    Eigen::VectorXd nu = Eigen::VectorXd::Zero(me);
    if (me > 0) {
      std::vector<int> freev;
      for (int i = 0; i < n; ++i) {
        if (is_free[i]) freev.push_back(i);
      }
      if (!freev.empty()) {
        Eigen::MatrixXd At(static_cast<int>(freev.size()), me);
        Eigen::VectorXd rhs(static_cast<int>(freev.size()));
        for (std::size_t k = 0; k < freev.size(); ++k) {
          At.row(static_cast<int>(k)) = E.col(freev[k]).transpose();
          rhs(static_cast<int>(k)) = -g(freev[k]);
        }
        nu = lsq_solve(At, rhs);
      }
    }
    int worst = -1;
    double worst_mu = -kKktTol * scale;
    for (int i = 0; i < n; ++i) {
      if (is_free[i]) continue;
      const double mu = g(i) + (me > 0 ? E.col(i).dot(nu) : 0.0);
      if (mu < worst_mu) {
        worst_mu = mu;
        worst = i;
      }
    }
    if (worst < 0) break;
    is_free[worst] = true;
  }
  return x;
}

Eigen::VectorXd nnls(const Eigen::MatrixXd& A, const Eigen::VectorXd& b) {
  return constrained_lsq_nonneg(A, b, Eigen::MatrixXd(0, A.cols()), Eigen::VectorXd(0));
}

SimplexFit simplex_fit(const Eigen::MatrixXd& V, const Eigen::VectorXd& x) {
  Eigen::MatrixXd E = Eigen::MatrixXd::Ones(1, V.cols());
  Eigen::VectorXd f = Eigen::VectorXd::Ones(1);
  SimplexFit fit;
  fit.lambda = constrained_lsq_nonneg(V, x, E, f);
  fit.dist = (V * fit.lambda - x).norm();
  return fit;
}

NelderMeadResult nelder_mead(const std::function<double(const Eigen::VectorXd&)>& fn,
                             const Eigen::VectorXd& x0, double step, int max_iter, double ftol) {
  const int n = static_cast<int>(x0.size());
  std::vector<Eigen::VectorXd> pts(n + 1, x0);
  std::vector<double> val(n + 1);
  int evals = 0;
  for (int i = 1; i <= n; ++i) pts[i](i - 1) += step;
  for (int i = 0; i <= n; ++i) {
    val[i] = fn(pts[i]);
    ++evals;
  }
  std::vector<int> ord(n + 1);
  for (int it = 0; it < max_iter; ++it) {
    std::iota(ord.begin(), ord.end(), 0);
    std::sort(ord.begin(), ord.end(), [&](int a, int b) { return val[a] < val[b]; });
    const int best = ord[0], worst = ord[n], second = ord[n - 1];
    if (val[worst] - val[best] < ftol) break;

    Eigen::VectorXd centroid = Eigen::VectorXd::Zero(n);
    for (int i = 0; i <= n; ++i) {
      if (i != worst) centroid += pts[i];
    }
    centroid /= n;

    const Eigen::VectorXd xr = centroid + (centroid - pts[worst]);
    const double fr = fn(xr);
    ++evals;
    if (fr < val[best]) {
      const Eigen::VectorXd xe = centroid + 2.0 * (centroid - pts[worst]);
      const double fe = fn(xe);
      ++evals;
      if (fe < fr) {
        pts[worst] = xe;
        val[worst] = fe;
      } else {
        pts[worst] = xr;
        val[worst] = fr;
      }
    } else if (fr < val[second]) {
      pts[worst] = xr;
      val[worst] = fr;
    } else {
      const Eigen::VectorXd xc =
          centroid + 0.5 * ((fr < val[worst] ? xr : pts[worst]) - centroid);
      const double fc = fn(xc);
      ++evals;
      if (fc < std::min(fr, val[worst])) {
        pts[worst] = xc;
        val[worst] = fc;
      } else {
        for (int i = 0; i <= n; ++i) {
          if (i == best) continue;
          pts[i] = pts[best] + 0.5 * (pts[i] - pts[best]);
          val[i] = fn(pts[i]);
          ++evals;
        }
      }
    }
  }
  int best = 0;
  for (int i = 1; i <= n; ++i) {
    if (val[i] < val[best]) best = i;
  }
  return NelderMeadResult{pts[best], val[best], evals};
}

Eigen::VectorXd adam(const std::function<double(const Eigen::VectorXd&, Eigen::VectorXd&)>& fn,
                     Eigen::VectorXd x, const AdamOptions& opt) {
  Eigen::VectorXd m = Eigen::VectorXd::Zero(x.size());
  Eigen::VectorXd v = Eigen::VectorXd::Zero(x.size());
  Eigen::VectorXd g(x.size());
  for (int t = 1; t <= opt.iters; ++t) {
    fn(x, g);
    m = opt.beta1 * m + (1.0 - opt.beta1) * g;
    v = opt.beta2 * v + (1.0 - opt.beta2) * g.cwiseProduct(g);
    const double bc1 = 1.0 - std::pow(opt.beta1, t);
    const double bc2 = 1.0 - std::pow(opt.beta2, t);
    x -= (opt.lr / bc1) * m.cwiseQuotient(((v / bc2).cwiseSqrt().array() + opt.eps).matrix());
  }
  return x;
}

SimplexMinResult minimize_on_simplex(
    int n, const std::function<double(const Eigen::VectorXd&, Eigen::VectorXd&)>& fn,
    const SimplexMinOptions& opt) {
  Eigen::VectorXd ell = Eigen::VectorXd::Zero(n);  // unnormalized log-weights
  auto weights_of = [&](const Eigen::VectorXd& e) {
    Eigen::VectorXd w = (e.array() - e.maxCoeff()).exp();
    return Eigen::VectorXd(w / w.sum());
  };
  Eigen::VectorXd mu = weights_of(ell);
  Eigen::VectorXd g(n), g_try(n);
  double val = fn(mu, g);
  double step = opt.step;
  double gap = std::numeric_limits<double>::infinity();
  int it = 0;
  for (; it < opt.iters; ++it) {
    gap = mu.dot(g) - g.minCoeff();
    if (gap < opt.grad_tol) break;
    // Backtracking exponentiated-gradient step: multiplicative update with a
    // step size that guarantees monotone descent.
    bool moved = false;
    for (int bt = 0; bt < 48; ++bt) {
      const Eigen::VectorXd ell_try = ell - step * g;
      const Eigen::VectorXd mu_try = weights_of(ell_try);
      const double val_try = fn(mu_try, g_try);
      if (val_try <= val + 1e-15 * std::abs(val)) {
        ell = ell_try;
        mu = mu_try;
        val = val_try;
        g = g_try;
        step = std::min(step * 1.2, 64.0);
        moved = true;
        break;
      }
      step *= 0.5;
    }
    if (!moved) break;
  }
  return SimplexMinResult{mu, val, gap, it};
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace symtangle::num
