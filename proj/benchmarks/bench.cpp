#include <benchmark/benchmark.h>

#include <random>

#include <symtangle/entropy.hpp>
#include <symtangle/eof.hpp>
#include <symtangle/geometry.hpp>
#include <symtangle/groups.hpp>
#include <symtangle/numerics.hpp>
#include <symtangle/ree.hpp>

using namespace symtangle;
using Eigen::MatrixXcd;
using Eigen::VectorXd;

namespace {

MatrixXcd ginibre(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss;
  MatrixXcd m(n, n);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) m(r, c) = Complex(gauss(rng), gauss(rng)) / std::sqrt(2.0 * n);
  return m;
}

GroupSpec family_for(int index) {
  switch (index) {
    case 0: return GroupSpec::uu(3);
    case 1: return GroupSpec::uubar(3);
    case 2: return GroupSpec::oo(3);
    case 3: return GroupSpec::bell();
    default: return GroupSpec::weyl(3);
  }
}

}  // namespace

static void BM_CommutantBasis(benchmark::State& state) {
  const GroupSpec g = family_for(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(commutant_basis(g));
  }
  state.SetLabel(g.name());
}
BENCHMARK(BM_CommutantBasis)->DenseRange(0, 4);

static void BM_Twirl(benchmark::State& state) {
  const GroupSpec g = family_for(static_cast<int>(state.range(0)));
  const CommutantBasis basis = commutant_basis(g);
  std::mt19937_64 rng(7);
  const Operator a(g.dims(), ginibre(g.dims().total(), rng));
  for (auto _ : state) {
    benchmark::DoNotOptimize(twirl(basis, a));
  }
  state.SetLabel(g.name());
}
BENCHMARK(BM_Twirl)->DenseRange(0, 4);

static void BM_IsotropicEnvelope(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(isotropic_envelope(d));
  }
}
BENCHMARK(BM_IsotropicEnvelope)->Arg(3)->Arg(5);

static void BM_RelativeEntropy(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  std::mt19937_64 rng(11);
  const DensityMatrix rho = random_density(Dims{n, n}, rng);
  const DensityMatrix sigma = random_density(Dims{n, n}, rng);
  for (auto _ : state) {
    benchmark::DoNotOptimize(relative_entropy(rho, sigma));
  }
}
BENCHMARK(BM_RelativeEntropy)->Arg(2)->Arg(3)->Arg(4);

static void BM_SimplexFit(benchmark::State& state) {
  std::mt19937_64 rng(13);
  std::normal_distribution<double> gauss;
  const int dim = 3, nv = 6;
  Eigen::MatrixXd verts(dim, nv);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < nv; ++j) verts(i, j) = gauss(rng);
  VectorXd x(dim);
  for (int i = 0; i < dim; ++i) x(i) = gauss(rng);
  for (auto _ : state) {
    benchmark::DoNotOptimize(num::simplex_fit(verts, x));
  }
}
BENCHMARK(BM_SimplexFit);

static void BM_ReeNumericBell(benchmark::State& state) {
  const GroupSpec g = GroupSpec::bell();
  const Region sep = separable_region(g);
  const CommutantBasis basis = commutant_basis(g);
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(4, 4);
  const Eigen::Vector4d w(0.7, 0.1, 0.1, 0.1);
  for (int i = 0; i < 4; ++i) m += w(i) * basis.minimal_projections[i].mat();
  const VectorXd coords = invariant_coords(basis, Operator(g.dims(), std::move(m)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(ree_numeric(g, coords, sep));
  }
}
BENCHMARK(BM_ReeNumericBell);

static void BM_AdditivityCounterexample(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(additivity_counterexample(d));
  }
}
BENCHMARK(BM_AdditivityCounterexample)->Arg(3)->Arg(10);

static void BM_EpsilonNumeric(benchmark::State& state) {
  PureSearchOptions opt;
  opt.restarts = 8;
  opt.iters = 300;
  const GroupSpec g = GroupSpec::uu(2);
  const VectorXd c = VectorXd::Constant(1, -1.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(epsilon_numeric(g, c, opt));
  }
}
BENCHMARK(BM_EpsilonNumeric);

BENCHMARK_MAIN();
