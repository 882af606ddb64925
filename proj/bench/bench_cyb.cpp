#include <benchmark/benchmark.h>

#include <random>

#include "drm/catalog.hpp"
#include "drm/cdybe.hpp"
#include "drm/drmatrix.hpp"

namespace {

using namespace drm;

LieAlgebra algebra_for(int id) {
  switch (id) {
    case 0: return make_sl(3);
    case 1: return make_sl(4);
    case 2: return make_e_selfdual(4);
    default: return make_sl(5);
  }
}

Mat random_r(int n) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Mat r(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) r(i, j) = cplx(u(rng), u(rng));
  return r;
}

template <Kernel K>
void BM_CybBrackets(benchmark::State& state) {
  const LieAlgebra A = algebra_for(static_cast<int>(state.range(0)));
  const Mat r = random_r(A.dim());
  for (auto _ : state) benchmark::DoNotOptimize(cyb_brackets(A, r, K));
  state.SetLabel("dim " + std::to_string(A.dim()));
}

void BM_CdybReducedSl3(benchmark::State& state) {
  const auto A = std::make_shared<const LieAlgebra>(make_sl(3));
  const auto ch = std::make_shared<const Chain>(make_chain(A, named_indices(*A, "cartan")));
  const RMatrixField r = reduced_canonical(ch, 1);
  Mat d = Mat::Zero(3, 3);
  d(0, 0) = 0.43;
  d(1, 1) = -0.03;
  d(2, 2) = -0.40;
  const Vec kappa = sl_coordinates(d);
  const Kernel kernel = state.range(0) ? Kernel::Parallel : Kernel::Serial;
  for (auto _ : state) benchmark::DoNotOptimize(cdyb(r, kappa, DerivMode::Exact, kernel));
}

}  // namespace

BENCHMARK_TEMPLATE(BM_CybBrackets, drm::Kernel::Serial)->DenseRange(0, 3);
BENCHMARK_TEMPLATE(BM_CybBrackets, drm::Kernel::Parallel)->DenseRange(0, 3);
BENCHMARK(BM_CdybReducedSl3)->Arg(0)->Arg(1);

BENCHMARK_MAIN();
