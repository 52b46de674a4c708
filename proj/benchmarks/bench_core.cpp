#include <benchmark/benchmark.h>

#include <random>

#include "fput/basis.hpp"
#include "fput/classical.hpp"
#include "fput/husimi.hpp"
#include "fput/wigner.hpp"

using namespace fput;

namespace {

ModelParams henon(int N, double hbar) {
    ModelParams mp;
    mp.alpha = 1.0;
    mp.hbar = hbar;
    mp.cutoff_n = N;
    return mp;
}

}  // namespace

static void BM_EnumerateSector(benchmark::State& state) {
    ModelParams mp = henon(static_cast<int>(state.range(0)), 1e-3);
    for (auto _ : state) benchmark::DoNotOptimize(enumerate_sector(mp));
}
BENCHMARK(BM_EnumerateSector)->Arg(200)->Arg(600);

static void BM_AssembleHamiltonian(benchmark::State& state) {
    ModelParams mp = henon(static_cast<int>(state.range(0)), 1e-3);
    SectorBasis b = enumerate_sector(mp);
    for (auto _ : state) benchmark::DoNotOptimize(assemble_hamiltonian(mp, b));
}
BENCHMARK(BM_AssembleHamiltonian)->Arg(200)->Arg(600);

static void BM_WignerJacobi(benchmark::State& state) {
    for (auto _ : state) benchmark::DoNotOptimize(wigner_d_jacobi(static_cast<int>(state.range(0))));
}
BENCHMARK(BM_WignerJacobi)->Arg(100)->Arg(400);

static void BM_HusimiAmplitude(benchmark::State& state) {
    ModelParams mp = henon(static_cast<int>(state.range(0)), 1e-3);
    SectorBasis b = enumerate_sector(mp);
    std::mt19937_64 rng(1);
    std::normal_distribution<double> g;
    Eigen::VectorXd c(b.size());
    for (int i = 0; i < b.size(); ++i) c[i] = g(rng);
    c.normalize();
    HusimiEvaluator st(b, c, mp.hbar, 0.0);
    double q2 = 0.1, p2 = 0.05;
    for (auto _ : state) {
        benchmark::DoNotOptimize(st.value_qp(0.0, 0.5, q2, p2));
        q2 = -q2;
    }
}
BENCHMARK(BM_HusimiAmplitude)->Arg(200)->Arg(400);

static void BM_IntegrateOrbitPeriod(benchmark::State& state) {
    ModelParams mp = henon(0, 1e-3);
    double p1 = std::sqrt(sos_p1_squared(0.14, -0.2, 0.0, mp));
    PhasePoint ic{0.0, -0.2, p1, 0.0};
    for (auto _ : state) benchmark::DoNotOptimize(integrate(ic, mp, 1.0, 1.0));
}
BENCHMARK(BM_IntegrateOrbitPeriod);

static void BM_SaliPeriod(benchmark::State& state) {
    ModelParams mp = henon(0, 1e-3);
    double p1 = std::sqrt(sos_p1_squared(0.14, -0.2, 0.0, mp));
    PhasePoint ic{0.0, -0.2, p1, 0.0};
    for (auto _ : state) benchmark::DoNotOptimize(sali(ic, mp, 1.0));
}
BENCHMARK(BM_SaliPeriod);

BENCHMARK_MAIN();
