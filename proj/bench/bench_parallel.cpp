#include <benchmark/benchmark.h>

#include "ffspec/gaussian_core.hpp"
#include "ffspec/observables.hpp"
#include "ffspec/rh.hpp"

using namespace ffspec;

namespace {

const OccupationSymbol& profile_symbol() {
    static const auto s = OccupationSymbol::from_profile(1.4, 96, [](double p) { return 0.2 + 0.5 * std::cos(p); });
    return s;
}

std::vector<Geometry> sweep_geometries() {
    std::vector<Geometry> g;
    for (int l = 8; l <= 64; l += 8) g.push_back({l, l, 4 * l});
    return g;
}

std::vector<double> density_grid() {
    std::vector<double> x;
    for (int i = 0; i < 64; ++i) x.push_back(-0.97 + 1.94 * i / 63);
    return x;
}

}  // namespace

static void BM_fourier_serial(benchmark::State& st) {
    for (auto _ : st) benchmark::DoNotOptimize(profile_symbol().fourier_coeffs_serial(1024));
}
static void BM_fourier_omp(benchmark::State& st) {
    for (auto _ : st) benchmark::DoNotOptimize(profile_symbol().fourier_coeffs(1024));
}

static void BM_spectra_serial(benchmark::State& st) {
    auto sym = OccupationSymbol::from_step(pi / 2);
    auto geos = sweep_geometries();
    for (auto _ : st) benchmark::DoNotOptimize(spectra_serial(sym, geos, Kind::Negativity));
}
static void BM_spectra_omp(benchmark::State& st) {
    auto sym = OccupationSymbol::from_step(pi / 2);
    auto geos = sweep_geometries();
    for (auto _ : st) benchmark::DoNotOptimize(spectra(sym, geos, Kind::Negativity));
}

static void BM_density_serial(benchmark::State& st) {
    auto sym = OccupationSymbol::from_step(pi / 2);
    auto grid = density_grid();
    for (auto _ : st)
        benchmark::DoNotOptimize(spectral_density_change_serial(sym, {16, 16, 128}, grid, Kind::Plain, Growth::GrowL));
}
static void BM_density_omp(benchmark::State& st) {
    auto sym = OccupationSymbol::from_step(pi / 2);
    auto grid = density_grid();
    for (auto _ : st)
        benchmark::DoNotOptimize(spectral_density_change(sym, {16, 16, 128}, grid, Kind::Plain, Growth::GrowL));
}

static void BM_entropy_serial(benchmark::State& st) {
    auto sym = OccupationSymbol::from_step(pi / 2);
    for (auto _ : st) benchmark::DoNotOptimize(entropy_change_serial(sym, {16, 16, 128}, Kind::Plain, Growth::GrowL));
}
static void BM_entropy_omp(benchmark::State& st) {
    auto sym = OccupationSymbol::from_step(pi / 2);
    for (auto _ : st) benchmark::DoNotOptimize(entropy_change(sym, {16, 16, 128}, Kind::Plain, Growth::GrowL));
}

static void BM_wiener_hopf_serial(benchmark::State& st) {
    cplx lam(0.2, 1.1);
    WienerHopf wh(profile_symbol(), lam, 1.0, fh_beta(lam, 1.0, profile_symbol().f_in(), profile_symbol().f_out()));
    std::vector<cplx> zs;
    for (int i = 0; i < 256; ++i) zs.push_back(std::polar(0.9, 2 * pi * i / 256));
    for (auto _ : st) benchmark::DoNotOptimize(wh.log_plus_batch_serial(zs));
}
static void BM_wiener_hopf_omp(benchmark::State& st) {
    cplx lam(0.2, 1.1);
    WienerHopf wh(profile_symbol(), lam, 1.0, fh_beta(lam, 1.0, profile_symbol().f_in(), profile_symbol().f_out()));
    std::vector<cplx> zs;
    for (int i = 0; i < 256; ++i) zs.push_back(std::polar(0.9, 2 * pi * i / 256));
    for (auto _ : st) benchmark::DoNotOptimize(wh.log_plus_batch(zs));
}

BENCHMARK(BM_fourier_serial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_fourier_omp)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_spectra_serial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_spectra_omp)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_density_serial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_density_omp)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_entropy_serial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_entropy_omp)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_wiener_hopf_serial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_wiener_hopf_omp)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
