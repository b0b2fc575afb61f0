#include <benchmark/benchmark.h>

#include "daxs/global_fit.hpp"
#include "daxs/hamiltonian.hpp"
#include "daxs/simulate.hpp"
#include "daxs/synthetic.hpp"
#include "daxs/tracks.hpp"

namespace {

daxs::ModelParams params() {
    daxs::ModelParams p;
    const double t[] = {16, 20, 8, 10, 2, 5, 24, 5};
    for (std::size_t i = 0; i < 8; ++i) p.couplings.set_value(daxs::kAllCouplings[i], t[i]);
    p.offsets = {50, 30, 80, 120};
    return p;
}

daxs::SimConfig sim(std::size_t cols) {
    daxs::SimConfig c;
    c.eps_axis = {-100, 280.0 / static_cast<double>(cols), cols};
    c.delta_axis = {-120, 0.5, 581};
    c.noise_sigma = 0.1;
    c.rng_seed = 1;
    return c;
}

void BM_SectorEnergies(benchmark::State& state) {
    const auto p = params();
    double eps = -50;
    for (auto _ : state) {
        benchmark::DoNotOptimize(daxs::sector_energies(p, eps));
        eps += 0.01;
    }
}
BENCHMARK(BM_SectorEnergies);

void BM_RenderDaxs(benchmark::State& state) {
    const auto p = params();
    const auto cfg = sim(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(daxs::render_daxs_image(p, cfg));
}
BENCHMARK(BM_RenderDaxs)->Arg(70)->Arg(280)->Unit(benchmark::kMillisecond);

void BM_ExtractTracks(benchmark::State& state) {
    const auto p = params();
    const auto img = daxs::render_daxs_image(p, sim(140));
    const auto labels = daxs::branch_labels(0.0);
    const auto seeds = daxs::seeds_from_model(p, img.x_axis(), labels, {.jitter = 0.3, .rng_seed = 2});
    for (auto _ : state) benchmark::DoNotOptimize(daxs::extract_tracks(img, seeds, {}));
}
BENCHMARK(BM_ExtractTracks)->Unit(benchmark::kMillisecond);

void BM_GlobalFit(benchmark::State& state) {
    const auto p = params();
    std::vector<double> xs;
    for (double x = -100; x <= 180; x += 2) xs.push_back(x);
    const auto labels = daxs::branch_labels(0.0);
    const auto tracks = daxs::tracks_from_model(p, xs, labels, {.noise = 0.05, .rng_seed = 3});
    daxs::FitConfig cfg;
    cfg.initial = p;
    for (daxs::Coupling c : daxs::kAllCouplings) {
        cfg.initial.couplings.set_magnitude(c, 1.2 * p.couplings.magnitude(c));
    }
    for (auto _ : state) benchmark::DoNotOptimize(daxs::fit_hamiltonian(tracks, cfg));
}
BENCHMARK(BM_GlobalFit)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
