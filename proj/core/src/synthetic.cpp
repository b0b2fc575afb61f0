#include "daxs/synthetic.hpp"

#include <cmath>
#include <random>

namespace daxs {

SeedCurves seeds_from_model(const ModelParams& params, const Axis& x_axis,
                            std::span<const BranchLabel> labels, const SeedOptions& opts) {
    validate(x_axis);
    if (!(opts.vertex_spacing > 0.0)) throw InputError("seed vertex spacing must be > 0");
    std::vector<double> xs;
    const double lo = x_axis.min();
    const double hi = x_axis.max();
    const auto n = static_cast<std::size_t>(std::ceil((hi - lo) / opts.vertex_spacing));
    for (std::size_t i = 0; i < n; ++i) xs.push_back(lo + static_cast<double>(i) * opts.vertex_spacing);
    xs.push_back(hi);
    if (xs.size() < 2) xs.insert(xs.begin(), lo - opts.vertex_spacing);

    std::mt19937_64 rng(opts.rng_seed);
    std::normal_distribution<double> noise(0.0, 1.0);
    SeedCurves out;
    for (const auto& label : labels) {
        SeedCurve c{to_string(label), label, {}};
        for (double x : xs) {
            double d = opts.scale * sector_energies(params, x).energy(label, params.zeeman) +
                       opts.delta_offset;
            if (opts.jitter > 0.0) d += opts.jitter * noise(rng);
            c.points.push_back({x, d});
        }
        out.curves.push_back(std::move(c));
    }
    return out;
}

PeakTracks tracks_from_model(const ModelParams& params, std::span<const double> xs,
                             std::span<const BranchLabel> labels, const TrackOptions& opts) {
    if (!(opts.sigma > 0.0)) throw InputError("track sigma must be > 0");
    std::mt19937_64 rng(opts.rng_seed);
    std::normal_distribution<double> noise(0.0, 1.0);
    std::vector<SectorEnergies> energies;
    for (double x : xs) energies.push_back(sector_energies(params, x));
    PeakTracks out;
    for (const auto& label : labels) {
        Track t{to_string(label), label, {}};
        for (std::size_t i = 0; i < xs.size(); ++i) {
            double d = opts.scale * energies[i].energy(label, params.zeeman) + opts.delta_offset;
            if (opts.noise > 0.0) d += opts.noise * noise(rng);
            t.points.push_back({xs[i], d, opts.sigma, 1.0, 2.0});
        }
        out.tracks.push_back(std::move(t));
    }
    return out;
}

}  // namespace daxs
