#pragma once

// Ground-truth helpers: seed polylines and peak tracks sampled straight from
// the model, standing in for an operator's hand-drawn curves.

#include <cstdint>
#include <span>
#include <vector>

#include "daxs/hamiltonian.hpp"
#include "daxs/image.hpp"
#include "daxs/tracks.hpp"

namespace daxs {

struct SeedOptions {
    double vertex_spacing = 5.0;  // GHz between polyline vertices along x
    double jitter = 0.0;          // Gaussian sigma added to each vertex delta, GHz
    std::uint64_t rng_seed = 0;
    double scale = 1.0;
    double delta_offset = 0.0;
};

/// One curve per label spanning the axis, id = to_string(label), bound to it.
SeedCurves seeds_from_model(const ModelParams& params, const Axis& x_axis,
                            std::span<const BranchLabel> labels, const SeedOptions& opts = {});

struct TrackOptions {
    double sigma = 0.05;  // reported delta_sigma, GHz
    double noise = 0.0;   // Gaussian sigma added to delta, GHz
    std::uint64_t rng_seed = 0;
    double scale = 1.0;
    double delta_offset = 0.0;
};

/// Bound tracks with one point per x, at s E_label(x) + offset (+ noise).
PeakTracks tracks_from_model(const ModelParams& params, std::span<const double> xs,
                             std::span<const BranchLabel> labels, const TrackOptions& opts = {});

}  // namespace daxs
