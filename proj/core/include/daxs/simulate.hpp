#pragma once

// Forward renderers: DAXS images, reservoir-gate sweeps and magnetospectroscopy
// maps synthesized from ModelParams. Dot transitions and lead resonances are
// Lorentzians with positive amplitude; pixel noise is additive Gaussian.

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include <nlohmann/json.hpp>

#include "daxs/hamiltonian.hpp"
#include "daxs/image.hpp"
#include "daxs/model.hpp"

namespace daxs {

/// Unit-height Lorentzian with full width at half maximum `fwhm`.
inline double lorentzian(double offset, double fwhm) {
    const double u = 2.0 * offset / fwhm;
    return 1.0 / (1.0 + u * u);
}

struct AxisSpec {
    double start = 0.0;
    double step = 1.0;
    std::size_t count = 0;
};

struct SimConfig {
    AxisSpec eps_axis;
    AxisSpec delta_axis;
    double linewidth = 2.0;
    /// Keyed by (sector, index); spin_z is ignored. Missing branches weigh 1.
    std::map<BranchLabel, double> visibility;
    double noise_sigma = 0.0;
    std::uint64_t rng_seed = 0;
    double scale = 1.0;
    double delta_offset = 0.0;

    double weight(const BranchLabel& b) const;
};

void validate(const SimConfig& cfg);

struct LeadResonance {
    double intercept = 0.0;  // delta position at zero lead voltage, GHz
    double slope = 0.0;      // GHz per mV
    double linewidth = 1.0;  // GHz
    double amplitude = 1.0;

    double position(double voltage) const { return intercept + slope * voltage; }
};

struct LeadModel {
    std::vector<LeadResonance> resonances;
};

void validate(const LeadModel& leads);

Axis eps_axis(const SimConfig& cfg);
Axis delta_axis(const SimConfig& cfg);

/// intensity(eps, delta) = sum_b w_b L(delta - (s E_b(eps) + offset)) + leads + noise.
/// Leads appear as horizontal lines at their position for `lead_voltage` (mV).
SpectralImage render_daxs_image(const ModelParams& params, const SimConfig& cfg,
                                const LeadModel* leads = nullptr, double lead_voltage = 0.0);

/// Reservoir-gate sweep at fixed detuning: x is the gate voltage (mV); dot
/// lines are flat (ideal compensation) and leads follow their slopes.
SpectralImage render_reservoir_sweep(const ModelParams& params, const LeadModel& leads,
                                     double eps_fixed, const AxisSpec& voltage_axis,
                                     const SimConfig& cfg);

/// Zeeman sweep at fixed detuning: x is E_Z (GHz). Triplet branches render at
/// E - E_Z, E, E + E_Z; singlets stay put.
SpectralImage render_magneto_map(const ModelParams& params, const AxisSpec& ez_axis,
                                 double eps_fixed, const SimConfig& cfg);

void to_json(nlohmann::json& j, const AxisSpec& a);
void from_json(const nlohmann::json& j, AxisSpec& a);
void to_json(nlohmann::json& j, const SimConfig& c);
void from_json(const nlohmann::json& j, SimConfig& c);
void to_json(nlohmann::json& j, const LeadResonance& r);
void from_json(const nlohmann::json& j, LeadResonance& r);

}  // namespace daxs
