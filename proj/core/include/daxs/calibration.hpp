#pragma once

// Gate voltage <-> energy conversions. Lever arms are in ueV/mV, voltages in mV,
// and all energies handed to the rest of the library are GHz.

#include <nlohmann/json.hpp>

namespace daxs {

/// e / h expressed as GHz per meV, to 6 significant figures.
inline constexpr double kGHzPerMeV = 241.799;
inline constexpr double kGHzPerUeV = kGHzPerMeV * 1e-3;

inline constexpr double mev_to_ghz(double mev) { return mev * kGHzPerMeV; }
inline constexpr double ghz_to_mev(double ghz) { return ghz / kGHzPerMeV; }

/// Lever arm a_nm from gate n to dot m: a22 (P_L -> dot 1), a33 (P_R -> dot 2)
/// and the cross terms a32 (P_R -> dot 1), a23 (P_L -> dot 2).
struct LeverArms {
    double a22 = 0.0;
    double a32 = 0.0;
    double a23 = 0.0;
    double a33 = 0.0;
};

/// Throws InputError unless the diagonal arms are > 0, cross arms >= 0 and
/// cross/diagonal ratios < 1.
void validate(const LeverArms& arms);

struct GateVoltages {
    double left = 0.0;   // P_L (or P_Lv), mV
    double right = 0.0;  // P_R (or P_Rv), mV
};

struct ChemicalPotentials {
    double mu1 = 0.0;  // left dot, GHz
    double mu2 = 0.0;  // right dot, GHz
};

struct EnergyAxes {
    double eps = 0.0;    // mu2 - mu1, GHz
    double delta = 0.0;  // (mu1 + mu2) / 2, GHz
};

/// P_Lv = P_L + (a32/a22) P_R, P_Rv = P_R + (a23/a33) P_L.
GateVoltages virtualize(GateVoltages raw, const LeverArms& arms);
/// Inverse of virtualize.
GateVoltages devirtualize(GateVoltages virt, const LeverArms& arms);

ChemicalPotentials to_chemical_potentials(GateVoltages virt, const LeverArms& arms);
GateVoltages from_chemical_potentials(ChemicalPotentials mu, const LeverArms& arms);

EnergyAxes to_energy_axes(ChemicalPotentials mu);
ChemicalPotentials from_energy_axes(EnergyAxes axes);

/// Virtual gate voltages straight to (eps, delta).
EnergyAxes to_energy_axes(GateVoltages virt, const LeverArms& arms);

// File form: {"a22", "a32", "a23", "a33", "unit": "ueV_per_mV"}.
void to_json(nlohmann::json& j, const LeverArms& a);
void from_json(const nlohmann::json& j, LeverArms& a);

}  // namespace daxs
