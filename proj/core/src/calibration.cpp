#include "daxs/calibration.hpp"

#include <cmath>
#include <string>

#include "daxs/model.hpp"

namespace daxs {

void validate(const LeverArms& a) {
    const bool finite = std::isfinite(a.a22) && std::isfinite(a.a33) && std::isfinite(a.a32) &&
                        std::isfinite(a.a23);
    if (!finite) throw InputError("lever arms must be finite");
    if (a.a22 <= 0.0 || a.a33 <= 0.0) throw InputError("diagonal lever arms must be > 0");
    if (a.a32 < 0.0 || a.a23 < 0.0) throw InputError("cross lever arms must be >= 0");
    if (a.a32 / a.a22 >= 1.0 || a.a23 / a.a33 >= 1.0) {
        throw InputError("cross/diagonal lever arm ratios must be < 1");
    }
}

GateVoltages virtualize(GateVoltages raw, const LeverArms& arms) {
    validate(arms);
    return {raw.left + (arms.a32 / arms.a22) * raw.right,
            raw.right + (arms.a23 / arms.a33) * raw.left};
}

GateVoltages devirtualize(GateVoltages virt, const LeverArms& arms) {
    validate(arms);
    // [1 p; q 1] [PL; PR] = [PLv; PRv]; det = 1 - pq > 0 since p, q < 1.
    const double p = arms.a32 / arms.a22;
    const double q = arms.a23 / arms.a33;
    const double det = 1.0 - p * q;
    return {(virt.left - p * virt.right) / det, (virt.right - q * virt.left) / det};
}

ChemicalPotentials to_chemical_potentials(GateVoltages virt, const LeverArms& arms) {
    validate(arms);
    return {arms.a22 * virt.left * kGHzPerUeV, arms.a33 * virt.right * kGHzPerUeV};
}

GateVoltages from_chemical_potentials(ChemicalPotentials mu, const LeverArms& arms) {
    validate(arms);
    return {mu.mu1 / (arms.a22 * kGHzPerUeV), mu.mu2 / (arms.a33 * kGHzPerUeV)};
}

EnergyAxes to_energy_axes(ChemicalPotentials mu) {
    return {mu.mu2 - mu.mu1, 0.5 * (mu.mu1 + mu.mu2)};
}

ChemicalPotentials from_energy_axes(EnergyAxes axes) {
    return {axes.delta - 0.5 * axes.eps, axes.delta + 0.5 * axes.eps};
}

EnergyAxes to_energy_axes(GateVoltages virt, const LeverArms& arms) {
    return to_energy_axes(to_chemical_potentials(virt, arms));
}

void to_json(nlohmann::json& j, const LeverArms& a) {
    j = {{"a22", a.a22}, {"a32", a.a32}, {"a23", a.a23}, {"a33", a.a33}, {"unit", "ueV_per_mV"}};
}

void from_json(const nlohmann::json& j, LeverArms& a) {
    const auto unit = j.value("unit", std::string("ueV_per_mV"));
    if (unit != "ueV_per_mV") throw InputError("lever arm unit must be 'ueV_per_mV'");
    a.a22 = j.at("a22").get<double>();
    a.a32 = j.at("a32").get<double>();
    a.a23 = j.at("a23").get<double>();
    a.a33 = j.at("a33").get<double>();
    validate(a);
}

}  // namespace daxs
