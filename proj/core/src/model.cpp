#include "daxs/model.hpp"

#include <cmath>
#include <string>

namespace daxs {

namespace {

constexpr std::array<std::string_view, 8> kCouplingNames = {"t11", "t12", "t21", "t22",
                                                            "t31", "t32", "t41", "t42"};

void require_finite_nonneg(double v, std::string_view what) {
    if (!std::isfinite(v) || v < 0.0) {
        throw InputError(std::string(what) + " must be finite and >= 0");
    }
}

}  // namespace

std::string_view name(Coupling c) { return kCouplingNames[static_cast<std::size_t>(c)]; }

std::optional<Coupling> coupling_from_name(std::string_view s) {
    for (std::size_t i = 0; i < kCouplingNames.size(); ++i) {
        if (kCouplingNames[i] == s) return kAllCouplings[i];
    }
    return std::nullopt;
}

SignedCoupling SignedCoupling::from_value(double v) {
    return SignedCoupling{std::fabs(v), std::signbit(v) ? -1 : +1};
}

void validate(const ModelParams& p) {
    for (Coupling c : kAllCouplings) {
        const auto& e = p.couplings[c];
        require_finite_nonneg(e.magnitude, name(c));
        if (e.sign != 1 && e.sign != -1) {
            throw InputError(std::string(name(c)) + " sign must be +1 or -1");
        }
    }
    const auto& o = p.offsets;
    require_finite_nonneg(o.l21, "l21");
    require_finite_nonneg(o.r21, "r21");
    require_finite_nonneg(o.r31, "r31");
    require_finite_nonneg(o.r41, "r41");
    if (!(o.r21 <= o.r31 && o.r31 <= o.r41)) {
        throw InputError("right-dot offsets must satisfy r21 <= r31 <= r41");
    }
    require_finite_nonneg(p.zeeman, "zeeman");
}

std::string_view name(Sector s) { return s == Sector::singlet ? "singlet" : "triplet"; }

std::string to_string(const BranchLabel& b) {
    std::string out = b.sector == Sector::singlet ? "S" : "T";
    out += std::to_string(b.index);
    if (b.spin_z > 0) out += '+';
    if (b.spin_z < 0) out += '-';
    return out;
}

void to_json(nlohmann::json& j, const TunnelCouplings& c) {
    j = nlohmann::json::object();
    for (Coupling k : kAllCouplings) j[std::string(name(k))] = c.value(k);
}

void from_json(const nlohmann::json& j, TunnelCouplings& c) {
    if (!j.is_object()) throw InputError("couplings must be an object");
    for (Coupling k : kAllCouplings) {
        const std::string key(name(k));
        if (!j.contains(key)) throw InputError("couplings." + key + " missing");
        c.set_value(k, j.at(key).get<double>());
    }
    for (const auto& [key, _] : j.items()) {
        if (!coupling_from_name(key)) throw InputError("unknown coupling '" + key + "'");
    }
}

void to_json(nlohmann::json& j, const LevelOffsets& o) {
    j = {{"l21", o.l21}, {"r21", o.r21}, {"r31", o.r31}, {"r41", o.r41}};
}

void from_json(const nlohmann::json& j, LevelOffsets& o) {
    if (!j.is_object()) throw InputError("offsets must be an object");
    o.l21 = j.at("l21").get<double>();
    o.r21 = j.at("r21").get<double>();
    o.r31 = j.at("r31").get<double>();
    o.r41 = j.at("r41").get<double>();
}

void to_json(nlohmann::json& j, const ModelParams& p) {
    j = {{"couplings", p.couplings}, {"offsets", p.offsets}, {"zeeman", p.zeeman}};
}

void from_json(const nlohmann::json& j, ModelParams& p) {
    if (!j.is_object()) throw InputError("model parameters must be a JSON object");
    p.couplings = j.at("couplings").get<TunnelCouplings>();
    p.offsets = j.at("offsets").get<LevelOffsets>();
    p.zeeman = j.value("zeeman", 0.0);
}

void to_json(nlohmann::json& j, const BranchLabel& b) {
    j = {{"sector", std::string(name(b.sector))}, {"index", b.index}, {"spin_z", b.spin_z}};
}

void from_json(const nlohmann::json& j, BranchLabel& b) {
    const auto sector = j.at("sector").get<std::string>();
    if (sector == "singlet") {
        b.sector = Sector::singlet;
    } else if (sector == "triplet") {
        b.sector = Sector::triplet;
    } else {
        throw InputError("branch sector must be 'singlet' or 'triplet', got '" + sector + "'");
    }
    b.index = j.at("index").get<int>();
    b.spin_z = j.value("spin_z", 0);
    if (b.index < 0) throw InputError("branch index must be >= 0");
    if (b.spin_z < -1 || b.spin_z > 1) throw InputError("branch spin_z must be -1, 0 or +1");
    if (b.sector == Sector::singlet && b.spin_z != 0) {
        throw InputError("singlet branches carry spin_z = 0");
    }
}

}  // namespace daxs
