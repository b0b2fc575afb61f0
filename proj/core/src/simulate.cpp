#include "daxs/simulate.hpp"

#include <cmath>
#include <random>
#include <string>

namespace daxs {

namespace {

void add_noise(SpectralImage& img, double sigma, std::uint64_t seed) {
    if (sigma <= 0.0) return;
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> noise(0.0, sigma);
    for (double& v : img.data()) v += noise(rng);
}

void add_line(SpectralImage& img, std::size_t ix, double center, double fwhm, double amplitude) {
    if (amplitude == 0.0) return;
    const Axis& y = img.y_axis();
    for (std::size_t iy = 0; iy < y.count; ++iy) {
        img.at(ix, iy) += amplitude * lorentzian(y.at(iy) - center, fwhm);
    }
}

/// Adds every visible dot branch at detuning `eps` into column ix.
void add_dot_lines(SpectralImage& img, std::size_t ix, const ModelParams& params, double eps,
                   const SimConfig& cfg) {
    const SectorEnergies e = sector_energies(params, eps);
    for (const auto& label : branch_labels(params.zeeman)) {
        const double w = cfg.weight(label);
        const double center = cfg.scale * e.energy(label, params.zeeman) + cfg.delta_offset;
        add_line(img, ix, center, cfg.linewidth, w);
    }
}

Axis make_axis(const AxisSpec& spec, std::string name, std::string unit) {
    Axis a{std::move(name), std::move(unit), spec.start, spec.step, spec.count};
    validate(a);
    return a;
}

}  // namespace

double SimConfig::weight(const BranchLabel& b) const {
    const auto it = visibility.find(BranchLabel{b.sector, b.index, 0});
    return it == visibility.end() ? 1.0 : it->second;
}

void validate(const SimConfig& cfg) {
    validate(eps_axis(cfg));
    validate(delta_axis(cfg));
    if (!(cfg.linewidth > 0.0) || !std::isfinite(cfg.linewidth)) {
        throw InputError("linewidth must be > 0");
    }
    if (!(cfg.noise_sigma >= 0.0)) throw InputError("noise_sigma must be >= 0");
    for (const auto& [label, w] : cfg.visibility) {
        if (!(w >= 0.0) || !std::isfinite(w)) {
            throw InputError("visibility weight for " + to_string(label) + " must be >= 0");
        }
    }
    if (!std::isfinite(cfg.scale) || !std::isfinite(cfg.delta_offset)) {
        throw InputError("scale and delta_offset must be finite");
    }
}

void validate(const LeadModel& leads) {
    for (const auto& r : leads.resonances) {
        if (r.slope == 0.0 || !std::isfinite(r.slope)) {
            throw InputError("lead resonance slopes must be nonzero");
        }
        if (!(r.linewidth > 0.0)) throw InputError("lead linewidth must be > 0");
        if (!std::isfinite(r.intercept) || !std::isfinite(r.amplitude)) {
            throw InputError("lead resonance parameters must be finite");
        }
    }
}

Axis eps_axis(const SimConfig& cfg) { return make_axis(cfg.eps_axis, "eps", "GHz"); }
Axis delta_axis(const SimConfig& cfg) { return make_axis(cfg.delta_axis, "delta", "GHz"); }

SpectralImage render_daxs_image(const ModelParams& params, const SimConfig& cfg,
                                const LeadModel* leads, double lead_voltage) {
    validate(params);
    validate(cfg);
    if (leads) validate(*leads);
    SpectralImage img(eps_axis(cfg), delta_axis(cfg));
    for (std::size_t ix = 0; ix < img.width(); ++ix) {
        add_dot_lines(img, ix, params, img.x_axis().at(ix), cfg);
        if (leads) {
            for (const auto& r : leads->resonances) {
                add_line(img, ix, r.position(lead_voltage), r.linewidth, r.amplitude);
            }
        }
    }
    add_noise(img, cfg.noise_sigma, cfg.rng_seed);
    return img;
}

SpectralImage render_reservoir_sweep(const ModelParams& params, const LeadModel& leads,
                                     double eps_fixed, const AxisSpec& voltage_axis,
                                     const SimConfig& cfg) {
    validate(params);
    validate(cfg);
    validate(leads);
    if (!std::isfinite(eps_fixed)) throw InputError("eps_fixed must be finite");
    SpectralImage img(make_axis(voltage_axis, "V_AR", "mV"), delta_axis(cfg));
    for (std::size_t ix = 0; ix < img.width(); ++ix) {
        add_dot_lines(img, ix, params, eps_fixed, cfg);
        const double v = img.x_axis().at(ix);
        for (const auto& r : leads.resonances) {
            add_line(img, ix, r.position(v), r.linewidth, r.amplitude);
        }
    }
    add_noise(img, cfg.noise_sigma, cfg.rng_seed);
    return img;
}

SpectralImage render_magneto_map(const ModelParams& params, const AxisSpec& ez_axis,
                                 double eps_fixed, const SimConfig& cfg) {
    validate(params);
    validate(cfg);
    if (!std::isfinite(eps_fixed)) throw InputError("eps_fixed must be finite");
    SpectralImage img(make_axis(ez_axis, "E_Z", "GHz"), delta_axis(cfg));
    if (img.x_axis().min() < 0.0) throw InputError("Zeeman axis must be >= 0");
    const SectorEnergies e = sector_energies(params, eps_fixed);
    for (std::size_t ix = 0; ix < img.width(); ++ix) {
        const double ez = img.x_axis().at(ix);
        for (const auto& label : branch_labels(ez)) {
            const double center = cfg.scale * e.energy(label, ez) + cfg.delta_offset;
            add_line(img, ix, center, cfg.linewidth, cfg.weight(label));
        }
    }
    add_noise(img, cfg.noise_sigma, cfg.rng_seed);
    return img;
}

void to_json(nlohmann::json& j, const AxisSpec& a) {
    j = {{"start", a.start}, {"step", a.step}, {"count", a.count}};
}

void from_json(const nlohmann::json& j, AxisSpec& a) {
    a.start = j.at("start").get<double>();
    a.step = j.at("step").get<double>();
    a.count = j.at("count").get<std::size_t>();
}

void to_json(nlohmann::json& j, const SimConfig& c) {
    nlohmann::json vis = nlohmann::json::array();
    for (const auto& [label, w] : c.visibility) vis.push_back({{"branch", label}, {"weight", w}});
    j = {{"eps_axis", c.eps_axis},       {"delta_axis", c.delta_axis},
         {"linewidth", c.linewidth},     {"visibility", vis},
         {"noise_sigma", c.noise_sigma}, {"rng_seed", c.rng_seed},
         {"scale", c.scale},             {"delta_offset", c.delta_offset}};
}

void from_json(const nlohmann::json& j, SimConfig& c) {
    c.eps_axis = j.at("eps_axis").get<AxisSpec>();
    c.delta_axis = j.at("delta_axis").get<AxisSpec>();
    c.linewidth = j.value("linewidth", 2.0);
    c.visibility.clear();
    if (j.contains("visibility")) {
        for (const auto& v : j.at("visibility")) {
            auto label = v.at("branch").get<BranchLabel>();
            label.spin_z = 0;
            c.visibility[label] = v.at("weight").get<double>();
        }
    }
    c.noise_sigma = j.value("noise_sigma", 0.0);
    c.rng_seed = j.value("rng_seed", std::uint64_t{0});
    c.scale = j.value("scale", 1.0);
    c.delta_offset = j.value("delta_offset", 0.0);
}

void to_json(nlohmann::json& j, const LeadResonance& r) {
    j = {{"intercept", r.intercept},
         {"slope", r.slope},
         {"linewidth", r.linewidth},
         {"amplitude", r.amplitude}};
}

void from_json(const nlohmann::json& j, LeadResonance& r) {
    r.intercept = j.at("intercept").get<double>();
    r.slope = j.at("slope").get<double>();
    r.linewidth = j.value("linewidth", 1.0);
    r.amplitude = j.value("amplitude", 1.0);
}

}  // namespace daxs
