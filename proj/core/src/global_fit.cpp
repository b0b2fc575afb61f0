#include "daxs/global_fit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include <Eigen/Dense>
#include <ceres/ceres.h>

#include "daxs/json_io.hpp"
#include "covariance.hpp"

namespace daxs {

namespace {

constexpr std::array<std::string_view, kFitParamCount> kFitParamNames = {
    "t11", "t12", "t21", "t22", "t31", "t32", "t41",
    "t42", "l21", "r21", "r31", "r41", "s",   "delta_offset"};

constexpr double kInf = std::numeric_limits<double>::infinity();

bool is_coupling(FitParam p) { return static_cast<int>(p) < 8; }
Coupling as_coupling(FitParam p) { return static_cast<Coupling>(p); }

double& offset_ref(LevelOffsets& o, FitParam p) {
    switch (p) {
        case FitParam::l21: return o.l21;
        case FitParam::r21: return o.r21;
        case FitParam::r31: return o.r31;
        default: return o.r41;
    }
}

double get_param(const GlobalObjective::State& s, FitParam p) {
    if (is_coupling(p)) return s.params.couplings.magnitude(as_coupling(p));
    if (p == FitParam::scale) return s.scale;
    if (p == FitParam::delta_offset) return s.delta_offset;
    auto o = s.params.offsets;
    return offset_ref(o, p);
}

void set_param(GlobalObjective::State& s, FitParam p, double v) {
    if (is_coupling(p)) {
        s.params.couplings.set_magnitude(as_coupling(p), v);
    } else if (p == FitParam::scale) {
        s.scale = v;
    } else if (p == FitParam::delta_offset) {
        s.delta_offset = v;
    } else {
        offset_ref(s.params.offsets, p) = v;
    }
}

class ObjectiveCost final : public ceres::CostFunction {
public:
    explicit ObjectiveCost(const GlobalObjective& obj) : obj_(obj) {
        set_num_residuals(obj.num_residuals());
        mutable_parameter_block_sizes()->push_back(obj.num_params());
    }

    bool Evaluate(double const* const* parameters, double* residuals,
                  double** jacobians) const override {
        const Eigen::Map<const Eigen::VectorXd> x(parameters[0], obj_.num_params());
        const Eigen::VectorXd xv = x;
        Eigen::Map<Eigen::VectorXd>(residuals, obj_.num_residuals()) = obj_.residuals(xv);
        if (jacobians && jacobians[0]) {
            Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
                jacobians[0], obj_.num_residuals(), obj_.num_params()) = obj_.jacobian(xv);
        }
        return true;
    }

private:
    const GlobalObjective& obj_;
};

}  // namespace

std::string_view name(FitParam p) { return kFitParamNames[static_cast<std::size_t>(p)]; }

std::optional<FitParam> fit_param_from_name(std::string_view s) {
    for (std::size_t i = 0; i < kFitParamNames.size(); ++i) {
        if (kFitParamNames[i] == s) return static_cast<FitParam>(i);
    }
    return std::nullopt;
}

std::string_view name(SignClass c) { return c == SignClass::all_positive ? "a" : "b"; }

SignClass sign_class_from_name(std::string_view s) {
    if (s == "a") return SignClass::all_positive;
    if (s == "b") return SignClass::one_negative_per_sector;
    throw InputError("sign class must be 'a' or 'b', got '" + std::string(s) + "'");
}

bool FitConfig::is_free(FitParam p) const {
    if (p == FitParam::t42 && tie_t42_to_t32) return false;
    return free[static_cast<std::size_t>(p)];
}

void validate(const FitConfig& cfg) {
    validate(cfg.initial);
    bool any = false;
    for (std::size_t i = 0; i < kFitParamCount; ++i) any = any || cfg.is_free(static_cast<FitParam>(i));
    if (!any) throw InputError("fit needs at least one free parameter");
    if (!(cfg.tolerance > 0.0)) throw InputError("fit tolerance must be > 0");
    if (cfg.max_iterations < 1) throw InputError("max_iterations must be >= 1");
    if (!std::isfinite(cfg.initial_scale) || !std::isfinite(cfg.initial_delta_offset)) {
        throw InputError("initial scale and delta_offset must be finite");
    }
}

double FitResult::standard_error(FitParam p) const {
    const auto it = standard_errors.find(std::string(name(p)));
    return it == standard_errors.end() ? kInf : it->second;
}

GlobalObjective::GlobalObjective(const PeakTracks& tracks, const FitConfig& cfg) : cfg_(cfg) {
    validate(cfg_);
    for (std::size_t i = 0; i < kFitParamCount; ++i) {
        const auto p = static_cast<FitParam>(i);
        if (cfg_.is_free(p)) free_.push_back(p);
    }

    const auto labels = branch_labels(cfg_.initial.zeeman);
    std::set<BranchLabel> seen;
    std::set<double> xs;
    for (const auto& t : tracks.tracks) {
        if (!t.branch) continue;
        if (std::find(labels.begin(), labels.end(), *t.branch) == labels.end()) {
            throw InputError("track '" + t.id + "' is bound to unknown branch " +
                             to_string(*t.branch));
        }
        if (!seen.insert(*t.branch).second) {
            throw InputError("branch " + to_string(*t.branch) + " is bound to more than one track");
        }
        for (const auto& p : t.points) xs.insert(p.x);
    }
    if (seen.empty()) throw InputError("no track is bound to a branch");
    xs_.assign(xs.begin(), xs.end());

    for (const auto& t : tracks.tracks) {
        if (!t.branch) continue;
        const std::size_t ti = track_ids_.size();
        track_ids_.push_back(t.id);
        for (const auto& p : t.points) {
            const auto col = static_cast<std::size_t>(
                std::lower_bound(xs_.begin(), xs_.end(), p.x) - xs_.begin());
            double sw = 1.0;
            if (cfg_.weighting == Weighting::inverse_variance) {
                if (!(p.delta_sigma > 0.0) || !std::isfinite(p.delta_sigma)) {
                    throw InputError("track '" + t.id + "' has a non-positive delta_sigma");
                }
                sw = 1.0 / p.delta_sigma;
            }
            points_.push_back({ti, col, *t.branch, p.delta, sw});
            weight_sum_ += sw * sw;
        }
    }
    if (points_.empty()) throw InputError("bound tracks contain no points");
}

Eigen::VectorXd GlobalObjective::initial_point() const {
    State s{cfg_.initial, cfg_.initial_scale, cfg_.initial_delta_offset};
    Eigen::VectorXd x(num_params());
    for (int i = 0; i < num_params(); ++i) x(i) = get_param(s, free_[static_cast<std::size_t>(i)]);
    return x;
}

Eigen::VectorXd GlobalObjective::lower_bounds() const {
    Eigen::VectorXd lo(num_params());
    for (int i = 0; i < num_params(); ++i) {
        const FitParam p = free_[static_cast<std::size_t>(i)];
        lo(i) = (p == FitParam::scale || p == FitParam::delta_offset) ? -kInf : 0.0;
    }
    return lo;
}

GlobalObjective::State GlobalObjective::unpack(const Eigen::VectorXd& x) const {
    State s{cfg_.initial, cfg_.initial_scale, cfg_.initial_delta_offset};
    s.params.couplings = apply_signs(s.params.couplings, representative(cfg_.sign_class));
    for (int i = 0; i < num_params(); ++i) set_param(s, free_[static_cast<std::size_t>(i)], x(i));
    if (cfg_.tie_t42_to_t32) {
        s.params.couplings.set_magnitude(Coupling::t42, s.params.couplings.magnitude(Coupling::t32));
    }
    return s;
}

Eigen::VectorXd GlobalObjective::model_energies(const ModelParams& p) const {
    std::vector<SectorEnergies> cols(xs_.size());
    for (std::size_t c = 0; c < xs_.size(); ++c) cols[c] = sector_energies(p, xs_[c]);
    Eigen::VectorXd e(num_residuals());
    for (std::size_t k = 0; k < points_.size(); ++k) {
        e(static_cast<Eigen::Index>(k)) = cols[points_[k].column].energy(points_[k].label, p.zeeman);
    }
    return e;
}

Eigen::VectorXd GlobalObjective::model(const State& s) const {
    return (s.scale * model_energies(s.params)).array() + s.delta_offset;
}

Eigen::VectorXd GlobalObjective::residuals(const Eigen::VectorXd& x) const {
    const Eigen::VectorXd m = model(unpack(x));
    Eigen::VectorXd r(num_residuals());
    for (std::size_t k = 0; k < points_.size(); ++k) {
        const auto i = static_cast<Eigen::Index>(k);
        r(i) = points_[k].sqrt_weight * (points_[k].delta - m(i));
    }
    return r;
}

Eigen::MatrixXd GlobalObjective::jacobian(const Eigen::VectorXd& x) const {
    const State base = unpack(x);
    Eigen::VectorXd sw(num_residuals());
    for (std::size_t k = 0; k < points_.size(); ++k) sw(static_cast<Eigen::Index>(k)) = points_[k].sqrt_weight;

    Eigen::MatrixXd jac(num_residuals(), num_params());
    std::optional<Eigen::VectorXd> base_energy;
    for (int j = 0; j < num_params(); ++j) {
        const FitParam p = free_[static_cast<std::size_t>(j)];
        if (p == FitParam::delta_offset) {
            jac.col(j) = -sw;
        } else if (p == FitParam::scale) {
            if (!base_energy) base_energy = model_energies(base.params);
            jac.col(j) = -sw.cwiseProduct(*base_energy);
        } else {
            Eigen::VectorXd xp = x;
            Eigen::VectorXd xm = x;
            xp(j) += kEigenStep;
            xm(j) -= kEigenStep;
            const Eigen::VectorXd ep = model_energies(unpack(xp).params);
            const Eigen::VectorXd em = model_energies(unpack(xm).params);
            jac.col(j) = -base.scale * sw.cwiseProduct(ep - em) / (2.0 * kEigenStep);
        }
    }
    return jac;
}

double GlobalObjective::objective(const Eigen::VectorXd& x) const {
    return 0.5 * residuals(x).squaredNorm();
}

Eigen::VectorXd GlobalObjective::gradient(const Eigen::VectorXd& x) const {
    return jacobian(x).transpose() * residuals(x);
}

double GlobalObjective::weighted_rms(const Eigen::VectorXd& x) const {
    return std::sqrt(residuals(x).squaredNorm() / weight_sum_);
}

std::vector<TrackResiduals> GlobalObjective::track_residuals(const Eigen::VectorXd& x) const {
    const Eigen::VectorXd m = model(unpack(x));
    std::vector<TrackResiduals> out;
    for (const auto& id : track_ids_) out.push_back({id, {}});
    for (std::size_t k = 0; k < points_.size(); ++k) {
        out[points_[k].track].residuals.push_back(points_[k].delta - m(static_cast<Eigen::Index>(k)));
    }
    return out;
}

FitResult fit_hamiltonian(const PeakTracks& tracks, const FitConfig& cfg) {
    const GlobalObjective obj(tracks, cfg);
    Eigen::VectorXd x = obj.initial_point();
    const Eigen::VectorXd lo = obj.lower_bounds();
    // Start inside the feasible box.
    x = x.cwiseMax(lo);
    const double initial_rms = obj.weighted_rms(x);

    ceres::Problem problem;
    problem.AddResidualBlock(new ObjectiveCost(obj), nullptr, x.data());
    for (int i = 0; i < obj.num_params(); ++i) {
        if (std::isfinite(lo(i))) problem.SetParameterLowerBound(x.data(), i, lo(i));
    }
    ceres::Solver::Options opts;
    opts.minimizer_type = ceres::TRUST_REGION;
    opts.trust_region_strategy_type = ceres::LEVENBERG_MARQUARDT;
    opts.linear_solver_type = ceres::DENSE_QR;
    opts.max_num_iterations = cfg.max_iterations;
    opts.function_tolerance = cfg.tolerance;
    opts.gradient_tolerance = 1e-14;
    opts.parameter_tolerance = 1e-12;
    opts.logging_type = ceres::SILENT;
    opts.num_threads = 1;
    ceres::Solver::Summary summary;
    ceres::Solve(opts, &problem, &summary);

    FitResult out;
    const auto state = obj.unpack(x);
    out.params = state.params;
    out.scale = state.scale;
    out.delta_offset = state.delta_offset;
    out.residual_rms = obj.weighted_rms(x);
    out.initial_residual_rms = initial_rms;
    out.free = cfg.free;
    out.sign_class = cfg.sign_class;
    out.tie_t42_to_t32 = cfg.tie_t42_to_t32;
    out.iterations = summary.num_successful_steps + summary.num_unsuccessful_steps;
    out.converged = summary.termination_type == ceres::CONVERGENCE;
    out.track_residuals = obj.track_residuals(x);

    const Eigen::VectorXd se = detail::standard_errors(obj.jacobian(x), obj.residuals(x));
    for (std::size_t i = 0; i < kFitParamCount; ++i) {
        out.standard_errors[std::string(name(static_cast<FitParam>(i)))] = 0.0;
    }
    for (int j = 0; j < obj.num_params(); ++j) {
        out.standard_errors[std::string(name(obj.free_params()[static_cast<std::size_t>(j)]))] = se(j);
    }
    if (cfg.tie_t42_to_t32) out.standard_errors["t42"] = out.standard_errors["t32"];
    return out;
}

double predicted_delta(const FitResult& fit, const BranchLabel& label, double eps) {
    return fit.scale * sector_energies(fit.params, eps).energy(label, fit.params.zeeman) +
           fit.delta_offset;
}

bool excluded_from_sign_report(Coupling c) {
    return c == Coupling::t31 || c == Coupling::t41 || c == Coupling::t42;
}

SignComparison compare_sign_classes(const PeakTracks& tracks, const FitConfig& cfg) {
    FitConfig a = cfg;
    a.sign_class = SignClass::all_positive;
    FitConfig b = cfg;
    b.sign_class = SignClass::one_negative_per_sector;
    SignComparison out{fit_hamiltonian(tracks, a), fit_hamiltonian(tracks, b), {}, {}};
    for (Coupling c : kAllCouplings) {
        const double ma = out.positive.params.couplings.magnitude(c);
        const double mb = out.mixed.params.couplings.magnitude(c);
        const double diff = std::fabs(ma - mb);
        out.systematic_sigma[c] = 0.5 * diff;
        if (excluded_from_sign_report(c)) continue;
        const double mean = 0.5 * (ma + mb);
        out.percent_difference[c] = mean > 0.0 ? 100.0 * diff / mean : 0.0;
    }
    return out;
}

std::map<Coupling, ScanStats> estimate_scan_variability(std::span<const FitResult> results) {
    if (results.size() < 2) throw InputError("scan variability needs at least two fit results");
    for (const auto& r : results) {
        if (r.free != results.front().free || r.tie_t42_to_t32 != results.front().tie_t42_to_t32) {
            throw InputError("fit results have different free-parameter masks");
        }
    }
    const double n = static_cast<double>(results.size());
    std::map<Coupling, ScanStats> out;
    for (Coupling c : kAllCouplings) {
        double sum = 0.0;
        for (const auto& r : results) sum += r.params.couplings.magnitude(c);
        const double mean = sum / n;
        double ss = 0.0;
        for (const auto& r : results) {
            const double d = r.params.couplings.magnitude(c) - mean;
            ss += d * d;
        }
        out[c] = {mean, std::sqrt(ss / (n - 1.0))};
    }
    return out;
}

namespace {

nlohmann::json free_to_json(const FreeMask& free) {
    nlohmann::json j = nlohmann::json::object();
    for (std::size_t i = 0; i < kFitParamCount; ++i) {
        j[std::string(name(static_cast<FitParam>(i)))] = free[i];
    }
    return j;
}

FreeMask free_from_json(const nlohmann::json& j) {
    FreeMask free = make_all_free();
    if (!j.is_object()) throw InputError("'free' must be an object of booleans");
    for (const auto& [key, value] : j.items()) {
        const auto p = fit_param_from_name(key);
        if (!p) throw InputError("unknown fit parameter '" + key + "'");
        free[static_cast<std::size_t>(*p)] = value.get<bool>();
    }
    return free;
}

}  // namespace

nlohmann::json fit_result_to_json(const FitResult& r) {
    nlohmann::json j = r.params;
    j["s"] = r.scale;
    j["delta_offset"] = r.delta_offset;
    j["residual_rms"] = r.residual_rms;
    j["initial_residual_rms"] = r.initial_residual_rms;
    nlohmann::json se = nlohmann::json::object();
    for (const auto& [k, v] : r.standard_errors) se[k] = std::isfinite(v) ? nlohmann::json(v) : nlohmann::json();
    j["stderr"] = std::move(se);
    j["converged"] = r.converged;
    j["iterations"] = r.iterations;
    j["sign_class"] = std::string(name(r.sign_class));
    j["tie_t42_to_t32"] = r.tie_t42_to_t32;
    j["free"] = free_to_json(r.free);
    nlohmann::json tr = nlohmann::json::object();
    for (const auto& t : r.track_residuals) tr[t.track_id] = t.residuals;
    j["track_residuals"] = std::move(tr);
    return j;
}

FitResult fit_result_from_json(const nlohmann::json& j) {
    return json_io::guarded("fit result", [&] {
        FitResult r;
        r.params = j.get<ModelParams>();
        r.scale = j.at("s").get<double>();
        r.delta_offset = j.at("delta_offset").get<double>();
        r.residual_rms = j.at("residual_rms").get<double>();
        r.initial_residual_rms = j.value("initial_residual_rms", r.residual_rms);
        for (const auto& [k, v] : j.at("stderr").items()) {
            r.standard_errors[k] = v.is_null() ? kInf : v.get<double>();
        }
        r.converged = j.at("converged").get<bool>();
        r.iterations = j.at("iterations").get<int>();
        r.sign_class = sign_class_from_name(j.value("sign_class", std::string("a")));
        r.tie_t42_to_t32 = j.value("tie_t42_to_t32", true);
        r.free = j.contains("free") ? free_from_json(j.at("free")) : make_all_free();
        if (j.contains("track_residuals")) {
            for (const auto& [k, v] : j.at("track_residuals").items()) {
                r.track_residuals.push_back({k, v.get<std::vector<double>>()});
            }
        }
        return r;
    });
}

nlohmann::json fit_config_to_json(const FitConfig& c) {
    return {{"initial", c.initial},
            {"initial_scale", c.initial_scale},
            {"initial_delta_offset", c.initial_delta_offset},
            {"free", free_to_json(c.free)},
            {"sign_class", std::string(name(c.sign_class))},
            {"tie_t42_to_t32", c.tie_t42_to_t32},
            {"max_iterations", c.max_iterations},
            {"tolerance", c.tolerance},
            {"weighting", c.weighting == Weighting::uniform ? "uniform" : "inverse_variance"}};
}

FitConfig fit_config_from_json(const nlohmann::json& j) {
    return json_io::guarded("fit config", [&] {
        FitConfig c;
        c.initial = j.at("initial").get<ModelParams>();
        c.initial_scale = j.value("initial_scale", 1.0);
        c.initial_delta_offset = j.value("initial_delta_offset", 0.0);
        if (j.contains("free")) c.free = free_from_json(j.at("free"));
        c.sign_class = sign_class_from_name(j.value("sign_class", std::string("a")));
        c.tie_t42_to_t32 = j.value("tie_t42_to_t32", true);
        c.max_iterations = j.value("max_iterations", 200);
        c.tolerance = j.value("tolerance", 1e-10);
        const auto w = j.value("weighting", std::string("inverse_variance"));
        if (w == "uniform") {
            c.weighting = Weighting::uniform;
        } else if (w == "inverse_variance") {
            c.weighting = Weighting::inverse_variance;
        } else {
            throw InputError("weighting must be 'inverse_variance' or 'uniform'");
        }
        validate(c);
        return c;
    });
}

}  // namespace daxs
