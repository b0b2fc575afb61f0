#include "daxs/error_budget.hpp"

#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>

namespace daxs {

namespace {

void check_sigma(double v, Coupling c, const char* what) {
    if (!std::isfinite(v) || v < 0.0) {
        throw InputError(std::string(what) + " for " + std::string(name(c)) +
                         " must be finite and >= 0");
    }
}

template <typename A, typename B>
bool same_keys(const std::map<Coupling, A>& a, const std::map<Coupling, B>& b) {
    if (a.size() != b.size()) return false;
    auto ib = b.begin();
    for (const auto& [k, v] : a) {
        if (k != (ib++)->first) return false;
    }
    return true;
}

double right_offset(const LevelOffsets& o, int level) {
    switch (level) {
        case 1: return 0.0;
        case 2: return o.r21;
        case 3: return o.r31;
        default: return o.r41;
    }
}

}  // namespace

const BudgetEntry* ErrorBudget::find(Coupling c) const {
    for (const auto& e : entries) {
        if (e.coupling == c) return &e;
    }
    return nullptr;
}

std::vector<BudgetEntry> ErrorBudget::headline() const {
    std::vector<BudgetEntry> out;
    for (const auto& e : entries) {
        if (e.reliable) out.push_back(e);
    }
    return out;
}

ErrorBudget build_error_budget(const std::map<Coupling, ScanStats>& random,
                               const std::map<Coupling, double>& systematic,
                               const std::map<Coupling, bool>& covered, double max_ratio) {
    if (!same_keys(random, systematic) || !same_keys(random, covered)) {
        throw InputError("random, systematic and coverage inputs must name the same couplings");
    }
    if (!(max_ratio > 0.0)) throw InputError("reliability ratio must be > 0");
    ErrorBudget out;
    for (const auto& [c, stats] : random) {
        check_sigma(stats.stddev, c, "random sigma");
        check_sigma(stats.mean, c, "mean magnitude");
        const double sys = systematic.at(c);
        check_sigma(sys, c, "systematic sigma");
        BudgetEntry e;
        e.coupling = c;
        e.mean = stats.mean;
        e.random_sigma = stats.stddev;
        e.systematic_sigma = sys;
        e.total_sigma = std::hypot(stats.stddev, sys);
        e.covered = covered.at(c);
        e.reliable = e.covered && e.mean > 0.0 && e.total_sigma / e.mean <= max_ratio;
        out.entries.push_back(e);
    }
    return out;
}

AnticrossingSite anticrossing_site(const ModelParams& p, Coupling c) {
    const double l = left_level(c) == 2 ? p.offsets.l21 : 0.0;
    const double eps = right_offset(p.offsets, right_level(c)) - l;
    return {eps, 0.5 * eps + l};
}

bool anticrossing_covered(const FitResult& fit, const PeakTracks& tracks, Coupling c) {
    const auto site = anticrossing_site(fit.params, c);
    const double t = fit.params.couplings.magnitude(c);
    const double dx = 2.0 * t;
    const double dy = 2.0 * t * std::fabs(fit.scale);
    const double yc = fit.scale * site.delta + fit.delta_offset;
    const Sector sector = is_triplet(c) ? Sector::triplet : Sector::singlet;
    for (const auto& tr : tracks.tracks) {
        if (!tr.branch || tr.branch->sector != sector) continue;
        for (const auto& pt : tr.points) {
            if (std::fabs(pt.x - site.eps) <= dx && std::fabs(pt.delta - yc) <= dy) return true;
        }
    }
    return false;
}

std::map<Coupling, bool> coverage_map(const FitResult& fit, const PeakTracks& tracks) {
    std::map<Coupling, bool> out;
    for (Coupling c : kAllCouplings) out[c] = anticrossing_covered(fit, tracks, c);
    return out;
}

void write_budget_csv(const ErrorBudget& budget, std::ostream& out) {
    out << "coupling,mean,random_sigma,systematic_sigma,total_sigma,reliable\n";
    out << std::setprecision(17);
    for (const auto& e : budget.entries) {
        out << name(e.coupling) << ',' << e.mean << ',' << e.random_sigma << ','
            << e.systematic_sigma << ',' << e.total_sigma << ',' << (e.reliable ? "true" : "false")
            << '\n';
    }
}

std::string budget_to_csv(const ErrorBudget& budget) {
    std::ostringstream os;
    write_budget_csv(budget, os);
    return os.str();
}

}  // namespace daxs
