#pragma once

// Per-coupling uncertainty budget: scan-to-scan spread combined in quadrature
// with the sign-class systematic, plus a reliability flag.

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "daxs/global_fit.hpp"
#include "daxs/model.hpp"
#include "daxs/tracks.hpp"

namespace daxs {

struct BudgetEntry {
    Coupling coupling = Coupling::t11;
    double mean = 0.0;
    double random_sigma = 0.0;
    double systematic_sigma = 0.0;
    double total_sigma = 0.0;
    bool covered = true;
    bool reliable = true;
};

struct ErrorBudget {
    std::vector<BudgetEntry> entries;

    const BudgetEntry* find(Coupling c) const;
    /// Entries flagged reliable, for headline reporting.
    std::vector<BudgetEntry> headline() const;
};

inline constexpr double kUnreliableRatio = 0.5;

/// total = sqrt(random^2 + systematic^2). An entry is unreliable when its mean
/// is zero, total/mean exceeds max_ratio, or its anticrossing was not covered.
/// Throws InputError on negative or non-finite inputs and mismatched key sets.
ErrorBudget build_error_budget(const std::map<Coupling, ScanStats>& random,
                               const std::map<Coupling, double>& systematic,
                               const std::map<Coupling, bool>& covered,
                               double max_ratio = kUnreliableRatio);

/// Location of the t_ij anticrossing in model units: eps_c = r_i - l_j and the
/// crossing level delta_c = eps_c / 2 + l_j.
struct AnticrossingSite {
    double eps = 0.0;
    double delta = 0.0;
};

AnticrossingSite anticrossing_site(const ModelParams& p, Coupling c);

/// True when some bound track of the coupling's sector has a point within
/// 2|t| in x and 2|t||s| in delta of the fitted anticrossing.
bool anticrossing_covered(const FitResult& fit, const PeakTracks& tracks, Coupling c);

std::map<Coupling, bool> coverage_map(const FitResult& fit, const PeakTracks& tracks);

// CSV: coupling,mean,random_sigma,systematic_sigma,total_sigma,reliable
void write_budget_csv(const ErrorBudget& budget, std::ostream& out);
std::string budget_to_csv(const ErrorBudget& budget);

}  // namespace daxs
