#include "daxs/tracks.hpp"

#include <algorithm>
#include <cmath>
#include <charconv>
#include <iomanip>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

#include "daxs/json_io.hpp"
#include "daxs/smoothing.hpp"

namespace daxs {

double SeedCurve::delta_at(double x) const {
    const auto hi = std::lower_bound(points.begin(), points.end(), x,
                                     [](const SeedPoint& p, double v) { return p.x < v; });
    if (hi == points.begin()) return hi->delta;
    if (hi == points.end()) return points.back().delta;
    const auto lo = hi - 1;
    const double f = (x - lo->x) / (hi->x - lo->x);
    return lo->delta + f * (hi->delta - lo->delta);
}

void validate(const SeedCurves& seeds) {
    std::set<std::string> ids;
    for (const auto& c : seeds.curves) {
        if (c.track_id.empty()) throw InputError("seed curve track_id must be non-empty");
        if (!ids.insert(c.track_id).second) {
            throw InputError("duplicate seed track_id '" + c.track_id + "'");
        }
        if (c.points.size() < 2) {
            throw InputError("seed curve '" + c.track_id + "' needs at least 2 points");
        }
        for (std::size_t i = 0; i < c.points.size(); ++i) {
            if (!std::isfinite(c.points[i].x) || !std::isfinite(c.points[i].delta)) {
                throw InputError("seed curve '" + c.track_id + "' has non-finite points");
            }
            if (i > 0 && !(c.points[i].x > c.points[i - 1].x)) {
                throw InputError("seed curve '" + c.track_id + "' x must be strictly increasing");
            }
        }
    }
}

const Track* PeakTracks::find(const std::string& id) const {
    const auto it = std::find_if(tracks.begin(), tracks.end(),
                                 [&](const Track& t) { return t.id == id; });
    return it == tracks.end() ? nullptr : &*it;
}

std::size_t PeakTracks::total_points() const {
    std::size_t n = 0;
    for (const auto& t : tracks) n += t.points.size();
    return n;
}

std::string_view name(RejectReason r) {
    switch (r) {
        case RejectReason::merged: return "merged";
        case RejectReason::not_converged: return "not_converged";
        case RejectReason::width_at_bound: return "width_at_bound";
        case RejectReason::jumped: return "jumped";
        case RejectReason::seed_off_axis: return "seed_off_axis";
    }
    return "unknown";
}

ExtractionConfig ExtractionConfig::resolved(const Axis& delta_axis) const {
    ExtractionConfig c = *this;
    if (!(c.linewidth > 0.0)) throw InputError("extraction linewidth must be > 0");
    if (c.width_bounds.lo <= 0.0 && c.width_bounds.hi <= 0.0) {
        c.width_bounds = {c.linewidth / 4.0, 4.0 * c.linewidth};
    }
    if (!(c.width_bounds.lo > 0.0 && c.width_bounds.lo < c.width_bounds.hi)) {
        throw InputError("width bounds must satisfy 0 < lo < hi");
    }
    if (c.jump_threshold <= 0.0) c.jump_threshold = 3.0 * c.linewidth;
    if (c.merge_distance <= 0.0) c.merge_distance = c.linewidth;
    if (c.window_margin <= 0.0) c.window_margin = 3.0 * c.linewidth;
    if (c.sigma_floor <= 0.0) c.sigma_floor = 1e-3 * std::fabs(delta_axis.step);
    return c;
}

namespace {

struct ActiveSeed {
    std::size_t curve = 0;
    double delta = 0.0;
};

/// Seeds within merge distance of each other share one fitted peak.
struct PeakGroup {
    std::vector<std::size_t> members;  // indices into the active seed list
    double seed = 0.0;
};

std::vector<PeakGroup> group_seeds(const std::vector<ActiveSeed>& active, double merge_distance) {
    std::vector<PeakGroup> groups;
    for (std::size_t i = 0; i < active.size(); ++i) {
        if (!groups.empty() && active[i].delta - active[i - 1].delta < merge_distance) {
            groups.back().members.push_back(i);
        } else {
            groups.push_back({{i}, 0.0});
        }
    }
    for (auto& g : groups) {
        double sum = 0.0;
        for (std::size_t m : g.members) sum += active[m].delta;
        g.seed = sum / static_cast<double>(g.members.size());
    }
    return groups;
}

}  // namespace

ExtractionResult extract_tracks(const SpectralImage& img, const SeedCurves& seeds,
                                const ExtractionConfig& config) {
    validate(seeds);
    const Axis& yaxis = img.y_axis();
    const ExtractionConfig cfg = config.resolved(yaxis);

    ExtractionResult result;
    for (const auto& c : seeds.curves) result.tracks.tracks.push_back({c.track_id, c.branch, {}});
    if (seeds.curves.empty()) return result;

    const SpectralImage smoothed =
        cfg.sg_window > 0 ? smooth_columns(img, cfg.sg_window, cfg.sg_order) : img;

    std::vector<double> delta(yaxis.count);
    for (std::size_t iy = 0; iy < yaxis.count; ++iy) delta[iy] = yaxis.at(iy);

    ColumnFitOptions fit_opts;
    fit_opts.width_bounds = cfg.width_bounds;
    fit_opts.initial_width = cfg.linewidth;
    fit_opts.baseline = cfg.baseline;

    std::vector<std::size_t> covered(seeds.curves.size(), 0);

    for (std::size_t ix = 0; ix < img.width(); ++ix) {
        const double x = img.x_axis().at(ix);
        std::vector<ActiveSeed> active;
        for (std::size_t ci = 0; ci < seeds.curves.size(); ++ci) {
            const auto& curve = seeds.curves[ci];
            if (!curve.covers(x)) continue;
            ++covered[ci];
            const double d = curve.delta_at(x);
            if (!yaxis.contains(d)) {
                result.rejected.push_back({curve.track_id, x, RejectReason::seed_off_axis});
                continue;
            }
            active.push_back({ci, d});
        }
        if (active.empty()) continue;
        std::sort(active.begin(), active.end(), [](const ActiveSeed& a, const ActiveSeed& b) {
            return a.delta < b.delta || (a.delta == b.delta && a.curve < b.curve);
        });

        const auto groups = group_seeds(active, cfg.merge_distance);
        const auto column = smoothed.column(ix);

        // Fit clusters of groups whose windows overlap.
        std::size_t g0 = 0;
        while (g0 < groups.size()) {
            std::size_t g1 = g0 + 1;
            while (g1 < groups.size() &&
                   groups[g1].seed - groups[g1 - 1].seed <= 2.0 * cfg.window_margin) {
                ++g1;
            }
            const double lo = groups[g0].seed - cfg.window_margin;
            const double hi = groups[g1 - 1].seed + cfg.window_margin;
            std::vector<double> wd;
            std::vector<double> wy;
            for (std::size_t iy = 0; iy < yaxis.count; ++iy) {
                if (delta[iy] >= lo && delta[iy] <= hi) {
                    wd.push_back(delta[iy]);
                    wy.push_back(column[iy]);
                }
            }
            std::vector<double> group_seeds_vec;
            for (std::size_t g = g0; g < g1; ++g) group_seeds_vec.push_back(groups[g].seed);
            const ColumnFit fit = fit_column_peaks(wd, wy, group_seeds_vec, fit_opts);

            for (std::size_t g = g0; g < g1; ++g) {
                const auto& group = groups[g];
                const PeakEstimate& pk = fit.peaks[g - g0];
                std::optional<RejectReason> reason;
                if (group.members.size() > 1) {
                    reason = RejectReason::merged;
                } else if (!pk.converged || !std::isfinite(pk.center_sigma)) {
                    reason = RejectReason::not_converged;
                } else if (pk.width_at_bound) {
                    reason = RejectReason::width_at_bound;
                } else if (std::fabs(pk.center - group.seed) > cfg.jump_threshold) {
                    reason = RejectReason::jumped;
                } else {
                    for (std::size_t h = g0; h < g1; ++h) {
                        if (h != g &&
                            std::fabs(fit.peaks[h - g0].center - pk.center) < cfg.merge_distance) {
                            reason = RejectReason::merged;
                        }
                    }
                }
                for (std::size_t m : group.members) {
                    const auto ci = active[m].curve;
                    if (reason) {
                        result.rejected.push_back({seeds.curves[ci].track_id, x, *reason});
                    } else {
                        result.tracks.tracks[ci].points.push_back(
                            {x, pk.center, std::max(pk.center_sigma, cfg.sigma_floor),
                             pk.amplitude, pk.width});
                    }
                }
            }
            g0 = g1;
        }
    }

    for (std::size_t ci = 0; ci < seeds.curves.size(); ++ci) {
        if (covered[ci] == 0) {
            result.warnings.push_back("seed curve '" + seeds.curves[ci].track_id +
                                      "' covers no image columns");
        }
    }
    return result;
}

void bind_tracks(PeakTracks& tracks, const SeedCurves& seeds) {
    for (auto& t : tracks.tracks) {
        const auto it = std::find_if(seeds.curves.begin(), seeds.curves.end(),
                                     [&](const SeedCurve& c) { return c.track_id == t.id; });
        if (it != seeds.curves.end()) t.branch = it->branch;
    }
}

nlohmann::json seeds_to_json(const SeedCurves& seeds) {
    nlohmann::json curves = nlohmann::json::array();
    for (const auto& c : seeds.curves) {
        nlohmann::json pts = nlohmann::json::array();
        for (const auto& p : c.points) pts.push_back({p.x, p.delta});
        curves.push_back({{"track_id", c.track_id},
                          {"branch", c.branch ? nlohmann::json(*c.branch) : nlohmann::json()},
                          {"points", std::move(pts)}});
    }
    return {{"format", "daxs-seeds"}, {"version", 1}, {"curves", std::move(curves)}};
}

SeedCurves seeds_from_json(const nlohmann::json& j) {
    return json_io::guarded("seeds", [&] {
        if (j.value("format", std::string()) != "daxs-seeds") {
            throw InputError("not a daxs-seeds document");
        }
        if (j.value("version", 0) != 1) throw InputError("unsupported daxs-seeds version");
        SeedCurves out;
        for (const auto& c : j.at("curves")) {
            SeedCurve curve;
            curve.track_id = c.at("track_id").get<std::string>();
            if (c.contains("branch") && !c.at("branch").is_null()) {
                curve.branch = c.at("branch").get<BranchLabel>();
            }
            for (const auto& p : c.at("points")) {
                if (!p.is_array() || p.size() != 2) {
                    throw InputError("seed points must be [x, delta] pairs");
                }
                curve.points.push_back({p[0].get<double>(), p[1].get<double>()});
            }
            out.curves.push_back(std::move(curve));
        }
        validate(out);
        return out;
    });
}

SeedCurves read_seeds(const std::string& path) {
    return seeds_from_json(json_io::read_json(path));
}

void write_seeds(const SeedCurves& seeds, const std::string& path) {
    json_io::write_text(path, seeds_to_json(seeds).dump(2));
}

void write_tracks_csv(const PeakTracks& tracks, std::ostream& out) {
    out << "track_id,x,delta,delta_sigma,amplitude,width\n";
    out << std::setprecision(17);
    for (const auto& t : tracks.tracks) {
        for (const auto& p : t.points) {
            out << t.id << ',' << p.x << ',' << p.delta << ',' << p.delta_sigma << ','
                << p.amplitude << ',' << p.width << '\n';
        }
    }
}

std::string tracks_to_csv(const PeakTracks& tracks) {
    std::ostringstream ss;
    write_tracks_csv(tracks, ss);
    return ss.str();
}

namespace {

double parse_double(std::string_view field, std::size_t line) {
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
    if (ec != std::errc() || ptr != field.data() + field.size()) {
        throw InputError("tracks CSV line " + std::to_string(line) + ": bad number '" +
                         std::string(field) + "'");
    }
    return v;
}

}  // namespace

PeakTracks read_tracks_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line != "track_id,x,delta,delta_sigma,amplitude,width") {
        throw InputError("tracks CSV must start with header track_id,x,delta,delta_sigma,amplitude,width");
    }
    PeakTracks out;
    std::map<std::string, std::size_t> index;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::vector<std::string_view> fields;
        std::string_view rest(line);
        for (std::size_t pos; (pos = rest.find(',')) != std::string_view::npos;) {
            fields.push_back(rest.substr(0, pos));
            rest.remove_prefix(pos + 1);
        }
        fields.push_back(rest);
        if (fields.size() != 6) {
            throw InputError("tracks CSV line " + std::to_string(lineno) + ": expected 6 fields");
        }
        const std::string id(fields[0]);
        auto [it, inserted] = index.try_emplace(id, out.tracks.size());
        if (inserted) out.tracks.push_back({id, std::nullopt, {}});
        out.tracks[it->second].points.push_back(
            {parse_double(fields[1], lineno), parse_double(fields[2], lineno),
             parse_double(fields[3], lineno), parse_double(fields[4], lineno),
             parse_double(fields[5], lineno)});
    }
    return out;
}

void to_json(nlohmann::json& j, const ExtractionConfig& c) {
    j = {{"sg_window", c.sg_window},
         {"sg_order", c.sg_order},
         {"linewidth", c.linewidth},
         {"width_lo", c.width_bounds.lo},
         {"width_hi", c.width_bounds.hi},
         {"jump_threshold", c.jump_threshold},
         {"merge_distance", c.merge_distance},
         {"window_margin", c.window_margin},
         {"sigma_floor", c.sigma_floor},
         {"baseline", c.baseline == BaselineMode::fit ? "fit" : "fixed"}};
}

void from_json(const nlohmann::json& j, ExtractionConfig& c) {
    c = ExtractionConfig{};
    c.sg_window = j.value("sg_window", c.sg_window);
    c.sg_order = j.value("sg_order", c.sg_order);
    c.linewidth = j.value("linewidth", c.linewidth);
    c.width_bounds.lo = j.value("width_lo", 0.0);
    c.width_bounds.hi = j.value("width_hi", 0.0);
    c.jump_threshold = j.value("jump_threshold", 0.0);
    c.merge_distance = j.value("merge_distance", 0.0);
    c.window_margin = j.value("window_margin", 0.0);
    c.sigma_floor = j.value("sigma_floor", 0.0);
    const auto baseline = j.value("baseline", std::string("fit"));
    if (baseline != "fit" && baseline != "fixed") {
        throw InputError("extraction baseline must be 'fit' or 'fixed'");
    }
    c.baseline = baseline == "fit" ? BaselineMode::fit : BaselineMode::fixed;
}

}  // namespace daxs
