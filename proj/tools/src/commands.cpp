#include "daxs_tools/commands.hpp"

#include <csignal>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "daxs/error_budget.hpp"
#include "daxs/json_io.hpp"
#include "daxs/pipeline.hpp"
#include "daxs/simulate.hpp"
#include "daxs/synthetic.hpp"
#include "daxs_tools/service.hpp"

namespace daxs::tools {

namespace {

constexpr int kExitInput = 2;

struct SimulateArgs {
    std::string params, config, out, leads, seeds_out, mode = "daxs", sweep;
    std::optional<std::uint64_t> seed;
    double lead_voltage = 0.0;
    double eps_fixed = 0.0;
    double seed_spacing = 5.0;
    double seed_jitter = 0.0;
};

struct FitArgs {
    std::string image, seeds, config, out, tracks_out, sign_class;
};

struct AlignArgs {
    std::vector<std::string> images;
    std::string anticrossing, track_id, config, out, report, counts_out;
};

struct BudgetArgs {
    std::vector<std::string> scans, tracks;
    std::string sign_compare, seeds, out;
    double max_ratio = kUnreliableRatio;
};

struct ServeArgs {
    std::string host = "127.0.0.1";
    int port = 8080;
    std::string data_dir;
};

AxisSpec parse_axis_spec(const std::string& s) {
    AxisSpec a;
    char c1 = 0, c2 = 0;
    std::istringstream is(s);
    if (!(is >> a.start >> c1 >> a.step >> c2 >> a.count) || c1 != ':' || c2 != ':') {
        throw InputError("axis must be START:STEP:COUNT, got '" + s + "'");
    }
    return a;
}

LeadModel read_leads(const std::string& path) {
    const auto j = json_io::read_json(path);
    return json_io::guarded("lead model " + path, [&] {
        LeadModel m;
        const auto& arr = j.is_array() ? j : j.at("resonances");
        for (const auto& r : arr) m.resonances.push_back(r.get<LeadResonance>());
        validate(m);
        return m;
    });
}

void write_json_file(const std::string& path, const nlohmann::json& j) {
    json_io::write_text(path, j.dump(2) + "\n");
}

int cmd_simulate(const SimulateArgs& a) {
    const auto params = json_io::guarded("params " + a.params,
                                         [&] { return json_io::read_json(a.params).get<ModelParams>(); });
    validate(params);
    auto cfg = json_io::guarded("sim config " + a.config,
                                [&] { return json_io::read_json(a.config).get<SimConfig>(); });
    if (a.seed) cfg.rng_seed = *a.seed;
    validate(cfg);

    SpectralImage img;
    if (a.mode == "daxs") {
        if (a.leads.empty()) {
            img = render_daxs_image(params, cfg);
        } else {
            const LeadModel leads = read_leads(a.leads);
            img = render_daxs_image(params, cfg, &leads, a.lead_voltage);
        }
    } else if (a.mode == "reservoir") {
        const LeadModel leads = a.leads.empty() ? LeadModel{} : read_leads(a.leads);
        img = render_reservoir_sweep(params, leads, a.eps_fixed, parse_axis_spec(a.sweep), cfg);
    } else {
        img = render_magneto_map(params, parse_axis_spec(a.sweep), a.eps_fixed, cfg);
    }
    write_image(img, a.out);

    if (!a.seeds_out.empty()) {
        SeedOptions so;
        so.vertex_spacing = a.seed_spacing;
        so.jitter = a.seed_jitter;
        so.rng_seed = cfg.rng_seed;
        so.scale = cfg.scale;
        so.delta_offset = cfg.delta_offset;
        std::vector<BranchLabel> labels;
        for (const auto& b : branch_labels(params.zeeman)) {
            if (cfg.weight(b) > 0.0) labels.push_back(b);
        }
        write_seeds(seeds_from_model(params, img.x_axis(), labels, so), a.seeds_out);
    }
    return 0;
}

PipelineConfig read_pipeline_config(const std::string& path) {
    return pipeline_config_from_json(json_io::read_json(path));
}

void report_warnings(const ExtractionResult& ex) {
    for (const auto& w : ex.warnings) std::cerr << "warning: " << w << '\n';
}

std::string default_tracks_path(const std::string& out) {
    std::filesystem::path p(out);
    p.replace_extension(".tracks.csv");
    return p.string();
}

int cmd_fit(const FitArgs& a) {
    const SpectralImage img = read_image(a.image);
    const SeedCurves seeds = read_seeds(a.seeds);
    PipelineConfig cfg = read_pipeline_config(a.config);
    if (!a.sign_class.empty()) cfg.fit.sign_class = sign_class_from_name(a.sign_class);
    const FitRun run = run_fit(img, seeds, cfg);
    report_warnings(run.extraction);
    write_json_file(a.out, fit_result_to_json(run.fit));
    std::ofstream csv(a.tracks_out.empty() ? default_tracks_path(a.out) : a.tracks_out);
    write_tracks_csv(run.extraction.tracks, csv);
    if (!csv) throw std::runtime_error("cannot write tracks CSV");
    std::cout << "converged=" << (run.fit.converged ? "true" : "false")
              << " residual_rms=" << run.fit.residual_rms << " s=" << run.fit.scale
              << " iterations=" << run.fit.iterations << '\n';
    return run.fit.converged ? 0 : 1;
}

int cmd_sign_compare(const FitArgs& a) {
    const SpectralImage img = read_image(a.image);
    const SeedCurves seeds = read_seeds(a.seeds);
    const PipelineConfig cfg = read_pipeline_config(a.config);
    const SignCompareRun run = run_sign_compare(img, seeds, cfg);
    report_warnings(run.extraction);
    write_json_file(a.out, sign_comparison_to_json(run.comparison));
    for (const auto& [c, pct] : run.comparison.percent_difference) {
        std::cout << name(c) << ' ' << pct << "%\n";
    }
    return 0;
}

int cmd_align_average(const AlignArgs& a) {
    if (a.images.size() < 2) throw InputError("align-average needs at least two --image files");
    std::vector<SpectralImage> images;
    std::vector<std::string> ids;
    for (const auto& p : a.images) {
        images.push_back(read_image(p));
        ids.push_back(std::filesystem::path(p).filename().string());
    }
    const SeedCurves seeds = read_seeds(a.anticrossing);
    if (seeds.curves.empty()) throw InputError("anticrossing file has no seed curve");
    const SeedCurve* curve = &seeds.curves.front();
    if (!a.track_id.empty()) {
        const auto it = std::find_if(seeds.curves.begin(), seeds.curves.end(),
                                     [&](const auto& c) { return c.track_id == a.track_id; });
        if (it == seeds.curves.end()) throw InputError("no seed curve with id '" + a.track_id + "'");
        curve = &*it;
    }
    ExtractionConfig ec;
    if (!a.config.empty()) {
        const auto j = json_io::read_json(a.config);
        ec = json_io::guarded("extraction config", [&] {
            return (j.contains("extraction") ? j.at("extraction") : j).get<ExtractionConfig>();
        });
    }
    const AlignAverageRun run = run_align_average(images, ids, *curve, ec);
    write_image(run.average.image.image, a.out);
    if (!a.report.empty()) write_json_file(a.report, align_report_to_json(run));
    if (!a.counts_out.empty()) {
        const auto& base = run.average.image.image;
        std::vector<double> counts(run.average.counts.begin(), run.average.counts.end());
        write_image(SpectralImage(base.x_axis(), base.y_axis(), std::move(counts)), a.counts_out);
    }
    return 0;
}

int cmd_budget(const BudgetArgs& a) {
    if (a.scans.size() < 2) throw InputError("budget needs at least two --scan fit results");
    std::vector<FitResult> scans;
    for (const auto& p : a.scans) scans.push_back(fit_result_from_json(json_io::read_json(p)));
    const auto random = estimate_scan_variability(scans);

    const auto sc = json_io::read_json(a.sign_compare);
    std::map<Coupling, double> systematic;
    json_io::guarded("sign comparison", [&] {
        for (const auto& [k, v] : sc.at("systematic_sigma").items()) {
            const auto c = coupling_from_name(k);
            if (!c) throw InputError("unknown coupling '" + k + "'");
            systematic[*c] = v.get<double>();
        }
        return 0;
    });

    std::map<Coupling, bool> covered;
    for (Coupling c : kAllCouplings) covered[c] = a.tracks.empty();
    if (!a.tracks.empty()) {
        if (a.tracks.size() != scans.size()) throw InputError("give one --tracks file per --scan");
        if (a.seeds.empty()) throw InputError("--tracks needs --seeds for branch bindings");
        const SeedCurves seeds = read_seeds(a.seeds);
        for (std::size_t k = 0; k < scans.size(); ++k) {
            std::ifstream in(a.tracks[k]);
            if (!in) throw InputError("cannot open " + a.tracks[k]);
            PeakTracks tracks = read_tracks_csv(in);
            bind_tracks(tracks, seeds);
            for (const auto& [c, ok] : coverage_map(scans[k], tracks)) covered[c] = covered[c] || ok;
        }
    } else {
        std::cerr << "warning: no --tracks given; anticrossing coverage not checked\n";
    }

    const ErrorBudget budget = build_error_budget(random, systematic, covered, a.max_ratio);
    json_io::write_text(a.out, budget_to_csv(budget));
    return 0;
}

Service* g_service = nullptr;

void on_signal(int) {
    if (g_service) g_service->stop();
}

int cmd_serve(const ServeArgs& a) {
    std::string dir = a.data_dir;
    if (dir.empty()) {
        const char* env = std::getenv("DAXS_DATA_DIR");
        dir = env ? env : "daxs-data";
    }
    Service service(dir);
    if (!service.bind(a.host, a.port)) {
        std::cerr << "error: cannot bind " << a.host << ':' << a.port << '\n';
        return 1;
    }
    g_service = &service;
    std::signal(SIGINT, on_signal);
    std::signal(SIGTERM, on_signal);
    std::cout << "serving on http://" << a.host << ':' << a.port << " data_dir=" << dir << std::endl;
    service.listen_after_bind();
    g_service = nullptr;
    return 0;
}

}  // namespace

int run_cli(int argc, char** argv) {
    CLI::App app{"Delta-axis spectroscopy simulator and Hamiltonian fitter"};
    app.require_subcommand(1);

    SimulateArgs sim;
    auto* simulate = app.add_subcommand("simulate", "Render a synthetic DAXS image");
    simulate->add_option("--params", sim.params, "ModelParams JSON")->required();
    simulate->add_option("--config", sim.config, "SimConfig JSON")->required();
    simulate->add_option("--out", sim.out, "Output DAXS-IMG file")->required();
    simulate->add_option("--seed", sim.seed, "Noise RNG seed (overrides the config)");
    simulate->add_option("--mode", sim.mode, "daxs, reservoir or magneto")
        ->check(CLI::IsMember({"daxs", "reservoir", "magneto"}));
    simulate->add_option("--leads", sim.leads, "Lead resonance JSON");
    simulate->add_option("--lead-voltage", sim.lead_voltage, "Reservoir gate voltage for daxs mode, mV");
    simulate->add_option("--eps-fixed", sim.eps_fixed, "Detuning for reservoir/magneto modes, GHz");
    simulate->add_option("--sweep", sim.sweep, "Sweep axis START:STEP:COUNT (mV or GHz)");
    simulate->add_option("--seeds-out", sim.seeds_out, "Also write model seed curves");
    simulate->add_option("--seed-spacing", sim.seed_spacing, "Seed vertex spacing, GHz");
    simulate->add_option("--seed-jitter", sim.seed_jitter, "Seed vertex jitter sigma, GHz");

    FitArgs fit;
    auto* fitcmd = app.add_subcommand("fit", "Extract peak tracks and fit the Hamiltonian");
    fitcmd->add_option("--image", fit.image, "DAXS-IMG file")->required();
    fitcmd->add_option("--seeds", fit.seeds, "Seed curves JSON")->required();
    fitcmd->add_option("--config", fit.config, "Fit config JSON")->required();
    fitcmd->add_option("--out", fit.out, "FitResult JSON")->required();
    fitcmd->add_option("--tracks-out", fit.tracks_out, "Track CSV (default <out>.tracks.csv)");
    fitcmd->add_option("--sign-class", fit.sign_class, "a (all positive) or b")
        ->check(CLI::IsMember({"a", "b"}));

    FitArgs cmp;
    auto* signcmd = app.add_subcommand("sign-compare", "Fit both coupling sign classes and compare");
    signcmd->add_option("--image", cmp.image, "DAXS-IMG file")->required();
    signcmd->add_option("--seeds", cmp.seeds, "Seed curves JSON")->required();
    signcmd->add_option("--config", cmp.config, "Fit config JSON")->required();
    signcmd->add_option("--out", cmp.out, "Comparison JSON")->required();

    AlignArgs al;
    auto* aligncmd = app.add_subcommand("align-average", "Align images on an anticrossing vertex and average");
    aligncmd->add_option("--image", al.images, "DAXS-IMG file (repeat)")->required();
    aligncmd->add_option("--anticrossing", al.anticrossing, "Seed curves JSON for the lower branch")->required();
    aligncmd->add_option("--track-id", al.track_id, "Curve to use (default: first)");
    aligncmd->add_option("--config", al.config, "Extraction config JSON");
    aligncmd->add_option("--out", al.out, "Averaged DAXS-IMG file")->required();
    aligncmd->add_option("--report", al.report, "Alignment report JSON");
    aligncmd->add_option("--counts-out", al.counts_out, "Per-pixel input count map");

    BudgetArgs bud;
    auto* budcmd = app.add_subcommand("budget", "Combine scan spread and sign systematics");
    budcmd->add_option("--scan", bud.scans, "FitResult JSON per scan (repeat)")->required();
    budcmd->add_option("--sign-compare", bud.sign_compare, "sign-compare output JSON")->required();
    budcmd->add_option("--tracks", bud.tracks, "Track CSV per scan, for anticrossing coverage");
    budcmd->add_option("--seeds", bud.seeds, "Seed curves giving the track branch bindings");
    budcmd->add_option("--max-ratio", bud.max_ratio, "Unreliable above total/mean");
    budcmd->add_option("--out", bud.out, "ErrorBudget CSV")->required();

    ServeArgs srv;
    auto* serve = app.add_subcommand("serve", "Run the HTTP service");
    serve->add_option("--host", srv.host, "Bind address");
    serve->add_option("--port", srv.port, "Port");
    serve->add_option("--data-dir", srv.data_dir, "Data directory (default $DAXS_DATA_DIR or ./daxs-data)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitInput;
    }

    try {
        if (*simulate) return cmd_simulate(sim);
        if (*fitcmd) return cmd_fit(fit);
        if (*signcmd) return cmd_sign_compare(cmp);
        if (*aligncmd) return cmd_align_average(al);
        if (*budcmd) return cmd_budget(bud);
        if (*serve) return cmd_serve(srv);
    } catch (const InputError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInput;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return kExitInput;
}

}  // namespace daxs::tools
