#include "daxs_tools/jobs.hpp"

#include <stdexcept>

#include "daxs/pipeline.hpp"
#include "daxs_tools/store.hpp"

namespace daxs::tools {

std::string_view name(JobKind k) {
    switch (k) {
        case JobKind::fit: return "fit";
        case JobKind::sign_compare: return "sign-compare";
        default: return "align-average";
    }
}

std::string_view name(JobStatus s) {
    switch (s) {
        case JobStatus::queued: return "queued";
        case JobStatus::running: return "running";
        case JobStatus::done: return "done";
        default: return "failed";
    }
}

JobKind job_kind_from_name(std::string_view s) {
    for (JobKind k : {JobKind::fit, JobKind::sign_compare, JobKind::align_average}) {
        if (name(k) == s) return k;
    }
    throw InputError("unknown job kind '" + std::string(s) + "'");
}

JobStatus job_status_from_name(std::string_view s) {
    for (JobStatus k : {JobStatus::queued, JobStatus::running, JobStatus::done, JobStatus::failed}) {
        if (name(k) == s) return k;
    }
    throw InputError("unknown job status '" + std::string(s) + "'");
}

bool can_transition(JobStatus from, JobStatus to) {
    if (from == JobStatus::queued) return to == JobStatus::running;
    if (from == JobStatus::running) return to == JobStatus::done || to == JobStatus::failed;
    return false;
}

void JobRecord::advance(JobStatus to, const std::string& timestamp) {
    if (!can_transition(status, to)) {
        throw std::logic_error("job " + job_id + ": illegal transition " + std::string(name(status)) +
                               " -> " + std::string(name(to)));
    }
    status = to;
    if (to == JobStatus::running) {
        started_at = timestamp;
    } else {
        finished_at = timestamp;
    }
}

nlohmann::json job_to_json(const JobRecord& r) {
    nlohmann::json j = {{"job_id", r.job_id},
                        {"kind", name(r.kind)},
                        {"status", name(r.status)},
                        {"inputs",
                         {{"image_ids", r.image_ids},
                          {"seeds_ref", r.seeds_ref},
                          {"config_ref", r.config_ref}}},
                        {"result_ref", r.result_ref.empty() ? nlohmann::json() : nlohmann::json(r.result_ref)},
                        {"created_at", r.created_at},
                        {"started_at", r.started_at.empty() ? nlohmann::json() : nlohmann::json(r.started_at)},
                        {"finished_at", r.finished_at.empty() ? nlohmann::json() : nlohmann::json(r.finished_at)}};
    if (!r.error.empty()) j["error"] = r.error;
    return j;
}

namespace {

std::string opt_string(const nlohmann::json& j, const char* key) {
    return j.contains(key) && j.at(key).is_string() ? j.at(key).get<std::string>() : std::string();
}

}  // namespace

JobRecord job_from_json(const nlohmann::json& j) {
    JobRecord r;
    r.job_id = j.at("job_id").get<std::string>();
    r.kind = job_kind_from_name(j.at("kind").get<std::string>());
    r.status = job_status_from_name(j.at("status").get<std::string>());
    const auto& in = j.at("inputs");
    r.image_ids = in.at("image_ids").get<std::vector<std::string>>();
    r.seeds_ref = in.at("seeds_ref").get<std::string>();
    r.config_ref = in.at("config_ref").get<std::string>();
    r.result_ref = opt_string(j, "result_ref");
    r.error = opt_string(j, "error");
    r.created_at = opt_string(j, "created_at");
    r.started_at = opt_string(j, "started_at");
    r.finished_at = opt_string(j, "finished_at");
    return r;
}

nlohmann::json extraction_section(const nlohmann::json& config) {
    if (config.is_object() && config.contains("extraction")) return config.at("extraction");
    return config.is_null() ? nlohmann::json::object() : config;
}

JobRequest parse_job_request(const nlohmann::json& body) {
    if (!body.is_object()) throw InputError("job body must be a JSON object");
    try {
        JobRequest req;
        req.kind = job_kind_from_name(body.at("kind").get<std::string>());
        if (body.contains("image_ids")) {
            req.image_ids = body.at("image_ids").get<std::vector<std::string>>();
        }
        if (body.contains("image_id")) req.image_ids.push_back(body.at("image_id").get<std::string>());
        if (req.image_ids.empty()) throw InputError("job needs image_id or image_ids");
        for (const auto& id : req.image_ids) {
            if (!is_hash_id(id)) throw InputError("malformed image id '" + id + "'");
        }
        req.seeds = body.at("seeds");
        req.config = body.value("config", nlohmann::json::object());
        const SeedCurves seeds = seeds_from_json(req.seeds);
        if (req.kind == JobKind::align_average) {
            if (req.image_ids.size() < 2) throw InputError("align-average needs at least two images");
            if (seeds.curves.empty()) throw InputError("align-average needs an anticrossing seed curve");
            (void)extraction_section(req.config).get<ExtractionConfig>();
        } else {
            if (req.image_ids.size() != 1) throw InputError(std::string(name(req.kind)) + " takes one image");
            (void)pipeline_config_from_json(req.config);
        }
        return req;
    } catch (const nlohmann::json::exception& e) {
        throw InputError(std::string("job body: ") + e.what());
    }
}

std::string job_id_for(JobKind kind, const std::vector<std::string>& image_ids,
                       const std::string& seeds_ref, const std::string& config_ref) {
    std::string key(name(kind));
    for (const auto& id : image_ids) key += "|" + id;
    key += "|" + seeds_ref + "|" + config_ref;
    return sha256_hex(key);
}

JobOutput execute_job(JobKind kind, const std::vector<SpectralImage>& images,
                      const std::vector<std::string>& image_ids, const nlohmann::json& seeds_json,
                      const nlohmann::json& config) {
    const SeedCurves seeds = seeds_from_json(seeds_json);
    JobOutput out;
    if (kind == JobKind::align_average) {
        const ExtractionConfig ec = extraction_section(config).get<ExtractionConfig>();
        const auto run = run_align_average(images, image_ids, seeds.curves.front(), ec);
        out.image = write_image_string(run.average.image.image);
        out.result = {{"kind", name(kind)}, {"report", align_report_to_json(run)}};
        return out;
    }
    const PipelineConfig cfg = pipeline_config_from_json(config);
    if (kind == JobKind::fit) {
        const FitRun run = run_fit(images.front(), seeds, cfg);
        out.result = {{"kind", name(kind)},
                      {"fit", fit_result_to_json(run.fit)},
                      {"tracks_csv", tracks_to_csv(run.extraction.tracks)},
                      {"warnings", run.extraction.warnings},
                      {"rejected_points", run.extraction.rejected.size()}};
    } else {
        const SignCompareRun run = run_sign_compare(images.front(), seeds, cfg);
        out.result = {{"kind", name(kind)},
                      {"comparison", sign_comparison_to_json(run.comparison)},
                      {"tracks_csv", tracks_to_csv(run.extraction.tracks)},
                      {"warnings", run.extraction.warnings},
                      {"rejected_points", run.extraction.rejected.size()}};
    }
    return out;
}

}  // namespace daxs::tools
