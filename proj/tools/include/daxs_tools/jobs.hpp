#pragma once

// Job records for the service plus the pure job executor.

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "daxs/image.hpp"

namespace daxs::tools {

enum class JobKind { fit, sign_compare, align_average };
enum class JobStatus { queued, running, done, failed };

std::string_view name(JobKind k);
std::string_view name(JobStatus s);
JobKind job_kind_from_name(std::string_view s);
JobStatus job_status_from_name(std::string_view s);

/// queued -> running -> {done, failed}; nothing else.
bool can_transition(JobStatus from, JobStatus to);

struct JobRecord {
    std::string job_id;
    JobKind kind = JobKind::fit;
    JobStatus status = JobStatus::queued;
    std::vector<std::string> image_ids;
    std::string seeds_ref;
    std::string config_ref;
    std::string result_ref;
    std::string error;
    std::string created_at;
    std::string started_at;
    std::string finished_at;

    /// Throws std::logic_error on a transition can_transition rejects.
    void advance(JobStatus to, const std::string& timestamp);
};

nlohmann::json job_to_json(const JobRecord& r);
JobRecord job_from_json(const nlohmann::json& j);

/// POST /jobs body: {kind, image_id | image_ids, seeds, config}.
struct JobRequest {
    JobKind kind = JobKind::fit;
    std::vector<std::string> image_ids;
    nlohmann::json seeds;
    nlohmann::json config;
};

/// Throws InputError on a malformed body; seeds and config are validated too.
JobRequest parse_job_request(const nlohmann::json& body);

/// Deterministic id from the job's kind and content references.
std::string job_id_for(JobKind kind, const std::vector<std::string>& image_ids,
                       const std::string& seeds_ref, const std::string& config_ref);

struct JobOutput {
    nlohmann::json result;
    /// Averaged image for align-average jobs, as a DAXS-IMG document.
    std::optional<std::string> image;
};

/// Runs a job on already-loaded inputs. Pure: no I/O, no clock.
JobOutput execute_job(JobKind kind, const std::vector<SpectralImage>& images,
                      const std::vector<std::string>& image_ids, const nlohmann::json& seeds,
                      const nlohmann::json& config);

/// Extraction settings for align-average: config.extraction, or config itself.
nlohmann::json extraction_section(const nlohmann::json& config);

}  // namespace daxs::tools
