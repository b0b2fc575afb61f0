#include "daxs_tools/service.hpp"

#include <algorithm>
#include <condition_variable>
#include <ctime>
#include <deque>
#include <iostream>
#include <map>
#include <mutex>
#include <thread>

// Eigen headers must precede httplib.h, which pulls in <resolv.h> and its _res macro.
#include "daxs/json_io.hpp"
#include "daxs/pipeline.hpp"

#include <httplib.h>

#include "daxs_tools/heatmap.hpp"
#include "daxs_tools/jobs.hpp"
#include "daxs_tools/store.hpp"

namespace daxs::tools {

namespace {

constexpr const char* kJson = "application/json";

std::string utc_now() {
    const std::time_t t = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

void send_error(httplib::Response& res, int status, const std::string& error,
                const std::string& detail) {
    res.status = status;
    res.set_content(nlohmann::json{{"error", error}, {"detail", detail}}.dump(), kJson);
}

void send_json(httplib::Response& res, int status, const nlohmann::json& j) {
    res.status = status;
    res.set_content(j.dump(), kJson);
}

}  // namespace

struct Service::Impl {
    explicit Impl(std::filesystem::path dir) : store(std::move(dir)) {
        restore();
        routes();
        worker = std::thread([this] { work(); });
    }

    ~Impl() {
        server.stop();
        {
            std::lock_guard lock(mu);
            stopping = true;
        }
        cv.notify_all();
        if (worker.joinable()) worker.join();
    }

    void restore() {
        std::vector<JobRecord> queued;
        for (const auto& text : store.jobs()) {
            JobRecord r;
            try {
                r = job_from_json(nlohmann::json::parse(text));
            } catch (const std::exception& e) {
                std::cerr << "skipping unreadable job record: " << e.what() << '\n';
                continue;
            }
            if (r.status == JobStatus::running) {
                r.advance(JobStatus::failed, utc_now());
                r.error = "interrupted by service restart";
                persist(r);
            }
            if (r.status == JobStatus::queued) queued.push_back(r);
            jobs[r.job_id] = r;
        }
        std::sort(queued.begin(), queued.end(), [](const auto& a, const auto& b) {
            return std::tie(a.created_at, a.job_id) < std::tie(b.created_at, b.job_id);
        });
        for (const auto& r : queued) queue.push_back(r.job_id);
    }

    void persist(const JobRecord& r) { store.put_job(r.job_id, job_to_json(r).dump(2)); }

    void routes() {
        server.set_error_handler([](const httplib::Request& req, httplib::Response& res) {
            if (!res.body.empty()) return;
            if (res.status == 404) {
                send_error(res, 404, "not_found", "no route for " + req.method + " " + req.path);
            } else {
                send_error(res, res.status, "error", httplib::status_message(res.status));
            }
        });
        server.set_exception_handler(
            [](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
                try {
                    std::rethrow_exception(ep);
                } catch (const InputError& e) {
                    send_error(res, 400, "invalid_request", e.what());
                } catch (const std::exception& e) {
                    send_error(res, 500, "internal", e.what());
                } catch (...) {
                    send_error(res, 500, "internal", "unknown exception");
                }
            });

        server.Post("/images", [this](const httplib::Request& req, httplib::Response& res) {
            std::string id;
            try {
                id = store.put_image(req.body);
            } catch (const InputError& e) {
                return send_error(res, 400, "invalid_image", e.what());
            }
            send_json(res, 201, {{"id", id}});
        });

        server.Get(R"(/images/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
            const auto doc = store.image(req.matches[1]);
            if (!doc) return send_error(res, 404, "not_found", "unknown image id");
            res.set_content(*doc, kJson);
        });

        server.Get(R"(/images/([^/]+)/png)", [this](const httplib::Request& req, httplib::Response& res) {
            const std::string id = req.matches[1];
            const auto doc = store.image(id);
            if (!doc) return send_error(res, 404, "not_found", "unknown image id");
            auto png = store.png(id);
            if (!png) {
                png = render_png(parse_image(*doc));
                store.put_png(id, *png);
            }
            res.set_content(*png, "image/png");
        });

        server.Post("/jobs", [this](const httplib::Request& req, httplib::Response& res) {
            JobRequest jr;
            try {
                jr = parse_job_request(json_io::parse_json(req.body, "job body"));
            } catch (const InputError& e) {
                return send_error(res, 400, "invalid_request", e.what());
            }
            for (const auto& id : jr.image_ids) {
                if (!store.image(id)) return send_error(res, 404, "not_found", "unknown image id " + id);
            }
            const std::string seeds_ref = store.put_blob(jr.seeds.dump());
            const std::string config_ref = store.put_blob(jr.config.dump());
            const std::string id = job_id_for(jr.kind, jr.image_ids, seeds_ref, config_ref);
            std::lock_guard lock(mu);
            const auto it = jobs.find(id);
            if (it != jobs.end() && it->second.status != JobStatus::failed) {
                return send_json(res, 200, {{"job_id", id}, {"status", name(it->second.status)}});
            }
            JobRecord r;
            r.job_id = id;
            r.kind = jr.kind;
            r.image_ids = jr.image_ids;
            r.seeds_ref = seeds_ref;
            r.config_ref = config_ref;
            r.created_at = utc_now();
            persist(r);
            jobs[id] = r;
            queue.push_back(id);
            cv.notify_one();
            send_json(res, 202, {{"job_id", id}, {"status", name(r.status)}});
        });

        server.Get(R"(/jobs/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
            JobRecord r;
            {
                std::lock_guard lock(mu);
                const auto it = jobs.find(req.matches[1]);
                if (it == jobs.end()) return send_error(res, 404, "not_found", "unknown job id");
                r = it->second;
            }
            nlohmann::json j = job_to_json(r);
            if (r.status == JobStatus::done) {
                if (const auto text = store.result(r.result_ref)) j["result"] = nlohmann::json::parse(*text);
            }
            send_json(res, 200, j);
        });

        server.Get(R"(/fits/([^/]+)/overlay)", [this](const httplib::Request& req, httplib::Response& res) {
            JobRecord r;
            {
                std::lock_guard lock(mu);
                const auto it = jobs.find(req.matches[1]);
                if (it == jobs.end()) return send_error(res, 404, "not_found", "unknown fit id");
                r = it->second;
            }
            if (r.kind == JobKind::align_average) {
                return send_error(res, 400, "invalid_request", "job is not a fit");
            }
            if (r.status != JobStatus::done) {
                return send_error(res, 409, "not_ready", "fit job is " + std::string(name(r.status)));
            }
            const auto result = nlohmann::json::parse(store.result(r.result_ref).value());
            const FitResult fit = fit_result_from_json(
                r.kind == JobKind::fit ? result.at("fit") : result.at("comparison").at("positive"));
            const SeedCurves seeds = seeds_from_json(nlohmann::json::parse(store.blob(r.seeds_ref).value()));
            const SpectralImage img = parse_image(store.image(r.image_ids.front()).value());
            nlohmann::json j = overlay_to_json(fit_overlay(fit, seeds, img.x_axis()));
            j["fit_id"] = r.job_id;
            j["image_id"] = r.image_ids.front();
            send_json(res, 200, j);
        });
    }

    void work() {
        for (;;) {
            JobRecord r;
            {
                std::unique_lock lock(mu);
                cv.wait(lock, [this] { return stopping || !queue.empty(); });
                if (stopping) return;
                const std::string id = queue.front();
                queue.pop_front();
                auto& rec = jobs.at(id);
                rec.advance(JobStatus::running, utc_now());
                persist(rec);
                r = rec;
            }
            run(r);
            std::lock_guard lock(mu);
            jobs[r.job_id] = r;
            persist(r);
        }
    }

    void run(JobRecord& r) {
        try {
            std::vector<SpectralImage> images;
            for (const auto& id : r.image_ids) images.push_back(parse_image(store.image(id).value()));
            const auto seeds = nlohmann::json::parse(store.blob(r.seeds_ref).value());
            const auto config = nlohmann::json::parse(store.blob(r.config_ref).value());
            JobOutput out = execute_job(r.kind, images, r.image_ids, seeds, config);
            if (out.image) out.result["image_id"] = store.put_image(*out.image);
            const std::string bytes = out.result.dump();
            r.result_ref = sha256_hex(bytes);
            store.put_result(r.result_ref, bytes);
            r.advance(JobStatus::done, utc_now());
        } catch (const std::exception& e) {
            r.error = e.what();
            r.advance(JobStatus::failed, utc_now());
        }
    }

    Store store;
    httplib::Server server;
    std::mutex mu;
    std::condition_variable cv;
    std::deque<std::string> queue;
    std::map<std::string, JobRecord> jobs;
    bool stopping = false;
    std::thread worker;
};

Service::Service(std::filesystem::path data_dir) : impl_(std::make_unique<Impl>(std::move(data_dir))) {}

Service::~Service() = default;

int Service::bind_to_any_port(const std::string& host) { return impl_->server.bind_to_any_port(host); }

bool Service::bind(const std::string& host, int port) { return impl_->server.bind_to_port(host, port); }

bool Service::listen_after_bind() { return impl_->server.listen_after_bind(); }

void Service::stop() { impl_->server.stop(); }

}  // namespace daxs::tools
