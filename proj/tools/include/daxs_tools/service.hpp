#pragma once

// HTTP service for the annotation UI. Handlers run concurrently; jobs run
// one at a time on a single FIFO worker. All shared state sits behind one
// mutex. Completed job records survive restarts via the data directory.

#include <filesystem>
#include <memory>
#include <string>

namespace daxs::tools {

class Service {
public:
    explicit Service(std::filesystem::path data_dir);
    ~Service();

    Service(const Service&) = delete;
    Service& operator=(const Service&) = delete;

    /// Binds to a free port and returns it, or -1.
    int bind_to_any_port(const std::string& host);
    bool bind(const std::string& host, int port);
    /// Blocks serving requests until stop().
    bool listen_after_bind();
    void stop();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace daxs::tools
