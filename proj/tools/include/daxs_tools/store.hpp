#pragma once

// Flat-file persistence keyed by SHA-256 content hash.

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace daxs::tools {

std::string sha256_hex(std::string_view data);

/// True for a 64-character lowercase hex id.
bool is_hash_id(std::string_view id);

/// Layout under root: images/<id>.json, blobs/<id>.json, jobs/<id>.json,
/// results/<id>.json, png/<id>.png.
class Store {
public:
    explicit Store(std::filesystem::path root);

    const std::filesystem::path& root() const { return root_; }

    /// Validates the document as DAXS-IMG and stores the bytes verbatim.
    std::string put_image(const std::string& bytes);
    std::optional<std::string> image(const std::string& id) const;

    std::string put_blob(const std::string& bytes);
    std::optional<std::string> blob(const std::string& id) const;

    void put_job(const std::string& id, const std::string& bytes);
    std::vector<std::string> jobs() const;

    void put_result(const std::string& id, const std::string& bytes);
    std::optional<std::string> result(const std::string& id) const;

    std::optional<std::string> png(const std::string& id) const;
    void put_png(const std::string& id, const std::string& bytes);

private:
    std::filesystem::path path(const char* dir, const std::string& id, const char* ext) const;
    std::optional<std::string> read(const std::filesystem::path& p) const;
    void write(const std::filesystem::path& p, const std::string& bytes) const;

    std::filesystem::path root_;
};

}  // namespace daxs::tools
