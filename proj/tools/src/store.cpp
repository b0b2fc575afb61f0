#include "daxs_tools/store.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include <openssl/evp.h>

#include "daxs/image.hpp"
#include "daxs/model.hpp"

namespace daxs::tools {

namespace fs = std::filesystem;

std::string sha256_hex(std::string_view data) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
        throw std::runtime_error("SHA-256 digest failed");
    }
    static constexpr char kHex[] = "0123456789abcdef";
    std::string out;
    out.reserve(2 * len);
    for (unsigned int i = 0; i < len; ++i) {
        out.push_back(kHex[digest[i] >> 4]);
        out.push_back(kHex[digest[i] & 0xf]);
    }
    return out;
}

bool is_hash_id(std::string_view id) {
    if (id.size() != 64) return false;
    for (char c : id) {
        if (!((c >= '0' && c <= '9') || (c >= 'a' && c <= 'f'))) return false;
    }
    return true;
}

Store::Store(fs::path root) : root_(std::move(root)) {
    for (const char* d : {"images", "blobs", "jobs", "results", "png"}) fs::create_directories(root_ / d);
}

fs::path Store::path(const char* dir, const std::string& id, const char* ext) const {
    if (!is_hash_id(id)) throw InputError("malformed id '" + id + "'");
    return root_ / dir / (id + ext);
}

std::optional<std::string> Store::read(const fs::path& p) const {
    std::ifstream in(p, std::ios::binary);
    if (!in) return std::nullopt;
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void Store::write(const fs::path& p, const std::string& bytes) const {
    const fs::path tmp = p.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
        if (!out) throw std::runtime_error("cannot write " + tmp.string());
    }
    fs::rename(tmp, p);
}

std::string Store::put_image(const std::string& bytes) {
    parse_image(bytes);
    const std::string id = sha256_hex(bytes);
    const auto p = path("images", id, ".json");
    if (!fs::exists(p)) write(p, bytes);
    return id;
}

std::optional<std::string> Store::image(const std::string& id) const {
    if (!is_hash_id(id)) return std::nullopt;
    return read(path("images", id, ".json"));
}

std::string Store::put_blob(const std::string& bytes) {
    const std::string id = sha256_hex(bytes);
    const auto p = path("blobs", id, ".json");
    if (!fs::exists(p)) write(p, bytes);
    return id;
}

std::optional<std::string> Store::blob(const std::string& id) const {
    if (!is_hash_id(id)) return std::nullopt;
    return read(path("blobs", id, ".json"));
}

void Store::put_job(const std::string& id, const std::string& bytes) {
    write(path("jobs", id, ".json"), bytes);
}

std::vector<std::string> Store::jobs() const {
    std::vector<std::string> out;
    for (const auto& e : fs::directory_iterator(root_ / "jobs")) {
        if (e.path().extension() != ".json") continue;
        if (auto text = read(e.path())) out.push_back(std::move(*text));
    }
    return out;
}

void Store::put_result(const std::string& id, const std::string& bytes) {
    write(path("results", id, ".json"), bytes);
}

std::optional<std::string> Store::result(const std::string& id) const {
    if (!is_hash_id(id)) return std::nullopt;
    return read(path("results", id, ".json"));
}

std::optional<std::string> Store::png(const std::string& id) const {
    if (!is_hash_id(id)) return std::nullopt;
    return read(path("png", id, ".png"));
}

void Store::put_png(const std::string& id, const std::string& bytes) {
    write(path("png", id, ".png"), bytes);
}

}  // namespace daxs::tools
