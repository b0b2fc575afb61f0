#pragma once

// Small file/JSON helpers shared by the readers. Every failure surfaces as
// InputError with enough context to locate the problem.

#include <string>
#include <utility>

#include <nlohmann/json.hpp>

#include "daxs/model.hpp"

namespace daxs::json_io {

std::string read_text(const std::string& path);
void write_text(const std::string& path, const std::string& text);

/// Parse errors carry nlohmann's "line L, column C" position.
nlohmann::json parse_json(const std::string& text, const std::string& what);
nlohmann::json read_json(const std::string& path);

/// Runs fn, rethrowing nlohmann type/key errors as InputError tagged with `what`.
template <typename Fn>
auto guarded(const std::string& what, Fn&& fn) -> decltype(fn()) {
    try {
        return std::forward<Fn>(fn)();
    } catch (const nlohmann::json::exception& e) {
        throw InputError(what + ": " + e.what());
    }
}

}  // namespace daxs::json_io
