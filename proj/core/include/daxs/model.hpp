#pragma once

// Parameter types for the 15-level double-dot Hamiltonian. All energies are GHz.

#include <array>
#include <compare>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

namespace daxs {

/// Thrown for invalid user input (bad parameters, malformed files, bad axes).
class InputError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Tunnel couplings t_ij between right-dot level i and left-dot level j.
enum class Coupling : std::uint8_t { t11, t12, t21, t22, t31, t32, t41, t42 };

inline constexpr std::array<Coupling, 8> kAllCouplings = {
    Coupling::t11, Coupling::t12, Coupling::t21, Coupling::t22,
    Coupling::t31, Coupling::t32, Coupling::t41, Coupling::t42};

std::string_view name(Coupling c);
std::optional<Coupling> coupling_from_name(std::string_view s);

/// t2x and t4x live in the triplet block; t1x and t3x in the singlet block.
constexpr bool is_triplet(Coupling c) {
    return c == Coupling::t21 || c == Coupling::t22 || c == Coupling::t41 ||
           c == Coupling::t42;
}

/// Right-dot level index i of t_ij (1-based).
constexpr int right_level(Coupling c) { return static_cast<int>(c) / 2 + 1; }
/// Left-dot level index j of t_ij (1-based).
constexpr int left_level(Coupling c) { return static_cast<int>(c) % 2 + 1; }

struct SignedCoupling {
    double magnitude = 0.0;
    int sign = +1;

    double value() const { return sign < 0 ? -magnitude : magnitude; }
    static SignedCoupling from_value(double v);

    bool operator==(const SignedCoupling&) const = default;
};

class TunnelCouplings {
public:
    TunnelCouplings() = default;

    SignedCoupling& operator[](Coupling c) { return entries_[static_cast<std::size_t>(c)]; }
    const SignedCoupling& operator[](Coupling c) const {
        return entries_[static_cast<std::size_t>(c)];
    }

    /// Signed matrix element.
    double value(Coupling c) const { return (*this)[c].value(); }
    double magnitude(Coupling c) const { return (*this)[c].magnitude; }

    void set_magnitude(Coupling c, double m) { (*this)[c].magnitude = m; }
    void set_value(Coupling c, double v) { (*this)[c] = SignedCoupling::from_value(v); }

    bool operator==(const TunnelCouplings&) const = default;

private:
    std::array<SignedCoupling, 8> entries_{};
};

/// Diagonal offsets: left excited orbital l21 and right excited states r21 <= r31 <= r41.
struct LevelOffsets {
    double l21 = 0.0;
    double r21 = 0.0;
    double r31 = 0.0;
    double r41 = 0.0;

    bool operator==(const LevelOffsets&) const = default;
};

struct ModelParams {
    TunnelCouplings couplings;
    LevelOffsets offsets;
    double zeeman = 0.0;

    bool operator==(const ModelParams&) const = default;
};

/// Throws InputError when any invariant is violated.
void validate(const ModelParams& p);

enum class Sector : std::uint8_t { singlet, triplet };

std::string_view name(Sector s);

struct BranchLabel {
    Sector sector = Sector::triplet;
    int index = 0;
    int spin_z = 0;

    auto operator<=>(const BranchLabel&) const = default;
};

/// Compact form used for track ids and map keys: "T0", "S3", "T1+", "T1-".
std::string to_string(const BranchLabel& b);

// JSON mapping. Couplings are written as signed decimals, so a negative zero
// keeps its sign flag.
void to_json(nlohmann::json& j, const TunnelCouplings& c);
void from_json(const nlohmann::json& j, TunnelCouplings& c);
void to_json(nlohmann::json& j, const LevelOffsets& o);
void from_json(const nlohmann::json& j, LevelOffsets& o);
void to_json(nlohmann::json& j, const ModelParams& p);
void from_json(const nlohmann::json& j, ModelParams& p);
void to_json(nlohmann::json& j, const BranchLabel& b);
void from_json(const nlohmann::json& j, BranchLabel& b);

}  // namespace daxs
