#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace daxs {

/// Uniformly sampled axis: value(i) = start + i * step.
struct Axis {
    std::string name;
    std::string unit;
    double start = 0.0;
    double step = 1.0;
    std::size_t count = 0;

    double at(std::size_t i) const { return start + static_cast<double>(i) * step; }
    double first() const { return start; }
    double last() const { return at(count == 0 ? 0 : count - 1); }
    double min() const { return step > 0 ? first() : last(); }
    double max() const { return step > 0 ? last() : first(); }
    bool contains(double v) const { return v >= min() && v <= max(); }

    /// Index of the sample closest to v, clamped to [0, count).
    std::size_t nearest(double v) const;

    /// Fractional index of v (no clamping).
    double fractional_index(double v) const { return (v - start) / step; }

    bool operator==(const Axis&) const = default;
};

/// Throws InputError for an empty axis or a zero/non-finite step.
void validate(const Axis& a);

/// 2-D intensity map, row-major with rows indexed by y.
class SpectralImage {
public:
    SpectralImage() = default;
    SpectralImage(Axis x, Axis y);
    SpectralImage(Axis x, Axis y, std::vector<double> data);

    const Axis& x_axis() const { return x_; }
    const Axis& y_axis() const { return y_; }
    std::size_t width() const { return x_.count; }
    std::size_t height() const { return y_.count; }

    double& at(std::size_t ix, std::size_t iy) { return data_[iy * x_.count + ix]; }
    double at(std::size_t ix, std::size_t iy) const { return data_[iy * x_.count + ix]; }

    std::span<double> data() { return data_; }
    std::span<const double> data() const { return data_; }

    std::vector<double> column(std::size_t ix) const;
    void set_column(std::size_t ix, std::span<const double> values);

    bool operator==(const SpectralImage&) const = default;

private:
    Axis x_;
    Axis y_;
    std::vector<double> data_;
};

/// Image plus a validity mask; masked pixels carry 0 in the data channel and
/// must be ignored by consumers.
struct MaskedImage {
    SpectralImage image;
    std::vector<std::uint8_t> valid;

    bool is_valid(std::size_t ix, std::size_t iy) const {
        return valid[iy * image.width() + ix] != 0;
    }
};

MaskedImage fully_valid(SpectralImage img);

// DAXS-IMG v1:
// {"format":"daxs-img","version":1,"x_axis":{...},"y_axis":{...},"data":[[row]...]}
void to_json(nlohmann::json& j, const Axis& a);
void from_json(const nlohmann::json& j, Axis& a);
nlohmann::json image_to_json(const SpectralImage& img);
SpectralImage image_from_json(const nlohmann::json& j);

std::string write_image_string(const SpectralImage& img);
void write_image(const SpectralImage& img, const std::string& path);
SpectralImage read_image(const std::string& path);
SpectralImage parse_image(const std::string& text);

}  // namespace daxs
