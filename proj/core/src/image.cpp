#include "daxs/image.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "daxs/json_io.hpp"
#include "daxs/model.hpp"

namespace daxs {

std::size_t Axis::nearest(double v) const {
    if (count == 0) return 0;
    const double f = std::round(fractional_index(v));
    if (!(f > 0.0)) return 0;
    return std::min(static_cast<std::size_t>(f), count - 1);
}

void validate(const Axis& a) {
    if (a.count == 0) throw InputError("axis '" + a.name + "' is empty");
    if (!std::isfinite(a.start) || !std::isfinite(a.step) || a.step == 0.0) {
        throw InputError("axis '" + a.name + "' must have finite start and nonzero step");
    }
}

SpectralImage::SpectralImage(Axis x, Axis y)
    : x_(std::move(x)), y_(std::move(y)), data_(x_.count * y_.count, 0.0) {
    validate(x_);
    validate(y_);
}

SpectralImage::SpectralImage(Axis x, Axis y, std::vector<double> data)
    : x_(std::move(x)), y_(std::move(y)), data_(std::move(data)) {
    validate(x_);
    validate(y_);
    if (data_.size() != x_.count * y_.count) {
        throw InputError("image data length does not match axis counts");
    }
    if (!std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); })) {
        throw InputError("image data must be finite");
    }
}

std::vector<double> SpectralImage::column(std::size_t ix) const {
    std::vector<double> out(height());
    for (std::size_t iy = 0; iy < height(); ++iy) out[iy] = at(ix, iy);
    return out;
}

void SpectralImage::set_column(std::size_t ix, std::span<const double> values) {
    for (std::size_t iy = 0; iy < height(); ++iy) at(ix, iy) = values[iy];
}

MaskedImage fully_valid(SpectralImage img) {
    MaskedImage out{std::move(img), {}};
    out.valid.assign(out.image.data().size(), 1);
    return out;
}

void to_json(nlohmann::json& j, const Axis& a) {
    j = {{"name", a.name}, {"unit", a.unit}, {"start", a.start}, {"step", a.step},
         {"count", a.count}};
}

void from_json(const nlohmann::json& j, Axis& a) {
    a.name = j.value("name", std::string());
    a.unit = j.value("unit", std::string());
    a.start = j.at("start").get<double>();
    a.step = j.at("step").get<double>();
    a.count = j.at("count").get<std::size_t>();
    validate(a);
}

nlohmann::json image_to_json(const SpectralImage& img) {
    nlohmann::json rows = nlohmann::json::array();
    for (std::size_t iy = 0; iy < img.height(); ++iy) {
        auto row = img.data().subspan(iy * img.width(), img.width());
        rows.push_back(std::vector<double>(row.begin(), row.end()));
    }
    return {{"format", "daxs-img"},
            {"version", 1},
            {"x_axis", img.x_axis()},
            {"y_axis", img.y_axis()},
            {"data", std::move(rows)}};
}

SpectralImage image_from_json(const nlohmann::json& j) {
    return json_io::guarded("image", [&] {
        if (j.value("format", std::string()) != "daxs-img") {
            throw InputError("not a daxs-img document");
        }
        if (j.value("version", 0) != 1) throw InputError("unsupported daxs-img version");
        auto x = j.at("x_axis").get<Axis>();
        auto y = j.at("y_axis").get<Axis>();
        const auto& rows = j.at("data");
        if (!rows.is_array() || rows.size() != y.count) {
            throw InputError("daxs-img data must hold y_axis.count rows");
        }
        std::vector<double> data;
        data.reserve(x.count * y.count);
        for (const auto& row : rows) {
            if (!row.is_array() || row.size() != x.count) {
                throw InputError("daxs-img rows must hold x_axis.count values");
            }
            for (const auto& v : row) data.push_back(v.get<double>());
        }
        return SpectralImage(std::move(x), std::move(y), std::move(data));
    });
}

std::string write_image_string(const SpectralImage& img) { return image_to_json(img).dump(); }

void write_image(const SpectralImage& img, const std::string& path) {
    json_io::write_text(path, write_image_string(img));
}

SpectralImage read_image(const std::string& path) {
    return image_from_json(json_io::read_json(path));
}

SpectralImage parse_image(const std::string& text) {
    return image_from_json(json_io::parse_json(text, "image"));
}

}  // namespace daxs
