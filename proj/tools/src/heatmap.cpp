#include "daxs_tools/heatmap.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include <png.h>

namespace daxs::tools {

std::array<std::uint8_t, 3> colormap(double v) {
    static constexpr std::array<std::array<double, 3>, 9> kStops = {{
        {68, 1, 84}, {71, 44, 122}, {59, 81, 139}, {44, 113, 142}, {33, 144, 141},
        {39, 173, 129}, {92, 200, 99}, {170, 220, 50}, {253, 231, 37}}};
    const double x = std::clamp(std::isfinite(v) ? v : 0.0, 0.0, 1.0) * (kStops.size() - 1);
    const auto i = std::min(static_cast<std::size_t>(x), kStops.size() - 2);
    const double f = x - static_cast<double>(i);
    std::array<std::uint8_t, 3> out{};
    for (std::size_t c = 0; c < 3; ++c) {
        out[c] = static_cast<std::uint8_t>(std::lround(kStops[i][c] + f * (kStops[i + 1][c] - kStops[i][c])));
    }
    return out;
}

std::string render_png(const SpectralImage& img) {
    const auto data = img.data();
    const auto [lo_it, hi_it] = std::minmax_element(data.begin(), data.end());
    const double lo = *lo_it;
    const double span = *hi_it - lo;
    const std::size_t w = img.width();
    const std::size_t h = img.height();
    const bool y_up = img.y_axis().step > 0;

    std::vector<std::uint8_t> rgb(w * h * 3);
    for (std::size_t row = 0; row < h; ++row) {
        const std::size_t iy = y_up ? h - 1 - row : row;
        for (std::size_t ix = 0; ix < w; ++ix) {
            const double v = span > 0 ? (img.at(ix, iy) - lo) / span : 0.0;
            const auto c = colormap(v);
            std::copy(c.begin(), c.end(), rgb.begin() + static_cast<std::ptrdiff_t>((row * w + ix) * 3));
        }
    }

    png_image image{};
    image.version = PNG_IMAGE_VERSION;
    image.width = static_cast<png_uint_32>(w);
    image.height = static_cast<png_uint_32>(h);
    image.format = PNG_FORMAT_RGB;
    png_alloc_size_t size = 0;
    if (!png_image_write_to_memory(&image, nullptr, &size, 0, rgb.data(), 0, nullptr)) {
        throw std::runtime_error(std::string("PNG sizing failed: ") + image.message);
    }
    std::string out(size, '\0');
    if (!png_image_write_to_memory(&image, out.data(), &size, 0, rgb.data(), 0, nullptr)) {
        throw std::runtime_error(std::string("PNG encoding failed: ") + image.message);
    }
    out.resize(size);
    return out;
}

}  // namespace daxs::tools
