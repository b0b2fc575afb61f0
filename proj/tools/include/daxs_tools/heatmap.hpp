#pragma once

#include <array>
#include <cstdint>
#include <string>

#include "daxs/image.hpp"

namespace daxs::tools {

/// Linear min..max colour mapping; row 0 of the PNG is the largest y value.
std::string render_png(const SpectralImage& img);

/// Viridis-like colour for v in [0, 1].
std::array<std::uint8_t, 3> colormap(double v);

}  // namespace daxs::tools
