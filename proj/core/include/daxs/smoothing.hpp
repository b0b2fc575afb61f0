#pragma once

#include <span>
#include <vector>

#include "daxs/image.hpp"

namespace daxs {

/// Savitzky-Golay weights that evaluate, at sample `position` (0-based within
/// the window), the least-squares polynomial of degree `poly_order` through
/// `window` equally spaced samples.
std::vector<double> savgol_weights(int window, int poly_order, int position);

/// Smooths one vector. Interior samples use the centered kernel; within
/// window/2 of either end the polynomial is fitted to the truncated window.
std::vector<double> savgol_filter(std::span<const double> values, int window, int poly_order);

/// Savitzky-Golay along y (each column independently). Axes are unchanged.
/// Throws InputError unless window is odd, >= 3, > poly_order and < column length.
SpectralImage smooth_columns(const SpectralImage& img, int window, int poly_order);

}  // namespace daxs
