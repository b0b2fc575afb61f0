#include "daxs/smoothing.hpp"

#include <algorithm>
#include <string>

#include <Eigen/Dense>

#include "daxs/model.hpp"

namespace daxs {

namespace {

void check_settings(int window, int poly_order) {
    if (window < 3 || window % 2 == 0) throw InputError("smoothing window must be odd and >= 3");
    if (poly_order < 0 || poly_order >= window) {
        throw InputError("polynomial order must be in [0, window)");
    }
}

}  // namespace

std::vector<double> savgol_weights(int window, int poly_order, int position) {
    if (window < 1 || poly_order < 0 || position < 0 || position >= window) {
        throw InputError("invalid Savitzky-Golay kernel request");
    }
    const int order = std::min(poly_order, window - 1);
    // Local coordinate centred on the evaluation point keeps the Vandermonde
    // matrix well conditioned; the fitted value is then the constant term.
    Eigen::MatrixXd v(window, order + 1);
    for (int i = 0; i < window; ++i) {
        const double u = static_cast<double>(i - position);
        double p = 1.0;
        for (int k = 0; k <= order; ++k) {
            v(i, k) = p;
            p *= u;
        }
    }
    // Row 0 of the pseudo-inverse.
    const Eigen::MatrixXd pinv = v.colPivHouseholderQr().solve(Eigen::MatrixXd::Identity(window, window));
    std::vector<double> w(static_cast<std::size_t>(window));
    for (int i = 0; i < window; ++i) w[static_cast<std::size_t>(i)] = pinv(0, i);
    return w;
}

namespace {

/// Kernels for one (length, window, order) combination, reused across columns.
class SavgolPlan {
public:
    SavgolPlan(std::size_t length, int window, int poly_order)
        : n_(static_cast<int>(length)), half_(window / 2) {
        check_settings(window, poly_order);
        if (window >= n_) throw InputError("smoothing window must be shorter than the column");
        centered_ = savgol_weights(window, poly_order, half_);
        for (int i = 0; i < half_; ++i) {
            const int len = i + half_ + 1;
            head_.push_back(savgol_weights(len, poly_order, i));
            tail_.push_back(savgol_weights(len, poly_order, len - 1 - i));
        }
    }

    std::vector<double> apply(std::span<const double> values) const {
        std::vector<double> out(values.size());
        for (int i = half_; i < n_ - half_; ++i) {
            out[idx(i)] = dot(centered_, values, i - half_);
        }
        for (int i = 0; i < half_; ++i) {
            // Leading edge uses samples [0, i + half]; trailing edge mirrors it.
            const int len = i + half_ + 1;
            out[idx(i)] = dot(head_[idx(i)], values, 0);
            out[idx(n_ - 1 - i)] = dot(tail_[idx(i)], values, n_ - len);
        }
        return out;
    }

private:
    static std::size_t idx(int i) { return static_cast<std::size_t>(i); }

    static double dot(const std::vector<double>& w, std::span<const double> v, int offset) {
        double acc = 0.0;
        for (std::size_t k = 0; k < w.size(); ++k) acc += w[k] * v[idx(offset) + k];
        return acc;
    }

    int n_;
    int half_;
    std::vector<double> centered_;
    std::vector<std::vector<double>> head_;
    std::vector<std::vector<double>> tail_;
};

}  // namespace

std::vector<double> savgol_filter(std::span<const double> values, int window, int poly_order) {
    return SavgolPlan(values.size(), window, poly_order).apply(values);
}

SpectralImage smooth_columns(const SpectralImage& img, int window, int poly_order) {
    check_settings(window, poly_order);
    if (static_cast<std::size_t>(window) >= img.height()) {
        throw InputError("smoothing window (" + std::to_string(window) +
                         ") must be shorter than the column length (" +
                         std::to_string(img.height()) + ")");
    }
    const SavgolPlan plan(img.height(), window, poly_order);
    SpectralImage out = img;
    for (std::size_t ix = 0; ix < img.width(); ++ix) {
        out.set_column(ix, plan.apply(img.column(ix)));
    }
    return out;
}

}  // namespace daxs
