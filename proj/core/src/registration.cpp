#include "daxs/registration.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Dense>
#include <ceres/ceres.h>

#include "covariance.hpp"
#include "daxs/model.hpp"

namespace daxs {

namespace {

constexpr double kTiny = 1e-300;

/// Parameter block [eps0, c, m, a, t].
class HyperbolaCost final : public ceres::CostFunction {
public:
    HyperbolaCost(std::vector<double> x, std::vector<double> y) : x_(std::move(x)), y_(std::move(y)) {
        set_num_residuals(static_cast<int>(x_.size()));
        mutable_parameter_block_sizes()->push_back(5);
    }

    bool Evaluate(double const* const* parameters, double* residuals,
                  double** jacobians) const override {
        const double* p = parameters[0];
        const double eps0 = p[0], c = p[1], m = p[2], a = p[3], t = p[4];
        for (std::size_t i = 0; i < x_.size(); ++i) {
            const double u = x_[i] - eps0;
            const double r = std::max(std::sqrt(a * a * u * u + t * t), kTiny);
            residuals[i] = c + m * u - r - y_[i];
            if (jacobians && jacobians[0]) {
                double* row = jacobians[0] + 5 * i;
                row[0] = -m + a * a * u / r;
                row[1] = 1.0;
                row[2] = u;
                row[3] = -a * u * u / r;
                row[4] = -t / r;
            }
        }
        return true;
    }

private:
    std::vector<double> x_;
    std::vector<double> y_;
};

struct Line {
    double slope = 0.0;
    double intercept = 0.0;
};

Line fit_line(std::span<const double> x, std::span<const double> y) {
    const auto n = static_cast<double>(x.size());
    double sx = 0, sy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
    }
    const double mx = sx / n, my = sy / n;
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    const double slope = sxx > 0 ? sxy / sxx : 0.0;
    return {slope, my - slope * mx};
}

double median(std::vector<double> v) {
    const auto mid = v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2);
    std::nth_element(v.begin(), mid, v.end());
    if (v.size() % 2 == 1) return *mid;
    const double hi = *mid;
    const double lo = *std::max_element(v.begin(), mid);
    return 0.5 * (lo + hi);
}

double lad_cost(std::span<const double> x, std::span<const double> y, double slope) {
    std::vector<double> r(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) r[i] = y[i] - slope * x[i];
    const double b = median(r);
    double s = 0.0;
    for (double v : r) s += std::fabs(v - b);
    return s;
}

}  // namespace

double HyperbolaFit::evaluate(double eps) const {
    const double u = eps - eps0;
    return c + m * u - std::sqrt(a * a * u * u + t * t);
}

HyperbolaFit fit_anticrossing(std::span<const TrackPoint> points) {
    if (points.size() < 5) throw InputError("hyperbola fit needs at least 5 points");
    std::vector<TrackPoint> pts(points.begin(), points.end());
    std::sort(pts.begin(), pts.end(), [](const auto& a, const auto& b) { return a.x < b.x; });
    std::vector<double> x, y;
    for (const auto& p : pts) {
        if (!std::isfinite(p.x) || !std::isfinite(p.delta)) {
            throw InputError("hyperbola fit points must be finite");
        }
        if (!x.empty() && p.x == x.back()) throw InputError("hyperbola fit points need distinct x");
        x.push_back(p.x);
        y.push_back(p.delta);
    }
    const std::size_t n = x.size();

    const Line all = fit_line(x, y);
    double max_dev = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        max_dev = std::max(max_dev, std::fabs(y[i] - all.intercept - all.slope * x[i]));
    }
    const auto [ymin, ymax] = std::minmax_element(y.begin(), y.end());
    const double yspan = *ymax - *ymin;
    const double scale = std::max({yspan, x.back() - x.front(), 1.0});
    if (max_dev <= 1e-12 * scale) throw InputError("hyperbola fit points are collinear");

    // Asymptotes from the outer quarters.
    const std::size_t k = std::max<std::size_t>(2, n / 4);
    const std::span<const double> xs(x), ys(y);
    const Line left = fit_line(xs.first(k), ys.first(k));
    const Line right = fit_line(xs.last(k), ys.last(k));
    double m0 = 0.5 * (left.slope + right.slope);
    double a0 = 0.5 * (left.slope - right.slope);
    if (!(a0 > 0.0)) {
        a0 = 0.5 * std::fabs(left.slope - right.slope) + 1e-3;
    }
    double eps0 = 0.5 * (x.front() + x.back());
    if (left.slope != right.slope) {
        eps0 = std::clamp((right.intercept - left.intercept) / (left.slope - right.slope),
                          x.front(), x.back());
    }
    const double c0 = std::max(left.intercept + left.slope * eps0, right.intercept + right.slope * eps0);
    std::size_t inear = 0;
    for (std::size_t i = 1; i < n; ++i) {
        if (std::fabs(x[i] - eps0) < std::fabs(x[inear] - eps0)) inear = i;
    }
    const double un = x[inear] - eps0;
    const double root = c0 + m0 * un - y[inear];
    const double t2 = root * root - a0 * a0 * un * un;
    const double t_floor = 1e-3 * std::max(yspan, 1e-9);
    const double t0 = std::max(t2 > 0 ? std::sqrt(t2) : 0.0, t_floor);

    std::array<double, 5> p = {eps0, c0, m0, a0, t0};
    auto* cost = new HyperbolaCost(x, y);
    ceres::Problem problem;
    problem.AddResidualBlock(cost, nullptr, p.data());
    problem.SetParameterLowerBound(p.data(), 3, 0.0);
    problem.SetParameterLowerBound(p.data(), 4, 0.0);
    ceres::Solver::Options opts;
    opts.linear_solver_type = ceres::DENSE_QR;
    opts.max_num_iterations = 500;
    opts.function_tolerance = 1e-15;
    opts.gradient_tolerance = 1e-16;
    opts.parameter_tolerance = 1e-14;
    opts.logging_type = ceres::SILENT;
    opts.num_threads = 1;
    ceres::Solver::Summary summary;
    ceres::Solve(opts, &problem, &summary);

    HyperbolaFit out;
    out.eps0 = p[0];
    out.c = p[1];
    out.m = p[2];
    out.a = p[3];
    out.t = p[4];
    out.converged = summary.termination_type == ceres::CONVERGENCE;

    Eigen::VectorXd r(static_cast<Eigen::Index>(n));
    Eigen::Matrix<double, Eigen::Dynamic, 5, Eigen::RowMajor> jac(static_cast<Eigen::Index>(n), 5);
    const double* params[] = {p.data()};
    double* jacs[] = {jac.data()};
    cost->Evaluate(params, r.data(), jacs);
    out.residual_rms = std::sqrt(r.squaredNorm() / static_cast<double>(n));
    const Eigen::VectorXd se = detail::standard_errors(jac, r);
    for (int i = 0; i < 5; ++i) out.standard_errors[static_cast<std::size_t>(i)] = se(i);
    return out;
}

PixelRef vertex_pixel(const SpectralImage& img, const HyperbolaFit& fit) {
    return {static_cast<long>(img.x_axis().nearest(fit.eps0)),
            static_cast<long>(img.y_axis().nearest(fit.vertex_delta()))};
}

Alignment align_images(std::span<const SpectralImage> images, std::span<const PixelRef> refs,
                       std::span<const std::string> ids) {
    if (images.empty()) throw InputError("no images to align");
    if (refs.size() != images.size()) throw InputError("need one reference pixel per image");
    if (!ids.empty() && ids.size() != images.size()) throw InputError("need one id per image");
    const SpectralImage& base = images.front();
    const auto same_step = [](double a, double b) {
        return std::fabs(a - b) <= 1e-9 * std::max(std::fabs(a), std::fabs(b));
    };
    for (std::size_t k = 0; k < images.size(); ++k) {
        if (!same_step(images[k].x_axis().step, base.x_axis().step) ||
            !same_step(images[k].y_axis().step, base.y_axis().step)) {
            throw InputError("image " + std::to_string(k) + " has different axis steps");
        }
    }

    Alignment out;
    const auto w = static_cast<long>(base.width());
    const auto h = static_cast<long>(base.height());
    for (std::size_t k = 0; k < images.size(); ++k) {
        const SpectralImage& src = images[k];
        const PixelRef shift = {refs[0][0] - refs[k][0], refs[0][1] - refs[k][1]};
        MaskedImage m{SpectralImage(base.x_axis(), base.y_axis()),
                      std::vector<std::uint8_t>(base.width() * base.height(), 0)};
        const auto sw = static_cast<long>(src.width());
        const auto sh = static_cast<long>(src.height());
        for (long iy = 0; iy < h; ++iy) {
            const long sy = iy - shift[1];
            if (sy < 0 || sy >= sh) continue;
            for (long ix = 0; ix < w; ++ix) {
                const long sx = ix - shift[0];
                if (sx < 0 || sx >= sw) continue;
                const auto ux = static_cast<std::size_t>(ix);
                const auto uy = static_cast<std::size_t>(iy);
                m.image.at(ux, uy) = src.at(static_cast<std::size_t>(sx), static_cast<std::size_t>(sy));
                m.valid[uy * base.width() + ux] = 1;
            }
        }
        out.images.push_back(std::move(m));
        out.report.push_back({ids.empty() ? std::to_string(k) : ids[k], refs[k], shift});
    }
    return out;
}

AveragedImage average_images(std::span<const MaskedImage> images) {
    if (images.size() < 2) throw InputError("averaging needs at least two images");
    const SpectralImage& base = images.front().image;
    for (const auto& m : images) {
        if (m.image.x_axis() != base.x_axis() || m.image.y_axis() != base.y_axis()) {
            throw InputError("averaged images must share one grid");
        }
        if (m.valid.size() != base.data().size()) throw InputError("mask size does not match image");
    }
    const std::size_t npx = base.data().size();
    AveragedImage out{{SpectralImage(base.x_axis(), base.y_axis()), std::vector<std::uint8_t>(npx, 0)},
                      std::vector<int>(npx, 0)};
    auto data = out.image.image.data();
    bool overlap = false;
    for (std::size_t i = 0; i < npx; ++i) {
        // Running mean, so identical inputs reproduce their value exactly.
        double mean = 0.0;
        int count = 0;
        for (const auto& m : images) {
            if (m.valid[i] == 0) continue;
            ++count;
            mean += (m.image.data()[i] - mean) / count;
        }
        out.counts[i] = count;
        if (count > 0) {
            data[i] = mean;
            out.image.valid[i] = 1;
        }
        overlap = overlap || count == static_cast<int>(images.size());
    }
    if (!overlap) throw InputError("aligned images have no pixel in common");
    return out;
}

std::string_view name(LineKind k) { return k == LineKind::dot ? "dot" : "lead"; }

double lad_slope(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2) throw InputError("LAD slope needs >= 2 paired points");
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (std::size_t i = 0; i < x.size(); ++i) {
        for (std::size_t j = i + 1; j < x.size(); ++j) {
            if (x[i] == x[j]) continue;
            const double s = (y[j] - y[i]) / (x[j] - x[i]);
            lo = std::min(lo, s);
            hi = std::max(hi, s);
        }
    }
    if (!(lo <= hi)) throw InputError("LAD slope needs two distinct x values");
    // The cost is convex in the slope once the intercept is profiled out.
    const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
    double a = lo, b = hi;
    double c1 = b - phi * (b - a), c2 = a + phi * (b - a);
    double f1 = lad_cost(x, y, c1), f2 = lad_cost(x, y, c2);
    for (int it = 0; it < 200 && b - a > 1e-13 * (1.0 + std::fabs(a) + std::fabs(b)); ++it) {
        if (f1 <= f2) {
            b = c2;
            c2 = c1;
            f2 = f1;
            c1 = b - phi * (b - a);
            f1 = lad_cost(x, y, c1);
        } else {
            a = c1;
            c1 = c2;
            f1 = f2;
            c2 = a + phi * (b - a);
            f2 = lad_cost(x, y, c2);
        }
    }
    return 0.5 * (a + b);
}

LineClassification classify_lines(const PeakTracks& tracks, double slope_threshold) {
    if (!(slope_threshold > 0.0) || !std::isfinite(slope_threshold)) {
        throw InputError("slope threshold must be finite and > 0");
    }
    LineClassification out;
    for (const auto& t : tracks.tracks) {
        std::vector<double> x, y;
        for (const auto& p : t.points) {
            x.push_back(p.x);
            y.push_back(p.delta);
        }
        std::vector<double> ux = x;
        std::sort(ux.begin(), ux.end());
        ux.erase(std::unique(ux.begin(), ux.end()), ux.end());
        if (ux.size() < 3) {
            out.warnings.push_back("track '" + t.id + "' spans fewer than 3 voltage points; skipped");
            continue;
        }
        const double s = lad_slope(x, y);
        out.lines.push_back({t.id, s, std::fabs(s) < slope_threshold ? LineKind::dot : LineKind::lead});
    }
    return out;
}

nlohmann::json alignment_report_to_json(std::span<const AlignmentEntry> report) {
    nlohmann::json j = nlohmann::json::array();
    for (const auto& e : report) {
        j.push_back({{"image_id", e.image_id},
                     {"ref_pixel", {e.ref_pixel[0], e.ref_pixel[1]}},
                     {"shift", {e.shift[0], e.shift[1]}}});
    }
    return j;
}

nlohmann::json hyperbola_to_json(const HyperbolaFit& h) {
    nlohmann::json se = nlohmann::json::array();
    for (double v : h.standard_errors) se.push_back(std::isfinite(v) ? nlohmann::json(v) : nlohmann::json());
    return {{"eps0", h.eps0},       {"vertex_delta", h.vertex_delta()},
            {"c", h.c},             {"m", h.m},
            {"a", h.a},             {"t", h.t},
            {"stderr", se},         {"residual_rms", h.residual_rms},
            {"converged", h.converged}};
}

}  // namespace daxs
