#pragma once

// Reference computations written independently of the library code paths.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

namespace oracle {

using Matrix = std::vector<std::vector<double>>;

/// Cyclic Jacobi rotations; returns ascending eigenvalues of a symmetric matrix.
inline std::vector<double> jacobi_eigenvalues(Matrix a, double tol = 1e-14) {
    const std::size_t n = a.size();
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        double scale = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                scale += a[i][j] * a[i][j];
                if (i != j) off += a[i][j] * a[i][j];
            }
        }
        if (off <= tol * tol * std::max(scale, 1e-300)) break;
        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                if (a[p][q] == 0.0) continue;
                const double theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                const double t = (theta >= 0 ? 1.0 : -1.0) /
                                 (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    const double akp = a[k][p];
                    const double akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double apk = a[p][k];
                    const double aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
            }
        }
    }
    std::vector<double> ev(n);
    for (std::size_t i = 0; i < n; ++i) ev[i] = a[i][i];
    std::sort(ev.begin(), ev.end());
    return ev;
}

/// Eigenvalues of [[a, t], [t, b]], ascending.
inline std::pair<double, double> two_level(double a, double b, double t) {
    const double mid = 0.5 * (a + b);
    const double r = std::sqrt(0.25 * (a - b) * (a - b) + t * t);
    return {mid - r, mid + r};
}

/// Solves the small dense system A x = b by Gaussian elimination with partial pivoting.
inline std::vector<double> solve(Matrix a, std::vector<double> b) {
    const std::size_t n = b.size();
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t piv = c;
        for (std::size_t r = c + 1; r < n; ++r) {
            if (std::fabs(a[r][c]) > std::fabs(a[piv][c])) piv = r;
        }
        std::swap(a[c], a[piv]);
        std::swap(b[c], b[piv]);
        for (std::size_t r = c + 1; r < n; ++r) {
            const double f = a[r][c] / a[c][c];
            for (std::size_t k = c; k < n; ++k) a[r][k] -= f * a[c][k];
            b[r] -= f * b[c];
        }
    }
    std::vector<double> x(n);
    for (std::size_t i = n; i-- > 0;) {
        double s = b[i];
        for (std::size_t k = i + 1; k < n; ++k) s -= a[i][k] * x[k];
        x[i] = s / a[i][i];
    }
    return x;
}

/// Sliding least-squares polynomial value at sample i, using the samples
/// within half = window/2 of i that exist (truncated at the edges).
inline double local_poly_fit(const std::vector<double>& y, int window, int order, int i) {
    const int n = static_cast<int>(y.size());
    const int half = window / 2;
    const int lo = std::max(0, i - half);
    const int hi = std::min(n - 1, i + half);
    const int m = std::min(order, hi - lo) + 1;
    Matrix ata(static_cast<std::size_t>(m), std::vector<double>(static_cast<std::size_t>(m), 0.0));
    std::vector<double> aty(static_cast<std::size_t>(m), 0.0);
    for (int k = lo; k <= hi; ++k) {
        const double u = k - i;
        std::vector<double> row(static_cast<std::size_t>(m));
        double p = 1.0;
        for (int c = 0; c < m; ++c) {
            row[static_cast<std::size_t>(c)] = p;
            p *= u;
        }
        for (int r = 0; r < m; ++r) {
            aty[static_cast<std::size_t>(r)] += row[static_cast<std::size_t>(r)] * y[static_cast<std::size_t>(k)];
            for (int c = 0; c < m; ++c) {
                ata[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)] +=
                    row[static_cast<std::size_t>(r)] * row[static_cast<std::size_t>(c)];
            }
        }
    }
    return solve(ata, aty)[0];
}

/// GHz per meV from the exact SI values of e and h.
inline double ghz_per_mev() {
    constexpr double e = 1.602176634e-19;  // C
    constexpr double h = 6.62607015e-34;   // J s
    return 1e-3 * e / h / 1e9;
}

inline double lorentz(double x, double center, double fwhm, double amp) {
    const double u = 2.0 * (x - center) / fwhm;
    return amp / (1.0 + u * u);
}

/// Index of the largest element.
inline std::size_t argmax(const std::vector<double>& v) {
    return static_cast<std::size_t>(std::max_element(v.begin(), v.end()) - v.begin());
}

inline double relative_error(double a, double b) {
    const double scale = std::max({std::fabs(a), std::fabs(b), 1e-300});
    return std::fabs(a - b) / scale;
}

}  // namespace oracle
