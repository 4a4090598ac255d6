#ifndef MEDIANBM_LINALG_HPP
#define MEDIANBM_LINALG_HPP

// Small dense helpers for covariance matrices: symmetry check, lower
// Cholesky factor, and triangular application.  Matrices are row-major
// flat vectors; sizes here are grid-sized (tens), so O(m^3) is fine.

#include <cmath>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <vector>

namespace medianbm {

// largest |a[i][j] - a[j][i]| over the matrix
inline double max_asymmetry(const std::vector<double>& a, std::size_t m) {
    if (a.size() != m * m)
        throw std::invalid_argument("max_asymmetry: size mismatch");
    double worst = 0.0;
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = i + 1; j < m; ++j)
            worst = std::max(worst, std::abs(a[i * m + j] - a[j * m + i]));
    return worst;
}

// lower Cholesky factor of a symmetric positive-definite matrix;
// empty when a pivot is non-positive (matrix not positive-definite)
inline std::optional<std::vector<double>> cholesky_lower(
    const std::vector<double>& a, std::size_t m) {
    if (a.size() != m * m)
        throw std::invalid_argument("cholesky_lower: size mismatch");
    std::vector<double> l(m * m, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j <= i; ++j) {
            double s = a[i * m + j];
            for (std::size_t t = 0; t < j; ++t) s -= l[i * m + t] * l[j * m + t];
            if (i == j) {
                if (!(s > 0.0) || !std::isfinite(s)) return std::nullopt;
                l[i * m + i] = std::sqrt(s);
            } else {
                l[i * m + j] = s / l[j * m + j];
            }
        }
    }
    return l;
}

// y = L z for a lower-triangular factor
inline void apply_lower(const std::vector<double>& l, std::size_t m,
                        const std::vector<double>& z, std::vector<double>& y) {
    y.assign(m, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j <= i; ++j) s += l[i * m + j] * z[j];
        y[i] = s;
    }
}

} // namespace medianbm

#endif // MEDIANBM_LINALG_HPP
