#pragma once

// ============================================================
// Exact sampler for the Gaussian limit process.
//
// Builds the arcsine covariance matrix on a finite time grid,
// factors it (with a diagonal jitter ladder for near-singular
// grids), and draws exact finite-dimensional samples.  Also
// estimates the local-fluctuation exponent by regressing the
// mean-square increment against the gap width, with a Brownian
// control for calibration.
// ============================================================

#include <medianbm/analytic_kernel.hpp>
#include <medianbm/linalg.hpp>
#include <medianbm/mc.hpp>
#include <medianbm/path_simulator.hpp>

#include <cmath>
#include <cstdint>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace medianbm {

struct CovMatrix {
    TimeGrid grid;
    std::vector<double> entries;  // row-major, symmetric
    double jitter_used = 0.0;

    std::size_t size() const { return grid.times.size(); }
    double at(std::size_t i, std::size_t j) const {
        return entries[i * size() + j];
    }
};

inline CovMatrix covariance_matrix(const TimeGrid& grid) {
    detail::require_grid(grid);
    const std::size_t m = grid.times.size();
    CovMatrix cov;
    cov.grid = grid;
    cov.entries.assign(m * m, 0.0);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = i; j < m; ++j) {
            const double v = limit_covariance(grid.times[i], grid.times[j]);
            cov.entries[i * m + j] = v;
            cov.entries[j * m + i] = v;
        }
    return cov;
}

struct JitterFactor {
    std::vector<double> lower;
    double jitter_used = 0.0;
};

// Cholesky with a diagonal jitter ladder: try the matrix as given,
// then add (1e-12 .. 1e-8) * trace/m, escalating tenfold, and record
// what was needed.  Near-singular covariance grids make this ladder
// necessary; anything that defeats it is reported, not hidden.
inline JitterFactor factor_with_jitter(const std::vector<double>& sym,
                                       std::size_t m) {
    if (sym.size() != m * m)
        throw std::invalid_argument("factor_with_jitter: size mismatch");
    double trace = 0.0;
    for (std::size_t i = 0; i < m; ++i) trace += sym[i * m + i];
    const double unit = trace / static_cast<double>(m);
    for (double level : {0.0, 1e-12, 1e-11, 1e-10, 1e-9, 1e-8}) {
        const double jitter = level * unit;
        std::vector<double> work(sym);
        for (std::size_t i = 0; i < m; ++i) work[i * m + i] += jitter;
        if (auto l = cholesky_lower(work, m)) return {std::move(*l), jitter};
    }
    std::ostringstream msg;
    msg << "factor_with_jitter: matrix of order " << m << " with trace "
        << trace << " is not positive-definite even after diagonal jitter "
        << 1e-8 * unit << " (1e-8 * trace/m)";
    throw std::runtime_error(msg.str());
}

struct LimitSample {
    CovMatrix cov;  // jitter_used records the factorization fallback
    std::vector<std::vector<double>> draws;  // reps x grid size
};

// reps exact draws of the limit process on the grid: a triangular
// factor applied to i.i.d. standard normals.  A leading time 0 is
// excluded from the factorization and emitted as exact zeros.
inline LimitSample sample_limit(const TimeGrid& grid, std::int64_t reps,
                                std::uint64_t seed) {
    if (reps < 1) throw std::invalid_argument("sample_limit: reps < 1");
    LimitSample out;
    out.cov = covariance_matrix(grid);
    const std::size_t m = grid.times.size();
    const std::size_t lead_zero = grid.times[0] == 0.0 ? 1 : 0;
    const std::size_t mp = m - lead_zero;

    std::vector<double> block(mp * mp);
    for (std::size_t i = 0; i < mp; ++i)
        for (std::size_t j = 0; j < mp; ++j)
            block[i * mp + j] = out.cov.at(i + lead_zero, j + lead_zero);

    JitterFactor factor;
    if (mp > 0) factor = factor_with_jitter(block, mp);
    out.cov.jitter_used = factor.jitter_used;

    out.draws = parallel_map(
        reps, default_workers(), [&](std::int64_t rep) {
            std::vector<double> row(m, 0.0);
            if (mp > 0) {
                CounterRng rng(derive_key(seed, stream_tag::kLimitSample,
                                          static_cast<std::uint64_t>(rep)));
                std::vector<double> z(mp), y;
                for (auto& v : z) v = rng.next_gaussian();
                apply_lower(factor.lower, mp, z, y);
                for (std::size_t i = 0; i < mp; ++i) row[i + lead_zero] = y[i];
            }
            return row;
        });
    return out;
}

// ------------------------------------------------------------
// local fluctuation exponent
// ------------------------------------------------------------

enum class Process {
    kArcsine,   // the limit process itself
    kBrownian,  // calibration control with increment variance h
};

namespace detail {

inline double pair_covariance(double s, double t, Process process) {
    return process == Process::kArcsine ? limit_covariance(s, t)
                                        : std::min(s, t);
}

inline void require_gaps(double t, const std::vector<double>& gaps) {
    if (!(t > 0.0) || !std::isfinite(t))
        throw std::invalid_argument("holder scaling: t must be positive");
    if (gaps.size() < 3)
        throw std::invalid_argument("holder scaling: need at least 3 gaps");
    for (double h : gaps)
        if (!(h > 0.0) || !std::isfinite(h))
            throw std::invalid_argument("holder scaling: gaps must be positive");
}

} // namespace detail

// closed-form mean-square increment E|X(t+h) - X(t)|^2
inline double increment_mean_square(double t, double h, Process process) {
    if (process == Process::kBrownian) return h;
    return increment_variance(t, t + h);
}

// Monte Carlo mean-square increment from exact bivariate sampling
inline MCEstimate increment_mean_square_mc(double t, double h,
                                           std::int64_t reps,
                                           std::uint64_t seed,
                                           Process process,
                                           std::uint64_t gap_index = 0) {
    if (reps < 2)
        throw std::invalid_argument("increment_mean_square_mc: reps < 2");
    const double c11 = detail::pair_covariance(t, t, process);
    const double c12 = detail::pair_covariance(t, t + h, process);
    const double c22 = detail::pair_covariance(t + h, t + h, process);
    const auto factor = cholesky_lower({c11, c12, c12, c22}, 2);
    if (!factor)
        throw std::runtime_error(
            "increment_mean_square_mc: bivariate covariance not "
            "positive-definite at this gap");
    const auto sq = parallel_map(
        reps, default_workers(), [&](std::int64_t rep) -> double {
            CounterRng rng(derive_key(seed, stream_tag::kHolder,
                                      static_cast<std::uint64_t>(rep),
                                      gap_index));
            const double z1 = rng.next_gaussian();
            const double z2 = rng.next_gaussian();
            const double x1 = (*factor)[0] * z1;
            const double x2 = (*factor)[2] * z1 + (*factor)[3] * z2;
            return (x2 - x1) * (x2 - x1);
        });
    return summarize(sq, seed);
}

// slope of log E|X(t+h) - X(t)|^2 against log h from the closed form;
// 2H for a process with Hurst-type local exponent H
inline double holder_scaling_closed_form(double t,
                                         const std::vector<double>& gaps,
                                         Process process) {
    detail::require_gaps(t, gaps);
    std::vector<double> means;
    means.reserve(gaps.size());
    for (double h : gaps) means.push_back(increment_mean_square(t, h, process));
    return detail::loglog_slope(gaps, means);
}

// same slope estimated by exact bivariate Monte Carlo per gap
inline double holder_scaling_estimate(double t, const std::vector<double>& gaps,
                                      std::int64_t reps, std::uint64_t seed,
                                      Process process = Process::kArcsine) {
    detail::require_gaps(t, gaps);
    std::vector<double> means;
    means.reserve(gaps.size());
    for (std::size_t g = 0; g < gaps.size(); ++g)
        means.push_back(
            increment_mean_square_mc(t, gaps[g], reps, seed, process,
                                     static_cast<std::uint64_t>(g))
                .mean);
    return detail::loglog_slope(gaps, means);
}

} // namespace medianbm
