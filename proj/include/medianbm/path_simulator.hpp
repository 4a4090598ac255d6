#pragma once

// ============================================================
// Brownian ensemble simulator.
//
// Generates n independent Brownian paths on a time grid, pulls
// out the k-th order statistic (k = floor((n+1)/2), the median)
// at every grid time, and scales it by sqrt(n).  On top of that:
// Monte Carlo estimates of two-time jump probabilities, the
// component-wise median of correlated Gaussian vectors, and
// paired sample sets for the diffusive-scaling identity.
//
// Randomness contract: each particle owns the stream keyed by
// (seed, stream tag, replication, particle) and consumes one
// gaussian per positive-width grid step, in grid order.  All
// estimates are invariant to the worker count.
// ============================================================

#include <medianbm/linalg.hpp>
#include <medianbm/mc.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

namespace medianbm {

struct TimeGrid {
    std::vector<double> times;
};

namespace detail {

inline void require_grid(const TimeGrid& grid) {
    if (grid.times.empty())
        throw std::invalid_argument("TimeGrid: empty");
    if (!std::isfinite(grid.times.front()) || grid.times.front() < 0.0)
        throw std::invalid_argument("TimeGrid: first time must be finite and >= 0");
    for (std::size_t i = 1; i < grid.times.size(); ++i) {
        if (!std::isfinite(grid.times[i]) ||
            !(grid.times[i] > grid.times[i - 1]))
            throw std::invalid_argument("TimeGrid: times must increase strictly");
    }
}

} // namespace detail

struct EnsembleSpec {
    std::int64_t n = 0;   // particle count
    std::int64_t k = 0;   // median rank, floor((n+1)/2)
    TimeGrid grid;
    std::uint64_t seed = 0;
};

inline EnsembleSpec make_ensemble_spec(std::int64_t n, TimeGrid grid,
                                       std::uint64_t seed) {
    if (n < 1) throw std::invalid_argument("EnsembleSpec: n < 1");
    detail::require_grid(grid);
    return {n, (n + 1) / 2, std::move(grid), seed};
}

struct MedianPath {
    std::vector<double> values;  // sqrt(n) * k-th order statistic per time
    EnsembleSpec spec;
};

// one replication of the scaled median path; deterministic in
// (spec.seed, rep), single-threaded per call
inline MedianPath simulate_median_path(const EnsembleSpec& spec,
                                       std::int64_t rep = 0) {
    if (spec.n < 1) throw std::invalid_argument("simulate_median_path: n < 1");
    if (spec.k != (spec.n + 1) / 2)
        throw std::invalid_argument(
            "simulate_median_path: rank k must equal floor((n+1)/2)");
    detail::require_grid(spec.grid);

    const auto n = static_cast<std::size_t>(spec.n);
    const auto m = spec.grid.times.size();
    std::vector<double> slices(n * m);  // slices[t*n + i] = B_i(times[t])
    for (std::size_t i = 0; i < n; ++i) {
        CounterRng rng(derive_key(spec.seed, stream_tag::kMedianPath,
                                  static_cast<std::uint64_t>(rep),
                                  static_cast<std::uint64_t>(i)));
        double b = 0.0;
        double t_prev = 0.0;
        for (std::size_t t = 0; t < m; ++t) {
            const double dt = spec.grid.times[t] - t_prev;
            t_prev = spec.grid.times[t];
            if (dt > 0.0) b += std::sqrt(dt) * rng.next_gaussian();
            slices[t * n + i] = b;
        }
    }

    MedianPath path;
    path.spec = spec;
    path.values.resize(m);
    const double scale = std::sqrt(static_cast<double>(spec.n));
    std::vector<double> scratch(n);
    const auto rank = static_cast<std::ptrdiff_t>(spec.k - 1);
    for (std::size_t t = 0; t < m; ++t) {
        std::copy(slices.begin() + static_cast<std::ptrdiff_t>(t * n),
                  slices.begin() + static_cast<std::ptrdiff_t>((t + 1) * n),
                  scratch.begin());
        std::nth_element(scratch.begin(), scratch.begin() + rank, scratch.end());
        path.values[t] = scale * scratch[static_cast<std::size_t>(rank)];
    }
    return path;
}

// reps independent scaled-median paths, row-major (reps x grid size)
inline std::vector<std::vector<double>> median_ensemble_samples(
    std::int64_t n, const TimeGrid& grid, std::int64_t reps,
    std::uint64_t seed) {
    if (reps < 1) throw std::invalid_argument("median_ensemble_samples: reps < 1");
    const EnsembleSpec spec = make_ensemble_spec(n, grid, seed);
    return parallel_map(reps, default_workers(), [&](std::int64_t rep) {
        return simulate_median_path(spec, rep).values;
    });
}

// P(M_n(1 + delta) - M_n(1) > eps / sqrt(n)) by direct simulation of
// the ensemble at times {1, 1 + delta}
inline MCEstimate jump_probability(std::int64_t n, double delta, double eps,
                                   std::int64_t reps, std::uint64_t seed) {
    if (n < 3) throw std::invalid_argument("jump_probability: n < 3");
    if (!(delta > 0.0) || !std::isfinite(delta))
        throw std::invalid_argument("jump_probability: delta must be positive");
    if (!(eps > 0.0) || !(eps < 1.0))
        throw std::invalid_argument("jump_probability: need 0 < eps < 1");
    if (reps < 1) throw std::invalid_argument("jump_probability: reps < 1");

    const EnsembleSpec spec = make_ensemble_spec(
        n, TimeGrid{{1.0, 1.0 + delta}},
        derive_key(seed, stream_tag::kJump));
    const auto hits =
        parallel_map(reps, default_workers(), [&](std::int64_t rep) -> double {
            const auto path = simulate_median_path(spec, rep);
            return path.values[1] - path.values[0] > eps ? 1.0 : 0.0;
        });
    std::int64_t h = 0;
    for (double v : hits) h += v == 1.0 ? 1 : 0;
    return summarize_frequency(h, reps, seed);
}

// reps draws of sqrt(n) * component-wise median of n i.i.d. centered
// Gaussian vectors with the given covariance (row-major d x d)
inline std::vector<std::vector<double>> componentwise_median_sample(
    std::int64_t d, const std::vector<double>& cov, std::int64_t n,
    std::int64_t reps, std::uint64_t seed) {
    if (d < 1) throw std::invalid_argument("componentwise_median_sample: d < 1");
    if (n < 1) throw std::invalid_argument("componentwise_median_sample: n < 1");
    if (reps < 1)
        throw std::invalid_argument("componentwise_median_sample: reps < 1");
    const auto dim = static_cast<std::size_t>(d);
    if (cov.size() != dim * dim)
        throw std::invalid_argument(
            "componentwise_median_sample: covariance must be d x d");
    double scale = 0.0;
    for (double v : cov) scale = std::max(scale, std::abs(v));
    if (max_asymmetry(cov, dim) > 1e-12 * std::max(scale, 1.0))
        throw std::invalid_argument(
            "componentwise_median_sample: covariance not symmetric");
    const auto factor = cholesky_lower(cov, dim);
    if (!factor)
        throw std::invalid_argument(
            "componentwise_median_sample: covariance not positive-definite");

    const std::uint64_t sub = derive_key(seed, stream_tag::kComponentwise);
    const auto k = (n + 1) / 2;
    return parallel_map(reps, default_workers(), [&](std::int64_t rep) {
        CounterRng rng(derive_key(sub, 0, static_cast<std::uint64_t>(rep)));
        std::vector<double> coords(dim * static_cast<std::size_t>(n));
        std::vector<double> z(dim), x(dim);
        for (std::int64_t j = 0; j < n; ++j) {
            for (auto& v : z) v = rng.next_gaussian();
            apply_lower(*factor, dim, z, x);
            for (std::size_t c = 0; c < dim; ++c)
                coords[c * static_cast<std::size_t>(n) +
                       static_cast<std::size_t>(j)] = x[c];
        }
        std::vector<double> out(dim);
        const double root_n = std::sqrt(static_cast<double>(n));
        for (std::size_t c = 0; c < dim; ++c) {
            auto first = coords.begin() +
                         static_cast<std::ptrdiff_t>(c * static_cast<std::size_t>(n));
            auto last = first + static_cast<std::ptrdiff_t>(n);
            std::nth_element(first, first + static_cast<std::ptrdiff_t>(k - 1),
                             last);
            out[c] = root_n * *(first + static_cast<std::ptrdiff_t>(k - 1));
        }
        return out;
    });
}

// paired sample sets for the diffusive-scaling identity: A holds
// X_n(c t) draws, B holds sqrt(c) X_n(t) draws, from independent
// derived streams
inline std::pair<std::vector<double>, std::vector<double>> scaling_law_samples(
    std::int64_t n, double t, double c, std::int64_t reps,
    std::uint64_t seed) {
    if (n < 1) throw std::invalid_argument("scaling_law_samples: n < 1");
    if (!(t >= 0.0) || !std::isfinite(t))
        throw std::invalid_argument("scaling_law_samples: t must be >= 0");
    if (!(c >= 0.0) || !std::isfinite(c))
        throw std::invalid_argument("scaling_law_samples: c must be >= 0");
    if (reps < 1) throw std::invalid_argument("scaling_law_samples: reps < 1");

    const std::uint64_t seed_a = derive_key(seed, stream_tag::kScalingA);
    const std::uint64_t seed_b = derive_key(seed, stream_tag::kScalingB);

    std::vector<double> a(static_cast<std::size_t>(reps), 0.0);
    if (c * t > 0.0) {
        const auto rows =
            median_ensemble_samples(n, TimeGrid{{c * t}}, reps, seed_a);
        for (std::size_t i = 0; i < rows.size(); ++i) a[i] = rows[i][0];
    }
    std::vector<double> b(static_cast<std::size_t>(reps), 0.0);
    if (t > 0.0 && c > 0.0) {
        const auto rows =
            median_ensemble_samples(n, TimeGrid{{t}}, reps, seed_b);
        const double root_c = std::sqrt(c);
        for (std::size_t i = 0; i < rows.size(); ++i) b[i] = root_c * rows[i][0];
    }
    return {std::move(a), std::move(b)};
}

} // namespace medianbm
