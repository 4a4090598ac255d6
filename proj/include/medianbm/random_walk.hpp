#pragma once

// ============================================================
// Trinomial random walk: exact distribution by dynamic
// programming, hitting/positivity probabilities, a Monte Carlo
// cross-check, and the tail-bound shapes used to control the
// walk's positivity probability (Chebyshev-type shapes, a
// binomial-vs-Gaussian density ratio, and reciprocal moments
// of a thinned step count).
// ============================================================

#include <medianbm/mc.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace medianbm {

// Step law of the walk: P(Y=-1)=pt1, P(Y=+1)=pt2, P(Y=0)=1-pt1-pt2.
// eps is the move probability, mu the downward drift per step (-E[Y]).
struct TrinomialSpec {
    double pt1 = 0.0;
    double pt2 = 0.0;

    double p0() const { return (1.0 - pt1) - pt2; }
    double eps() const { return pt1 + pt2; }
    double mu() const { return pt1 - pt2; }
};

// Exact law of S_k; pmf[i] = P(S_k = i - k) over support {-k,...,k}.
struct WalkDistribution {
    std::int64_t k = 0;
    std::vector<double> pmf;

    double prob(std::int64_t value) const {
        if (value < -k || value > k) return 0.0;
        return pmf[static_cast<std::size_t>(value + k)];
    }
};

namespace detail {

inline void require_spec(const TrinomialSpec& spec) {
    if (!(spec.pt1 >= 0.0) || !(spec.pt2 >= 0.0) ||
        !(spec.pt1 + spec.pt2 <= 1.0) || !std::isfinite(spec.pt1) ||
        !std::isfinite(spec.pt2))
        throw std::invalid_argument(
            "TrinomialSpec: need pt1, pt2 >= 0 and pt1 + pt2 <= 1");
}

inline constexpr std::int64_t kWalkDpCap = 20000;

} // namespace detail

// k-fold convolution of the step law, O(k^2) with two flat buffers
inline WalkDistribution exact_distribution(const TrinomialSpec& spec,
                                           std::int64_t k) {
    detail::require_spec(spec);
    if (k < 0) throw std::invalid_argument("exact_distribution: k < 0");
    if (k > detail::kWalkDpCap)
        throw std::invalid_argument(
            "exact_distribution: k above the exact-DP cap (20000); "
            "use mc_phi_k for larger walks");

    const double p_down = spec.pt1;
    const double p_up = spec.pt2;
    const double p_stay = (1.0 - spec.pt1) - spec.pt2;

    const auto full = static_cast<std::size_t>(2 * k + 1);
    std::vector<double> cur(full, 0.0), next(full, 0.0);
    cur[0] = 1.0;  // after step j the law occupies [0, 2j] with value = i - j
    for (std::int64_t j = 1; j <= k; ++j) {
        const auto len = static_cast<std::size_t>(2 * j - 1);
        std::fill(next.begin(), next.begin() + static_cast<std::ptrdiff_t>(len + 2), 0.0);
        for (std::size_t i = 0; i < len; ++i) {
            const double m = cur[i];
            next[i] += m * p_down;
            next[i + 1] += m * p_stay;
            next[i + 2] += m * p_up;
        }
        cur.swap(next);
    }
    return {k, std::move(cur)};
}

// P(S_k >= 0), including the tie mass at zero
inline double phi_k(const TrinomialSpec& spec, std::int64_t k) {
    const WalkDistribution dist = exact_distribution(spec, k);
    double sum = 0.0;
    for (std::size_t i = static_cast<std::size_t>(k); i < dist.pmf.size(); ++i)
        sum += dist.pmf[i];
    return sum;
}

// Monte Carlo estimate of phi_k; the large-k fallback.  Deterministic
// given the seed regardless of worker scheduling.
inline MCEstimate mc_phi_k(const TrinomialSpec& spec, std::int64_t k,
                           std::int64_t reps, std::uint64_t seed) {
    detail::require_spec(spec);
    if (k < 0) throw std::invalid_argument("mc_phi_k: k < 0");
    if (reps < 100) throw std::invalid_argument("mc_phi_k: reps < 100");

    const double a = spec.pt1;
    const double b = spec.pt1 + spec.pt2;
    const auto hits = parallel_map(
        reps, default_workers(), [&](std::int64_t rep) -> double {
            CounterRng rng(derive_key(seed, stream_tag::kWalk,
                                      static_cast<std::uint64_t>(rep)));
            std::int64_t s = 0;
            for (std::int64_t j = 0; j < k; ++j) {
                const double u = rng.next_double();
                if (u < a)
                    --s;
                else if (u < b)
                    ++s;
            }
            return s >= 0 ? 1.0 : 0.0;
        });
    std::int64_t h = 0;
    for (double v : hits) h += v == 1.0 ? 1 : 0;
    return summarize_frequency(h, reps, seed);
}

// ------------------------------------------------------------
// bound shapes; the proportionality constants are existential,
// so callers assert trend behavior of ratios, not the constants
// ------------------------------------------------------------

namespace detail {

inline void require_order(double p) {
    if (!(p > 1.0) || !std::isfinite(p))
        throw std::invalid_argument("bound shape: moment order p must exceed 1");
}

} // namespace detail

// Chebyshev-type shape eps / (n^p mu^(2p)) for P(S_n >= 0) under
// downward drift
inline double cheby_bound_shape(const TrinomialSpec& spec, std::int64_t n,
                                double p) {
    detail::require_spec(spec);
    detail::require_order(p);
    if (n < 1) throw std::invalid_argument("cheby_bound_shape: n < 1");
    if (!(spec.mu() > 0.0))
        throw std::invalid_argument("cheby_bound_shape: drift mu must be "
                                    "positive, bound is vacuous otherwise");
    return spec.eps() / (std::pow(static_cast<double>(n), p) *
                         std::pow(spec.mu(), 2.0 * p));
}

// Sharper shape eps^p / (n^p mu^(2p)); requires a sub-critical move
// probability eps < 1/2
inline double chebyplus_bound_shape(const TrinomialSpec& spec, std::int64_t n,
                                    double p) {
    detail::require_spec(spec);
    detail::require_order(p);
    if (n < 1) throw std::invalid_argument("chebyplus_bound_shape: n < 1");
    if (!(spec.mu() > 0.0))
        throw std::invalid_argument("chebyplus_bound_shape: drift mu must be "
                                    "positive, bound is vacuous otherwise");
    if (!(spec.eps() < 0.5))
        throw std::invalid_argument(
            "chebyplus_bound_shape: requires eps = pt1 + pt2 < 1/2");
    return std::pow(spec.eps(), p) / (std::pow(static_cast<double>(n), p) *
                                      std::pow(spec.mu(), 2.0 * p));
}

// Binomial(n,p) pmf at k divided by the matching Gaussian density
// (2 pi n p q)^(-1/2) exp(-(k-np)^2 / (2npq)); evaluated in log space
inline double binom_gauss_ratio(std::int64_t n, std::int64_t k, double p) {
    if (n < 1) throw std::invalid_argument("binom_gauss_ratio: n < 1");
    if (k < 0 || k > n)
        throw std::invalid_argument("binom_gauss_ratio: k out of [0, n]");
    if (!(p > 0.0) || !(p < 1.0))
        throw std::invalid_argument("binom_gauss_ratio: need 0 < p < 1");
    const double q = 1.0 - p;
    const double nd = static_cast<double>(n);
    const double kd = static_cast<double>(k);
    const double log_f = std::lgamma(nd + 1.0) - std::lgamma(kd + 1.0) -
                         std::lgamma(nd - kd + 1.0) + kd * std::log(p) +
                         (nd - kd) * std::log(q);
    const double npq = nd * p * q;
    const double two_pi = 6.28318530717958647693;
    const double log_g = -0.5 * std::log(two_pi * npq) -
                         (kd - nd * p) * (kd - nd * p) / (2.0 * npq);
    return std::exp(log_f - log_g);
}

// E[T^(-p) 1{T > 0}] for T ~ Binomial(n, eps), exact summation with
// log-space pmf terms
inline double recip_moment(double eps, std::int64_t n, double p) {
    if (!(eps > 0.0) || !(eps < 0.5))
        throw std::invalid_argument("recip_moment: need 0 < eps < 1/2");
    if (n < 1) throw std::invalid_argument("recip_moment: n < 1");
    detail::require_order(p);
    const double log_e = std::log(eps);
    const double log_q = std::log1p(-eps);
    const double lg_n = std::lgamma(static_cast<double>(n) + 1.0);
    double sum = 0.0;
    double comp = 0.0;  // Neumaier; terms span many magnitudes
    for (std::int64_t k = 1; k <= n; ++k) {
        const double kd = static_cast<double>(k);
        const double term =
            std::exp(lg_n - std::lgamma(kd + 1.0) -
                     std::lgamma(static_cast<double>(n - k) + 1.0) +
                     kd * log_e + static_cast<double>(n - k) * log_q -
                     p * std::log(kd));
        const double t = sum + term;
        comp += std::abs(sum) >= term ? (sum - t) + term : (term - t) + sum;
        sum = t;
    }
    return sum + comp;
}

} // namespace medianbm
