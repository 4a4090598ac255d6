#pragma once

// ============================================================
// Verification reports: simulated jump frequencies of the median
// ensemble checked against the closed-form bounds of the embedded
// trinomial walk, plus the sample statistics they rest on
// (covariance with delta-method errors, Kolmogorov-Smirnov
// distances).
//
// Every verify_* function returns a VerificationReport whose
// `passed` flag is exactly `lhs.mean <= rhs + margin`.  The margin
// carries the statistical allowance (4 standard errors) and the
// numerical one (quadrature error estimate, truncated tail mass);
// it is never a fudge factor.
// ============================================================

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "medianbm/analytic_kernel.hpp"
#include "medianbm/io.hpp"
#include "medianbm/mc.hpp"
#include "medianbm/path_simulator.hpp"
#include "medianbm/quadrature.hpp"
#include "medianbm/random_walk.hpp"

namespace medianbm {

// ------------------------------------------------------------
// sample statistics
// ------------------------------------------------------------

// Unbiased covariance of paired samples with a delta-method standard
// error: SE^2 = (E[(X-mx)^2 (Y-my)^2] - cov^2) / N.  Requires enough
// pairs that the plug-in moments are trustworthy.
inline MCEstimate estimate_covariance(const std::vector<double>& a,
                                      const std::vector<double>& b,
                                      std::uint64_t seed = 0) {
    if (a.size() != b.size())
        throw std::invalid_argument("estimate_covariance: length mismatch");
    const std::int64_t n = static_cast<std::int64_t>(a.size());
    if (n < 1000)
        throw std::invalid_argument("estimate_covariance: need at least 1000 pairs");
    const double ma = stable_mean(a);
    const double mb = stable_mean(b);
    std::vector<double> prod(a.size());
    for (std::size_t i = 0; i < a.size(); ++i)
        prod[i] = (a[i] - ma) * (b[i] - mb);
    const double chat = stable_sum(prod) / static_cast<double>(n - 1);
    for (double& v : prod) v *= v;
    const double m22 = stable_mean(prod);
    MCEstimate out;
    out.mean = chat;
    out.std_err = std::sqrt(std::max(0.0, m22 - chat * chat) /
                            static_cast<double>(n));
    out.reps = n;
    out.seed = seed;
    return out;
}

// sup_t |F_N(t) - F(t)| against a reference cdf
template <typename Cdf>
double ks_distance(const std::vector<double>& samples, Cdf&& cdf) {
    if (samples.empty())
        throw std::invalid_argument("ks_distance: empty sample");
    std::vector<double> s(samples);
    std::sort(s.begin(), s.end());
    const double n = static_cast<double>(s.size());
    double d = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        const double f = cdf(s[i]);
        d = std::max({d, (static_cast<double>(i) + 1.0) / n - f,
                      f - static_cast<double>(i) / n});
    }
    return d;
}

// sup_t |F_N(t) - G_M(t)|; ties are resolved by advancing both sides
// past the tied value before comparing
inline double ks_two_sample(const std::vector<double>& a,
                            const std::vector<double>& b) {
    if (a.empty() || b.empty())
        throw std::invalid_argument("ks_two_sample: empty sample");
    std::vector<double> x(a), y(b);
    std::sort(x.begin(), x.end());
    std::sort(y.begin(), y.end());
    const double nx = static_cast<double>(x.size());
    const double ny = static_cast<double>(y.size());
    double d = 0.0;
    std::size_t i = 0, j = 0;
    while (i < x.size() && j < y.size()) {
        const double v = std::min(x[i], y[j]);
        while (i < x.size() && x[i] <= v) ++i;
        while (j < y.size() && y[j] <= v) ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / nx -
                                 static_cast<double>(j) / ny));
    }
    return d;
}

// large-sample two-sided critical value c(alpha) * sqrt((n+m)/(n m))
inline double ks_two_sample_critical(double alpha, std::int64_t n,
                                     std::int64_t m) {
    if (!(alpha > 0.0) || !(alpha < 1.0))
        throw std::invalid_argument("ks_two_sample_critical: need 0 < alpha < 1");
    if (n < 1 || m < 1)
        throw std::invalid_argument("ks_two_sample_critical: need n, m >= 1");
    const double c = std::sqrt(-0.5 * std::log(0.5 * alpha));
    return c * std::sqrt(static_cast<double>(n + m) /
                         (static_cast<double>(n) * static_cast<double>(m)));
}

// ------------------------------------------------------------
// verification reports
// ------------------------------------------------------------

struct VerificationReport {
    std::string claim;
    MCEstimate lhs;
    bool lhs_is_mc = true;
    double rhs = 0.0;
    double margin = 0.0;
    bool passed = false;  // invariant: passed == (lhs.mean <= rhs + margin)
    std::vector<std::pair<std::string, std::string>> metadata;
};

inline VerificationReport make_report(
    std::string claim, const MCEstimate& lhs, bool lhs_is_mc, double rhs,
    double margin, std::vector<std::pair<std::string, std::string>> metadata) {
    VerificationReport r;
    r.claim = std::move(claim);
    r.lhs = lhs;
    r.lhs_is_mc = lhs_is_mc;
    r.rhs = rhs;
    r.margin = margin;
    r.passed = lhs.mean <= rhs + margin;
    r.metadata = std::move(metadata);
    return r;
}

inline std::string to_text(const VerificationReport& r) {
    std::string out;
    out += "[" + r.claim + "]\n";
    out += std::string("passed = ") + (r.passed ? "yes" : "no") + "\n";
    out += "lhs_mean = " + format_double(r.lhs.mean) + "\n";
    out += "lhs_se = " + format_double(r.lhs.std_err) + "\n";
    out += std::string("lhs_kind = ") + (r.lhs_is_mc ? "monte-carlo" : "analytic") + "\n";
    if (r.lhs_is_mc) {
        out += "lhs_reps = " + format_int(r.lhs.reps) + "\n";
        out += "lhs_seed = " + format_uint(r.lhs.seed) + "\n";
        if (r.lhs.low_count) out += "lhs_low_count = yes\n";
    }
    out += "rhs = " + format_double(r.rhs) + "\n";
    out += "margin = " + format_double(r.margin) + "\n";
    for (const auto& [key, val] : r.metadata)
        out += "meta." + key + " = " + val + "\n";
    return out;
}

inline std::vector<std::string> report_csv_header() {
    return {"claim", "passed", "lhs_mean", "lhs_se",   "lhs_reps",
            "lhs_seed", "lhs_kind", "rhs", "margin", "metadata"};
}

inline std::vector<std::string> report_csv_row(const VerificationReport& r) {
    std::string meta;
    for (std::size_t i = 0; i < r.metadata.size(); ++i) {
        if (i > 0) meta += ';';
        meta += r.metadata[i].first + "=" + r.metadata[i].second;
    }
    return {r.claim,
            r.passed ? "yes" : "no",
            format_double(r.lhs.mean),
            format_double(r.lhs.std_err),
            format_int(r.lhs.reps),
            format_uint(r.lhs.seed),
            r.lhs_is_mc ? "monte-carlo" : "analytic",
            format_double(r.rhs),
            format_double(r.margin),
            meta};
}

// ------------------------------------------------------------
// regime routing and configuration
// ------------------------------------------------------------

// Largest delta for which the drift and move-probability certificates
// below are claimed: half of (900 sqrt(2 pi))^(-6), the threshold at
// which the leading drift term provably dominates every remainder.
inline constexpr double kDefaultDelta0 = 3.7929344971030989e-21;

// The jump-size exponent alpha = log(eps / sqrt(n)) / log(delta) - 1/2
// routes a query to the regime whose certificate applies.
inline constexpr double kAlphaMediumMin = -1.0 / 108.0;
inline constexpr double kAlphaSmallMin = 1.0 / 18.0;

struct VerifierConfig {
    double delta0 = kDefaultDelta0;
    double ratio_cap = 1.0;  // run-calibrated constant for the envelope check
};

inline const char* regime_name(double alpha) {
    if (alpha < kAlphaMediumMin) return "large";
    if (alpha <= kAlphaSmallMin) return "medium";
    return "small";
}

namespace detail {

// P(sqrt(n)(M_n(1+delta) - M_n(1)) > eps) with the same streams as
// jump_probability, but without its eps < 1 gate so thresholds past
// the interesting range can still be measured (they just hit rarely).
inline MCEstimate jump_frequency(std::int64_t n, double delta, double eps,
                                 std::int64_t reps, std::uint64_t seed) {
    if (eps > 0.0 && eps < 1.0) return jump_probability(n, delta, eps, reps, seed);
    if (n < 3) throw std::invalid_argument("jump_frequency: n < 3");
    require_positive(delta, "jump_frequency: requires delta > 0");
    require_positive(eps, "jump_frequency: requires eps > 0");
    if (reps < 1) throw std::invalid_argument("jump_frequency: reps < 1");
    const EnsembleSpec spec = make_ensemble_spec(
        n, TimeGrid{{1.0, 1.0 + delta}}, derive_key(seed, stream_tag::kJump));
    const auto hits =
        parallel_map(reps, default_workers(), [&](std::int64_t rep) -> double {
            const auto path = simulate_median_path(spec, rep);
            return path.values[1] - path.values[0] > eps ? 1.0 : 0.0;
        });
    std::int64_t h = 0;
    for (double v : hits) h += v == 1.0 ? 1 : 0;
    return summarize_frequency(h, reps, seed);
}

// P(S_steps >= 0) for the walk parameters at level x
inline double phi_at(double x, double y, double delta, std::int64_t steps) {
    const WalkParams w = walk_params(make_jump_query(x, y, delta));
    return phi_k(TrinomialSpec{w.pt1, w.pt2}, steps);
}

} // namespace detail

// ------------------------------------------------------------
// verifiers
// ------------------------------------------------------------

// Simulated jump frequency against the conditional-walk bound
//   P(M_n(1+delta) - M_n(1) > y) <= int phi_{k-1}(x, y, delta) f_n(x) dx
// with f_n the median-order-statistic density.  The integral is
// truncated to [-10, 10]; the dropped mass is at most 2 n Phi(-10)
// and is added to the margin together with the quadrature error.
inline VerificationReport verify_cond_inequality(std::int64_t n, double y,
                                                 double delta,
                                                 std::int64_t reps,
                                                 std::uint64_t seed) {
    if (n < 3) throw std::invalid_argument("verify_cond_inequality: n < 3");
    detail::require_positive(y, "verify_cond_inequality: requires y > 0");
    detail::require_positive(delta, "verify_cond_inequality: requires delta > 0");
    if (reps < 1) throw std::invalid_argument("verify_cond_inequality: reps < 1");

    const std::int64_t k = (n + 1) / 2;
    const double eps = y * std::sqrt(static_cast<double>(n));
    const MCEstimate lhs = detail::jump_frequency(n, delta, eps, reps, seed);

    const double scale = std::sqrt(0.5 * detail::kPi / static_cast<double>(n));
    const auto pts = detail::bracket_feature(-10.0, 10.0, 0.0, scale);
    const auto q = integrate_segments(
        [n, y, delta, k](double x) {
            return detail::phi_at(x, y, delta, k - 1) *
                   median_density(static_cast<int>(n), x);
        },
        pts, 1e-10, 40000);
    if (!q.converged)
        throw std::runtime_error(
            "verify_cond_inequality: quadrature did not converge: "
            "error_estimate=" + format_double(q.error_estimate) +
            " intervals=" + format_int(q.intervals) + " tol=1e-10");

    const double tail = 2.0 * static_cast<double>(n) * std_normal_cdf(-10.0);
    const double margin = 4.0 * lhs.std_err + q.error_estimate + tail;
    return make_report("cond-inequality", lhs, true, q.value, margin,
                       {{"n", format_int(n)},
                        {"y", format_double(y)},
                        {"delta", format_double(delta)},
                        {"eps", format_double(eps)},
                        {"k", format_int(k)},
                        {"quad_error", format_double(q.error_estimate)},
                        {"quad_intervals", format_int(q.intervals)},
                        {"tail_mass", format_double(tail)}});
}

// Pointwise split of the same bound: for every split level x0,
//   P(M_n(1+delta) - M_n(1) > y) <= phi_{k-1}(x0, y, delta) + P(M_n(1) <= x0)
// because phi is nonincreasing in x and at most one.
inline VerificationReport verify_split_bound(std::int64_t n, double y,
                                             double delta, double x0,
                                             std::int64_t reps,
                                             std::uint64_t seed) {
    if (n < 3) throw std::invalid_argument("verify_split_bound: n < 3");
    detail::require_positive(y, "verify_split_bound: requires y > 0");
    detail::require_positive(delta, "verify_split_bound: requires delta > 0");
    detail::require_finite(x0, "verify_split_bound: x0 must be finite");
    if (reps < 1) throw std::invalid_argument("verify_split_bound: reps < 1");

    const std::int64_t k = (n + 1) / 2;
    const double eps = y * std::sqrt(static_cast<double>(n));
    const MCEstimate lhs = detail::jump_frequency(n, delta, eps, reps, seed);
    const double phi_term = detail::phi_at(x0, y, delta, k - 1);
    const double cdf_term = median_cdf(static_cast<int>(n), x0);
    return make_report("split-bound", lhs, true, phi_term + cdf_term,
                       4.0 * lhs.std_err,
                       {{"n", format_int(n)},
                        {"y", format_double(y)},
                        {"delta", format_double(delta)},
                        {"eps", format_double(eps)},
                        {"x0", format_double(x0)},
                        {"phi_term", format_double(phi_term)},
                        {"cdf_term", format_double(cdf_term)}});
}

// default split level -y / delta^(1/4): the scale the regime routing
// is built around
inline VerificationReport verify_split_bound(std::int64_t n, double y,
                                             double delta, std::int64_t reps,
                                             std::uint64_t seed) {
    detail::require_positive(y, "verify_split_bound: requires y > 0");
    detail::require_positive(delta, "verify_split_bound: requires delta > 0");
    return verify_split_bound(n, y, delta, -y / std::pow(delta, 0.25), reps,
                              seed);
}

// Simulated jump frequency against the power-law envelope
//   P(sqrt(n)(M_n(1+delta) - M_n(1)) > eps) <= ratio_cap * (delta^(1/6) / eps)^p.
// The envelope is only claimed for delta below the configured delta0,
// so larger deltas are rejected rather than silently measured.
inline VerificationReport verify_key_estimate(double eps, double delta,
                                              std::int64_t n, double p,
                                              std::int64_t reps,
                                              std::uint64_t seed,
                                              const VerifierConfig& cfg = {}) {
    if (!(eps > 0.0) || !(eps < 1.0) || !std::isfinite(eps))
        throw std::invalid_argument("verify_key_estimate: need 0 < eps < 1");
    detail::require_positive(delta, "verify_key_estimate: requires delta > 0");
    if (n < 3) throw std::invalid_argument("verify_key_estimate: n < 3");
    if (!(p > 2.0) || !std::isfinite(p))
        throw std::invalid_argument("verify_key_estimate: requires p > 2");
    if (reps < 1) throw std::invalid_argument("verify_key_estimate: reps < 1");
    if (delta > cfg.delta0)
        throw std::invalid_argument(
            "verify_key_estimate: delta = " + format_double(delta) +
            " exceeds configured delta0 = " + format_double(cfg.delta0) +
            "; the envelope is only claimed below delta0");

    const double alpha =
        std::log(eps / std::sqrt(static_cast<double>(n))) / std::log(delta) -
        0.5;
    const MCEstimate lhs = jump_probability(n, delta, eps, reps, seed);
    const double shape = std::pow(std::pow(delta, 1.0 / 6.0) / eps, p);
    const double ratio = shape > 0.0 ? lhs.mean / shape : 0.0;
    return make_report("key-estimate", lhs, true, cfg.ratio_cap * shape, 0.0,
                       {{"n", format_int(n)},
                        {"eps", format_double(eps)},
                        {"delta", format_double(delta)},
                        {"p", format_double(p)},
                        {"alpha", format_double(alpha)},
                        {"regime", regime_name(alpha)},
                        {"shape", format_double(shape)},
                        {"ratio", format_double(ratio)},
                        {"ratio_cap", format_double(cfg.ratio_cap)},
                        {"delta0", format_double(cfg.delta0)}});
}

// ------------------------------------------------------------
// expansion and drift certificates
// ------------------------------------------------------------

// A probe point (alpha, beta, delta) maps to the walk coordinates
// x = -delta^(1/4 + beta), y = delta^(1/2 + alpha).
struct CertificatePoint {
    double alpha = 0.0;
    double beta = 0.0;
    double delta = 0.0;
};

// Checks, at each probe point, that
//   (i)  the Taylor expansions of p1 and psi match the quadrature
//        values within their certified remainder bounds, and
//   (ii) on the diagonal beta == alpha with delta <= delta0, the walk
//        drift mu_t clears the regime floor (2 pi)^(-1/2) delta^(1/2+e)
//        while the move probability eps_t stays under its cap and
//        strictly below 1/2.
// Checks whose preconditions fail at a point are skipped with a note,
// never silently dropped.  The report's lhs is the worst signed
// violation across all performed checks; passed means none exceeded
// zero.  A 1e-8 slack absorbs quadrature noise in the reference values.
inline VerificationReport verify_expansion_certificates(
    const std::vector<CertificatePoint>& points,
    const VerifierConfig& cfg = {}) {
    if (points.empty())
        throw std::invalid_argument("verify_expansion_certificates: no points");
    constexpr double slack = 1e-8;
    const double root = 1.0 / std::sqrt(2.0 * detail::kPi);
    double worst = -std::numeric_limits<double>::infinity();
    std::int64_t checked = 0;
    std::int64_t skipped = 0;
    std::vector<std::pair<std::string, std::string>> meta;

    for (std::size_t idx = 0; idx < points.size(); ++idx) {
        const CertificatePoint& pt = points[idx];
        detail::require_finite(pt.alpha,
                               "verify_expansion_certificates: alpha must be finite");
        detail::require_finite(pt.beta,
                               "verify_expansion_certificates: beta must be finite");
        if (!(pt.delta > 0.0) || !(pt.delta < 1.0))
            throw std::invalid_argument(
                "verify_expansion_certificates: need 0 < delta < 1");
        const double x = -std::pow(pt.delta, 0.25 + pt.beta);
        const double y = std::pow(pt.delta, 0.5 + pt.alpha);
        std::string note = "alpha=" + format_double(pt.alpha) +
                           " beta=" + format_double(pt.beta) +
                           " delta=" + format_double(pt.delta);

        const ExpansionResult pe = p1_expansion(x, y, pt.delta);
        if (pe.valid) {
            const double deficit =
                std::abs(p1(x, y, pt.delta) - pe.value) -
                (pe.remainder_bound + slack);
            worst = std::max(worst, deficit);
            ++checked;
            note += " | p1 deficit " + format_double(deficit);
        } else {
            ++skipped;
            note += " | p1 skipped: outside certified region";
        }

        const ExpansionResult se = psi_expansion(x, y, pt.delta);
        if (se.valid) {
            const double deficit = std::abs(psi(x, y, pt.delta) - se.value) -
                                   (se.remainder_bound + slack);
            worst = std::max(worst, deficit);
            ++checked;
            note += " | psi deficit " + format_double(deficit);
        } else {
            ++skipped;
            note += " | psi skipped: outside certified region";
        }

        if (pt.beta != pt.alpha) {
            ++skipped;
            note += " | drift skipped: off the diagonal beta == alpha";
        } else if (pt.delta > cfg.delta0) {
            ++skipped;
            note += " | drift skipped: delta above delta0 = " +
                    format_double(cfg.delta0);
        } else if (pt.alpha < kAlphaMediumMin) {
            ++skipped;
            note += " | drift skipped: alpha below the certified range";
        } else {
            const WalkParams w = walk_params(make_jump_query(x, y, pt.delta));
            if (pt.alpha >= kAlphaSmallMin) {
                const double floor_v = root * std::pow(pt.delta, 0.5 + pt.alpha);
                const double cap = 1000.0 * std::sqrt(pt.delta);
                const double d1 = (floor_v - w.mu_t) - slack;
                const double d2 = (w.eps_t - cap) - slack;
                worst = std::max({worst, d1, d2, w.eps_t - 0.5});
                checked += 3;
                note += " | small drift deficit " + format_double(d1) +
                        " move deficit " + format_double(d2);
            }
            if (pt.alpha <= kAlphaSmallMin) {
                const double floor_v =
                    root * std::pow(pt.delta, 0.5 + kAlphaSmallMin);
                const double cap =
                    1000.0 * std::pow(pt.delta, 0.5 + 4.0 * kAlphaMediumMin);
                const double d1 = (floor_v - w.mu_t) - slack;
                const double d2 = (w.eps_t - cap) - slack;
                worst = std::max({worst, d1, d2, w.eps_t - 0.5});
                checked += 3;
                note += " | medium drift deficit " + format_double(d1) +
                        " move deficit " + format_double(d2);
            }
        }
        meta.emplace_back("point" + format_int(static_cast<std::int64_t>(idx)),
                          note);
    }

    meta.emplace_back("checked", format_int(checked));
    meta.emplace_back("skipped", format_int(skipped));
    MCEstimate lhs;
    lhs.mean = checked > 0 ? worst : 0.0;
    lhs.reps = checked;
    return make_report("expansion-certificates", lhs, false, 0.0, 0.0,
                       std::move(meta));
}

} // namespace medianbm
