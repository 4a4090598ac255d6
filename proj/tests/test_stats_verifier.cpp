// Verification reports: sample statistics (covariance with delta-method
// errors, Kolmogorov-Smirnov distances), the conditional-walk bounds on
// the median jump frequency, regime routing for the power-law envelope,
// and the expansion / drift certificates.

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "medianbm/limit_sampler.hpp"
#include "medianbm/path_simulator.hpp"
#include "medianbm/stats_verifier.hpp"

using namespace medianbm;
using Catch::Matchers::ContainsSubstring;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

// value of a metadata key; fails the test if absent
std::string meta_at(const VerificationReport& r, const std::string& key) {
    for (const auto& [k, v] : r.metadata)
        if (k == key) return v;
    FAIL("metadata key not found: " << key);
    return {};
}

} // namespace

// ------------------------------------------------------------
// sample statistics
// ------------------------------------------------------------

TEST_CASE("estimate_covariance recovers variance and independence", "[verifier]") {
    const auto xs = sample_limit(TimeGrid{{1.0}}, 4000, 101).draws;
    const auto ys = sample_limit(TimeGrid{{1.0}}, 4000, 102).draws;
    std::vector<double> a(xs.size()), b(ys.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
        a[i] = xs[i][0];
        b[i] = ys[i][0];
    }

    const double half_pi = 0.5 * detail::kPi;
    const MCEstimate self = estimate_covariance(a, a, 101);
    REQUIRE(self.reps == 4000);
    REQUIRE(self.seed == 101);
    REQUIRE_THAT(self.mean, WithinAbs(half_pi, 4.0 * self.std_err));
    // for a Gaussian, Var[(X-m)^2] = 2 var^2, so SE ~ var sqrt(2/N)
    REQUIRE_THAT(self.std_err,
                 WithinRel(half_pi * std::sqrt(2.0 / 4000.0), 0.2));

    const MCEstimate indep = estimate_covariance(a, b, 0);
    REQUIRE_THAT(indep.mean, WithinAbs(0.0, 4.0 * indep.std_err));

    REQUIRE_THROWS_AS(estimate_covariance(a, std::vector<double>(10, 0.0)),
                      std::invalid_argument);
    REQUIRE_THROWS_AS(estimate_covariance(std::vector<double>(999, 1.0),
                                          std::vector<double>(999, 1.0)),
                      std::invalid_argument);
}

TEST_CASE("simulated median covariance matches the arcsine kernel", "[verifier][slow]") {
    const auto rows = median_ensemble_samples(1001, TimeGrid{{1.0, 2.0}}, 5000, 42);
    std::vector<double> a(rows.size()), b(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        a[i] = rows[i][0];
        b[i] = rows[i][1];
    }
    const MCEstimate est = estimate_covariance(a, b, 42);
    // sqrt(2) arcsin(1/sqrt(2)) = sqrt(2) pi / 4
    REQUIRE_THAT(est.mean, WithinAbs(1.1107207345395916, 3.0 * est.std_err));
    REQUIRE(est.std_err > 0.0);
    REQUIRE(est.std_err < 0.06);
}

TEST_CASE("ks_distance separates matching and broken references", "[verifier]") {
    const auto xs = sample_limit(TimeGrid{{1.0}}, 10000, 7).draws;
    std::vector<double> a(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) a[i] = xs[i][0];

    const double sd = std::sqrt(0.5 * detail::kPi);
    const double d_good =
        ks_distance(a, [sd](double v) { return std_normal_cdf(v / sd); });
    REQUIRE(d_good < 0.03);

    // wrong scale is detected immediately at this sample size
    const double d_bad = ks_distance(a, [](double v) { return std_normal_cdf(v); });
    REQUIRE(d_bad > 0.05);

    // a point mass against a continuous cdf leaves at least half the mass
    const std::vector<double> constant(100, 0.0);
    REQUIRE(ks_distance(constant, [](double v) { return std_normal_cdf(v); }) >=
            0.5);

    REQUIRE_THROWS_AS(ks_distance(std::vector<double>{},
                                  [](double) { return 0.5; }),
                      std::invalid_argument);
}

TEST_CASE("simulated scaled median at t=1 is Gaussian by KS", "[verifier][slow]") {
    const auto rows = median_ensemble_samples(1001, TimeGrid{{1.0}}, 10000, 42);
    std::vector<double> a(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) a[i] = rows[i][0];
    const double sd = std::sqrt(0.5 * detail::kPi);
    const double d = ks_distance(a, [sd](double v) { return std_normal_cdf(v / sd); });
    REQUIRE(d < 0.015);
}

TEST_CASE("two-sample KS distance and critical value", "[verifier]") {
    const auto xs = sample_limit(TimeGrid{{1.0}}, 10000, 8).draws;
    const auto ys = sample_limit(TimeGrid{{1.0}}, 10000, 9).draws;
    std::vector<double> a(xs.size()), b(ys.size()), shifted(ys.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
        a[i] = xs[i][0];
        b[i] = ys[i][0];
        shifted[i] = ys[i][0] + 0.2;
    }

    const double crit = ks_two_sample_critical(0.01, 10000, 10000);
    REQUIRE_THAT(crit, WithinRel(0.0230180741300137, 1e-12));
    REQUIRE(ks_two_sample(a, b) < crit);
    REQUIRE(ks_two_sample(a, shifted) > crit);
    REQUIRE(ks_two_sample(a, a) == 0.0);

    REQUIRE_THROWS_AS(ks_two_sample(a, {}), std::invalid_argument);
    REQUIRE_THROWS_AS(ks_two_sample_critical(0.0, 10, 10), std::invalid_argument);
    REQUIRE_THROWS_AS(ks_two_sample_critical(0.01, 0, 10), std::invalid_argument);
}

// ------------------------------------------------------------
// report plumbing
// ------------------------------------------------------------

TEST_CASE("report passed flag tracks lhs <= rhs + margin", "[verifier]") {
    MCEstimate lhs;
    lhs.mean = 1.0;
    lhs.std_err = 0.1;
    lhs.reps = 100;
    lhs.seed = 5;

    REQUIRE(make_report("demo", lhs, true, 1.0, 0.0, {}).passed);
    REQUIRE(make_report("demo", lhs, true, 0.9, 0.1, {}).passed);
    REQUIRE_FALSE(make_report("demo", lhs, true, 0.9, 0.05, {}).passed);
}

TEST_CASE("report serialization is structured and deterministic", "[verifier]") {
    MCEstimate lhs;
    lhs.mean = 0.25;
    lhs.std_err = 0.01;
    lhs.reps = 1000;
    lhs.seed = 77;
    const VerificationReport r = make_report(
        "demo-claim", lhs, true, 0.5, 0.04, {{"n", "11"}, {"note", "a=b;c"}});

    const std::string text = to_text(r);
    REQUIRE_THAT(text, ContainsSubstring("[demo-claim]"));
    REQUIRE_THAT(text, ContainsSubstring("passed = yes"));
    REQUIRE_THAT(text, ContainsSubstring("lhs_mean = 0.25"));
    REQUIRE_THAT(text, ContainsSubstring("lhs_seed = 77"));
    REQUIRE_THAT(text, ContainsSubstring("meta.n = 11"));
    REQUIRE(text == to_text(r));

    const auto header = report_csv_header();
    const auto row = report_csv_row(r);
    REQUIRE(row.size() == header.size());
    REQUIRE(row[0] == "demo-claim");
    REQUIRE(row[1] == "yes");
    REQUIRE(row.back() == "n=11;note=a=b;c");
    REQUIRE(row == report_csv_row(r));
}

// ------------------------------------------------------------
// conditional-walk bounds
// ------------------------------------------------------------

TEST_CASE("jump frequency stays under the integral bound", "[verifier][slow]") {
    const auto r = verify_cond_inequality(5, 0.01, 0.1, 20000, 42);
    REQUIRE(r.passed);
    REQUIRE(r.lhs_is_mc);
    REQUIRE(r.lhs.mean > 0.40);
    REQUIRE(r.lhs.mean < 0.55);
    REQUIRE_THAT(r.rhs, WithinAbs(0.837399, 1e-4));
    REQUIRE(parse_double(meta_at(r, "quad_error")) < 1e-9);
    REQUIRE_THAT(parse_double(meta_at(r, "eps")),
                 WithinRel(0.01 * std::sqrt(5.0), 1e-15));
    REQUIRE(meta_at(r, "k") == "3");

    // identical inputs give a byte-identical report
    const auto again = verify_cond_inequality(5, 0.01, 0.1, 20000, 42);
    REQUIRE(to_text(again) == to_text(r));

    const auto r21 = verify_cond_inequality(21, 0.02, 0.05, 20000, 44);
    REQUIRE(r21.passed);
    REQUIRE_THAT(r21.rhs, WithinAbs(0.638807, 1e-4));
}

TEST_CASE("integral bound is trivially met for huge thresholds", "[verifier]") {
    // eps = y sqrt(n) > 1 bypasses nothing: the event just never fires
    const auto r = verify_cond_inequality(5, 5.0, 0.1, 2000, 42);
    REQUIRE(r.passed);
    REQUIRE(r.lhs.mean == 0.0);
    REQUIRE(r.lhs.low_count);
    REQUIRE(r.rhs >= 0.0);
    REQUIRE(r.rhs < 1e-6);
}

TEST_CASE("cond inequality validates arguments", "[verifier]") {
    REQUIRE_THROWS_AS(verify_cond_inequality(2, 0.01, 0.1, 100, 1),
                      std::invalid_argument);
    REQUIRE_THROWS_AS(verify_cond_inequality(5, 0.0, 0.1, 100, 1),
                      std::invalid_argument);
    REQUIRE_THROWS_AS(verify_cond_inequality(5, 0.01, 0.0, 100, 1),
                      std::invalid_argument);
    REQUIRE_THROWS_AS(verify_cond_inequality(5, 0.01, 0.1, 0, 1),
                      std::invalid_argument);
}

TEST_CASE("split bound holds at the default and custom levels", "[verifier][slow]") {
    const double y = 0.1 / std::sqrt(11.0);

    const auto rd = verify_split_bound(11, y, 0.01, 20000, 42);
    REQUIRE(rd.passed);
    REQUIRE_THAT(parse_double(meta_at(rd, "x0")),
                 WithinRel(-y / std::pow(0.01, 0.25), 1e-15));
    REQUIRE_THAT(rd.rhs, WithinAbs(1.224279, 1e-4));
    REQUIRE(rd.lhs.mean > 0.30);
    REQUIRE(rd.lhs.mean < 0.45);

    const auto r0 = verify_split_bound(11, y, 0.01, 0.0, 20000, 42);
    REQUIRE(r0.passed);
    REQUIRE_THAT(parse_double(meta_at(r0, "cdf_term")), WithinAbs(0.5, 1e-9));
    REQUIRE_THAT(r0.rhs, WithinAbs(1.312997, 1e-4));

    // far to the left every pair is an up step, so the walk term is one
    // and the median mass below is zero: the bound degenerates to 1
    const auto rl = verify_split_bound(11, y, 0.01, -30.0, 20000, 42);
    REQUIRE(rl.passed);
    REQUIRE(parse_double(meta_at(rl, "phi_term")) == 1.0);
    REQUIRE(parse_double(meta_at(rl, "cdf_term")) == 0.0);
    REQUIRE(rl.rhs == 1.0);

    REQUIRE(verify_split_bound(5, 0.01, 0.1, 20000, 43).passed);
    REQUIRE(verify_split_bound(21, 0.02, 0.05, 20000, 44).passed);

    REQUIRE_THROWS_AS(verify_split_bound(11, 0.0, 0.01, 100, 1),
                      std::invalid_argument);
    REQUIRE_THROWS_AS(
        verify_split_bound(11, 0.01, 0.01,
                           std::numeric_limits<double>::infinity(), 100, 1),
        std::invalid_argument);
}

TEST_CASE("walk survival probability is nonincreasing in the level", "[verifier]") {
    for (double y : {0.01, 0.1})
        for (double delta : {1e-3, 1e-2}) {
            double prev = 2.0;
            for (int i = 0; i < 20; ++i) {
                const double x = -2.0 + 4.0 * static_cast<double>(i) / 19.0;
                const double v = detail::phi_at(x, y, delta, 100);
                REQUIRE(v <= prev + 1e-12);
                REQUIRE(v >= 0.0);
                REQUIRE(v <= 1.0);
                prev = v;
            }
        }
}

// ------------------------------------------------------------
// power-law envelope
// ------------------------------------------------------------

TEST_CASE("key estimate rejects delta above the configured delta0", "[verifier]") {
    REQUIRE_THROWS_WITH(verify_key_estimate(0.1, 1e-4, 100, 3.0, 100, 1),
                        ContainsSubstring("delta0"));
    REQUIRE_THROWS_AS(verify_key_estimate(1.0, 1e-4, 100, 3.0, 100, 1),
                      std::invalid_argument);
    REQUIRE_THROWS_AS(verify_key_estimate(0.1, 1e-4, 100, 2.0, 100, 1),
                      std::invalid_argument);
    REQUIRE_THROWS_AS(verify_key_estimate(0.1, 1e-4, 2, 3.0, 100, 1),
                      std::invalid_argument);
}

TEST_CASE("default delta0 is half the drift-domination threshold", "[verifier]") {
    // 0.5 * (900 sqrt(2 pi))^(-6)
    const double expect =
        0.5 * std::pow(900.0 * std::sqrt(2.0 * detail::kPi), -6.0);
    REQUIRE_THAT(kDefaultDelta0, WithinRel(expect, 1e-14));
    VerifierConfig cfg;
    REQUIRE(cfg.delta0 == kDefaultDelta0);
    REQUIRE(cfg.ratio_cap == 1.0);
}

TEST_CASE("regime routing by the jump-size exponent", "[verifier]") {
    REQUIRE(std::string(regime_name(-0.5)) == "large");
    REQUIRE(std::string(regime_name(-1.0 / 108.0)) == "medium");
    REQUIRE(std::string(regime_name(0.0)) == "medium");
    REQUIRE(std::string(regime_name(1.0 / 18.0)) == "medium");
    REQUIRE(std::string(regime_name(0.06)) == "small");
}

TEST_CASE("large jumps never fire at moderate delta", "[verifier]") {
    VerifierConfig cfg;
    cfg.delta0 = 1e-3;
    const auto r = verify_key_estimate(0.9, 1e-4, 3, 3.0, 2000, 7, cfg);
    REQUIRE(r.passed);
    REQUIRE(r.lhs.mean == 0.0);
    REQUIRE(meta_at(r, "regime") == "large");
    REQUIRE(parse_double(meta_at(r, "alpha")) < -1.0 / 108.0);
    REQUIRE(meta_at(r, "ratio") == "0");
}

TEST_CASE("envelope ratio shrinks as delta grows", "[verifier][slow]") {
    // eps = 0.1 with n = 10^(2k+1 - 2) keeps alpha = 0: the medium regime
    VerifierConfig cfg;
    cfg.delta0 = 1e-3;
    const std::vector<double> deltas = {1e-3, 1e-4, 1e-5};
    const std::vector<std::int64_t> ns = {10, 100, 1000};
    std::vector<double> ratios;
    for (std::size_t i = 0; i < deltas.size(); ++i) {
        const auto r = verify_key_estimate(0.1, deltas[i], ns[i], 3.0, 10000,
                                           50 + static_cast<std::uint64_t>(i),
                                           cfg);
        REQUIRE(r.passed);
        REQUIRE(meta_at(r, "regime") == "medium");
        REQUIRE_THAT(parse_double(meta_at(r, "alpha")), WithinAbs(0.0, 1e-12));
        const double ratio = parse_double(meta_at(r, "ratio"));
        REQUIRE(ratio > 0.0);
        REQUIRE(ratio < 1.0);
        ratios.push_back(ratio);
    }
    // no growth toward small delta: the log-log trend stays flat or falls
    REQUIRE(detail::loglog_slope(deltas, ratios) <= 0.05);
}

// ------------------------------------------------------------
// certificates
// ------------------------------------------------------------

TEST_CASE("small-regime drift certificates hold on the diagonal", "[verifier]") {
    VerifierConfig cfg;
    cfg.delta0 = 1e-5;
    std::vector<CertificatePoint> pts;
    for (double a : {1.0 / 18.0, 0.10, 0.15})
        for (double d : {1e-7, 1e-6, 1e-5}) pts.push_back({a, a, d});
    const auto r = verify_expansion_certificates(pts, cfg);
    REQUIRE(r.passed);
    REQUIRE_FALSE(r.lhs_is_mc);
    REQUIRE(r.lhs.mean < 0.0);
    REQUIRE(meta_at(r, "checked") == "54");
    REQUIRE(meta_at(r, "skipped") == "0");
}

TEST_CASE("medium-regime drift certificates hold on the diagonal", "[verifier]") {
    VerifierConfig cfg;
    cfg.delta0 = 1e-5;
    std::vector<CertificatePoint> pts;
    for (double a : {-1.0 / 108.0, 0.0, 1.0 / 18.0})
        for (double d : {1e-7, 1e-6, 1e-5}) pts.push_back({a, a, d});
    const auto r = verify_expansion_certificates(pts, cfg);
    REQUIRE(r.passed);
    REQUIRE(r.lhs.mean < 0.0);
    REQUIRE(meta_at(r, "checked") == "54");
    REQUIRE(meta_at(r, "skipped") == "0");
}

TEST_CASE("expansion certificates hold across the probe lattice", "[verifier]") {
    std::vector<CertificatePoint> pts;
    for (double a : {-1.0 / 108.0, 1.0 / 18.0, 0.15})
        for (double b : {0.0, 0.05, 0.2})
            for (double d : {1e-6, 1e-4, 1e-2}) pts.push_back({a, b, d});
    const auto r = verify_expansion_certificates(pts);
    REQUIRE(r.passed);
    REQUIRE(r.lhs.mean < 0.0);
    // every point gets both Taylor checks; the drift checks are all
    // off-diagonal here and must be skipped with a note, not dropped
    REQUIRE(meta_at(r, "checked") == "54");
    REQUIRE(meta_at(r, "skipped") == "27");
    REQUIRE_THAT(meta_at(r, "point0"), ContainsSubstring("skipped"));
}

TEST_CASE("drift checks above delta0 are skipped with a note", "[verifier]") {
    VerifierConfig cfg;
    cfg.delta0 = 1e-5;
    const auto r = verify_expansion_certificates(
        {CertificatePoint{1.0 / 18.0, 1.0 / 18.0, 1e-4}}, cfg);
    REQUIRE(r.passed);
    REQUIRE(meta_at(r, "checked") == "2");
    REQUIRE(meta_at(r, "skipped") == "1");
    REQUIRE_THAT(meta_at(r, "point0"), ContainsSubstring("delta above delta0"));
}

TEST_CASE("certificate input validation", "[verifier]") {
    REQUIRE_THROWS_AS(verify_expansion_certificates({}), std::invalid_argument);
    REQUIRE_THROWS_AS(
        verify_expansion_certificates({CertificatePoint{0.0, 0.0, 1.5}}),
        std::invalid_argument);
    REQUIRE_THROWS_AS(
        verify_expansion_certificates(
            {CertificatePoint{std::numeric_limits<double>::infinity(), 0.0,
                              1e-4}}),
        std::invalid_argument);
}
