#pragma once

// ============================================================
// Closed-form kernels for the scaled-median limit law.
//
// Everything here is a pure function: Gaussian primitives, the
// arcsine covariance of the limit process, the median-order-
// statistic density, the conditional jump probabilities of the
// embedded trinomial walk, and second-order Taylor expansions
// of those probabilities with certified remainder bounds.
// ============================================================

#include <medianbm/quadrature.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace medianbm {

namespace detail {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kSqrt2 = 1.41421356237309504880;
inline constexpr double kInvSqrt2Pi = 0.39894228040143267794;
inline constexpr double kLogSqrt2Pi = 0.91893853320467274178;

inline void require_finite(double v, const char* msg) {
    if (!std::isfinite(v)) throw std::invalid_argument(msg);
}

inline void require_positive(double v, const char* msg) {
    if (!(v > 0.0) || !std::isfinite(v)) throw std::invalid_argument(msg);
}

// ascending partition of [lo, hi] with extra breakpoints at center + k*scale
// for k in {-12,-4,-1,0,1,4,12}, bracketing a feature of width ~scale so the
// quadrature rule cannot overlook it
inline std::vector<double> bracket_feature(double lo, double hi,
                                           double center, double scale) {
    std::vector<double> pts{lo, hi};
    for (double k : {-12.0, -4.0, -1.0, 0.0, 1.0, 4.0, 12.0}) {
        double p = center + k * scale;
        if (p > lo && p < hi) pts.push_back(p);
    }
    std::sort(pts.begin(), pts.end());
    return pts;
}

} // namespace detail

// ------------------------------------------------------------
// standard normal primitives
// ------------------------------------------------------------

inline double std_normal_pdf(double x) {
    return detail::kInvSqrt2Pi * std::exp(-0.5 * x * x);
}

inline double std_normal_cdf(double x) {
    return 0.5 * std::erfc(-x / detail::kSqrt2);
}

// log Phi(x), finite for all finite x. Below -30 the CDF is evaluated
// through the divergent tail series phi(x)/(-x) * (1 - 1/x^2 + 3/x^4 - ...),
// whose truncation error at six terms is below 1e-15 relative there.
inline double std_normal_log_cdf(double x) {
    detail::require_finite(x, "std_normal_log_cdf: x must be finite");
    if (x >= -30.0) return std::log(std_normal_cdf(x));
    double w = 1.0 / (x * x);
    double s = w * (-1.0 + w * (3.0 + w * (-15.0 + w * (105.0 + w * (-945.0 + w * 10395.0)))));
    return -0.5 * x * x - std::log(-x) - detail::kLogSqrt2Pi + std::log1p(s);
}

// upper bound phi(x)/x >= Phi(-x), valid only for x > 0
inline double mills_upper_bound(double x) {
    detail::require_positive(x, "mills_upper_bound: requires x > 0");
    return std_normal_pdf(x) / x;
}

// ------------------------------------------------------------
// limit process second moments
// ------------------------------------------------------------

// sqrt(st) * arcsin(min(s,t)/sqrt(st)); the covariance of the scaled
// median at a pair of times
inline double limit_covariance(double s, double t) {
    detail::require_finite(s, "limit_covariance: s must be finite");
    detail::require_finite(t, "limit_covariance: t must be finite");
    if (s < 0.0 || t < 0.0) throw std::invalid_argument("limit_covariance: negative time");
    if (s == 0.0 || t == 0.0) return 0.0;
    double root = std::sqrt(s * t);
    double arg = std::clamp(std::min(s, t) / root, -1.0, 1.0);
    return root * std::asin(arg);
}

// E|X(t)-X(s)|^2 for the limit process, 0 <= s <= t
inline double increment_variance(double s, double t) {
    detail::require_finite(s, "increment_variance: s must be finite");
    detail::require_finite(t, "increment_variance: t must be finite");
    if (s < 0.0 || s > t) throw std::invalid_argument("increment_variance: requires 0 <= s <= t");
    if (s == t) return 0.0;
    double arg = std::clamp(std::sqrt(s / t), -1.0, 1.0);
    return 0.5 * detail::kPi * (s + t) - 2.0 * std::sqrt(s * t) * std::asin(arg);
}

// ------------------------------------------------------------
// median order statistic at time 1
// ------------------------------------------------------------

// log density of the k-th order statistic of n iid standard normals,
// k = floor((n+1)/2); the zero-power guards keep n=1 and the extreme
// cases away from 0 * (-inf)
inline double median_log_density(int n, double x) {
    if (n < 1) throw std::invalid_argument("median_log_density: requires n >= 1");
    detail::require_finite(x, "median_log_density: x must be finite");
    int k = (n + 1) / 2;
    double out = std::log(static_cast<double>(k))
               + std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0)
               + std::log(detail::kInvSqrt2Pi) - 0.5 * x * x;
    // odd n has k-1 == n-k; the combined form keeps x <-> -x symmetry exact
    if (k - 1 == n - k) {
        if (k > 1) out += (k - 1) * (std_normal_log_cdf(x) + std_normal_log_cdf(-x));
    } else {
        if (k > 1) out += (k - 1) * std_normal_log_cdf(x);
        if (n > k) out += (n - k) * std_normal_log_cdf(-x);
    }
    return out;
}

inline double median_density(int n, double x) {
    return std::exp(median_log_density(n, x));
}

// P(M_n(1) <= m) by quadrature of the density; mass below min(m,0)-13
// is beyond the n=1 Gaussian tail at 13 sigma and is dropped
inline double median_cdf(int n, double m) {
    if (n < 1) throw std::invalid_argument("median_cdf: requires n >= 1");
    detail::require_finite(m, "median_cdf: m must be finite");
    double lo = std::min(m, 0.0) - 13.0;
    // the density concentrates in a window of width ~sqrt(pi/(2n)) around 0;
    // bracket it so large n cannot hide the peak inside one panel
    double scale = std::sqrt(0.5 * detail::kPi / n);
    auto pts = detail::bracket_feature(lo, m, 0.0, scale);
    auto r = integrate_segments([n](double u) { return median_density(n, u); },
                                pts, 1e-12, 40000);
    return std::clamp(r.value, 0.0, 1.0);
}

// lhs = P(sqrt(n) M_n(1) < -y) and the power-law shape y^(-kappa) it is
// measured against; the caller asserts lhs/rhs_shape stays bounded
struct TailBoundCheck {
    double lhs;
    double rhs_shape;
};

inline TailBoundCheck tail_bound_check(int n, double y, double kappa) {
    if (n < 3 || n % 2 == 0)
        throw std::invalid_argument("tail_bound_check: n must be odd and >= 3");
    detail::require_positive(y, "tail_bound_check: requires y > 0");
    if (!(kappa > 2.0) || !std::isfinite(kappa))
        throw std::invalid_argument("tail_bound_check: requires kappa > 2");
    return {median_cdf(n, -y / std::sqrt(static_cast<double>(n))), std::pow(y, -kappa)};
}

// ------------------------------------------------------------
// joint Gaussian kernel psi and the conditional probabilities
// ------------------------------------------------------------

// psi(x,y,delta) = P(B(1+delta) < x+y, B(1) < x)
//                = int_{-inf}^x Phi((x+y-t)/sqrt(delta)) phi(t) dt.
// Below a = x+y-10*sqrt(delta)-10 the inner Phi exceeds 1 - Phi(-10),
// so that region contributes Phi(a) up to < 8e-24; the rest is adaptive
// quadrature with tolerance scaled to Phi(x) so deep-tail calls keep
// relative accuracy.
inline double psi(double x, double y, double delta) {
    detail::require_finite(x, "psi: x must be finite");
    detail::require_finite(y, "psi: y must be finite");
    detail::require_positive(delta, "psi: requires delta > 0");
    double phx = std_normal_cdf(x);
    if (phx <= 0.0) return 0.0;
    double rd = std::sqrt(delta);
    double a = x + y - 10.0 * rd - 10.0;
    if (a >= x) return phx;
    double tol = std::max(1e-320, 1e-12 * std::min(1.0, phx));
    // the inner CDF steps from 1 to 0 around t = x+y over a width ~rd that
    // can be far narrower than the integration range
    auto pts = detail::bracket_feature(a, x, x + y, rd);
    auto r = integrate_segments(
        [x, y, rd](double t) { return std_normal_cdf((x + y - t) / rd) * std_normal_pdf(t); },
        pts, tol, 40000);
    return std::clamp(std_normal_cdf(a) + r.value, 0.0, phx);
}

struct P1Result {
    double value;
    bool degraded; // true when Phi(x) underflowed and the tail-ratio branch ran
};

// p1(x,y,delta) = P(B(1+delta) < x+y | B(1) < x) = psi(x,y,delta)/Phi(x).
// For x < -37 the denominator underflows; substituting t = x-u turns both
// integrals into Laplace form with weight exp(x u - u^2/2), and the ratio
// is evaluated directly over u in (0, 45/|x|].
inline P1Result p1_detail(double x, double y, double delta) {
    detail::require_finite(x, "p1: x must be finite");
    detail::require_finite(y, "p1: y must be finite");
    detail::require_positive(delta, "p1: requires delta > 0");
    if (x < -37.0) {
        double ub = 45.0 / -x;
        double rd = std::sqrt(delta);
        double tol = 1e-12 / -x;
        // weight decays on scale 1/|x|; the CDF factor steps around u = -y
        auto pts = detail::bracket_feature(0.0, ub, -y, rd);
        auto num = integrate_segments(
            [x, y, rd](double u) {
                return std_normal_cdf((y + u) / rd) * std::exp(x * u - 0.5 * u * u);
            },
            pts, tol, 40000);
        auto den = integrate(
            [x](double u) { return std::exp(x * u - 0.5 * u * u); },
            0.0, ub, tol, 40000);
        double v = den.value > 0.0 ? num.value / den.value : 0.0;
        return {std::clamp(v, 0.0, 1.0), true};
    }
    double phx = std_normal_cdf(x);
    return {std::clamp(psi(x, y, delta) / phx, 0.0, 1.0), false};
}

inline double p1(double x, double y, double delta) {
    return p1_detail(x, y, delta).value;
}

// p2(x,y,delta) = P(B(1+delta) > x+y | B(1) > x), computed through the
// reflection identity p2(x,y,delta) = p1(-x,-y,delta)
inline P1Result p2_detail(double x, double y, double delta) {
    return p1_detail(-x, -y, delta);
}

inline double p2(double x, double y, double delta) {
    return p1(-x, -y, delta);
}

// ------------------------------------------------------------
// jump queries and trinomial walk parameters
// ------------------------------------------------------------

// one conditioning point of the embedded walk: median location x, jump
// height y, time gap delta, plus the scaling-window exponents recovered
// from y = delta^(1/2+alpha) and x = -delta^(1/4+beta) when defined
struct JumpQuery {
    double x;
    double y;
    double delta;
    double alpha; // NaN unless 0 < y < 1 and delta < 1
    double beta;  // NaN unless 0 < -x < 1 and delta < 1
};

inline JumpQuery make_jump_query(double x, double y, double delta) {
    detail::require_finite(x, "make_jump_query: x must be finite");
    if (!(y >= 0.0) || !std::isfinite(y))
        throw std::invalid_argument("make_jump_query: requires y >= 0");
    detail::require_positive(delta, "make_jump_query: requires delta > 0");
    double alpha = std::numeric_limits<double>::quiet_NaN();
    double beta = std::numeric_limits<double>::quiet_NaN();
    if (y > 0.0 && y < 1.0 && delta < 1.0)
        alpha = std::log(y) / std::log(delta) - 0.5;
    if (x < 0.0 && x > -1.0 && delta < 1.0)
        beta = std::log(-x) / std::log(delta) - 0.25;
    return {x, y, delta, alpha, beta};
}

// step distribution of the signed count walk: pt1 = P(step = -1) is a
// lower particle crossing up without the upper one, pt2 = P(step = +1)
// the reverse; mu_t > 0 means drift toward the jump level
struct WalkParams {
    double p1;
    double p2;
    double q1;
    double q2;
    double pt1;
    double pt2;
    double eps_t; // P(step != 0) = pt1 + pt2
    double mu_t;  // pt1 - pt2
    bool degraded;
};

inline WalkParams walk_params(const JumpQuery& q) {
    auto r1 = p1_detail(q.x, q.y, q.delta);
    auto r2 = p1_detail(-q.x, -q.y, q.delta);
    WalkParams w{};
    w.p1 = r1.value;
    w.p2 = r2.value;
    w.q1 = 1.0 - w.p1;
    w.q2 = 1.0 - w.p2;
    w.pt1 = w.p1 * w.q2;
    w.pt2 = w.p2 * w.q1;
    w.eps_t = w.pt1 + w.pt2;
    w.mu_t = w.pt1 - w.pt2;
    w.degraded = r1.degraded || r2.degraded;
    return w;
}

// ------------------------------------------------------------
// Taylor expansions with certified remainder bounds
// ------------------------------------------------------------

struct ExpansionResult {
    double value;
    double remainder_bound; // +inf when valid is false: no certificate
    bool valid;
};

// second-order expansion of p1 around the origin; certified only inside
// the scaling window 0 < y <= -x <= 1, 0 < delta < 1, where the exponents
// alpha, beta are defined
inline ExpansionResult p1_expansion(double x, double y, double delta) {
    detail::require_finite(x, "p1_expansion: x must be finite");
    detail::require_finite(y, "p1_expansion: y must be finite");
    detail::require_positive(delta, "p1_expansion: requires delta > 0");
    double rd = std::sqrt(delta);
    double s = x + y;
    double value = 1.0 - std::atan(rd) / detail::kPi + y * detail::kInvSqrt2Pi
                 + rd / (2.0 * detail::kPi) * s * s
                 - y * y / (2.0 * detail::kPi * rd);
    bool valid = delta < 1.0 && y > 0.0 && y < 1.0 && y <= -x && -x <= 1.0;
    if (!valid) return {value, std::numeric_limits<double>::infinity(), false};
    double ld = std::log(delta);
    double alpha = std::log(y) / ld - 0.5;
    double beta = std::log(-x) / ld - 0.25;
    double rb = 150.0 * (std::pow(delta, 0.75 + 3.0 * beta)
                       + std::pow(delta, 0.75 + 2.0 * std::min(alpha, 0.0) + beta)
                       + std::pow(delta, 0.5 + 4.0 * alpha));
    return {value, rb, true};
}

// second-order expansion of psi around the origin; the remainder bound
// holds for all real (x, y) and any delta > 0, with every term vanishing
// at the origin
inline ExpansionResult psi_expansion(double x, double y, double delta) {
    detail::require_finite(x, "psi_expansion: x must be finite");
    detail::require_finite(y, "psi_expansion: y must be finite");
    detail::require_positive(delta, "psi_expansion: requires delta > 0");
    double rd = std::sqrt(delta);
    double s = x + y;
    double value = 0.5 - std::atan(rd) / (2.0 * detail::kPi)
                 + x * detail::kInvSqrt2Pi + 0.5 * y * detail::kInvSqrt2Pi
                 + rd / (4.0 * detail::kPi) * s * s
                 - y * y / (4.0 * detail::kPi * rd);
    double ax = std::abs(x);
    double ay = std::abs(y);
    double rb = (ax + ay) * (ax + ay) * (ax + ay)
              + ax * y * y / rd * (ax + ay)
              + y * y * y * y / (delta * rd)
              + delta * rd * s * s
              + delta * (ax + ay);
    return {value, rb, true};
}

} // namespace medianbm
