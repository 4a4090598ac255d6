#ifndef MEDIANBM_QUADRATURE_HPP
#define MEDIANBM_QUADRATURE_HPP

// Adaptive Gauss-Kronrod quadrature on finite intervals.
//
// 7-point Gauss / 15-point Kronrod pairs, refining the interval with the
// largest error estimate first.  Tolerance is absolute.  Deterministic:
// identical inputs take identical refinement paths.
//
// The rule never samples panel endpoints, so a feature much narrower than
// the panel it lies in can be invisible to both rules and produce a false
// zero-error estimate.  integrate() seeds a modest uniform partition to
// catch moderate features; integrands with known sharp features (steps,
// narrow peaks) must be integrated with integrate_segments(), passing
// breakpoints that bracket each feature.

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <utility>
#include <vector>

namespace medianbm {

struct QuadratureResult {
    double value = 0.0;
    double error_estimate = 0.0;  // sum of per-interval |K15 - G7|
    int intervals = 0;            // intervals in the final partition
    bool converged = false;
};

namespace detail {

// Kronrod-15 abscissae on [0,1); even indices are Kronrod-only points,
// odd indices together with the midpoint are the embedded Gauss-7 rule.
inline constexpr double kGkNode[7] = {
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
};
inline constexpr double kGkWeightK[8] = {
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,  // midpoint
};
inline constexpr double kGkWeightG[4] = {
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,  // midpoint
};

template <typename F>
inline void gauss_kronrod_15(const F& f, double a, double b,
                             double& value, double& error) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    const double fc = f(c);
    double resk = kGkWeightK[7] * fc;
    double resg = kGkWeightG[3] * fc;
    for (int j = 0; j < 7; ++j) {
        const double sum = f(c - h * kGkNode[j]) + f(c + h * kGkNode[j]);
        resk += kGkWeightK[j] * sum;
        if (j % 2 == 1) resg += kGkWeightG[j / 2] * sum;
    }
    value = resk * h;
    error = std::abs((resk - resg) * h);
}

struct QuadSegment {
    double a, b, value, error;
    // max-heap on error; ties broken by position for a total order
    bool operator<(const QuadSegment& o) const {
        if (error != o.error) return error < o.error;
        return a > o.a;
    }
};

// worst-first refinement over an ascending initial partition
template <typename F>
QuadratureResult adaptive_refine(const F& f, const std::vector<double>& pts,
                                 double abs_tol, int max_intervals) {
    std::vector<QuadSegment> heap;
    heap.reserve(64);
    // segments too narrow to split further are frozen as-is
    std::vector<QuadSegment> frozen;

    double heap_error = 0.0;
    double frozen_error = 0.0;
    int intervals = 0;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        if (pts[i] == pts[i + 1]) continue;
        QuadSegment s{pts[i], pts[i + 1], 0.0, 0.0};
        gauss_kronrod_15(f, s.a, s.b, s.value, s.error);
        heap.push_back(s);
        heap_error += s.error;
        ++intervals;
    }
    if (heap.empty()) return {0.0, 0.0, 0, true};
    std::make_heap(heap.begin(), heap.end());

    const double min_width =
        8.0 * std::numeric_limits<double>::epsilon() *
        std::max({std::abs(pts.front()), std::abs(pts.back()), 1.0});

    while (heap_error + frozen_error > abs_tol && !heap.empty() &&
           intervals < max_intervals) {
        std::pop_heap(heap.begin(), heap.end());
        QuadSegment worst = heap.back();
        heap.pop_back();
        heap_error -= worst.error;

        if (worst.b - worst.a <= min_width) {
            frozen.push_back(worst);
            frozen_error += worst.error;
            continue;
        }

        const double mid = 0.5 * (worst.a + worst.b);
        QuadSegment left{worst.a, mid, 0.0, 0.0};
        QuadSegment right{mid, worst.b, 0.0, 0.0};
        gauss_kronrod_15(f, left.a, left.b, left.value, left.error);
        gauss_kronrod_15(f, right.a, right.b, right.value, right.error);
        heap.push_back(left);
        std::push_heap(heap.begin(), heap.end());
        heap.push_back(right);
        std::push_heap(heap.begin(), heap.end());
        heap_error += left.error + right.error;
        ++intervals;
    }

    // canonical left-to-right summation keeps the result independent of the
    // heap's internal layout
    std::vector<QuadSegment> all;
    all.reserve(heap.size() + frozen.size());
    all.insert(all.end(), heap.begin(), heap.end());
    all.insert(all.end(), frozen.begin(), frozen.end());
    std::sort(all.begin(), all.end(),
              [](const QuadSegment& x, const QuadSegment& y) { return x.a < y.a; });

    QuadratureResult out;
    double total = 0.0, err = 0.0, comp = 0.0;
    for (const auto& s : all) {
        // Neumaier-compensated sum
        double t = total + s.value;
        if (std::abs(total) >= std::abs(s.value))
            comp += (total - t) + s.value;
        else
            comp += (s.value - t) + total;
        total = t;
        err += s.error;
    }
    out.value = total + comp;
    out.error_estimate = err;
    out.intervals = static_cast<int>(all.size());
    out.converged = err <= abs_tol;
    return out;
}

}  // namespace detail

/// Integrate f over [a, b] to absolute tolerance abs_tol.  Handles a > b by
/// orientation flip.  Starts from a uniform partition of up to 15 panels so
/// that moderate interior features register in the error estimates.  Throws
/// std::invalid_argument on non-finite endpoints or a non-positive tolerance;
/// inspect QuadratureResult::converged for success.
template <typename F>
QuadratureResult integrate(F&& f, double a, double b, double abs_tol,
                           int max_intervals = 20000) {
    if (!std::isfinite(a) || !std::isfinite(b))
        throw std::invalid_argument("integrate: endpoints must be finite");
    if (!(abs_tol > 0.0))
        throw std::invalid_argument("integrate: tolerance must be positive");
    if (max_intervals < 1)
        throw std::invalid_argument("integrate: max_intervals must be >= 1");

    double sign = 1.0;
    if (a == b) return {0.0, 0.0, 0, true};
    if (a > b) {
        std::swap(a, b);
        sign = -1.0;
    }

    const int seeds = std::min(15, max_intervals);
    std::vector<double> pts(seeds + 1);
    for (int i = 0; i <= seeds; ++i)
        pts[i] = a + (b - a) * (static_cast<double>(i) / seeds);
    pts.front() = a;
    pts.back() = b;

    QuadratureResult out = detail::adaptive_refine(f, pts, abs_tol, max_intervals);
    out.value *= sign;
    return out;
}

/// Integrate f over [points.front(), points.back()] using the given ascending
/// breakpoints as the initial partition.  Use this whenever the integrand has
/// features (steps, spikes) far narrower than the integration range: bracket
/// each feature between two breakpoints.  Duplicate points collapse; points
/// must be finite and non-decreasing.
template <typename F>
QuadratureResult integrate_segments(F&& f, const std::vector<double>& points,
                                    double abs_tol, int max_intervals = 20000) {
    if (points.size() < 2)
        throw std::invalid_argument("integrate_segments: need at least 2 points");
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (!std::isfinite(points[i]))
            throw std::invalid_argument("integrate_segments: points must be finite");
        if (i > 0 && points[i] < points[i - 1])
            throw std::invalid_argument("integrate_segments: points must be non-decreasing");
    }
    if (!(abs_tol > 0.0))
        throw std::invalid_argument("integrate_segments: tolerance must be positive");
    if (max_intervals < 1)
        throw std::invalid_argument("integrate_segments: max_intervals must be >= 1");
    return detail::adaptive_refine(f, points, abs_tol, max_intervals);
}

}  // namespace medianbm

#endif  // MEDIANBM_QUADRATURE_HPP