#pragma once

// ============================================================
// Deterministic Monte Carlo engine.
//
// Counter-style RNG: every (seed, stream tag, replication,
// particle) tuple hashes to an independent stream key in O(1),
// so a replication's randomness never depends on which worker
// ran it or in what order.  parallel_map writes each
// replication into its own slot and reductions walk the slots
// in replication order with compensated summation, making every
// estimate byte-identical across worker counts.
// ============================================================

#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <mutex>
#include <stdexcept>
#include <thread>
#include <type_traits>
#include <vector>

namespace medianbm {

namespace detail {

inline constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

// splitmix64 finalizer; bijective on 64-bit words
inline std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// least-squares slope of log(y) against log(x); callers validate inputs
inline double loglog_slope(const std::vector<double>& xs,
                           const std::vector<double>& ys) {
    const std::size_t n = xs.size();
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += std::log(xs[i]);
        my += std::log(ys[i]);
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = std::log(xs[i]) - mx;
        num += dx * (std::log(ys[i]) - my);
        den += dx * dx;
    }
    return num / den;
}

} // namespace detail

// Stream tags, one per Monte Carlo entry point, so streams derived
// from a shared experiment seed never collide across operations.
namespace stream_tag {
inline constexpr std::uint64_t kWalk = 1;
inline constexpr std::uint64_t kMedianPath = 2;
inline constexpr std::uint64_t kJump = 3;
inline constexpr std::uint64_t kComponentwise = 4;
inline constexpr std::uint64_t kScalingA = 5;
inline constexpr std::uint64_t kScalingB = 6;
inline constexpr std::uint64_t kLimitSample = 7;
inline constexpr std::uint64_t kHolder = 8;
inline constexpr std::uint64_t kSeedless = 15;
} // namespace stream_tag

// Hash (seed, tag, rep, particle) to a stream key.  Each field enters
// through its own odd multiplier before a full mix, so distinct tuples
// cannot trade off against each other additively (seed+1/tag-1 etc.).
inline std::uint64_t derive_key(std::uint64_t seed, std::uint64_t tag,
                                std::uint64_t rep = 0,
                                std::uint64_t particle = 0) {
    std::uint64_t k = detail::mix64(seed + detail::kGolden);
    k = detail::mix64(k ^ (tag * 0xff51afd7ed558ccdULL));
    k = detail::mix64(k ^ (rep * 0xc4ceb9fe1a85ec53ULL));
    k = detail::mix64(k ^ (particle * detail::kGolden));
    return k;
}

// splitmix64 sequence seeded by a derived key.  Cheap to construct, no
// warm-up needed; one instance per (replication, particle) stream.
class CounterRng {
  public:
    explicit CounterRng(std::uint64_t key) : state_(key) {}

    std::uint64_t next_u64() {
        state_ += detail::kGolden;
        return detail::mix64(state_);
    }

    // uniform strictly inside (0,1); never 0 or 1, so log() stays finite
    double next_double() {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }

    // Box-Muller pair, second value cached; consumes exactly two
    // uniforms per pair regardless of call pattern
    double next_gaussian() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        const double u1 = next_double();
        const double u2 = next_double();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 2.0 * 3.14159265358979323846 * u2;
        spare_ = r * std::sin(a);
        has_spare_ = true;
        return r * std::cos(a);
    }

  private:
    std::uint64_t state_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

// ------------------------------------------------------------
// estimates and reductions
// ------------------------------------------------------------

struct MCEstimate {
    double mean = 0.0;
    double std_err = 0.0;
    std::int64_t reps = 0;
    std::uint64_t seed = 0;
    bool low_count = false;  // too few hits/misses for the SE to mean much
};

// Neumaier-compensated sum in index order; deterministic and immune to
// catastrophic cancellation between large terms
inline double stable_sum(const std::vector<double>& v) {
    double sum = 0.0;
    double comp = 0.0;
    for (double x : v) {
        const double t = sum + x;
        if (std::abs(sum) >= std::abs(x))
            comp += (sum - t) + x;
        else
            comp += (x - t) + sum;
        sum = t;
    }
    return sum + comp;
}

inline double stable_mean(const std::vector<double>& v) {
    if (v.empty()) throw std::invalid_argument("stable_mean: empty sample");
    return stable_sum(v) / static_cast<double>(v.size());
}

// sample mean with its standard error (unbiased variance, n-1)
inline MCEstimate summarize(const std::vector<double>& draws,
                            std::uint64_t seed) {
    if (draws.empty()) throw std::invalid_argument("summarize: empty sample");
    const auto n = static_cast<std::int64_t>(draws.size());
    MCEstimate est;
    est.reps = n;
    est.seed = seed;
    est.mean = stable_mean(draws);
    if (n >= 2) {
        std::vector<double> sq(draws.size());
        for (std::size_t i = 0; i < draws.size(); ++i) {
            const double d = draws[i] - est.mean;
            sq[i] = d * d;
        }
        const double var = stable_sum(sq) / static_cast<double>(n - 1);
        est.std_err = std::sqrt(var / static_cast<double>(n));
    }
    return est;
}

// frequency estimate with binomial standard error; flags low counts
// (fewer than 10 hits or 10 misses) where the normal SE is unreliable
inline MCEstimate summarize_frequency(std::int64_t hits, std::int64_t reps,
                                      std::uint64_t seed) {
    if (reps < 1) throw std::invalid_argument("summarize_frequency: reps < 1");
    if (hits < 0 || hits > reps)
        throw std::invalid_argument("summarize_frequency: hits out of range");
    MCEstimate est;
    est.reps = reps;
    est.seed = seed;
    const double p = static_cast<double>(hits) / static_cast<double>(reps);
    est.mean = p;
    est.std_err = std::sqrt(p * (1.0 - p) / static_cast<double>(reps));
    est.low_count = hits < 10 || reps - hits < 10;
    return est;
}

// ------------------------------------------------------------
// worker pool
// ------------------------------------------------------------

// Worker count for operations that do not receive one explicitly:
// MEDIANBM_THREADS if set to a positive integer, else the hardware count.
inline int default_workers() {
    if (const char* env = std::getenv("MEDIANBM_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && v >= 1 && v <= 4096)
            return static_cast<int>(v);
    }
    const unsigned hc = std::thread::hardware_concurrency();
    return hc == 0 ? 1 : static_cast<int>(hc);
}

// Evaluate fn(0..reps-1) across workers.  fn must be a pure function of
// the replication index (draw randomness via derive_key); each result
// lands in its own slot, so the output is invariant to scheduling.
// The first exception thrown by fn is rethrown after all workers stop.
template <typename Fn>
auto parallel_map(std::int64_t reps, int workers, Fn&& fn)
    -> std::vector<std::invoke_result_t<Fn&, std::int64_t>> {
    using T = std::invoke_result_t<Fn&, std::int64_t>;
    if (reps < 0) throw std::invalid_argument("parallel_map: reps < 0");
    std::vector<T> out(static_cast<std::size_t>(reps));
    if (reps == 0) return out;

    const int nw = static_cast<int>(
        std::min<std::int64_t>(std::max(workers, 1), reps));
    if (nw == 1) {
        for (std::int64_t r = 0; r < reps; ++r)
            out[static_cast<std::size_t>(r)] = fn(r);
        return out;
    }

    std::atomic<std::int64_t> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    auto body = [&] {
        for (;;) {
            if (failed.load(std::memory_order_relaxed)) return;
            const std::int64_t r = next.fetch_add(1, std::memory_order_relaxed);
            if (r >= reps) return;
            try {
                out[static_cast<std::size_t>(r)] = fn(r);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
                failed.store(true, std::memory_order_relaxed);
                return;
            }
        }
    };

    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(nw - 1));
    for (int w = 1; w < nw; ++w) pool.emplace_back(body);
    body();
    for (auto& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
    return out;
}

} // namespace medianbm
