// Monte Carlo engine: keyed stream vectors frozen from an independent
// implementation, uniform/gaussian draw properties, worker-invariant
// parallel map, and moment summaries.

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdint>
#include <set>
#include <stdexcept>
#include <vector>

#include "medianbm/mc.hpp"

using medianbm::CounterRng;
using medianbm::derive_key;
using medianbm::MCEstimate;
using medianbm::parallel_map;
using medianbm::stable_sum;
using medianbm::summarize;
using medianbm::summarize_frequency;

TEST_CASE("keyed streams match the frozen reference sequences", "[mc]") {
    CounterRng a(0);
    REQUIRE(a.next_u64() == 16294208416658607535ULL);
    REQUIRE(a.next_u64() == 7960286522194355700ULL);
    REQUIRE(a.next_u64() == 487617019471545679ULL);

    CounterRng b(0x0123456789abcdefULL);
    REQUIRE(b.next_u64() == 1547611027431991965ULL);
    REQUIRE(b.next_u64() == 15380727978956804243ULL);
    REQUIRE(b.next_u64() == 3427440727199435966ULL);

    CounterRng c(derive_key(42, 1));
    REQUIRE(c.next_u64() == 2590715125867489445ULL);
    REQUIRE(c.next_u64() == 17956947023962097068ULL);
    REQUIRE(c.next_u64() == 4344718176887769827ULL);
    REQUIRE(c.next_u64() == 2065828297261442123ULL);
}

TEST_CASE("derive_key separates every field", "[mc]") {
    REQUIRE(derive_key(42, 1, 0, 0) == 13681524006265712240ULL);
    REQUIRE(derive_key(42, 1, 7, 11) == 11457604538252116513ULL);
    REQUIRE(derive_key(0, 0, 0, 0) == 1826112205991530872ULL);

    // no additive trade-off between neighboring fields
    REQUIRE(derive_key(1, 0, 0, 0) != derive_key(0, 1, 0, 0));
    REQUIRE(derive_key(0, 1, 0, 0) != derive_key(0, 0, 1, 0));
    REQUIRE(derive_key(0, 0, 1, 0) != derive_key(0, 0, 0, 1));

    std::set<std::uint64_t> keys;
    int count = 0;
    for (std::uint64_t s = 0; s < 6; ++s)
        for (std::uint64_t t = 0; t < 6; ++t)
            for (std::uint64_t r = 0; r < 6; ++r)
                for (std::uint64_t p = 0; p < 6; ++p) {
                    keys.insert(derive_key(s, t, r, p));
                    ++count;
                }
    REQUIRE(static_cast<int>(keys.size()) == count);
}

TEST_CASE("uniform draws stay strictly inside the unit interval", "[mc]") {
    CounterRng rng(derive_key(42, 1));
    // first draw reproduces the mapping applied to the frozen word
    const double expected =
        (static_cast<double>(2590715125867489445ULL >> 11) + 0.5) * 0x1.0p-53;
    REQUIRE(rng.next_double() == expected);

    const int n = 100000;
    double sum = 0.0;
    for (int i = 0; i < n; ++i) {
        const double u = rng.next_double();
        REQUIRE(u > 0.0);
        REQUIRE(u < 1.0);
        sum += u;
    }
    // SE of the mean of Uniform(0,1) is 1/sqrt(12 n)
    const double se = 1.0 / std::sqrt(12.0 * n);
    REQUIRE(std::abs(sum / n - 0.5) < 4.0 * se);
}

TEST_CASE("gaussian draws have unit moments and replay exactly", "[mc]") {
    const std::uint64_t key = derive_key(7, 2, 3);
    CounterRng rng(key);
    const int n = 200000;
    double sum = 0.0, sumsq = 0.0;
    for (int i = 0; i < n; ++i) {
        const double g = rng.next_gaussian();
        REQUIRE(std::isfinite(g));
        sum += g;
        sumsq += g * g;
    }
    const double mean = sum / n;
    const double var = sumsq / n - mean * mean;
    REQUIRE(std::abs(mean) < 4.0 / std::sqrt(static_cast<double>(n)));
    REQUIRE(std::abs(var - 1.0) < 4.0 * std::sqrt(2.0 / n));

    // same key, fresh instance: identical draws including the cached spare
    CounterRng r1(key), r2(key);
    for (int i = 0; i < 9; ++i) REQUIRE(r1.next_gaussian() == r2.next_gaussian());
}

TEST_CASE("parallel_map output is invariant to worker count", "[mc]") {
    const std::int64_t reps = 1000;
    auto job = [](std::int64_t r) {
        CounterRng rng(derive_key(7, 3, static_cast<std::uint64_t>(r)));
        return rng.next_gaussian() + rng.next_gaussian() + rng.next_gaussian();
    };
    const auto base = parallel_map(reps, 1, job);
    for (int workers : {2, 3, 8}) {
        const auto got = parallel_map(reps, workers, job);
        REQUIRE(got.size() == base.size());
        for (std::size_t i = 0; i < base.size(); ++i) REQUIRE(got[i] == base[i]);
    }
}

TEST_CASE("parallel_map propagates worker exceptions", "[mc]") {
    auto job = [](std::int64_t r) -> double {
        if (r == 37) throw std::runtime_error("boom");
        return static_cast<double>(r);
    };
    REQUIRE_THROWS_AS(parallel_map(100, 4, job), std::runtime_error);
    REQUIRE_THROWS_AS(parallel_map(-1, 4, job), std::invalid_argument);
    REQUIRE(parallel_map(0, 4, job).empty());

    // indices below the failure point are still computed somewhere;
    // a clean run with the same shape stays ordered by index
    auto ok = parallel_map(50, 4, [](std::int64_t r) { return double(r); });
    for (std::size_t i = 0; i < ok.size(); ++i)
        REQUIRE(ok[i] == static_cast<double>(i));
}

TEST_CASE("summaries use unbiased variance and binomial SE", "[mc]") {
    const auto est = summarize({1.0, 2.0, 3.0, 4.0}, 99);
    REQUIRE(est.mean == 2.5);
    REQUIRE_THAT(est.std_err,
                 Catch::Matchers::WithinRel(0.6454972243679028, 1e-15));
    REQUIRE(est.reps == 4);
    REQUIRE(est.seed == 99);
    REQUIRE_FALSE(est.low_count);

    const auto one = summarize({3.25}, 1);
    REQUIRE(one.mean == 3.25);
    REQUIRE(one.std_err == 0.0);

    const auto freq = summarize_frequency(3, 100, 5);
    REQUIRE(freq.mean == 0.03);
    REQUIRE_THAT(freq.std_err,
                 Catch::Matchers::WithinRel(0.01705872210923198, 1e-14));
    REQUIRE(freq.low_count);

    REQUIRE_FALSE(summarize_frequency(50, 100, 5).low_count);
    REQUIRE(summarize_frequency(95, 100, 5).low_count);  // few misses
    REQUIRE(summarize_frequency(0, 1000, 5).low_count);

    REQUIRE_THROWS_AS(summarize({}, 0), std::invalid_argument);
    REQUIRE_THROWS_AS(summarize_frequency(5, 0, 0), std::invalid_argument);
    REQUIRE_THROWS_AS(summarize_frequency(11, 10, 0), std::invalid_argument);
    REQUIRE_THROWS_AS(summarize_frequency(-1, 10, 0), std::invalid_argument);
}

TEST_CASE("stable_sum cancels adversarial rounding", "[mc]") {
    REQUIRE(stable_sum({1e16, 1.0, -1e16}) == 1.0);
    REQUIRE(stable_sum({}) == 0.0);
    std::vector<double> alt;
    for (int i = 0; i < 1000; ++i) alt.push_back(i % 2 == 0 ? 0.1 : -0.1);
    REQUIRE(std::abs(stable_sum(alt)) < 1e-15);
}

TEST_CASE("default worker count honors the environment override", "[mc]") {
    setenv("MEDIANBM_THREADS", "3", 1);
    REQUIRE(medianbm::default_workers() == 3);
    setenv("MEDIANBM_THREADS", "not-a-number", 1);
    REQUIRE(medianbm::default_workers() >= 1);
    unsetenv("MEDIANBM_THREADS");
    REQUIRE(medianbm::default_workers() >= 1);
}
