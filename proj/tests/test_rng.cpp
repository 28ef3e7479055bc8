#include <catch2/catch_amalgamated.hpp>

#include "oracles.hpp"

#include <cmath>
#include <cstdint>
#include <vector>

using namespace endocal;

TEST_CASE("streams are reopenable and deterministic") {
    CounterRng a(42, "pose", 7);
    std::vector<std::uint64_t> first;
    for (int i = 0; i < 64; ++i) first.push_back(a.next_u64());

    CounterRng b(42, "pose", 7);
    for (int i = 0; i < 64; ++i) REQUIRE(b.next_u64() == first[static_cast<std::size_t>(i)]);
}

TEST_CASE("distinct keys give distinct streams") {
    CounterRng base(42, "pose", 7);
    CounterRng seed(43, "pose", 7);
    CounterRng purpose(42, "light", 7);
    CounterRng index(42, "pose", 8);
    const std::uint64_t v = base.next_u64();
    REQUIRE(seed.next_u64() != v);
    REQUIRE(purpose.next_u64() != v);
    REQUIRE(index.next_u64() != v);
}

TEST_CASE("draws from one stream never perturb another") {
    CounterRng a(5, "pose", 0);
    for (int i = 0; i < 1000; ++i) a.next_double();
    CounterRng b(5, "light", 0);
    CounterRng b_fresh(5, "light", 0);
    REQUIRE(b.next_u64() == b_fresh.next_u64());
}

TEST_CASE("uniform stays in range and handles degenerate intervals") {
    CounterRng r(1, "noise_b", 0);
    for (int i = 0; i < 10000; ++i) {
        const double v = r.uniform(-3.5, 12.25);
        REQUIRE(v >= -3.5);
        REQUIRE(v <= 12.25);
    }
    REQUIRE(r.uniform(4.0, 4.0) == 4.0);
    const double d = r.next_double();
    REQUIRE(d >= 0.0);
    REQUIRE(d < 1.0);
}

TEST_CASE("log_uniform stays in range") {
    CounterRng r(1, "light", 3);
    for (int i = 0; i < 10000; ++i) {
        const double v = r.log_uniform(5.0, 1e6);
        REQUIRE(v >= 5.0);
        REQUIRE(v <= 1e6 * (1.0 + 1e-12));
    }
    REQUIRE(r.log_uniform(2.0, 2.0) == 2.0);
}

TEST_CASE("uniform passes a Kolmogorov-Smirnov test at the 1 percent level") {
    CounterRng r(123, "background", 0);
    std::vector<double> samples(100000);
    for (double& s : samples) s = r.next_double();
    // critical value at alpha = 0.01 for n = 1e5: 1.628 / sqrt(n)
    const double crit = 1.628 / std::sqrt(100000.0);
    REQUIRE(oracle::ks_statistic(samples, [](double x) { return x; }) < crit);
}

TEST_CASE("log_uniform follows the log-uniform law") {
    const double lo = 5.0, hi = 1e6;
    CounterRng r(99, "light", 1);
    std::vector<double> samples(100000);
    for (double& s : samples) s = r.log_uniform(lo, hi);
    const double crit = 1.628 / std::sqrt(100000.0);
    const double denom = std::log(hi / lo);
    REQUIRE(oracle::ks_statistic(samples, [&](double x) {
                if (x <= lo) return 0.0;
                if (x >= hi) return 1.0;
                return std::log(x / lo) / denom;
            }) < crit);
}

TEST_CASE("uniform_index covers its range evenly") {
    CounterRng r(7, "appearance", 2);
    std::vector<int> counts(10, 0);
    for (int i = 0; i < 100000; ++i) {
        const std::uint64_t k = r.uniform_index(10);
        REQUIRE(k < 10);
        ++counts[static_cast<std::size_t>(k)];
    }
    for (int c : counts) {
        REQUIRE(c > 9000);
        REQUIRE(c < 11000);
    }
}

TEST_CASE("normal has plausible first moments") {
    CounterRng r(31, "noise_c", 0);
    double sum = 0.0, sumsq = 0.0;
    const int n = 100000;
    for (int i = 0; i < n; ++i) {
        const double v = r.normal();
        sum += v;
        sumsq += v * v;
    }
    const double mean = sum / n;
    const double var = sumsq / n - mean * mean;
    REQUIRE(std::abs(mean) < 0.02);
    REQUIRE(std::abs(var - 1.0) < 0.03);
}
