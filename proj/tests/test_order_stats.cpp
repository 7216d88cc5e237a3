#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "catch_amalgamated.hpp"
#include "timelyfl/errors.hpp"
#include "timelyfl/order_stats.hpp"

using namespace timelyfl;
using Catch::Approx;

namespace {

// Backward summation in extended precision, independent of the cache.
long double harmonic_oracle(int n, int power) {
    long double s = 0.0L;
    for (int j = n; j >= 1; --j) {
        long double x = j;
        s += power == 1 ? 1.0L / x : 1.0L / (x * x);
    }
    return s;
}

struct Empirical {
    double mean;
    double variance;
};

// i-th smallest of n i.i.d. Exp(rate), drawn with <random>.
Empirical sample_order_stat(int i, int n, double rate, int draws, unsigned seed) {
    std::mt19937_64 eng(seed);
    std::exponential_distribution<double> exp(rate);
    std::vector<double> buf(n);
    double sum = 0.0, sq = 0.0;
    for (int d = 0; d < draws; ++d) {
        for (auto& x : buf) x = exp(eng);
        std::nth_element(buf.begin(), buf.begin() + (i - 1), buf.end());
        const double v = buf[i - 1];
        sum += v;
        sq += v * v;
    }
    const double mean = sum / draws;
    return {mean, sq / draws - mean * mean};
}

}  // namespace

TEST_CASE("harmonic numbers", "[order_stats]") {
    const auto& hc = default_harmonics();
    CHECK(harmonic(hc, 0) == 0.0);
    CHECK(harmonic(hc, 1) == 1.0);
    CHECK(harmonic(hc, 2) == 1.5);
    CHECK(std::abs(harmonic(hc, 100) - static_cast<double>(harmonic_oracle(100, 1))) < 1e-13);
    CHECK(std::abs(harmonic(hc, 100) - 5.18737751763962) < 1e-13);

    CHECK(harmonic2(hc, 0) == 0.0);
    CHECK(harmonic2(hc, 1) == 1.0);
    CHECK(std::abs(harmonic2(hc, 1'000'000) - std::numbers::pi * std::numbers::pi / 6.0) < 1e-6);
    CHECK(std::abs(harmonic2(hc, 5000) - static_cast<double>(harmonic_oracle(5000, 2))) < 1e-13);
}

TEST_CASE("harmonic cache increments and monotonicity", "[order_stats]") {
    const auto& hc = default_harmonics();
    REQUIRE(hc.max_index() == 1'000'000);
    for (std::size_t i = 1; i <= hc.max_index(); ++i) {
        const double x = static_cast<double>(i);
        REQUIRE(std::abs((hc.h(i) - hc.h(i - 1)) - 1.0 / x) < 1e-12);
        REQUIRE(std::abs((hc.g(i) - hc.g(i - 1)) - 1.0 / (x * x)) < 1e-12);
        REQUIRE(hc.h(i) > hc.h(i - 1));
        REQUIRE(hc.g(i) > hc.g(i - 1));
    }
}

TEST_CASE("capacity errors", "[order_stats]") {
    HarmonicCache small(10);
    CHECK(small.h(10) == Approx(7381.0 / 2520.0));
    CHECK_THROWS_AS(small.h(11), CapacityError);
    CHECK_THROWS_AS(harmonic2(small, 11), CapacityError);
    CHECK_THROWS_AS(exp_order_mean(small, 1, 11, 1.0), CapacityError);
    CHECK_THROWS_AS(HarmonicCache(0), DomainError);
}

TEST_CASE("exponential order statistic moments", "[order_stats]") {
    CHECK(exp_order_mean(1, 1, 1.0) == 1.0);
    CHECK(exp_order_mean(1, 10, 2.0) == Approx(0.05).epsilon(1e-14));
    CHECK(exp_order_var(1, 1, 1.0) == 1.0);
    CHECK(exp_order_var(1, 10, 1.0) == Approx(0.01).epsilon(1e-13));

    const auto& hc = default_harmonics();
    CHECK(exp_order_mean(79, 100, 1.0) == hc.h(100) - hc.h(21));
    CHECK(exp_order_var(50, 100, 1.0) == hc.g(100) - hc.g(50));

    const auto mom = exp_order_moments(3, 7, 2.5);
    CHECK(mom.order == 3);
    CHECK(mom.sample_size == 7);
    CHECK(mom.mean == exp_order_mean(3, 7, 2.5));

    CHECK_THROWS_AS(exp_order_mean(0, 5, 1.0), DomainError);
    CHECK_THROWS_AS(exp_order_mean(6, 5, 1.0), DomainError);
    CHECK_THROWS_AS(exp_order_var(1, 5, 0.0), DomainError);
    CHECK_THROWS_AS(exp_order_var(1, 5, -1.0), DomainError);
}

TEST_CASE("order statistic means are strictly increasing and top out at H_n", "[order_stats]") {
    const auto& hc = default_harmonics();
    for (int n : {1, 2, 7, 50, 333}) {
        for (double rate : {0.1, 1.0, 7.5}) {
            for (int i = 1; i < n; ++i) {
                REQUIRE(exp_order_mean(i, n, rate) < exp_order_mean(i + 1, n, rate));
                REQUIRE(exp_order_var(i, n, rate) > 0.0);
            }
            REQUIRE(exp_order_mean(n, n, rate) == hc.h(n) / rate);
        }
    }
}

TEST_CASE("prefix average of order statistic means matches naive summation", "[order_stats]") {
    CHECK(mean_order_prefix_avg(1, 1, 1.0) == 1.0);
    for (int m : {1, 2, 9, 64}) {
        CHECK(mean_order_prefix_avg(m, m, 0.7) == Approx(1.0 / 0.7).epsilon(1e-13));
    }
    const double naive35 = (exp_order_mean(1, 5, 1.0) + exp_order_mean(2, 5, 1.0) + exp_order_mean(3, 5, 1.0)) / 3.0;
    CHECK(mean_order_prefix_avg(3, 5, 1.0) == Approx(naive35).epsilon(1e-14));

    for (int m = 1; m <= 500; ++m) {
        double running = 0.0;
        for (int k = 1; k <= m; ++k) {
            running += exp_order_mean(k, m, 1.3);
            const double naive = running / k;
            REQUIRE(std::abs(mean_order_prefix_avg(k, m, 1.3) - naive) <= 1e-10 * naive);
        }
    }
    CHECK_THROWS_AS(mean_order_prefix_avg(0, 5, 1.0), DomainError);
    CHECK_THROWS_AS(mean_order_prefix_avg(6, 5, 1.0), DomainError);
}

TEST_CASE("harmonic prefix identity", "[order_stats]") {
    auto one = harmonic_prefix_identity(1);
    CHECK(one.lhs == 1.0);
    CHECK(one.rhs == Approx(1.0).epsilon(1e-15));
    auto two = harmonic_prefix_identity(2);
    CHECK(two.lhs == 2.5);
    CHECK(two.rhs == Approx(2.5).epsilon(1e-15));

    long double oracle = 0.0L;
    for (int i = 1; i <= 1000; ++i) oracle += harmonic_oracle(i, 1);
    const auto big = harmonic_prefix_identity(1000);
    CHECK(std::abs(big.lhs - big.rhs) <= 1e-9 * big.rhs);
    CHECK(std::abs(big.rhs - static_cast<double>(oracle)) <= 1e-9 * big.rhs);

    for (int k : {3, 10, 999, 12'345, 100'000}) {
        const auto s = harmonic_prefix_identity(k);
        REQUIRE(std::abs(s.lhs - s.rhs) <= 1e-9 * s.rhs);
    }
    CHECK_THROWS_AS(harmonic_prefix_identity(0), DomainError);
}

TEST_CASE("Monte-Carlo cross-check of order statistic moments", "[order_stats][mc]") {
    struct Case {
        int i, n, draws;
    };
    for (auto [i, n, draws] : {Case{1, 10, 1'000'000}, Case{5, 10, 1'000'000}, Case{10, 10, 1'000'000},
                               Case{79, 100, 200'000}}) {
        const auto emp = sample_order_stat(i, n, 1.0, draws, 1234u + i);
        INFO("i=" << i << " n=" << n);
        CHECK(emp.mean == Approx(exp_order_mean(i, n, 1.0)).epsilon(0.005));
        CHECK(emp.variance == Approx(exp_order_var(i, n, 1.0)).epsilon(0.02));
    }
}
