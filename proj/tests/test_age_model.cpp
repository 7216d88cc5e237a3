#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "catch_amalgamated.hpp"
#include "timelyfl/age_model.hpp"
#include "timelyfl/errors.hpp"
#include "timelyfl/order_stats.hpp"

using namespace timelyfl;
using Catch::Approx;

namespace {

SystemParams make(int n, int m, int k, double lambda, double mu_up, double c) {
    SystemParams p;
    p.n = n;
    p.m = m;
    p.k = k;
    p.lambda = lambda;
    p.mu_up = mu_up;
    p.c = c;
    return p;
}

}  // namespace

TEST_CASE("parameter validation names the violated constraint", "[age_model]") {
    CHECK_NOTHROW(validate(make(10, 5, 3, 1, 1, 0)));
    CHECK_THROWS_WITH(validate(make(10, 5, 0, 1, 1, 1)), Catch::Matchers::ContainsSubstring("k must satisfy"));
    CHECK_THROWS_WITH(validate(make(10, 5, 6, 1, 1, 1)), Catch::Matchers::ContainsSubstring("k must satisfy"));
    CHECK_THROWS_WITH(validate(make(10, 11, 3, 1, 1, 1)), Catch::Matchers::ContainsSubstring("m must satisfy"));
    CHECK_THROWS_AS(validate(make(0, 0, 0, 1, 1, 1)), DomainError);
    CHECK_THROWS_AS(validate(make(10, 5, 3, 0, 1, 1)), DomainError);
    CHECK_THROWS_AS(validate(make(10, 5, 3, 1, -1, 1)), DomainError);
    CHECK_THROWS_AS(validate(make(10, 5, 3, 1, 1, -0.5)), DomainError);
    auto p = make(10, 5, 3, 1, 1, 1);
    p.mu_down = Downlink::exponential(0.0);
    CHECK_THROWS_AS(validate(p), DomainError);
}

TEST_CASE("iteration time moments", "[age_model]") {
    auto y = iteration_time_moments(make(1, 1, 1, 1, 1, 0));
    CHECK(y.mean == Approx(2.0).epsilon(1e-15));
    CHECK(y.variance == Approx(2.0).epsilon(1e-15));

    y = iteration_time_moments(make(100, 1, 1, 1, 1, 1));
    CHECK(y.mean == Approx(2.01).epsilon(1e-14));

    auto finite = make(10, 5, 3, 1, 1, 1);
    finite.mu_down = Downlink::exponential(2.0);
    CHECK_THROWS_AS(iteration_time_moments(finite), DomainError);
    CHECK_THROWS_AS(age_exact(finite), DomainError);
}

TEST_CASE("iteration time moments against Monte-Carlo", "[age_model][mc]") {
    // Z_{90:100} ~ Exp(1) plus 1 + X_{79:90} ~ Exp(1), sampled with <random>.
    std::mt19937_64 eng(99);
    std::exponential_distribution<double> exp1(1.0);
    std::vector<double> z(100), x(90);
    const int draws = 200'000;
    double sum = 0.0, sq = 0.0;
    for (int d = 0; d < draws; ++d) {
        for (auto& v : z) v = exp1(eng);
        for (auto& v : x) v = exp1(eng);
        std::nth_element(z.begin(), z.begin() + 89, z.end());
        std::nth_element(x.begin(), x.begin() + 78, x.end());
        const double y = 1.0 + z[89] + x[78];
        sum += y;
        sq += y * y;
    }
    const double mean = sum / draws;
    const auto y = iteration_time_moments(make(100, 90, 79, 1, 1, 1));
    CHECK(mean == Approx(y.mean).epsilon(0.002));
    CHECK(sq / draws - mean * mean == Approx(y.variance).epsilon(0.03));
}

TEST_CASE("mean conditional uplink delay", "[age_model]") {
    CHECK(mean_conditional_uplink(make(20, 7, 7, 1, 2.5, 0)) == Approx(1.0 / 2.5).epsilon(1e-14));
    CHECK(mean_conditional_uplink(make(10, 10, 1, 1, 1, 0)) == Approx(0.1).epsilon(1e-14));
    double naive = 0.0;
    for (int i = 1; i <= 5; ++i) naive += exp_order_mean(i, 10, 2.0);
    CHECK(mean_conditional_uplink(make(10, 10, 5, 1, 2, 0)) == Approx(naive / 5.0).epsilon(1e-14));
}

TEST_CASE("geometric update-cycle model", "[age_model]") {
    auto full = geometric_moments(8, 8, 8);
    CHECK(full.p == 1.0);
    CHECK(full.mean_M == 1.0);
    CHECK(full.second_moment_M == 1.0);

    auto half = geometric_moments(100, 80, 50);
    CHECK(half.mean_M == Approx(2.0));
    CHECK(half.second_moment_M == Approx(6.0));
    CHECK(half.p1 == Approx(0.8));
    CHECK(half.p2 == Approx(0.625));
    CHECK(half.p == half.p1 * half.p2);

    for (int n = 1; n <= 10'000; n += (n < 200 ? 1 : 37)) {
        for (int k = 1; k <= n; ++k) {
            const auto u = geometric_moments(n, n, k);
            const double expected = (2.0 * n - k) / (2.0 * k);
            REQUIRE(std::abs(u.age_coefficient() - expected) <= 1e-12 * expected);
            REQUIRE(u.second_moment_M >= u.mean_M * u.mean_M);
        }
    }
    CHECK_THROWS_AS(geometric_moments(10, 5, 6), DomainError);
    CHECK_THROWS_AS(geometric_moments(10, 5, 0), DomainError);
}

TEST_CASE("age_exact deterministic limit", "[age_model]") {
    for (int n : {1, 5, 50}) {
        const auto a = age_exact(make(n, n, n, 1e9, 1e9, 1.0));
        CHECK(a.total == Approx(0.5).epsilon(1e-6));
        CHECK(a.delta1 < 1e-6);
        CHECK(a.delta3 < 1e-6);
    }
}

TEST_CASE("age_exact decomposition matches primitives", "[age_model]") {
    std::mt19937_64 eng(7);
    std::uniform_int_distribution<int> nd(1, 300);
    std::uniform_real_distribution<double> rate(0.05, 10.0), cd(0.0, 10.0);
    for (int trial = 0; trial < 500; ++trial) {
        const int n = nd(eng);
        const int m = std::uniform_int_distribution<int>(1, n)(eng);
        const int k = std::uniform_int_distribution<int>(1, m)(eng);
        const auto p = make(n, m, k, rate(eng), rate(eng), cd(eng));
        const auto a = age_exact(p);

        const double ey = p.c + exp_order_mean(k, m, p.mu_up) + exp_order_mean(m, n, p.lambda);
        const double vy = exp_order_var(k, m, p.mu_up) + exp_order_var(m, n, p.lambda);
        double d1 = 0.0;
        for (int i = 1; i <= k; ++i) d1 += exp_order_mean(i, m, p.mu_up);
        d1 /= k;
        const double total = d1 + (2.0 * n - k) / (2.0 * k) * ey + vy / (2.0 * ey);

        REQUIRE(std::abs(a.total - total) <= 1e-12 * total);
        REQUIRE(std::abs(a.total - (a.delta1 + a.delta2 + a.delta3)) <= 1e-12 * a.total);
        REQUIRE(a.delta1 >= 0.0);
        REQUIRE(a.delta2 >= 0.0);
        REQUIRE(a.delta3 >= 0.0);
        REQUIRE(a.mean_Y > 0.0);
    }
}

TEST_CASE("age_exact decreases toward the availability-free value as lambda grows", "[age_model]") {
    const int n = 50;
    double previous = age_exact(make(n, n, 20, 0.01, 1.0, 1.0)).total;
    for (double lambda : {0.03, 0.1, 0.3, 1.0, 3.0, 10.0, 100.0, 1e4, 1e8}) {
        const double now = age_exact(make(n, n, 20, lambda, 1.0, 1.0)).total;
        REQUIRE(now < previous);
        previous = now;
    }
    // with Z removed: delta1 + (2n-k)/(2k) (c + E[X_{k:m}]) + Var[X_{k:m}] / (2 (c + E[X_{k:m}]))
    const double es = 1.0 + exp_order_mean(20, n, 1.0);
    const double limit = mean_order_prefix_avg(20, n, 1.0) + (2.0 * n - 20) / 40.0 * es +
                         exp_order_var(20, n, 1.0) / (2.0 * es);
    CHECK(previous == Approx(limit).epsilon(1e-6));
}

TEST_CASE("age_approx closed form", "[age_model]") {
    CHECK(age_approx({0.5, 0.5}, 1e9, 1.0, 0.0) == Approx(1.0 + 2.5 * std::log(2.0)).epsilon(1e-8));
    CHECK(age_approx({0.5, 0.5}, 1e9, 1.0, 0.0) == Approx(2.733).margin(5e-4));

    const double ab = 0.7 * 0.4;
    const double diff = age_approx({0.7, 0.4}, 0.3, 2.0, 10.0) - age_approx({0.7, 0.4}, 0.3, 2.0, 1.0);
    CHECK(diff == Approx((2.0 - ab) * 9.0 / (2.0 * ab)).epsilon(1e-12));

    CHECK_THROWS_AS(age_approx({0.0, 0.5}, 1, 1, 1), DomainError);
    CHECK_THROWS_AS(age_approx({1.0, 0.5}, 1, 1, 1), DomainError);
    CHECK_THROWS_AS(age_approx({0.5, 0.0}, 1, 1, 1), DomainError);
    CHECK_THROWS_AS(age_approx({0.5, 1.0}, 1, 1, 1), DomainError);
    CHECK_THROWS_AS(age_approx({0.5, 0.5}, 0, 1, 1), DomainError);
}

TEST_CASE("age_approx tracks age_exact as n grows", "[age_model]") {
    const double approx = age_approx({0.9, 0.878}, 1.0, 1.0, 1.0);
    const double exact100 = age_exact(make(100, 90, 79, 1, 1, 1)).total;
    const double exact10k = age_exact(make(10'000, 9'000, 7'902, 1, 1, 1)).total;
    CHECK(std::abs(approx - exact100) / exact100 < 0.10);
    CHECK(std::abs(approx - exact10k) / exact10k < 0.02);

    const double half = age_approx({0.5, 0.5}, 1.0, 1.0, 1.0);
    double previous = 1e300;
    for (int n : {100, 1000, 10'000}) {
        const double exact = age_exact(make(n, n / 2, n / 4, 1, 1, 1)).total;
        const double err = std::abs(half - exact) / exact;
        REQUIRE(err < previous);
        previous = err;
    }
}
