#include "timelyfl/order_stats.hpp"

#include <string>

#include "timelyfl/errors.hpp"

namespace timelyfl {

HarmonicCache::HarmonicCache(std::size_t max_index) : h_(max_index + 1, 0.0), g_(max_index + 1, 0.0) {
    if (max_index == 0) {
        throw DomainError("HarmonicCache: max_index must be positive");
    }
    for (std::size_t j = 1; j <= max_index; ++j) {
        const double x = static_cast<double>(j);
        h_[j] = h_[j - 1] + 1.0 / x;
        g_[j] = g_[j - 1] + 1.0 / (x * x);
    }
}

double HarmonicCache::h(std::size_t i) const {
    if (i >= h_.size()) {
        throw CapacityError("harmonic index " + std::to_string(i) + " exceeds cache capacity " +
                            std::to_string(max_index()));
    }
    return h_[i];
}

double HarmonicCache::g(std::size_t i) const {
    if (i >= g_.size()) {
        throw CapacityError("harmonic index " + std::to_string(i) + " exceeds cache capacity " +
                            std::to_string(max_index()));
    }
    return g_[i];
}

const HarmonicCache& default_harmonics() {
    static const HarmonicCache cache(kDefaultHarmonicCapacity);
    return cache;
}

double harmonic(const HarmonicCache& cache, std::size_t i) { return cache.h(i); }

double harmonic2(const HarmonicCache& cache, std::size_t i) { return cache.g(i); }

namespace {

void check_order_args(int i, int n, double rate) {
    if (n < 1 || i < 1 || i > n) {
        throw DomainError("order statistic requires 1 <= i <= n (got i=" + std::to_string(i) +
                          ", n=" + std::to_string(n) + ")");
    }
    if (!(rate > 0.0)) {
        throw DomainError("order statistic requires rate > 0");
    }
}

}  // namespace

double exp_order_mean(const HarmonicCache& cache, int i, int n, double rate) {
    check_order_args(i, n, rate);
    return (cache.h(n) - cache.h(n - i)) / rate;
}

double exp_order_var(const HarmonicCache& cache, int i, int n, double rate) {
    check_order_args(i, n, rate);
    return (cache.g(n) - cache.g(n - i)) / (rate * rate);
}

ExpOrderMoments exp_order_moments(const HarmonicCache& cache, int i, int n, double rate) {
    return {exp_order_mean(cache, i, n, rate), exp_order_var(cache, i, n, rate), i, n, rate};
}

double mean_order_prefix_avg(const HarmonicCache& cache, int k, int m, double rate) {
    check_order_args(k, m, rate);
    const double tail = static_cast<double>(m - k) / static_cast<double>(k);
    return (1.0 - tail * (cache.h(m) - cache.h(m - k))) / rate;
}

IdentitySides harmonic_prefix_identity(const HarmonicCache& cache, int k) {
    if (k < 1) {
        throw DomainError("harmonic_prefix_identity requires k >= 1");
    }
    IdentitySides sides;
    for (int i = 1; i <= k; ++i) {
        sides.lhs += cache.h(i);
    }
    sides.rhs = (k + 1.0) * (cache.h(k + 1) - 1.0);
    return sides;
}

}  // namespace timelyfl
