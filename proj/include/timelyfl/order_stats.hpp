#pragma once

// Moments of order statistics of i.i.d. exponential random variables.
//
// For Z_1..Z_n i.i.d. Exp(rate), the i-th smallest Z_{i:n} satisfies
//
//   E[Z_{i:n}]   = (H_n - H_{n-i}) / rate
//   Var[Z_{i:n}] = (G_n - G_{n-i}) / rate^2
//
// with H_n = sum 1/j and G_n = sum 1/j^2 (H_0 = G_0 = 0).
// Shifted exponentials are handled by callers: a common additive offset
// shifts every order statistic by the same constant.

#include <cstddef>
#include <vector>

namespace timelyfl {

// Forward-summed tables of H_i and G_i for 0 <= i <= max_index.
// Immutable after construction.
class HarmonicCache {
public:
    explicit HarmonicCache(std::size_t max_index);

    std::size_t max_index() const noexcept { return h_.size() - 1; }

    // Throw CapacityError when i > max_index().
    double h(std::size_t i) const;
    double g(std::size_t i) const;

private:
    std::vector<double> h_;
    std::vector<double> g_;
};

inline constexpr std::size_t kDefaultHarmonicCapacity = 1'000'000;

// Process-wide cache with kDefaultHarmonicCapacity entries, built on first use.
const HarmonicCache& default_harmonics();

double harmonic(const HarmonicCache& cache, std::size_t i);
double harmonic2(const HarmonicCache& cache, std::size_t i);

struct ExpOrderMoments {
    double mean = 0.0;
    double variance = 0.0;
    int order = 0;
    int sample_size = 0;
    double rate = 0.0;
};

double exp_order_mean(const HarmonicCache& cache, int i, int n, double rate);
double exp_order_var(const HarmonicCache& cache, int i, int n, double rate);
ExpOrderMoments exp_order_moments(const HarmonicCache& cache, int i, int n, double rate);

inline double exp_order_mean(int i, int n, double rate) {
    return exp_order_mean(default_harmonics(), i, n, rate);
}
inline double exp_order_var(int i, int n, double rate) {
    return exp_order_var(default_harmonics(), i, n, rate);
}
inline ExpOrderMoments exp_order_moments(int i, int n, double rate) {
    return exp_order_moments(default_harmonics(), i, n, rate);
}

// (1/k) * sum_{i=1..k} E[X_{i:m}] for X ~ Exp(rate), in closed form:
//   (1/rate) * (1 - ((m - k) / k) * (H_m - H_{m-k}))
double mean_order_prefix_avg(const HarmonicCache& cache, int k, int m, double rate);
inline double mean_order_prefix_avg(int k, int m, double rate) {
    return mean_order_prefix_avg(default_harmonics(), k, m, rate);
}

struct IdentitySides {
    double lhs = 0.0;
    double rhs = 0.0;
};

// sum_{i=1..k} H_i  versus  (k + 1) * (H_{k+1} - 1).
IdentitySides harmonic_prefix_identity(const HarmonicCache& cache, int k);
inline IdentitySides harmonic_prefix_identity(int k) {
    return harmonic_prefix_identity(default_harmonics(), k);
}

}  // namespace timelyfl
