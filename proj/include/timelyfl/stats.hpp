#pragma once

#include <cstdint>

namespace timelyfl {

// Streaming mean/variance (Welford) with a pairwise merge (Chan et al.).
// merge() is associative up to floating-point rounding, so partial results
// from independent runs can be combined in any order.
struct RunningMoments {
    std::int64_t count = 0;
    double mean = 0.0;
    double m2 = 0.0;

    void add(double x) noexcept {
        ++count;
        const double d1 = x - mean;
        mean += d1 / static_cast<double>(count);
        m2 += d1 * (x - mean);
    }

    void merge(const RunningMoments& other) noexcept {
        if (other.count == 0) return;
        if (count == 0) {
            *this = other;
            return;
        }
        const double n1 = static_cast<double>(count);
        const double n2 = static_cast<double>(other.count);
        const double delta = other.mean - mean;
        const double total = n1 + n2;
        mean += delta * n2 / total;
        m2 += other.m2 + delta * delta * n1 * n2 / total;
        count += other.count;
    }

    // Population variance (denominator count).
    double variance() const noexcept { return count > 0 ? m2 / static_cast<double>(count) : 0.0; }
    // Sample variance (denominator count - 1).
    double sample_variance() const noexcept { return count > 1 ? m2 / static_cast<double>(count - 1) : 0.0; }
};

}  // namespace timelyfl
