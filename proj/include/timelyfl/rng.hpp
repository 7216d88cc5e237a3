#pragma once

// Seeded random streams.
//
// Every stochastic component draws from a std::mt19937_64 seeded through
// substream_seed(master, stream_id). Two streams with distinct ids are
// statistically independent, and a stream's sequence depends only on the
// (master, stream_id) pair, so parallel work is reproducible regardless of
// scheduling. Uniform and exponential draws are computed here rather than
// through <random> distributions, whose output is implementation-defined.

#include <cstdint>
#include <random>

namespace timelyfl {

using Engine = std::mt19937_64;

// SplitMix64 finalizer.
std::uint64_t mix64(std::uint64_t x) noexcept;

// Seed of substream `stream` derived from `master`:
//   mix64(master ^ mix64(stream + 0x9E3779B97F4A7C15))
std::uint64_t substream_seed(std::uint64_t master, std::uint64_t stream) noexcept;

inline Engine make_engine(std::uint64_t master, std::uint64_t stream) {
    return Engine(substream_seed(master, stream));
}

// Uniform on [0, 1) with 53 random bits.
double uniform01(Engine& eng) noexcept;

// Uniform integer on [0, bound), bound > 0, without modulo bias.
std::uint64_t uniform_index(Engine& eng, std::uint64_t bound) noexcept;

// Exp(rate) via inversion.
double draw_exponential(Engine& eng, double rate) noexcept;

// Standard normal via Box-Muller (one value per call).
double draw_normal(Engine& eng) noexcept;

}  // namespace timelyfl
