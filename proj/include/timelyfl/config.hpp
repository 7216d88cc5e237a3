#pragma once

// Experiment configuration: a sectioned key-value text document.
//
//   # comment
//   [system]
//   n = 100
//   mu_down = instant
//   [run]
//   scheme = earliest-k-of-m
//   seed = 42
//
// Sections: [system] [run] [sweep] [fl]. Unknown sections or keys, repeated
// keys and malformed values raise ConfigError carrying the line number.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "timelyfl/age_model.hpp"
#include "timelyfl/fl_bench.hpp"
#include "timelyfl/protocol_sim.hpp"
#include "timelyfl/sweep_opt.hpp"

namespace timelyfl {

struct RunSection {
    // Unset scheme means all three schemes (comparison run).
    std::optional<SchemeKind> scheme = SchemeKind::EarliestKofM;
    std::int64_t iterations = 100'000;
    std::optional<std::int64_t> warmup;  // unset: default_warmup(iterations)
    std::optional<std::uint64_t> seed;
    int repeats = 1;
    RandomKWait random_k_wait = RandomKWait::SharedEpoch;

    bool operator==(const RunSection&) const = default;
};

struct SweepSection {
    std::optional<IntRange> m;
    std::optional<IntRange> k;
    Objective objective = Objective::Analytic;
    std::optional<FigureId> figure;

    bool operator==(const SweepSection&) const = default;
};

struct FlSection {
    FLConfig base;                 // scheme, k, seed and timing fields are filled per run
    std::vector<int> ks{10, 31, 40};
    std::vector<SchemeKind> schemes{SchemeKind::EarliestKofM};

    bool operator==(const FlSection&) const = default;
};

struct ExperimentConfig {
    SystemParams system;
    RunSection run;
    SweepSection sweep;
    FlSection fl;

    bool operator==(const ExperimentConfig&) const = default;
};

ExperimentConfig parse_config(std::string_view text);
ExperimentConfig load_config(const std::string& path);

// Canonical text; parse_config(to_config_text(c)) == c.
std::string to_config_text(const ExperimentConfig& config);

// "lo..hi" or a single integer.
std::optional<IntRange> parse_int_range(std::string_view text);
std::string format_int_range(const IntRange& range);

// Shortest decimal text that parses back to the same double.
std::string format_double(double value);

}  // namespace timelyfl
