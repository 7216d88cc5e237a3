#pragma once

// Grid search for age-optimal (m, k) operating points.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "timelyfl/age_model.hpp"
#include "timelyfl/protocol_sim.hpp"

namespace timelyfl {

struct IntRange {
    int lo = 1;
    int hi = 1;

    bool contains(int v) const noexcept { return v >= lo && v <= hi; }
    bool operator==(const IntRange&) const = default;
};

enum class Objective { Analytic, Simulated };

std::string_view to_string(Objective objective) noexcept;
std::optional<Objective> parse_objective(std::string_view name) noexcept;

struct SweepSpec {
    // n, rates, c and downlink; m and k are ignored.
    SystemParams fixed;
    // Swept m values; unset means 1..n.
    std::optional<IntRange> sweep_m;
    // Swept k values, clipped to k <= m at each m; unset means 1..m.
    std::optional<IntRange> sweep_k;
    Objective objective = Objective::Analytic;
    std::int64_t sim_iterations = 100'000;
    std::uint64_t seed = 0;
    // Worker threads for the simulated objective; 0 means hardware concurrency.
    unsigned threads = 0;
};

struct SweepRow {
    int m = 0;
    int k = 0;
    double age = 0.0;
    double mean_iteration_time = 0.0;
};

struct SweepResult {
    std::vector<SweepRow> rows;  // sorted by (m, k)
    SweepRow argmin;
    Objective objective_kind = Objective::Analytic;
};

void validate(const SweepSpec& spec);

// Evaluates every (m, k) grid point. Ties in age go to the smaller k, then the
// smaller m. Simulated grid point (m, k) uses seed substream_seed(spec.seed,
// m * (n + 1) + k).
SweepResult sweep(const SweepSpec& spec);

// Row with minimal age; ties broken toward smaller k, then smaller m.
SweepRow argmin_of(const std::vector<SweepRow>& rows);

enum class FigureId { Fig3, Fig4, Fig5, Fig6 };

std::string_view to_string(FigureId figure) noexcept;
std::optional<FigureId> parse_figure(std::string_view name) noexcept;

// One family member of a figure: the full search (best) and the age-vs-k
// curve drawn at the optimal m (figs 3-5) or at the fixed m (fig 6).
struct FigureCurve {
    std::string parameter;  // "mu_up", "lambda", "c" or "m"
    double value = 0.0;
    SystemParams params;    // m, k set to the optimum
    SweepResult search;
    SweepResult curve;
};

struct FigureFamily {
    std::string parameter;
    double value = 0.0;
    SystemParams base;
    std::optional<int> fixed_m;
};

// Parameter families: fig3 varies mu_up, fig4 lambda, fig5 c, fig6 fixed m.
std::vector<FigureFamily> figure_families(FigureId figure, int n);

std::vector<FigureCurve> reproduce_figure(FigureId figure, int n, std::uint64_t seed,
                                          Objective objective = Objective::Analytic,
                                          std::int64_t sim_iterations = 100'000);

}  // namespace timelyfl
