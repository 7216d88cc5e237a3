#include "timelyfl/sweep_opt.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>

#include "timelyfl/errors.hpp"

namespace timelyfl {

std::string_view to_string(Objective objective) noexcept {
    return objective == Objective::Analytic ? "analytic" : "simulated";
}

std::optional<Objective> parse_objective(std::string_view name) noexcept {
    if (name == "analytic") return Objective::Analytic;
    if (name == "simulated") return Objective::Simulated;
    return std::nullopt;
}

std::string_view to_string(FigureId figure) noexcept {
    switch (figure) {
        case FigureId::Fig3: return "fig3";
        case FigureId::Fig4: return "fig4";
        case FigureId::Fig5: return "fig5";
        case FigureId::Fig6: return "fig6";
    }
    return "unknown";
}

std::optional<FigureId> parse_figure(std::string_view name) noexcept {
    if (name == "fig3") return FigureId::Fig3;
    if (name == "fig4") return FigureId::Fig4;
    if (name == "fig5") return FigureId::Fig5;
    if (name == "fig6") return FigureId::Fig6;
    return std::nullopt;
}

void validate(const SweepSpec& spec) {
    SystemParams probe = spec.fixed;
    probe.m = probe.n;
    probe.k = 1;
    validate(probe);
    const int n = spec.fixed.n;
    if (spec.sweep_m && (spec.sweep_m->lo < 1 || spec.sweep_m->hi > n || spec.sweep_m->lo > spec.sweep_m->hi)) {
        throw DomainError("sweep m range must satisfy 1 <= lo <= hi <= n");
    }
    if (spec.sweep_k && (spec.sweep_k->lo < 1 || spec.sweep_k->hi > n || spec.sweep_k->lo > spec.sweep_k->hi)) {
        throw DomainError("sweep k range must satisfy 1 <= lo <= hi <= n");
    }
    if (spec.sweep_k) {
        const int m_hi = spec.sweep_m ? spec.sweep_m->hi : n;
        if (spec.sweep_k->lo > m_hi) {
            throw DomainError("sweep k range lies entirely above the largest swept m");
        }
    }
    if (spec.objective == Objective::Analytic && !spec.fixed.mu_down.is_instantaneous()) {
        throw DomainError("analytic objective requires an instantaneous downlink; use the simulated objective");
    }
    if (spec.objective == Objective::Simulated && spec.sim_iterations < 2) {
        throw DomainError("simulated objective requires sim_iterations >= 2");
    }
}

SweepRow argmin_of(const std::vector<SweepRow>& rows) {
    if (rows.empty()) {
        throw DomainError("argmin of an empty sweep");
    }
    const auto better = [](const SweepRow& a, const SweepRow& b) {
        if (a.age != b.age) return a.age < b.age;
        if (a.k != b.k) return a.k < b.k;
        return a.m < b.m;
    };
    return *std::min_element(rows.begin(), rows.end(), better);
}

namespace {

void evaluate_analytic(const SystemParams& fixed, SweepRow& row) {
    SystemParams p = fixed;
    p.m = row.m;
    p.k = row.k;
    const auto a = age_exact(p);
    row.age = a.total;
    row.mean_iteration_time = a.mean_Y;
}

void evaluate_simulated(const SweepSpec& spec, SweepRow& row) {
    SystemParams p = spec.fixed;
    p.m = row.m;
    p.k = row.k;
    const auto stream = static_cast<std::uint64_t>(row.m) * (spec.fixed.n + 1) + row.k;
    const auto r = simulate(p, SchemeKind::EarliestKofM, spec.sim_iterations, default_warmup(spec.sim_iterations),
                            substream_seed(spec.seed, stream));
    row.age = r.mean_avg_age;
    row.mean_iteration_time = r.mean_iteration_time;
}

}  // namespace

SweepResult sweep(const SweepSpec& spec) {
    validate(spec);
    const int n = spec.fixed.n;
    const IntRange ms = spec.sweep_m.value_or(IntRange{1, n});

    SweepResult result;
    result.objective_kind = spec.objective;
    for (int m = ms.lo; m <= ms.hi; ++m) {
        const int k_lo = spec.sweep_k ? spec.sweep_k->lo : 1;
        const int k_hi = std::min(m, spec.sweep_k ? spec.sweep_k->hi : m);
        for (int k = k_lo; k <= k_hi; ++k) {
            result.rows.push_back({m, k, 0.0, 0.0});
        }
    }
    if (result.rows.empty()) {
        throw DomainError("sweep grid is empty");
    }

    if (spec.objective == Objective::Analytic) {
        for (auto& row : result.rows) evaluate_analytic(spec.fixed, row);
    } else {
        unsigned workers = spec.threads ? spec.threads : std::max(1u, std::thread::hardware_concurrency());
        workers = std::min<unsigned>(workers, static_cast<unsigned>(result.rows.size()));
        std::atomic<std::size_t> next{0};
        std::exception_ptr failure;
        std::mutex failure_mutex;
        auto work = [&] {
            for (std::size_t i = next++; i < result.rows.size(); i = next++) {
                try {
                    evaluate_simulated(spec, result.rows[i]);
                } catch (...) {
                    std::lock_guard lock(failure_mutex);
                    if (!failure) failure = std::current_exception();
                }
            }
        };
        std::vector<std::jthread> pool;
        for (unsigned w = 1; w < workers; ++w) pool.emplace_back(work);
        work();
        pool.clear();
        if (failure) std::rethrow_exception(failure);
    }
    result.argmin = argmin_of(result.rows);
    return result;
}

std::vector<FigureFamily> figure_families(FigureId figure, int n) {
    if (n < 2) {
        throw DomainError("figure reproduction requires n >= 2");
    }
    SystemParams base;
    base.n = n;
    base.m = n;
    base.k = 1;
    base.lambda = 1.0;
    base.mu_up = 1.0;
    base.c = 1.0;

    std::vector<FigureFamily> out;
    switch (figure) {
        case FigureId::Fig3:
            for (double v : {0.1, 0.2, 0.5, 1.0, 5.0}) {
                auto p = base;
                p.mu_up = v;
                out.push_back({"mu_up", v, p, std::nullopt});
            }
            break;
        case FigureId::Fig4:
            for (double v : {0.1, 0.2, 0.5, 1.0, 5.0}) {
                auto p = base;
                p.lambda = v;
                out.push_back({"lambda", v, p, std::nullopt});
            }
            break;
        case FigureId::Fig5:
            for (double v : {0.1, 1.0, 5.0, 10.0}) {
                auto p = base;
                p.c = v;
                out.push_back({"c", v, p, std::nullopt});
            }
            break;
        case FigureId::Fig6:
            for (int m : {20, 40, 60, 80, 100}) {
                if (m > n) continue;
                out.push_back({"m", static_cast<double>(m), base, m});
            }
            if (out.empty()) {
                throw DomainError("fig6 needs n >= 20");
            }
            break;
    }
    return out;
}

std::vector<FigureCurve> reproduce_figure(FigureId figure, int n, std::uint64_t seed, Objective objective,
                                          std::int64_t sim_iterations) {
    std::vector<FigureCurve> curves;
    std::uint64_t member = 0;
    for (const auto& fam : figure_families(figure, n)) {
        SweepSpec spec;
        spec.fixed = fam.base;
        spec.objective = objective;
        spec.sim_iterations = sim_iterations;
        spec.seed = substream_seed(seed, member++);
        if (fam.fixed_m) spec.sweep_m = IntRange{*fam.fixed_m, *fam.fixed_m};

        FigureCurve fc;
        fc.parameter = fam.parameter;
        fc.value = fam.value;
        fc.search = sweep(spec);
        fc.params = fam.base;
        fc.params.m = fc.search.argmin.m;
        fc.params.k = fc.search.argmin.k;
        if (fam.fixed_m) {
            fc.curve = fc.search;
        } else {
            fc.curve.objective_kind = objective;
            for (const auto& row : fc.search.rows) {
                if (row.m == fc.search.argmin.m) fc.curve.rows.push_back(row);
            }
            fc.curve.argmin = argmin_of(fc.curve.rows);
        }
        curves.push_back(std::move(fc));
    }
    return curves;
}

}  // namespace timelyfl
