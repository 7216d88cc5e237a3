#include "timelyfl/age_model.hpp"

#include <cmath>
#include <string>

#include "timelyfl/errors.hpp"
#include "timelyfl/order_stats.hpp"

namespace timelyfl {

namespace {

void require(bool ok, const std::string& what) {
    if (!ok) {
        throw DomainError(what);
    }
}

void require_instantaneous(const SystemParams& params) {
    require(params.mu_down.is_instantaneous(),
            "analytic age model requires an instantaneous downlink (mu_down = instant)");
}

}  // namespace

void validate(const SystemParams& p) {
    require(p.n >= 1, "n must be >= 1 (got n=" + std::to_string(p.n) + ")");
    require(p.m >= 1 && p.m <= p.n,
            "m must satisfy 1 <= m <= n (got m=" + std::to_string(p.m) + ", n=" + std::to_string(p.n) + ")");
    require(p.k >= 1 && p.k <= p.m,
            "k must satisfy 1 <= k <= m (got k=" + std::to_string(p.k) + ", m=" + std::to_string(p.m) + ")");
    require(std::isfinite(p.lambda) && p.lambda > 0.0, "lambda must be a finite rate > 0");
    require(std::isfinite(p.mu_up) && p.mu_up > 0.0, "mu_up must be a finite rate > 0");
    if (!p.mu_down.is_instantaneous()) {
        const double r = p.mu_down.rate();
        require(std::isfinite(r) && r > 0.0, "mu_down must be a finite rate > 0 or instant");
    }
    require(std::isfinite(p.c) && p.c >= 0.0, "c must be finite and >= 0");
}

IterationMoments iteration_time_moments(const SystemParams& params) {
    validate(params);
    require_instantaneous(params);
    const auto& hc = default_harmonics();
    const auto uplink = exp_order_moments(hc, params.k, params.m, params.mu_up);
    const auto wait = exp_order_moments(hc, params.m, params.n, params.lambda);
    return {params.c + uplink.mean + wait.mean, uplink.variance + wait.variance};
}

double mean_conditional_uplink(const SystemParams& params) {
    validate(params);
    return mean_order_prefix_avg(params.k, params.m, params.mu_up);
}

UpdateCycleModel geometric_moments(int n, int m, int k) {
    require(n >= 1 && m >= 1 && m <= n && k >= 1 && k <= m,
            "geometric_moments requires 1 <= k <= m <= n");
    UpdateCycleModel u;
    u.p1 = static_cast<double>(m) / n;
    u.p2 = static_cast<double>(k) / m;
    u.p = static_cast<double>(k) / n;
    u.mean_M = 1.0 / u.p;
    u.second_moment_M = (2.0 - u.p) / (u.p * u.p);
    return u;
}

AgeBreakdown age_exact(const SystemParams& params) {
    const auto y = iteration_time_moments(params);
    const auto cycle = geometric_moments(params.n, params.m, params.k);
    AgeBreakdown a;
    a.mean_Y = y.mean;
    a.var_Y = y.variance;
    a.delta1 = mean_conditional_uplink(params);
    a.delta2 = cycle.age_coefficient() * y.mean;
    a.delta3 = y.variance / (2.0 * y.mean);
    a.total = a.delta1 + a.delta2 + a.delta3;
    return a;
}

double age_approx(const ApproxParams& approx, double lambda, double mu_up, double c) {
    const double a = approx.alpha;
    const double b = approx.beta;
    require(a > 0.0 && a < 1.0, "alpha must lie strictly inside (0, 1)");
    require(b > 0.0 && b < 1.0, "beta must lie strictly inside (0, 1)");
    require(std::isfinite(lambda) && lambda > 0.0, "lambda must be a finite rate > 0");
    require(std::isfinite(mu_up) && mu_up > 0.0, "mu_up must be a finite rate > 0");
    require(std::isfinite(c) && c >= 0.0, "c must be finite and >= 0");
    const double ab = a * b;
    return 1.0 / mu_up + (2.0 - ab) * c / (2.0 * ab) - (2.0 - ab) / (2.0 * ab * lambda) * std::log(1.0 - a) +
           (a * (2.0 - b) - 2.0) / (2.0 * ab * mu_up) * std::log(1.0 - b);
}

}  // namespace timelyfl
