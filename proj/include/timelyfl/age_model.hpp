#pragma once

// Closed-form long-run average age of information of a single client under
// the earliest-k-of-m protocol with instantaneous downlink:
//
//   age = (1/k) sum_{i<=k} E[U_{i:m}]                 (delta1)
//       + (2n - k) / (2k) * E[Y]                       (delta2)
//       + Var[Y] / (2 E[Y])                            (delta3)
//
// where U ~ Exp(mu_up) is the uplink delay, Z ~ Exp(lambda) the availability
// delay and Y = c + U_{k:m} + Z_{m:n} the iteration time.

#include <optional>

namespace timelyfl {

// Downlink delay model. Instantaneous is a distinguished value, never an
// infinite rate.
class Downlink {
public:
    static Downlink instantaneous() { return Downlink{}; }
    static Downlink exponential(double rate) { return Downlink{rate}; }

    bool is_instantaneous() const noexcept { return !rate_.has_value(); }
    // Only meaningful when !is_instantaneous().
    double rate() const { return rate_.value(); }

    bool operator==(const Downlink&) const = default;

private:
    Downlink() = default;
    explicit Downlink(double rate) : rate_(rate) {}
    std::optional<double> rate_;
};

struct SystemParams {
    int n = 1;
    int m = 1;
    int k = 1;
    double lambda = 1.0;  // availability rate
    double mu_up = 1.0;   // uplink rate
    Downlink mu_down = Downlink::instantaneous();
    double c = 0.0;       // deterministic compute duration

    bool operator==(const SystemParams&) const = default;
};

// Throws DomainError naming the first violated constraint.
void validate(const SystemParams& params);

struct IterationMoments {
    double mean = 0.0;
    double variance = 0.0;
};

// E[Y] and Var[Y] of the iteration time. Rejects finite downlink rates.
IterationMoments iteration_time_moments(const SystemParams& params);

// Mean uplink delay of a client that is among the k earliest deliverers.
double mean_conditional_uplink(const SystemParams& params);

// Per-client delivery process: a client delivers in a given iteration with
// probability p = p1 * p2 = k/n, so the iteration count between its
// deliveries is geometric on {1, 2, ...}.
struct UpdateCycleModel {
    double p1 = 1.0;  // m/n, chance of being among the available m
    double p2 = 1.0;  // k/m, chance of being among the earliest k
    double p = 1.0;   // k/n
    double mean_M = 1.0;
    double second_moment_M = 1.0;

    // E[M^2] / (2 E[M]) = (2n - k) / (2k)
    double age_coefficient() const noexcept { return second_moment_M / (2.0 * mean_M); }
};

UpdateCycleModel geometric_moments(int n, int m, int k);

struct AgeBreakdown {
    double delta1 = 0.0;
    double delta2 = 0.0;
    double delta3 = 0.0;
    double total = 0.0;
    double mean_Y = 0.0;
    double var_Y = 0.0;
};

AgeBreakdown age_exact(const SystemParams& params);

// Fractions alpha = m/n and beta = k/m, both strictly inside (0, 1).
struct ApproxParams {
    double alpha = 0.5;
    double beta = 0.5;
};

// Large-n approximation (natural log):
//   1/mu + (2 - ab) c / (2ab) - (2 - ab) / (2ab lambda) log(1 - a)
//        + (a (2 - b) - 2) / (2ab mu) log(1 - b)
double age_approx(const ApproxParams& approx, double lambda, double mu_up, double c);

}  // namespace timelyfl
