#pragma once

// Event-by-event Monte-Carlo simulation of the earliest-k-of-m protocol and
// the random-k / first-k baselines.
//
// Each iteration starts when the previous one ends. Availability delays are
// redrawn i.i.d. Exp(lambda) at every iteration start (memoryless clocks).
// A participating client receives the model at broadcast + D (D = 0 for an
// instantaneous downlink, Exp(mu_down) otherwise), generates its update c
// later, and the update reaches the server after an Exp(mu_up) uplink delay.
// The server's age for client j is t - u_j(t), where u_j is the generation
// time of the freshest update received from j; its time integral is
// accumulated exactly between delivery events.

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "timelyfl/age_model.hpp"
#include "timelyfl/rng.hpp"

namespace timelyfl {

enum class SchemeKind { EarliestKofM, RandomK, FirstK };

std::string_view to_string(SchemeKind scheme) noexcept;
// Accepts the canonical names and the short forms earliest|random|first.
std::optional<SchemeKind> parse_scheme(std::string_view name) noexcept;

inline constexpr SchemeKind kAllSchemes[] = {SchemeKind::EarliestKofM, SchemeKind::RandomK, SchemeKind::FirstK};

// How the k clients picked by random-k become available.
//   SharedEpoch: broadcast once all k are available, i.e. after max_j Z_j.
//   Independent: each client starts its own work as soon as it is available.
enum class RandomKWait { SharedEpoch, Independent };

std::string_view to_string(RandomKWait wait) noexcept;
std::optional<RandomKWait> parse_random_k_wait(std::string_view name) noexcept;

// Validates params for a scheme. Baselines ignore m.
void validate_for(const SystemParams& params, SchemeKind scheme);

class ClientAgeTracker {
public:
    explicit ClientAgeTracker(double t0 = 0.0) noexcept
        : generation_(t0), receipt_(t0), clock_(t0) {}

    double age_at(double t) const noexcept { return t - generation_; }
    double last_delivery_generation_time() const noexcept { return generation_; }
    double last_delivery_receipt_time() const noexcept { return receipt_; }
    double accumulated_area() const noexcept { return area_; }
    double clock() const noexcept { return clock_; }

    // Integrates the age up to t (t >= clock()).
    void advance(double t);
    // Update generated at `generation` received at t. Requires
    // last generation <= generation <= t.
    void deliver(double t, double generation);
    // Advances to t and zeroes the accumulated area.
    void restart_window(double t);

private:
    double generation_;
    double receipt_;
    double clock_;
    double area_ = 0.0;
};

struct Delivery {
    int client = 0;
    double generation_time = 0.0;
    double delivery_time = 0.0;
    double age_before = 0.0;  // server-side age of the client just before receipt
};

struct IterationRecord {
    std::int64_t index = 0;
    double start_time = 0.0;
    double wait_duration = 0.0;
    double service_duration = 0.0;
    double end_time = 0.0;
    std::vector<int> participants;
    std::vector<int> deliverers;       // in delivery order
    std::vector<Delivery> deliveries;  // same order as deliverers; age_before filled by simulate()
};

// Draws successive iterations of one scheme. Holds the time cursor and the
// random stream; one stepper is one sequential event timeline.
class ProtocolStepper {
public:
    ProtocolStepper(const SystemParams& params, SchemeKind scheme, Engine engine,
                    RandomKWait random_k_wait = RandomKWait::SharedEpoch);

    IterationRecord step();
    double now() const noexcept { return now_; }
    std::int64_t iterations_done() const noexcept { return index_; }

private:
    void step_availability_quorum(IterationRecord& rec, int quorum);
    void step_random_k(IterationRecord& rec);
    double downlink_delay();

    SystemParams params_;
    SchemeKind scheme_;
    RandomKWait random_k_wait_;
    Engine engine_;
    double now_ = 0.0;
    std::int64_t index_ = 0;
    std::vector<int> order_;
    std::vector<double> avail_;
    std::vector<double> delivery_at_;
    std::vector<double> generated_at_;
};

struct SimOptions {
    RandomKWait random_k_wait = RandomKWait::SharedEpoch;
    bool record_trace = false;
};

struct InterDeliveryMoments {
    double mean = 0.0;
    double second_moment = 0.0;
    std::int64_t samples = 0;
};

struct SimResult {
    SchemeKind scheme = SchemeKind::EarliestKofM;
    std::vector<double> per_client_avg_age;
    double mean_avg_age = 0.0;
    double mean_iteration_time = 0.0;
    double iteration_time_variance = 0.0;
    double mean_wait = 0.0;
    double mean_service = 0.0;
    InterDeliveryMoments empirical_inter_delivery_moments;
    std::vector<std::int64_t> per_client_deliveries;  // measured window only
    std::int64_t iterations_run = 0;
    std::int64_t warmup = 0;
    std::uint64_t seed = 0;
    std::vector<IterationRecord> trace;  // filled when SimOptions::record_trace
};

// 1% of the horizon, at least 100 iterations, always below the horizon.
std::int64_t default_warmup(std::int64_t iterations) noexcept;

// `iterations` is the full horizon; the first `warmup` iterations are run but
// excluded from every reported statistic. All clients start at t = 0 with a
// fresh update (age 0).
SimResult simulate(const SystemParams& params, SchemeKind scheme, std::int64_t iterations, std::int64_t warmup,
                   std::uint64_t seed, const SimOptions& options = {});

struct SchemeTiming {
    SchemeKind scheme = SchemeKind::EarliestKofM;
    double mean_iteration_time = 0.0;
    double iteration_time_variance = 0.0;
    std::uint64_t seed = 0;
};

struct IterationTimeComparison {
    std::vector<SchemeTiming> rows;  // EarliestKofM, RandomK, FirstK
    // (Y_random - Y_proposed) / Y_random
    double improvement_over_random = 0.0;
    double improvement_over_first = 0.0;

    const SchemeTiming& row(SchemeKind scheme) const;
};

// Scheme s runs with seed substream_seed(seed, 1 + index of s in kAllSchemes).
IterationTimeComparison compare_iteration_time(const SystemParams& params, std::int64_t iterations,
                                               std::uint64_t seed, const SimOptions& options = {});

}  // namespace timelyfl
