#include "timelyfl/protocol_sim.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "timelyfl/errors.hpp"
#include "timelyfl/stats.hpp"

namespace timelyfl {

std::string_view to_string(SchemeKind scheme) noexcept {
    switch (scheme) {
        case SchemeKind::EarliestKofM: return "earliest-k-of-m";
        case SchemeKind::RandomK: return "random-k";
        case SchemeKind::FirstK: return "first-k";
    }
    return "unknown";
}

std::optional<SchemeKind> parse_scheme(std::string_view name) noexcept {
    if (name == "earliest-k-of-m" || name == "earliest" || name == "proposed") return SchemeKind::EarliestKofM;
    if (name == "random-k" || name == "random") return SchemeKind::RandomK;
    if (name == "first-k" || name == "first") return SchemeKind::FirstK;
    return std::nullopt;
}

std::string_view to_string(RandomKWait wait) noexcept {
    return wait == RandomKWait::SharedEpoch ? "shared" : "independent";
}

std::optional<RandomKWait> parse_random_k_wait(std::string_view name) noexcept {
    if (name == "shared") return RandomKWait::SharedEpoch;
    if (name == "independent") return RandomKWait::Independent;
    return std::nullopt;
}

void validate_for(const SystemParams& params, SchemeKind scheme) {
    if (scheme == SchemeKind::EarliestKofM) {
        validate(params);
        return;
    }
    SystemParams relaxed = params;
    relaxed.m = params.n;
    validate(relaxed);
}

void ClientAgeTracker::advance(double t) {
    if (t < clock_) {
        throw DomainError("ClientAgeTracker: time moved backwards");
    }
    // integral of (s - g) over [clock, t]
    area_ += 0.5 * (t - clock_) * ((t - generation_) + (clock_ - generation_));
    clock_ = t;
}

void ClientAgeTracker::deliver(double t, double generation) {
    if (generation < generation_ || generation > t) {
        throw DomainError("ClientAgeTracker: delivery would increase age or precede its generation");
    }
    advance(t);
    generation_ = generation;
    receipt_ = t;
}

void ClientAgeTracker::restart_window(double t) {
    advance(t);
    area_ = 0.0;
}

ProtocolStepper::ProtocolStepper(const SystemParams& params, SchemeKind scheme, Engine engine,
                                 RandomKWait random_k_wait)
    : params_(params), scheme_(scheme), random_k_wait_(random_k_wait), engine_(std::move(engine)) {
    validate_for(params_, scheme_);
    order_.resize(params_.n);
    avail_.resize(params_.n);
    delivery_at_.resize(params_.n);
    generated_at_.resize(params_.n);
}

double ProtocolStepper::downlink_delay() {
    return params_.mu_down.is_instantaneous() ? 0.0 : draw_exponential(engine_, params_.mu_down.rate());
}

IterationRecord ProtocolStepper::step() {
    IterationRecord rec;
    rec.index = index_;
    rec.start_time = now_;
    switch (scheme_) {
        case SchemeKind::EarliestKofM: step_availability_quorum(rec, params_.m); break;
        case SchemeKind::FirstK: step_availability_quorum(rec, params_.k); break;
        case SchemeKind::RandomK: step_random_k(rec); break;
    }
    rec.deliveries.reserve(rec.deliverers.size());
    for (int j : rec.deliverers) {
        rec.deliveries.push_back({j, generated_at_[j], delivery_at_[j], 0.0});
    }
    rec.end_time = delivery_at_[rec.deliverers.back()];
    rec.service_duration = rec.end_time - rec.start_time - rec.wait_duration;
    now_ = rec.end_time;
    ++index_;
    return rec;
}

// Wait for the first `quorum` available clients, broadcast, keep the earliest k.
void ProtocolStepper::step_availability_quorum(IterationRecord& rec, int quorum) {
    const int n = params_.n;
    const int k = params_.k;
    for (int j = 0; j < n; ++j) {
        avail_[j] = draw_exponential(engine_, params_.lambda);
    }
    std::iota(order_.begin(), order_.end(), 0);
    auto by_avail = [this](int a, int b) { return avail_[a] < avail_[b] || (avail_[a] == avail_[b] && a < b); };
    std::partial_sort(order_.begin(), order_.begin() + quorum, order_.end(), by_avail);
    rec.wait_duration = avail_[order_[quorum - 1]];
    rec.participants.assign(order_.begin(), order_.begin() + quorum);

    const double broadcast = rec.start_time + rec.wait_duration;
    for (int j : rec.participants) {
        generated_at_[j] = broadcast + downlink_delay() + params_.c;
        delivery_at_[j] = generated_at_[j] + draw_exponential(engine_, params_.mu_up);
    }
    rec.deliverers = rec.participants;
    auto by_delivery = [this](int a, int b) {
        return delivery_at_[a] < delivery_at_[b] || (delivery_at_[a] == delivery_at_[b] && a < b);
    };
    std::partial_sort(rec.deliverers.begin(), rec.deliverers.begin() + k, rec.deliverers.end(), by_delivery);
    rec.deliverers.resize(k);
}

void ProtocolStepper::step_random_k(IterationRecord& rec) {
    const int n = params_.n;
    const int k = params_.k;
    std::iota(order_.begin(), order_.end(), 0);
    for (int i = 0; i < k; ++i) {
        const auto pick = i + static_cast<int>(uniform_index(engine_, static_cast<std::uint64_t>(n - i)));
        std::swap(order_[i], order_[pick]);
    }
    rec.participants.assign(order_.begin(), order_.begin() + k);

    double latest_avail = 0.0;
    for (int j : rec.participants) {
        avail_[j] = draw_exponential(engine_, params_.lambda);
        latest_avail = std::max(latest_avail, avail_[j]);
    }
    rec.wait_duration = latest_avail;
    for (int j : rec.participants) {
        const double ready = random_k_wait_ == RandomKWait::SharedEpoch ? latest_avail : avail_[j];
        generated_at_[j] = rec.start_time + ready + downlink_delay() + params_.c;
        delivery_at_[j] = generated_at_[j] + draw_exponential(engine_, params_.mu_up);
    }
    rec.deliverers = rec.participants;
    std::sort(rec.deliverers.begin(), rec.deliverers.end(), [this](int a, int b) {
        return delivery_at_[a] < delivery_at_[b] || (delivery_at_[a] == delivery_at_[b] && a < b);
    });
}

std::int64_t default_warmup(std::int64_t iterations) noexcept {
    std::int64_t w = std::max<std::int64_t>(100, iterations / 100);
    if (w >= iterations) {
        w = iterations / 10;
    }
    return w;
}

SimResult simulate(const SystemParams& params, SchemeKind scheme, std::int64_t iterations, std::int64_t warmup,
                   std::uint64_t seed, const SimOptions& options) {
    if (warmup < 0 || iterations <= warmup) {
        throw DomainError("simulate requires iterations > warmup >= 0 (got iterations=" + std::to_string(iterations) +
                          ", warmup=" + std::to_string(warmup) + ")");
    }
    validate_for(params, scheme);

    const int n = params.n;
    ProtocolStepper stepper(params, scheme, make_engine(seed, 0), options.random_k_wait);
    std::vector<ClientAgeTracker> trackers(n);
    std::vector<std::int64_t> last_delivery_iter(n, -1);

    SimResult result;
    result.scheme = scheme;
    result.seed = seed;
    result.warmup = warmup;
    result.per_client_deliveries.assign(n, 0);
    if (options.record_trace) {
        result.trace.reserve(static_cast<std::size_t>(iterations));
    }

    RunningMoments iter_time;
    double wait_sum = 0.0;
    double service_sum = 0.0;
    double m_sum = 0.0;
    double m_sq_sum = 0.0;
    std::int64_t m_count = 0;
    double window_start = 0.0;

    for (std::int64_t it = 0; it < iterations; ++it) {
        const bool measured = it >= warmup;
        if (it == warmup) {
            window_start = stepper.now();
            for (auto& t : trackers) t.restart_window(window_start);
        }
        IterationRecord rec = stepper.step();
        for (auto& d : rec.deliveries) {
            auto& tracker = trackers[d.client];
            d.age_before = tracker.age_at(d.delivery_time);
            tracker.deliver(d.delivery_time, d.generation_time);
            if (measured) {
                ++result.per_client_deliveries[d.client];
                if (last_delivery_iter[d.client] >= 0) {
                    const double gap = static_cast<double>(it - last_delivery_iter[d.client]);
                    m_sum += gap;
                    m_sq_sum += gap * gap;
                    ++m_count;
                }
            }
            last_delivery_iter[d.client] = it;
        }
        if (measured) {
            iter_time.add(rec.end_time - rec.start_time);
            wait_sum += rec.wait_duration;
            service_sum += rec.service_duration;
        }
        if (options.record_trace) {
            result.trace.push_back(std::move(rec));
        }
    }

    const double horizon_end = stepper.now();
    const double elapsed = horizon_end - window_start;
    const auto measured_iters = static_cast<double>(iterations - warmup);
    result.per_client_avg_age.resize(n);
    double age_sum = 0.0;
    for (int j = 0; j < n; ++j) {
        trackers[j].advance(horizon_end);
        result.per_client_avg_age[j] = trackers[j].accumulated_area() / elapsed;
        age_sum += result.per_client_avg_age[j];
    }
    result.mean_avg_age = age_sum / n;
    result.mean_iteration_time = iter_time.mean;
    result.iteration_time_variance = iter_time.variance();
    result.mean_wait = wait_sum / measured_iters;
    result.mean_service = service_sum / measured_iters;
    if (m_count > 0) {
        result.empirical_inter_delivery_moments = {m_sum / m_count, m_sq_sum / m_count, m_count};
    }
    result.iterations_run = iterations;
    return result;
}

const SchemeTiming& IterationTimeComparison::row(SchemeKind scheme) const {
    for (const auto& r : rows) {
        if (r.scheme == scheme) return r;
    }
    throw DomainError("comparison has no row for scheme " + std::string(to_string(scheme)));
}

IterationTimeComparison compare_iteration_time(const SystemParams& params, std::int64_t iterations,
                                               std::uint64_t seed, const SimOptions& options) {
    for (auto s : kAllSchemes) validate_for(params, s);
    IterationTimeComparison out;
    std::uint64_t stream = 1;
    for (auto s : kAllSchemes) {
        const std::uint64_t scheme_seed = substream_seed(seed, stream++);
        SimOptions opts = options;
        opts.record_trace = false;
        const auto r = simulate(params, s, iterations, default_warmup(iterations), scheme_seed, opts);
        out.rows.push_back({s, r.mean_iteration_time, r.iteration_time_variance, scheme_seed});
    }
    const double proposed = out.row(SchemeKind::EarliestKofM).mean_iteration_time;
    const double random = out.row(SchemeKind::RandomK).mean_iteration_time;
    const double first = out.row(SchemeKind::FirstK).mean_iteration_time;
    out.improvement_over_random = (random - proposed) / random;
    out.improvement_over_first = (first - proposed) / first;
    return out;
}

}  // namespace timelyfl
