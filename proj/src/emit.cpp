#include "timelyfl/emit.hpp"

#include <chrono>
#include <ctime>
#include <fstream>
#include <sstream>

#include "timelyfl/config.hpp"
#include "timelyfl/errors.hpp"

namespace timelyfl {

using nlohmann::json;

json to_json(const AgeBreakdown& a) {
    return {{"delta1", a.delta1}, {"delta2", a.delta2}, {"delta3", a.delta3},
            {"total", a.total},   {"mean_Y", a.mean_Y}, {"var_Y", a.var_Y}};
}

json to_json(const SimResult& r) {
    return {{"scheme", to_string(r.scheme)},
            {"seed", r.seed},
            {"iterations_run", r.iterations_run},
            {"warmup", r.warmup},
            {"mean_avg_age", r.mean_avg_age},
            {"mean_iteration_time", r.mean_iteration_time},
            {"iteration_time_variance", r.iteration_time_variance},
            {"mean_wait", r.mean_wait},
            {"mean_service", r.mean_service},
            {"inter_delivery",
             {{"mean", r.empirical_inter_delivery_moments.mean},
              {"second_moment", r.empirical_inter_delivery_moments.second_moment},
              {"samples", r.empirical_inter_delivery_moments.samples}}},
            {"per_client_avg_age", r.per_client_avg_age},
            {"per_client_deliveries", r.per_client_deliveries}};
}

json to_json(const IterationTimeComparison& c) {
    json rows = json::array();
    for (const auto& r : c.rows) {
        rows.push_back({{"scheme", to_string(r.scheme)},
                        {"mean_iteration_time", r.mean_iteration_time},
                        {"iteration_time_variance", r.iteration_time_variance},
                        {"seed", r.seed}});
    }
    return {{"schemes", rows},
            {"improvement_over_random", c.improvement_over_random},
            {"improvement_over_first", c.improvement_over_first}};
}

json to_json(const SweepResult& s) {
    json rows = json::array();
    for (const auto& r : s.rows) {
        rows.push_back({{"m", r.m}, {"k", r.k}, {"age", r.age}, {"mean_iteration_time", r.mean_iteration_time}});
    }
    return {{"objective", to_string(s.objective_kind)},
            {"argmin", {{"m", s.argmin.m}, {"k", s.argmin.k}, {"age", s.argmin.age}}},
            {"rows", rows}};
}

json to_json(const std::vector<LossRecord>& history) {
    json rows = json::array();
    for (const auto& r : history) {
        rows.push_back({{"iteration", r.iteration}, {"train_loss", r.train_loss}, {"test_loss", r.test_loss}});
    }
    return rows;
}

json make_envelope(std::string_view command, const std::string& config_text, std::optional<std::uint64_t> seed,
                   json payload, double wall_clock_seconds) {
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm utc{};
    gmtime_r(&now, &utc);
    char stamp[32];
    std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", &utc);

    json meta = {{"tool", kToolName},
                 {"version", kToolVersion},
                 {"command", command},
                 {"config", config_text},
                 {"timestamp", stamp},
                 {"wall_clock_seconds", wall_clock_seconds}};
    meta["seed"] = seed ? json(*seed) : json(nullptr);
    return {{"metadata", std::move(meta)}, {"payload", std::move(payload)}};
}

std::string csv_field(std::string_view field) {
    if (field.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(field);
    std::string out = "\"";
    for (char ch : field) {
        if (ch == '"') out += '"';
        out += ch;
    }
    out += '"';
    return out;
}

std::string sweep_csv(const SweepResult& result) {
    std::ostringstream o;
    o << "m,k,age,mean_iter_time\n";
    for (const auto& r : result.rows) {
        o << r.m << ',' << r.k << ',' << format_double(r.age) << ',' << format_double(r.mean_iteration_time) << '\n';
    }
    return o.str();
}

std::string trace_csv(const std::vector<IterationRecord>& trace) {
    std::ostringstream o;
    o << "iter,start,wait,service,end,deliverer_ids\n";
    for (const auto& r : trace) {
        std::string ids;
        for (std::size_t i = 0; i < r.deliverers.size(); ++i) {
            if (i) ids += ';';
            ids += std::to_string(r.deliverers[i]);
        }
        o << r.index << ',' << format_double(r.start_time) << ',' << format_double(r.wait_duration) << ','
          << format_double(r.service_duration) << ',' << format_double(r.end_time) << ',' << csv_field(ids) << '\n';
    }
    return o.str();
}

std::string loss_csv(const std::vector<LossRecord>& history, const std::vector<double>* sim_times) {
    std::ostringstream o;
    o << "iter,train_loss,test_loss" << (sim_times ? ",sim_time" : "") << '\n';
    for (const auto& r : history) {
        o << r.iteration << ',' << format_double(r.train_loss) << ',' << format_double(r.test_loss);
        if (sim_times) {
            const double t = r.iteration == 0 ? 0.0 : sim_times->at(static_cast<std::size_t>(r.iteration) - 1);
            o << ',' << format_double(t);
        }
        o << '\n';
    }
    return o.str();
}

void write_text_file(const std::string& path, std::string_view content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + path + " for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw IoError("failed writing " + path);
}

std::vector<double> cumulative_iteration_times(const std::vector<IterationRecord>& trace) {
    std::vector<double> out;
    out.reserve(trace.size());
    for (const auto& r : trace) out.push_back(r.end_time);
    return out;
}

}  // namespace timelyfl
