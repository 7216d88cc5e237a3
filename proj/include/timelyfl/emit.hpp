#pragma once

// Result formatting: CSV curves and self-describing JSON envelopes.

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "timelyfl/age_model.hpp"
#include "timelyfl/fl_bench.hpp"
#include "timelyfl/protocol_sim.hpp"
#include "timelyfl/sweep_opt.hpp"

namespace timelyfl {

inline constexpr std::string_view kToolName = "timelyfl";
inline constexpr std::string_view kToolVersion = "1.0.0";

nlohmann::json to_json(const AgeBreakdown& age);
nlohmann::json to_json(const SimResult& result);
nlohmann::json to_json(const IterationTimeComparison& comparison);
nlohmann::json to_json(const SweepResult& result);
nlohmann::json to_json(const std::vector<LossRecord>& history);

// {"metadata": {tool, version, command, config, seed, timestamp,
//  wall_clock_seconds}, "payload": payload}. `config` is the canonical
// config text that reproduces the payload.
nlohmann::json make_envelope(std::string_view command, const std::string& config_text,
                             std::optional<std::uint64_t> seed, nlohmann::json payload, double wall_clock_seconds);

std::string csv_field(std::string_view field);

// m,k,age,mean_iter_time
std::string sweep_csv(const SweepResult& result);
// iter,start,wait,service,end,deliverer_ids
std::string trace_csv(const std::vector<IterationRecord>& trace);
// iter,train_loss,test_loss[,sim_time]
std::string loss_csv(const std::vector<LossRecord>& history, const std::vector<double>* sim_times = nullptr);

// Throws IoError when the file cannot be written.
void write_text_file(const std::string& path, std::string_view content);

// Elapsed protocol time at the end of each iteration 1..iterations, for
// plotting a loss history against time.
std::vector<double> cumulative_iteration_times(const std::vector<IterationRecord>& trace);

}  // namespace timelyfl
