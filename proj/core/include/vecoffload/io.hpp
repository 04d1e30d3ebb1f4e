#pragma once

// Serialization of scenarios, configurations and run results.
//
// Scenarios and metrics are JSON; per-task outcomes and window logs are
// JSON-lines; summaries and convergence traces are CSV. Doubles are written in
// shortest round-trip form so a saved scenario replays bit-for-bit.

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "vecoffload/engine.hpp"
#include "vecoffload/pso.hpp"
#include "vecoffload/workload.hpp"

namespace vecoffload {

// Parse functions throw ParseError; the message names the offending field,
// e.g. "tasks[3].arrival_time: expected a number".
std::string scenario_to_json(const Scenario& scenario);
Scenario scenario_from_json(std::string_view text);

std::string workload_to_json(const WorkloadConfig& config);
WorkloadConfig workload_from_json(std::string_view text);

std::string pso_params_to_json(const PsoParams& params);
PsoParams pso_params_from_json(std::string_view text);

std::string metrics_to_json(const RunMetrics& metrics);
std::string outcomes_to_jsonl(const RunMetrics& metrics);
std::string windows_to_jsonl(const RunMetrics& metrics);

inline constexpr std::string_view kSummaryHeader =
    "scheduler,vehicles,seed,dropped_count,drop_ratio,total_e2e,avg_e2e,total_waiting,"
    "avg_waiting,exec_time_s,objective";

struct SummaryRow {
  std::string scheduler;
  int vehicles = 0;
  std::uint64_t seed = 0;
  std::size_t dropped_count = 0;
  double drop_ratio = 0.0;
  Seconds total_e2e = 0.0;
  Seconds avg_e2e = 0.0;
  Seconds total_waiting = 0.0;
  Seconds avg_waiting = 0.0;
  Seconds exec_time_s = 0.0;
  double objective = 0.0;
};

SummaryRow summary_row(const RunMetrics& metrics, int vehicles, std::uint64_t seed);
std::string to_csv_line(const SummaryRow& row);
// Parses a summary CSV (with header) back into rows. Throws ParseError.
std::vector<SummaryRow> read_summary_csv(std::string_view text);

std::string convergence_to_csv(const ConvergenceTrace& trace);

// Quotes a CSV field when it contains a comma, quote or line break.
std::string csv_escape(std::string_view field);
// Shortest decimal form that parses back to the same double.
std::string format_double(double value);

std::string read_file(const std::filesystem::path& path);
// Writes through a temporary sibling and renames it into place.
void write_file(const std::filesystem::path& path, std::string_view contents);

Scenario load_scenario(const std::filesystem::path& path);
void save_scenario(const std::filesystem::path& path, const Scenario& scenario);

}  // namespace vecoffload
