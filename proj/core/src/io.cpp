#include "vecoffload/io.hpp"

#include <charconv>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "vecoffload/error.hpp"

namespace vecoffload {
namespace {

using json = nlohmann::json;
using ojson = nlohmann::ordered_json;

// Walks a parsed document, carrying the dotted path for error messages.
class Node {
 public:
  Node(const json& value, std::string path) : value_(value), path_(std::move(path)) {}

  const std::string& path() const { return path_; }
  const json& raw() const { return value_; }

  bool has(std::string_view key) const {
    return value_.is_object() && value_.contains(std::string(key));
  }

  Node at(std::string_view key) const {
    require_object();
    auto it = value_.find(std::string(key));
    if (it == value_.end()) fail(child_path(key), "missing field");
    return {*it, child_path(key)};
  }

  Node at(std::size_t index) const { return {value_[index], path_ + "[" + std::to_string(index) + "]"}; }

  std::size_t array_size() const {
    if (!value_.is_array()) fail(path_, "expected an array");
    return value_.size();
  }

  double number() const {
    if (!value_.is_number()) fail(path_, "expected a number");
    return value_.get<double>();
  }

  std::int64_t integer() const {
    if (!value_.is_number_integer()) fail(path_, "expected an integer");
    return value_.get<std::int64_t>();
  }

  std::uint64_t unsigned_integer() const {
    if (value_.is_number_unsigned()) return value_.get<std::uint64_t>();
    if (value_.is_number_integer() && value_.get<std::int64_t>() >= 0) {
      return static_cast<std::uint64_t>(value_.get<std::int64_t>());
    }
    fail(path_, "expected a non-negative integer");
  }

  std::string string() const {
    if (!value_.is_string()) fail(path_, "expected a string");
    return value_.get<std::string>();
  }

  void require_object() const {
    if (!value_.is_object()) fail(path_, "expected an object");
  }

  // Rejects keys outside `known`; catches misspelled overrides.
  void only(std::initializer_list<std::string_view> known) const {
    require_object();
    const std::set<std::string_view> allowed(known);
    for (const auto& item : value_.items()) {
      if (!allowed.contains(item.key())) fail(child_path(item.key()), "unknown field");
    }
  }

  [[noreturn]] static void fail(const std::string& path, std::string_view message) {
    throw ParseError((path.empty() ? std::string("<root>") : path) + ": " + std::string(message));
  }

 private:
  std::string child_path(std::string_view key) const {
    return path_.empty() ? std::string(key) : path_ + "." + std::string(key);
  }

  const json& value_;
  std::string path_;
};

json parse_document(std::string_view text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("malformed JSON: ") + e.what());
  }
}

void assign_if(const Node& node, std::string_view key, double& target) {
  if (node.has(key)) target = node.at(key).number();
}

ojson channel_json(const ChannelParams& c) {
  ojson j;
  j["max_bandwidth_hz"] = c.max_bandwidth_hz;
  j["guard_band_fraction"] = c.guard_band_fraction;
  j["tx_power_w"] = c.tx_power_w;
  j["channel_gain"] = c.channel_gain;
  j["noise_power_w"] = c.noise_power_w;
  return j;
}

ChannelParams channel_from(const Node& node, ChannelParams c = {}) {
  node.only({"max_bandwidth_hz", "guard_band_fraction", "tx_power_w", "channel_gain",
             "noise_power_w"});
  assign_if(node, "max_bandwidth_hz", c.max_bandwidth_hz);
  assign_if(node, "guard_band_fraction", c.guard_band_fraction);
  assign_if(node, "tx_power_w", c.tx_power_w);
  assign_if(node, "channel_gain", c.channel_gain);
  assign_if(node, "noise_power_w", c.noise_power_w);
  return c;
}

ojson workload_json(const WorkloadConfig& w) {
  ojson j;
  j["num_vehicles"] = w.num_vehicles;
  j["arrival_rate"] = w.arrival_rate;
  j["task_size_choices"] = w.task_size_choices;
  ojson table = ojson::array();
  for (const auto& [size, time] : w.processing_time_table) {
    table.push_back({{"size_bits", size}, {"processing_time", time}});
  }
  j["processing_time_table"] = std::move(table);
  j["rsu_position"] = w.rsu_position;
  j["coverage_radius"] = w.coverage_radius;
  j["speed_range"] = {{"min_mps", w.speed_range.min_mps}, {"max_mps", w.speed_range.max_mps}};
  j["approach_distance"] = w.approach_distance;
  j["exit_margin"] = w.exit_margin;
  j["result_size_ratio"] = w.result_size_ratio;
  j["channel"] = channel_json(w.channel);
  j["num_servers"] = w.num_servers;
  j["seed"] = w.seed;
  return j;
}

WorkloadConfig workload_from(const Node& node) {
  node.only({"num_vehicles", "arrival_rate", "task_size_choices", "processing_time_table",
             "rsu_position", "coverage_radius", "speed_range", "approach_distance", "exit_margin",
             "result_size_ratio", "channel", "num_servers", "seed"});
  WorkloadConfig w;
  if (node.has("num_vehicles")) w.num_vehicles = static_cast<int>(node.at("num_vehicles").integer());
  assign_if(node, "arrival_rate", w.arrival_rate);
  if (node.has("task_size_choices")) {
    const Node sizes = node.at("task_size_choices");
    w.task_size_choices.clear();
    for (std::size_t i = 0; i < sizes.array_size(); ++i) {
      w.task_size_choices.push_back(sizes.at(i).number());
    }
  }
  if (node.has("processing_time_table")) {
    const Node table = node.at("processing_time_table");
    w.processing_time_table.clear();
    for (std::size_t i = 0; i < table.array_size(); ++i) {
      const Node row = table.at(i);
      row.only({"size_bits", "processing_time"});
      w.processing_time_table[row.at("size_bits").number()] = row.at("processing_time").number();
    }
  }
  assign_if(node, "rsu_position", w.rsu_position);
  assign_if(node, "coverage_radius", w.coverage_radius);
  if (node.has("speed_range")) {
    const Node speed = node.at("speed_range");
    speed.only({"min_mps", "max_mps"});
    assign_if(speed, "min_mps", w.speed_range.min_mps);
    assign_if(speed, "max_mps", w.speed_range.max_mps);
  }
  assign_if(node, "approach_distance", w.approach_distance);
  assign_if(node, "exit_margin", w.exit_margin);
  assign_if(node, "result_size_ratio", w.result_size_ratio);
  if (node.has("channel")) w.channel = channel_from(node.at("channel"));
  if (node.has("num_servers")) w.num_servers = node.at("num_servers").unsigned_integer();
  if (node.has("seed")) w.seed = node.at("seed").unsigned_integer();
  return w;
}

ojson outcome_json(const TaskOutcome& o) {
  ojson j;
  j["task_id"] = o.task_id;
  j["assigned_mec"] = o.assigned_mec ? ojson(*o.assigned_mec) : ojson(nullptr);
  j["start_processing_time"] = o.start_processing_time;
  j["waiting_time"] = o.waiting_time;
  j["uplink_time"] = o.uplink_time;
  j["downlink_time"] = o.downlink_time;
  j["e2e_latency"] = o.e2e_latency;
  j["dropped"] = o.dropped;
  return j;
}

ojson window_json(const WindowRecord& w) {
  ojson j;
  j["window_index"] = w.window_index;
  j["span_start"] = w.span_start;
  j["span_end"] = w.span_end;
  j["eligible"] = w.eligible;
  j["excluded_infeasible"] = w.excluded_infeasible;
  if (w.decision) {
    ojson d;
    d["chosen_task_id"] = w.decision->chosen_task_id;
    d["target_server"] = w.decision->target_server;
    d["decision_cost"] = w.decision->decision_cost;
    ojson costs = ojson::array();
    for (const auto& [id, cost] : w.decision->per_candidate_costs) {
      costs.push_back({{"task_id", id}, {"cost", cost}});
    }
    d["per_candidate_costs"] = std::move(costs);
    j["decision"] = std::move(d);
  } else {
    j["decision"] = nullptr;
  }
  j["exec_time"] = w.exec_time;
  j["start_time"] = w.start_time;
  j["chosen_dropped"] = w.chosen_dropped;
  return j;
}

std::vector<std::string> split_csv_line(std::string_view line, std::size_t line_number) {
  std::vector<std::string> fields(1);
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        fields.back() += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        fields.back() += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.emplace_back();
    } else {
      fields.back() += c;
    }
  }
  if (quoted) throw ParseError("line " + std::to_string(line_number) + ": unterminated quote");
  return fields;
}

template <typename T>
T parse_number(const std::string& field, std::string_view column, std::size_t line_number) {
  T value{};
  const char* end = field.data() + field.size();
  auto [ptr, ec] = std::from_chars(field.data(), end, value);
  if (ec != std::errc() || ptr != end) {
    throw ParseError("line " + std::to_string(line_number) + "." + std::string(column) +
                     ": expected a number, got '" + field + "'");
  }
  return value;
}

}  // namespace

std::string format_double(double value) {
  if (value == 0.0) return "0";
  char buffer[64];
  auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
  if (ec != std::errc()) throw InternalConsistencyError("cannot format double");
  return {buffer, ptr};
}

std::string csv_escape(std::string_view field) {
  if (field.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::string scenario_to_json(const Scenario& s) {
  ojson j;
  j["seed"] = s.seed;
  j["num_servers"] = s.num_servers;
  j["concurrency_epsilon"] = s.concurrency_epsilon;
  j["channel"] = channel_json(s.channel);
  ojson tasks = ojson::array();
  for (const Task& t : s.tasks) {
    ojson task;
    task["id"] = t.id;
    task["size_bits"] = t.size_bits;
    task["result_size_bits"] = t.result_size_bits;
    task["arrival_time"] = t.arrival_time;
    task["processing_time"] = t.processing_time;
    task["deadline"] = t.deadline;
    task["range_window"] = t.range_window;
    task["offload_ready_time"] = t.offload_ready_time;
    tasks.push_back(std::move(task));
  }
  j["tasks"] = std::move(tasks);
  if (s.config_echo) j["config"] = workload_json(*s.config_echo);
  return j.dump(2) + "\n";
}

Scenario scenario_from_json(std::string_view text) {
  const json doc = parse_document(text);
  const Node root(doc, "");
  root.only({"seed", "num_servers", "concurrency_epsilon", "channel", "tasks", "config"});
  Scenario s;
  s.seed = root.at("seed").unsigned_integer();
  s.num_servers = root.at("num_servers").unsigned_integer();
  if (root.has("concurrency_epsilon")) s.concurrency_epsilon = root.at("concurrency_epsilon").number();
  s.channel = channel_from(root.at("channel"));
  const Node tasks = root.at("tasks");
  for (std::size_t i = 0; i < tasks.array_size(); ++i) {
    const Node t = tasks.at(i);
    t.only({"id", "size_bits", "result_size_bits", "arrival_time", "processing_time", "deadline",
            "range_window", "offload_ready_time"});
    Task task;
    task.id = static_cast<TaskId>(t.at("id").integer());
    task.size_bits = t.at("size_bits").number();
    task.result_size_bits = t.at("result_size_bits").number();
    task.arrival_time = t.at("arrival_time").number();
    task.processing_time = t.at("processing_time").number();
    task.deadline = t.at("deadline").number();
    task.range_window = t.at("range_window").number();
    task.offload_ready_time = t.at("offload_ready_time").number();
    try {
      validate(task);
    } catch (const InvalidInput& e) {
      Node::fail(t.path(), e.what());
    }
    s.tasks.push_back(task);
  }
  if (root.has("config")) s.config_echo = workload_from(root.at("config"));
  try {
    validate(s);
  } catch (const InvalidInput& e) {
    throw ParseError(std::string("tasks: ") + e.what());
  }
  return s;
}

std::string workload_to_json(const WorkloadConfig& config) { return workload_json(config).dump(2) + "\n"; }

WorkloadConfig workload_from_json(std::string_view text) {
  const json doc = parse_document(text);
  return workload_from(Node(doc, ""));
}

std::string pso_params_to_json(const PsoParams& p) {
  ojson j;
  j["swarm_size"] = p.swarm_size;
  j["max_iterations"] = p.max_iterations;
  j["cognitive_coeff"] = p.cognitive_coeff;
  j["social_coeff"] = p.social_coeff;
  j["inertia"] = p.inertia;
  j["seed"] = p.seed;
  j["initial_velocity"] = p.initial_velocity;
  j["velocity_limit"] = p.velocity_limit;
  return j.dump(2) + "\n";
}

PsoParams pso_params_from_json(std::string_view text) {
  const json doc = parse_document(text);
  const Node node(doc, "");
  node.only({"swarm_size", "max_iterations", "cognitive_coeff", "social_coeff", "inertia", "seed",
             "initial_velocity", "velocity_limit"});
  PsoParams p;
  if (node.has("swarm_size")) p.swarm_size = static_cast<int>(node.at("swarm_size").integer());
  if (node.has("max_iterations")) p.max_iterations = static_cast<int>(node.at("max_iterations").integer());
  assign_if(node, "cognitive_coeff", p.cognitive_coeff);
  assign_if(node, "social_coeff", p.social_coeff);
  assign_if(node, "inertia", p.inertia);
  if (node.has("seed")) p.seed = node.at("seed").unsigned_integer();
  assign_if(node, "initial_velocity", p.initial_velocity);
  assign_if(node, "velocity_limit", p.velocity_limit);
  return p;
}

std::string metrics_to_json(const RunMetrics& m) {
  ojson j;
  j["scheduler"] = m.scheduler;
  j["num_tasks"] = m.num_tasks;
  j["assigned_count"] = m.assigned_count;
  j["dropped_count"] = m.dropped_count;
  j["drop_ratio"] = m.drop_ratio;
  j["total_e2e"] = m.total_e2e;
  j["avg_e2e"] = m.avg_e2e;
  j["total_waiting"] = m.total_waiting;
  j["avg_waiting"] = m.avg_waiting;
  j["objective"] = m.objective;
  j["scheduler_exec_time"] = m.scheduler_exec_time;
  ojson outcomes = ojson::array();
  for (const TaskOutcome& o : m.per_task_outcomes) outcomes.push_back(outcome_json(o));
  j["per_task_outcomes"] = std::move(outcomes);
  ojson windows = ojson::array();
  for (const WindowRecord& w : m.windows_log) windows.push_back(window_json(w));
  j["windows_log"] = std::move(windows);
  ojson servers = ojson::array();
  for (const MecState& s : m.servers) {
    ojson log = ojson::array();
    for (const Assignment& a : s.assignment_log) {
      log.push_back({{"task_id", a.task_id}, {"start", a.start}, {"end", a.end}});
    }
    servers.push_back(
        {{"server_id", s.server_id}, {"available_at", s.available_at}, {"assignment_log", log}});
  }
  j["servers"] = std::move(servers);
  j["convergence"] = m.convergence ? ojson(m.convergence->best_fitness) : ojson(nullptr);
  return j.dump(2) + "\n";
}

std::string outcomes_to_jsonl(const RunMetrics& metrics) {
  std::string out;
  for (const TaskOutcome& o : metrics.per_task_outcomes) out += outcome_json(o).dump() + "\n";
  return out;
}

std::string windows_to_jsonl(const RunMetrics& metrics) {
  std::string out;
  for (const WindowRecord& w : metrics.windows_log) out += window_json(w).dump() + "\n";
  return out;
}

SummaryRow summary_row(const RunMetrics& m, int vehicles, std::uint64_t seed) {
  return {m.scheduler,   vehicles,          seed,           m.dropped_count,
          m.drop_ratio,  m.total_e2e,       m.avg_e2e,      m.total_waiting,
          m.avg_waiting, m.scheduler_exec_time, m.objective};
}

std::string to_csv_line(const SummaryRow& r) {
  std::string line = csv_escape(r.scheduler);
  for (const std::string& field :
       {std::to_string(r.vehicles), std::to_string(r.seed), std::to_string(r.dropped_count),
        format_double(r.drop_ratio), format_double(r.total_e2e), format_double(r.avg_e2e),
        format_double(r.total_waiting), format_double(r.avg_waiting),
        format_double(r.exec_time_s), format_double(r.objective)}) {
    line += ',';
    line += field;
  }
  return line;
}

std::vector<SummaryRow> read_summary_csv(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  if (!std::getline(in, line) || line != kSummaryHeader) {
    throw ParseError("line 1: unexpected summary header");
  }
  std::vector<SummaryRow> rows;
  std::size_t number = 1;
  while (std::getline(in, line)) {
    ++number;
    if (line.empty()) continue;
    const auto f = split_csv_line(line, number);
    if (f.size() != 11) {
      throw ParseError("line " + std::to_string(number) + ": expected 11 fields, got " +
                       std::to_string(f.size()));
    }
    SummaryRow r;
    r.scheduler = f[0];
    r.vehicles = parse_number<int>(f[1], "vehicles", number);
    r.seed = parse_number<std::uint64_t>(f[2], "seed", number);
    r.dropped_count = parse_number<std::size_t>(f[3], "dropped_count", number);
    r.drop_ratio = parse_number<double>(f[4], "drop_ratio", number);
    r.total_e2e = parse_number<double>(f[5], "total_e2e", number);
    r.avg_e2e = parse_number<double>(f[6], "avg_e2e", number);
    r.total_waiting = parse_number<double>(f[7], "total_waiting", number);
    r.avg_waiting = parse_number<double>(f[8], "avg_waiting", number);
    r.exec_time_s = parse_number<double>(f[9], "exec_time_s", number);
    r.objective = parse_number<double>(f[10], "objective", number);
    rows.push_back(std::move(r));
  }
  return rows;
}

std::string convergence_to_csv(const ConvergenceTrace& trace) {
  std::string out = "iteration,best_fitness\n";
  for (std::size_t i = 0; i < trace.best_fitness.size(); ++i) {
    out += std::to_string(i) + "," + format_double(trace.best_fitness[i]) + "\n";
  }
  return out;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(path.string() + ": cannot open for reading");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_file(const std::filesystem::path& path, std::string_view contents) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(tmp.string() + ": cannot open for writing");
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) throw Error(tmp.string() + ": write failed");
  }
  std::filesystem::rename(tmp, path);
}

Scenario load_scenario(const std::filesystem::path& path) {
  try {
    return scenario_from_json(read_file(path));
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

void save_scenario(const std::filesystem::path& path, const Scenario& scenario) {
  write_file(path, scenario_to_json(scenario));
}

}  // namespace vecoffload
