#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <fstream>
#include <regex>
#include <sstream>
#include <thread>

#include "json.hpp"

#include "zoka/bench.hpp"

namespace zoka::bench {

namespace {

const std::vector<std::string> kKnownTags = {
    "katyusha-minibatch", "katyusha-minibatch-ii", "katyusha-fullbatch", "katyusha",
    "zo-svrg",            "projected-zo-gd",       "naive-accel"};

std::string trim(const std::string& text) {
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return "";
  const auto last = text.find_last_not_of(" \t\r\n");
  return text.substr(first, last - first + 1);
}

std::string unquote(const std::string& text) {
  if (text.size() >= 2 && (text.front() == '"' || text.front() == '\'') &&
      text.back() == text.front()) {
    return text.substr(1, text.size() - 2);
  }
  return text;
}

void flatten_json(const nlohmann::json& node, const std::string& prefix, FlatConfig& out) {
  if (node.is_object()) {
    for (const auto& [key, value] : node.items()) {
      flatten_json(value, prefix.empty() ? key : prefix + "." + key, out);
    }
  } else if (node.is_array()) {
    for (std::size_t i = 0; i < node.size(); ++i) {
      flatten_json(node[i], prefix + "[" + std::to_string(i) + "]", out);
    }
  } else if (node.is_string()) {
    out[prefix] = node.get<std::string>();
  } else if (node.is_number_float()) {
    out[prefix] = format_double(node.get<double>());
  } else {
    out[prefix] = node.dump();
  }
}

FlatConfig parse_key_value(const std::string& text) {
  FlatConfig out;
  std::istringstream in(text);
  std::string line;
  std::string section;
  std::map<std::string, int> table_counts;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.rfind("[[", 0) == 0 && line.size() > 4 && line.substr(line.size() - 2) == "]]") {
      const std::string name = trim(line.substr(2, line.size() - 4));
      section = name + "[" + std::to_string(table_counts[name]++) + "]";
      continue;
    }
    if (line.front() == '[' && line.back() == ']') {
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(line_no) + " is not 'key = value'");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = unquote(trim(line.substr(eq + 1)));
    if (key.empty()) throw ConfigError("config line " + std::to_string(line_no) + " has no key");
    out[section.empty() ? key : section + "." + key] = value;
  }
  return out;
}

double to_double(const std::string& key, const std::string& value) {
  char* end = nullptr;
  const double parsed = std::strtod(value.c_str(), &end);
  if (end == value.c_str() || *end != '\0') {
    throw ConfigError("config key '" + key + "' expects a number, got '" + value + "'");
  }
  return parsed;
}

long long to_int(const std::string& key, const std::string& value) {
  const double parsed = to_double(key, value);
  if (parsed != static_cast<double>(static_cast<long long>(parsed))) {
    throw ConfigError("config key '" + key + "' expects an integer, got '" + value + "'");
  }
  return static_cast<long long>(parsed);
}

bool to_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  throw ConfigError("config key '" + key + "' expects true/false, got '" + value + "'");
}

void apply_problem_key(ProblemConfig& p, const std::string& field, const std::string& key,
                       const std::string& value) {
  if (field == "kind") {
    if (value == "logistic") p.kind = ProblemKind::Logistic;
    else if (value == "quadratic") p.kind = ProblemKind::Quadratic;
    else throw ConfigError("unknown problem kind '" + value + "'");
  } else if (field == "d") p.d = static_cast<int>(to_int(key, value));
  else if (field == "n") p.n = static_cast<int>(to_int(key, value));
  else if (field == "mu") p.mu = to_double(key, value);
  else if (field == "box") p.box = to_double(key, value);
  else if (field == "data_seed") p.data_seed = static_cast<std::uint64_t>(to_int(key, value));
  else if (field == "row_norm") p.row_norm = to_double(key, value);
  else if (field == "L") p.quad_L = to_double(key, value);
  else if (field == "quad_mu") p.quad_mu = to_double(key, value);
  else if (field == "center_norm") p.center_norm = to_double(key, value);
  else throw ConfigError("unknown config key '" + key + "'");
}

void apply_solver_key(SolverConfig& s, const std::string& field, const std::string& key,
                      const std::string& value) {
  if (field == "tag") s.tag = value;
  else if (field == "label") s.label = value;
  else if (field == "batch" || field == "batch_size") s.batch_size = static_cast<int>(to_int(key, value));
  else if (field == "epsilon") s.epsilon = to_double(key, value);
  else if (field == "option") {
    try {
      s.option = parse_sampling_option(value);
    } catch (const ArgumentError& e) {
      throw ConfigError(e.what());
    }
  } else if (field == "theta") s.theta = to_double(key, value);
  else if (field == "M") s.M = to_double(key, value);
  else if (field == "p") s.p = to_double(key, value);
  else if (field == "beta") s.beta = to_double(key, value);
  else if (field == "step") s.step = to_double(key, value);
  else if (field == "epoch_length") s.epoch_length = static_cast<int>(to_int(key, value));
  else if (field == "w_update_uses_y_next") s.w_update_uses_y_next = to_bool(key, value);
  else if (field == "record_every") s.record_every = static_cast<int>(to_int(key, value));
  else throw ConfigError("unknown config key '" + key + "'");
}

}  // namespace

FlatConfig parse_flat_config(const std::string& text) {
  const std::string body = trim(text);
  if (!body.empty() && body.front() == '{') {
    nlohmann::json doc;
    try {
      doc = nlohmann::json::parse(body);
    } catch (const nlohmann::json::parse_error& e) {
      throw ConfigError(std::string("invalid JSON config: ") + e.what());
    }
    FlatConfig out;
    flatten_json(doc, "", out);
    return out;
  }
  return parse_key_value(text);
}

ExperimentConfig config_from_flat(const FlatConfig& flat) {
  ExperimentConfig config;
  config.solvers.clear();
  static const std::regex solver_key(R"(solvers?\[(\d+)\]\.(\w+))");

  std::map<int, SolverConfig> solvers;
  for (const auto& [key, value] : flat) {
    std::smatch match;
    if (key.rfind("problem.", 0) == 0) {
      apply_problem_key(config.problem, key.substr(8), key, value);
    } else if (std::regex_match(key, match, solver_key)) {
      apply_solver_key(solvers[std::stoi(match[1])], match[2], key, value);
    } else if (key == "trials") {
      config.trials = static_cast<int>(to_int(key, value));
    } else if (key == "seed") {
      config.seed = static_cast<std::uint64_t>(to_int(key, value));
    } else if (key == "budget.max_queries") {
      config.budget.max_queries = static_cast<std::uint64_t>(to_int(key, value));
    } else if (key == "budget.max_iters") {
      config.budget.max_iters = static_cast<std::uint64_t>(to_int(key, value));
    } else if (key == "budget.target_gap") {
      config.budget.target_gap = to_double(key, value);
    } else if (key == "record_every") {
      config.record_every = static_cast<int>(to_int(key, value));
    } else if (key == "lyapunov") {
      config.lyapunov = to_bool(key, value);
    } else if (key == "grid_points") {
      config.grid_points = static_cast<int>(to_int(key, value));
    } else if (key == "output") {
      config.output = value;
    } else if (key == "threads") {
      config.threads = static_cast<int>(to_int(key, value));
    } else {
      throw ConfigError("unknown config key '" + key + "'");
    }
  }
  for (auto& [index, solver] : solvers) config.solvers.push_back(std::move(solver));
  config.validate();
  return config;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return config_from_flat(parse_flat_config(buffer.str()));
}

void ExperimentConfig::validate() const {
  if (trials < 1) throw ConfigError("trials must be >= 1");
  if (budget.max_queries == 0 || budget.max_iters == 0) throw ConfigError("budgets must be positive");
  if (budget.target_gap && !(*budget.target_gap > 0.0)) {
    throw ConfigError("budget.target_gap must be positive");
  }
  if (record_every < 1) throw ConfigError("record_every must be >= 1");
  if (grid_points < 2) throw ConfigError("grid_points must be >= 2");
  if (problem.d < 1 || problem.n < 1) throw ConfigError("problem dimensions must be positive");
  if (solvers.empty()) throw ConfigError("at least one solver is required");
  for (const SolverConfig& s : solvers) {
    if (std::find(kKnownTags.begin(), kKnownTags.end(), s.tag) == kKnownTags.end()) {
      throw ConfigError("unknown solver tag '" + s.tag + "'");
    }
    if (s.record_every && *s.record_every < 1) throw ConfigError("record_every must be >= 1");
  }
}

int resolve_thread_count(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("ZOKA_THREADS")) {
    const int value = std::atoi(env);
    if (value > 0) return value;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

}  // namespace zoka::bench
