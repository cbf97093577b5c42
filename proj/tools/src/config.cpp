#include "kpzc_cli/config.hpp"

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <sstream>

#include "kpzc/grammar.hpp"
#include "kpzc/sets.hpp"
#include "kpzc/weights.hpp"

namespace kpzc::cli {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

template <typename Int>
Int parse_int(std::string_view key, std::string_view text) {
  text = trim(text);
  Int value{};
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) {
    throw ConfigError(0, std::string(key), "expected an integer, got '" + std::string(text) + "'");
  }
  return value;
}

double parse_double(std::string_view key, std::string_view text) {
  text = trim(text);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) {
    throw ConfigError(0, std::string(key), "expected a number, got '" + std::string(text) + "'");
  }
  return value;
}

std::vector<double> parse_list(std::string_view key, std::string_view text) {
  text = trim(text);
  if (text.size() >= 2 && text.front() == '[' && text.back() == ']') {
    text = text.substr(1, text.size() - 2);
  }
  std::vector<double> out;
  while (!text.empty()) {
    const auto comma = text.find(',');
    out.push_back(parse_double(key, text.substr(0, comma)));
    if (comma == std::string_view::npos) break;
    text.remove_prefix(comma + 1);
    if (trim(text).empty()) throw ConfigError(0, std::string(key), "trailing comma in list");
  }
  if (out.empty()) throw ConfigError(0, std::string(key), "empty list");
  return out;
}

std::string list_text(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ',';
    out += format_number(v[i]);
  }
  return out;
}

void require(bool ok, std::string_view key, const std::string& message) {
  if (!ok) throw ConfigError(0, std::string(key), message);
}

}  // namespace

ConfigError::ConfigError(int line, std::string field, const std::string& message)
    : std::invalid_argument((line > 0 ? "line " + std::to_string(line) + ": " : std::string()) +
                            "field '" + field + "': " + message),
      line_(line),
      field_(std::move(field)),
      message_(message) {}

std::string_view to_string(Command c) {
  switch (c) {
    case Command::validate: return "validate";
    case Command::mass_stats: return "mass-stats";
    case Command::dimension: return "dimension";
    case Command::energy: return "energy";
    case Command::kpz: return "kpz";
    case Command::bound_check: return "bound-check";
  }
  return "kpz";
}

Command parse_command(std::string_view text) {
  for (Command c : {Command::validate, Command::mass_stats, Command::dimension, Command::energy,
                    Command::kpz, Command::bound_check}) {
    if (to_string(c) == text) return c;
  }
  throw ConfigError(0, "command", "unknown command '" + std::string(text) + "'");
}

std::string_view to_string(MeasureKind m) {
  return m == MeasureKind::lebesgue ? "lebesgue" : "cascade";
}

MeasureKind parse_measure_kind(std::string_view text) {
  if (text == "lebesgue") return MeasureKind::lebesgue;
  if (text == "cascade") return MeasureKind::cascade;
  throw ConfigError(0, "measure", "expected lebesgue or cascade, got '" + std::string(text) + "'");
}

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys{
      "command", "d",      "weight", "set",     "n_min",   "n_max",     "s_grid",
      "seeds",   "master_seed", "tail", "layout", "tolerance", "depth", "points",
      "measure", "exponents", "epsilon", "threads", "out"};
  return keys;
}

void set_field(ExperimentConfig& cfg, std::string_view key, std::string_view raw) {
  const std::string_view value = trim(raw);
  const std::string k(key);
  try {
    if (key == "command") {
      cfg.command = parse_command(value);
    } else if (key == "d") {
      cfg.d = parse_int<int>(key, value);
      require(cfg.d >= 1 && cfg.d <= kMaxDim, key, "dimension must lie in [1, 8]");
    } else if (key == "weight") {
      require(!value.empty(), key, "empty weight spec");
      cfg.weight = std::string(value);
    } else if (key == "set") {
      require(!value.empty(), key, "empty set spec");
      cfg.set = std::string(value);
    } else if (key == "n_min" || key == "n_max") {
      const int n = parse_int<int>(key, value);
      require(n >= 0 && n <= kMaxDepth, key, "depth must lie in [0, 60]");
      (key == "n_min" ? cfg.n_min : cfg.n_max) = n;
    } else if (key == "s_grid") {
      auto grid = parse_list(key, value);
      require(std::is_sorted(grid.begin(), grid.end()) &&
                  std::adjacent_find(grid.begin(), grid.end()) == grid.end(),
              key, "s grid must be strictly increasing");
      require(grid.front() >= 0.0 && grid.back() <= 1.0, key, "s grid must lie in [0,1]");
      require(grid.size() >= 2, key, "s grid needs at least two points");
      cfg.s_grid = std::move(grid);
    } else if (key == "seeds") {
      cfg.seeds = parse_int<std::size_t>(key, value);
      require(cfg.seeds >= 1, key, "need at least one seed");
    } else if (key == "master_seed") {
      cfg.master_seed = parse_int<std::uint64_t>(key, value);
    } else if (key == "tail") {
      cfg.tail = parse_tail_rule(value);
    } else if (key == "layout") {
      cfg.layout = parse_cube_weighting(value);
    } else if (key == "tolerance") {
      cfg.tolerance = parse_double(key, value);
      require(cfg.tolerance > 0.0, key, "tolerance must be positive");
    } else if (key == "depth") {
      cfg.depth = parse_int<int>(key, value);
      require(cfg.depth >= 0 && cfg.depth <= kMaxDepth, key, "depth must lie in [0, 60]");
    } else if (key == "points") {
      cfg.points = parse_int<std::size_t>(key, value);
      require(cfg.points >= 2, key, "need at least two points");
    } else if (key == "measure") {
      cfg.measure = parse_measure_kind(value);
    } else if (key == "exponents") {
      auto ex = parse_list(key, value);
      for (double s : ex) require(s >= 0.0 && s <= 1.0, key, "exponents must lie in [0,1]");
      cfg.exponents = std::move(ex);
    } else if (key == "epsilon") {
      cfg.epsilon = parse_double(key, value);
      require(cfg.epsilon > 0.0, key, "epsilon must be positive");
    } else if (key == "threads") {
      cfg.threads = parse_int<unsigned>(key, value);
      require(cfg.threads >= 1, key, "thread budget must be at least 1");
    } else if (key == "out") {
      require(!value.empty(), key, "empty output directory");
      cfg.out = std::string(value);
    } else {
      throw ConfigError(0, k, "unknown field");
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(0, k, e.what());
  }
}

std::string field_text(const ExperimentConfig& cfg, std::string_view key) {
  if (key == "command") return std::string(to_string(cfg.command));
  if (key == "d") return std::to_string(cfg.d);
  if (key == "weight") return cfg.weight;
  if (key == "set") return cfg.set;
  if (key == "n_min") return cfg.n_min ? std::to_string(*cfg.n_min) : "";
  if (key == "n_max") return cfg.n_max ? std::to_string(*cfg.n_max) : "";
  if (key == "s_grid") return cfg.s_grid ? list_text(*cfg.s_grid) : "";
  if (key == "seeds") return std::to_string(cfg.seeds);
  if (key == "master_seed") return std::to_string(cfg.master_seed);
  if (key == "tail") return to_string(cfg.tail);
  if (key == "layout") return std::string(to_string(cfg.layout));
  if (key == "tolerance") return format_number(cfg.tolerance);
  if (key == "depth") return std::to_string(cfg.depth);
  if (key == "points") return std::to_string(cfg.points);
  if (key == "measure") return cfg.measure ? std::string(to_string(*cfg.measure)) : "";
  if (key == "exponents") return cfg.exponents ? list_text(*cfg.exponents) : "";
  if (key == "epsilon") return format_number(cfg.epsilon);
  if (key == "threads") return std::to_string(cfg.threads);
  if (key == "out") return cfg.out;
  throw ConfigError(0, std::string(key), "unknown field");
}

ExperimentConfig parse_config(std::string_view text, ExperimentConfig base, KeyLines* lines) {
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    ++line_no;
    const auto nl = text.find('\n', pos);
    const std::size_t end = nl == std::string_view::npos ? text.size() : nl;
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError(line_no, std::string(trim(line)), "expected 'key = value'");
    }
    const std::string key(trim(line.substr(0, eq)));
    try {
      set_field(base, key, line.substr(eq + 1));
    } catch (const ConfigError& e) {
      throw ConfigError(line_no, e.field(), e.message());
    }
    if (lines) (*lines)[key] = line_no;
  }
  return base;
}

std::string emit_config(const ExperimentConfig& cfg, bool include_runtime) {
  std::ostringstream out;
  for (const auto& key : config_keys()) {
    if (!include_runtime && (key == "threads" || key == "out")) continue;
    const std::string value = field_text(cfg, key);
    if (value.empty()) continue;
    out << key << " = " << value << '\n';
  }
  return out.str();
}

void validate_config(ExperimentConfig& cfg, const KeyLines* lines) {
  auto fail = [&](const std::string& field, const std::string& message) {
    int line = 0;
    if (lines) {
      if (auto it = lines->find(field); it != lines->end()) line = it->second;
    }
    throw ConfigError(line, field, message);
  };
  try {
    cfg.weight = to_string(parse_weight_model(cfg.weight, cfg.d));
  } catch (const std::exception& e) {
    fail("weight", e.what());
  }
  try {
    cfg.set = parse_set(cfg.set, cfg.d).to_string();
  } catch (const std::exception& e) {
    fail("set", e.what());
  }
  if (cfg.n_min && cfg.n_max && *cfg.n_min > *cfg.n_max) fail("n_min", "n_min exceeds n_max");
}

unsigned default_threads() {
  const char* env = std::getenv("KPZC_THREADS");
  if (env == nullptr) return 1;
  unsigned value = 0;
  const std::string_view text(env);
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size() || value == 0) return 1;
  return value;
}

}  // namespace kpzc::cli
