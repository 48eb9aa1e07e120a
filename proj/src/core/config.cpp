#include "core/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

namespace cmcert {

namespace {

enum class Kind { kNumber, kInteger, kChoice, kPath };

struct KeySpec {
  std::string_view name;
  Kind kind;
  std::optional<std::string_view> fallback;  // default value, if any
  std::vector<std::string_view> choices = {};
};

// Canonical order is the echo order.
const std::vector<KeySpec>& specs() {
  static const std::vector<KeySpec> table = {
      {"topology", Kind::kChoice, "buck", {"buck", "boost"}},
      {"Vin", Kind::kNumber, std::nullopt},
      {"Vout", Kind::kNumber, std::nullopt},
      {"L", Kind::kNumber, std::nullopt},
      {"C", Kind::kNumber, std::nullopt},
      {"R", Kind::kNumber, std::nullopt},
      {"Rs", Kind::kNumber, "0"},
      {"T_fixed", Kind::kNumber, std::nullopt},
      {"lambda", Kind::kNumber, "0.5"},
      {"timing", Kind::kChoice, "default", {"default", "degenerate"}},
      {"t_var_min", Kind::kNumber, std::nullopt},
      {"t_var_max", Kind::kNumber, std::nullopt},
      {"alpha_hat", Kind::kNumber, std::nullopt},
      {"beta_hat", Kind::kNumber, std::nullopt},
      {"assumption_threshold", Kind::kNumber, "0.1"},
      {"gain_tol", Kind::kNumber, "1e-4"},
      {"gamma_sq_ceiling", Kind::kNumber, "1e6"},
      {"margin_scale", Kind::kNumber, "1e-10"},
      {"sector_tol", Kind::kNumber, "1e-4"},
      {"boost_case_ii", Kind::kChoice, "printed", {"printed", "normalized"}},
      {"alpha_min", Kind::kNumber, "-0.5"},
      {"alpha_max", Kind::kNumber, "0"},
      {"alpha_steps", Kind::kInteger, "21"},
      {"beta_min", Kind::kNumber, "0"},
      {"beta_max", Kind::kNumber, "0.5"},
      {"beta_steps", Kind::kInteger, "21"},
      {"n_cycles", Kind::kInteger, "5000"},
      {"step_fraction", Kind::kNumber, "0.5"},
      {"step", Kind::kNumber, std::nullopt},
      {"interference", Kind::kChoice, "sector", {"none", "sector", "sinusoid"}},
      {"schedule", Kind::kChoice, "alternating",
       {"alternating", "constant", "random"}},
      {"constant_slope", Kind::kNumber, "0"},
      {"sin_amplitude", Kind::kNumber, "0"},
      {"sin_period", Kind::kNumber, "1u"},
      {"sin_phase", Kind::kNumber, "0"},
      {"seed", Kind::kInteger, "1"},
      {"settle_window", Kind::kInteger, "500"},
      {"settle_tol", Kind::kNumber, "1u"},
      {"growth_factor", Kind::kNumber, "1.05"},
      {"current_guard", Kind::kNumber, "1k"},
      {"voltage_guard", Kind::kNumber, "1k"},
      {"surface_csv", Kind::kPath, "gain_surface.csv"},
      {"trace_csv", Kind::kPath, "trace.csv"},
  };
  return table;
}

const std::map<std::string_view, std::string_view>& aliases() {
  static const std::map<std::string_view, std::string_view> table = {
      {"T_on", "T_fixed"}, {"T_off", "T_fixed"}};
  return table;
}

const KeySpec* find_spec(std::string_view key) {
  for (const auto& s : specs()) {
    if (s.name == key) return &s;
  }
  return nullptr;
}

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

void check_value(const KeySpec& spec, std::string_view value, int line) {
  const std::string key(spec.name);
  switch (spec.kind) {
    case Kind::kNumber:
      parse_si(value, key, line);
      return;
    case Kind::kInteger: {
      const double v = parse_si(value, key, line);
      if (v != std::floor(v) || std::abs(v) > 9e15) {
        throw ConfigParseError(ConfigIssue::kBadValue, key, line,
                               fmt::format("'{}' is not an integer", value));
      }
      return;
    }
    case Kind::kChoice:
      if (std::find(spec.choices.begin(), spec.choices.end(), value) ==
          spec.choices.end()) {
        std::string allowed;
        for (auto c : spec.choices) {
          if (!allowed.empty()) allowed += "|";
          allowed += c;
        }
        throw ConfigParseError(
            ConfigIssue::kBadValue, key, line,
            fmt::format("'{}' is not one of {}", value, allowed));
      }
      return;
    case Kind::kPath:
      if (value.empty()) {
        throw ConfigParseError(ConfigIssue::kBadValue, key, line,
                               "empty path");
      }
      return;
  }
}

void check_invariants(const RunConfig& cfg) {
  auto fail = [&](std::string_view key, const std::string& why) {
    const auto it = cfg.lines.find(std::string(key));
    throw ConfigParseError(ConfigIssue::kBadValue, std::string(key),
                           it == cfg.lines.end() ? 0 : it->second, why);
  };
  for (std::string_view key : {"Vin", "Vout", "L", "C", "R", "T_fixed",
                               "t_var_min", "t_var_max"}) {
    if (cfg.has(key) && !(cfg.number(key) > 0.0)) fail(key, "must be positive");
  }
  if (cfg.has("Rs") && cfg.number("Rs") < 0.0) fail("Rs", "must be >= 0");
  const double lambda = cfg.number("lambda");
  if (!(lambda >= 0.0 && lambda <= 1.0)) {
    fail("lambda", fmt::format("{} outside [0, 1]", lambda));
  }
  const double th = cfg.number("assumption_threshold");
  if (!(th > 0.0 && th < 1.0)) fail("assumption_threshold", "must be in (0, 1)");
  for (std::string_view key : {"gain_tol", "gamma_sq_ceiling", "margin_scale",
                               "sector_tol", "settle_tol", "growth_factor",
                               "current_guard", "voltage_guard", "sin_period",
                               "step_fraction"}) {
    if (!(cfg.number(key) > 0.0)) fail(key, "must be positive");
  }
  for (std::string_view key :
       {"alpha_steps", "beta_steps", "n_cycles", "settle_window"}) {
    if (cfg.integer(key) < 1) fail(key, "must be at least 1");
  }
  if (cfg.integer("seed") < 0) fail("seed", "must be >= 0");
  if (cfg.number("alpha_min") > cfg.number("alpha_max")) {
    fail("alpha_min", "exceeds alpha_max");
  }
  if (cfg.number("beta_min") > cfg.number("beta_max")) {
    fail("beta_min", "exceeds beta_max");
  }
  if (cfg.has("t_var_min") != cfg.has("t_var_max")) {
    fail(cfg.has("t_var_min") ? "t_var_max" : "t_var_min",
         "t_var_min and t_var_max must be given together");
  }
  if (cfg.has("alpha_hat") && cfg.has("beta_hat")) {
    try {
      cfg.sector().validate();
    } catch (const InvalidArgument& e) {
      fail("alpha_hat", e.what());
    }
  }
}

std::vector<double> grid(double lo, double hi, long steps) {
  std::vector<double> g(static_cast<std::size_t>(steps));
  for (long k = 0; k < steps; ++k) {
    g[static_cast<std::size_t>(k)] =
        steps == 1 ? lo : lo + (hi - lo) * static_cast<double>(k) / (steps - 1);
  }
  if (steps > 1) g.back() = hi;
  return g;
}

}  // namespace

std::string_view to_string(ConfigIssue issue) {
  switch (issue) {
    case ConfigIssue::kMissingKey:
      return "MissingKey";
    case ConfigIssue::kBadUnit:
      return "BadUnit";
    case ConfigIssue::kUnknownKey:
      return "UnknownKey";
    case ConfigIssue::kBadValue:
      return "BadValue";
    case ConfigIssue::kSyntax:
      return "Syntax";
  }
  return "Syntax";
}

ConfigParseError::ConfigParseError(ConfigIssue issue, std::string key,
                                   int line, const std::string& detail)
    : ConfigError(line > 0 ? fmt::format("{}(\"{}\") at line {}: {}",
                                         to_string(issue), key, line, detail)
                           : fmt::format("{}(\"{}\"): {}", to_string(issue),
                                         key, detail)),
      issue_(issue),
      key_(std::move(key)),
      line_(line) {}

std::optional<Command> parse_command(std::string_view name) {
  for (Command c : {Command::kEquilibrium, Command::kGainSurface,
                    Command::kCertify, Command::kMaxSector, Command::kSimulate,
                    Command::kValidateTables}) {
    if (to_string(c) == name) return c;
  }
  return std::nullopt;
}

std::string_view to_string(Command command) {
  switch (command) {
    case Command::kEquilibrium:
      return "equilibrium";
    case Command::kGainSurface:
      return "gain-surface";
    case Command::kCertify:
      return "certify";
    case Command::kMaxSector:
      return "max-sector";
    case Command::kSimulate:
      return "simulate";
    case Command::kValidateTables:
      return "validate-tables";
  }
  return "equilibrium";
}

double parse_si(std::string_view text, std::string_view key, int line) {
  const std::string_view t = trim(text);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
  if (ec != std::errc() || ptr == t.data()) {
    throw ConfigParseError(ConfigIssue::kBadUnit, std::string(key), line,
                           fmt::format("'{}' is not a number", t));
  }
  const std::string_view rest = trim(t.substr(ptr - t.data()));
  double scale = 1.0;
  if (rest == "n") {
    scale = 1e-9;
  } else if (rest == "u") {
    scale = 1e-6;
  } else if (rest == "m") {
    scale = 1e-3;
  } else if (rest == "k") {
    scale = 1e3;
  } else if (!rest.empty()) {
    throw ConfigParseError(
        ConfigIssue::kBadUnit, std::string(key), line,
        fmt::format("unknown suffix '{}' (allowed: n, u, m, k)", rest));
  }
  const double out = value * scale;
  if (!std::isfinite(out)) {
    throw ConfigParseError(ConfigIssue::kBadUnit, std::string(key), line,
                           "value is not finite");
  }
  return out;
}

bool RunConfig::has(std::string_view key) const {
  return values.count(std::string(key)) > 0;
}

bool RunConfig::is_default(std::string_view key) const {
  return lines.count(std::string(key)) == 0;
}

double RunConfig::number(std::string_view key) const {
  const auto it = values.find(std::string(key));
  if (it == values.end()) {
    throw ConfigParseError(ConfigIssue::kMissingKey, std::string(key), 0,
                           "key is required");
  }
  const auto line = lines.find(it->first);
  return parse_si(it->second, key, line == lines.end() ? 0 : line->second);
}

long RunConfig::integer(std::string_view key) const {
  return static_cast<long>(number(key));
}

const std::string& RunConfig::text(std::string_view key) const {
  const auto it = values.find(std::string(key));
  if (it == values.end()) {
    throw ConfigParseError(ConfigIssue::kMissingKey, std::string(key), 0,
                           "key is required");
  }
  return it->second;
}

void RunConfig::require(Command command) const {
  std::vector<std::string_view> keys;
  const std::vector<std::string_view> converter_keys = {
      "Vin", "Vout", "L", "C", "R", "T_fixed"};
  switch (command) {
    case Command::kEquilibrium:
    case Command::kMaxSector:
      keys = converter_keys;
      break;
    case Command::kCertify:
      keys = converter_keys;
      keys.push_back("alpha_hat");
      keys.push_back("beta_hat");
      break;
    case Command::kSimulate:
      keys = converter_keys;
      if (interference() != InterferenceChoice::kNone) {
        keys.push_back("alpha_hat");
        keys.push_back("beta_hat");
      }
      break;
    case Command::kGainSurface:
    case Command::kValidateTables:
      break;
  }
  for (auto key : keys) {
    if (!has(key)) {
      throw ConfigParseError(
          ConfigIssue::kMissingKey, std::string(key), 0,
          fmt::format("required by '{}'", to_string(command)));
    }
  }
}

ConverterParams RunConfig::converter() const {
  ConverterParams p;
  p.topology = text("topology") == "boost" ? Topology::kBoostConstOff
                                           : Topology::kBuckConstOn;
  p.v_in = number("Vin");
  p.v_out = number("Vout");
  p.inductance = number("L");
  p.capacitance = number("C");
  p.load = number("R");
  p.t_fixed = number("T_fixed");
  p.lambda = number("lambda");
  if (has("t_var_min")) {
    p.t_var_min = number("t_var_min");
    p.t_var_max = number("t_var_max");
  } else {
    const TimingBounds b = timing() == TimingMode::kDegenerate
                               ? degenerate_timing_bounds(p)
                               : default_timing_bounds(p);
    p.t_var_min = b.t_var_min;
    p.t_var_max = b.t_var_max;
  }
  p.validate();
  return p;
}

SectorBound RunConfig::sector() const {
  return {number("alpha_hat"), number("beta_hat")};
}

GainSolverOptions RunConfig::solver() const {
  GainSolverOptions o;
  o.tolerance = number("gain_tol");
  o.gamma_sq_ceiling = number("gamma_sq_ceiling");
  o.margin_scale = number("margin_scale");
  return o;
}

ClassifyOptions RunConfig::classify() const {
  ClassifyOptions o;
  o.settle_window = static_cast<std::size_t>(integer("settle_window"));
  o.settle_tol = number("settle_tol");
  o.growth_factor = number("growth_factor");
  return o;
}

SimOptions RunConfig::sim_options() const {
  return {number("current_guard"), number("voltage_guard")};
}

double RunConfig::assumption_threshold() const {
  return number("assumption_threshold");
}

BoostCaseIiForm RunConfig::boost_case_ii() const {
  return text("boost_case_ii") == "normalized" ? BoostCaseIiForm::kNormalized
                                               : BoostCaseIiForm::kPrinted;
}

TimingMode RunConfig::timing() const {
  return text("timing") == "degenerate" ? TimingMode::kDegenerate
                                        : TimingMode::kDefault;
}

InterferenceChoice RunConfig::interference() const {
  const std::string& v = text("interference");
  if (v == "none") return InterferenceChoice::kNone;
  if (v == "sinusoid") return InterferenceChoice::kSinusoid;
  return InterferenceChoice::kSector;
}

ScheduleChoice RunConfig::schedule() const {
  const std::string& v = text("schedule");
  if (v == "constant") return ScheduleChoice::kConstant;
  if (v == "random") return ScheduleChoice::kRandom;
  return ScheduleChoice::kAlternating;
}

std::uint64_t RunConfig::seed() const {
  return static_cast<std::uint64_t>(integer("seed"));
}

std::vector<double> RunConfig::alpha_grid() const {
  return grid(number("alpha_min"), number("alpha_max"), integer("alpha_steps"));
}

std::vector<double> RunConfig::beta_grid() const {
  return grid(number("beta_min"), number("beta_max"), integer("beta_steps"));
}

std::string RunConfig::echo() const {
  std::string out;
  for (const auto& s : specs()) {
    const auto it = values.find(std::string(s.name));
    if (it == values.end()) {
      out += fmt::format("# {} = (unset)\n", s.name);
    } else if (is_default(s.name)) {
      out += fmt::format("{} = {}  # default\n", s.name, it->second);
    } else {
      out += fmt::format("{} = {}\n", s.name, it->second);
    }
  }
  return out;
}

RunConfig parse_config(std::string_view text) {
  RunConfig cfg;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto end = std::min(text.find('\n', pos), text.size());
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigParseError(ConfigIssue::kSyntax, std::string(line), line_no,
                             "expected 'key = value'");
    }
    std::string_view key = trim(line.substr(0, eq));
    const std::string_view value = trim(line.substr(eq + 1));
    if (const auto a = aliases().find(key); a != aliases().end()) {
      key = a->second;
    }
    const KeySpec* spec = find_spec(key);
    if (spec == nullptr) {
      throw ConfigParseError(ConfigIssue::kUnknownKey, std::string(key),
                             line_no, "not a recognised key");
    }
    if (cfg.lines.count(std::string(key))) {
      throw ConfigParseError(
          ConfigIssue::kBadValue, std::string(key), line_no,
          fmt::format("duplicate of line {}", cfg.lines[std::string(key)]));
    }
    if (value.empty()) {
      throw ConfigParseError(ConfigIssue::kSyntax, std::string(key), line_no,
                             "missing value");
    }
    check_value(*spec, value, line_no);
    cfg.values[std::string(key)] = std::string(value);
    cfg.lines[std::string(key)] = line_no;
    if (end == text.size()) break;
  }
  for (const auto& s : specs()) {
    if (s.fallback && !cfg.has(s.name)) {
      cfg.values[std::string(s.name)] = std::string(*s.fallback);
    }
  }
  check_invariants(cfg);
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(fmt::format("cannot open config '{}'", path));
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> k;
    for (const auto& s : specs()) k.emplace_back(s.name);
    return k;
  }();
  return keys;
}

}  // namespace cmcert
