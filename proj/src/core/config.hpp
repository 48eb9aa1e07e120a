#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "core/converter_model.hpp"
#include "core/criteria.hpp"
#include "core/error.hpp"
#include "core/lure_gain.hpp"
#include "core/simulator.hpp"

namespace cmcert {

enum class ConfigIssue { kMissingKey, kBadUnit, kUnknownKey, kBadValue, kSyntax };
std::string_view to_string(ConfigIssue issue);

/// Config failure tied to a key and, when known, the 1-based source line.
class ConfigParseError : public ConfigError {
 public:
  ConfigParseError(ConfigIssue issue, std::string key, int line,
                   const std::string& detail);

  ConfigIssue issue() const noexcept { return issue_; }
  const std::string& key() const noexcept { return key_; }
  int line() const noexcept { return line_; }  // 0 when not from a line

 private:
  ConfigIssue issue_;
  std::string key_;
  int line_;
};

enum class Command {
  kEquilibrium,
  kGainSurface,
  kCertify,
  kMaxSector,
  kSimulate,
  kValidateTables,
};

std::optional<Command> parse_command(std::string_view name);
std::string_view to_string(Command command);

enum class TimingMode { kDefault, kDegenerate };
enum class InterferenceChoice { kNone, kSector, kSinusoid };
enum class ScheduleChoice { kAlternating, kConstant, kRandom };

/// Parses "2.2", "240n", "1e-6", "100u". Suffixes n, u, m, k scale by
/// 1e-9, 1e-6, 1e-3, 1e3. Throws ConfigParseError(kBadUnit) otherwise.
double parse_si(std::string_view text, std::string_view key = {},
                int line = 0);

struct RunConfig {
  // Every key after defaults, in canonical form, for echoing.
  std::map<std::string, std::string> values;
  std::map<std::string, int> lines;  // key -> source line, explicit keys only

  bool has(std::string_view key) const;
  bool is_default(std::string_view key) const;

  double number(std::string_view key) const;
  long integer(std::string_view key) const;
  const std::string& text(std::string_view key) const;

  /// Throws ConfigParseError(kMissingKey) for the first absent key.
  void require(Command command) const;

  /// Converter parameters with timing bounds resolved: explicit t_var_min /
  /// t_var_max win, otherwise `timing` picks default or degenerate bounds.
  ConverterParams converter() const;

  SectorBound sector() const;
  GainSolverOptions solver() const;
  ClassifyOptions classify() const;
  SimOptions sim_options() const;
  double assumption_threshold() const;
  BoostCaseIiForm boost_case_ii() const;
  TimingMode timing() const;
  InterferenceChoice interference() const;
  ScheduleChoice schedule() const;
  std::uint64_t seed() const;

  std::vector<double> alpha_grid() const;
  std::vector<double> beta_grid() const;

  /// "key = value" lines for every key, defaults marked.
  std::string echo() const;
};

/// One `key = value` per line, `#` starts a comment. Values are validated
/// by type; physical invariants (e.g. lambda in [0, 1]) raise kBadValue.
RunConfig parse_config(std::string_view text);
RunConfig load_config(const std::string& path);

/// All keys in canonical order.
const std::vector<std::string>& config_keys();

}  // namespace cmcert
