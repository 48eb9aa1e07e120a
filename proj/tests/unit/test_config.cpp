#include <doctest.h>

#include "core/config.hpp"

using namespace cmcert;
using doctest::Approx;

namespace {

const char* kBuck = R"(# reference buck
Vin = 12
Vout = 2.2
L = 240n     # H
C = 100u
R = 0.4
Rs = 10m
T_on = 100n
)";

ConfigIssue issue_of(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigParseError& e) {
    return e.issue();
  }
  FAIL("expected a config error");
  return ConfigIssue::kSyntax;
}

}  // namespace

TEST_SUITE("config") {

TEST_CASE("si suffixes") {
  CHECK(parse_si("240n") == Approx(2.4e-7));
  CHECK(parse_si("100u") == Approx(1e-4));
  CHECK(parse_si("10m") == Approx(1e-2));
  CHECK(parse_si("2k") == Approx(2e3));
  CHECK(parse_si("1.5e-3") == Approx(1.5e-3));
  CHECK(parse_si(" -0.25 ") == Approx(-0.25));
  CHECK_THROWS_AS(parse_si("3x"), ConfigParseError);
  CHECK_THROWS_AS(parse_si("abc"), ConfigParseError);
  CHECK_THROWS_AS(parse_si("1e400"), ConfigParseError);
}

TEST_CASE("parse reference buck") {
  const RunConfig cfg = parse_config(kBuck);
  CHECK(cfg.number("L") == Approx(2.4e-7));
  CHECK(cfg.number("T_fixed") == Approx(1e-7));
  CHECK(cfg.is_default("lambda"));
  CHECK_FALSE(cfg.is_default("L"));
  CHECK(cfg.lines.at("L") == 4);
  const ConverterParams p = cfg.converter();
  CHECK(p.t_var_min == Approx(0.5 * 445.4545e-9).epsilon(1e-6));
  CHECK(p.lambda == 0.5);
  CHECK(cfg.alpha_grid().size() == 21);
  CHECK(cfg.alpha_grid().front() == -0.5);
  CHECK(cfg.beta_grid().back() == 0.5);
}

TEST_CASE("degenerate timing and explicit bounds") {
  RunConfig cfg = parse_config(std::string(kBuck) + "timing = degenerate\n");
  ConverterParams p = cfg.converter();
  CHECK(p.t_var_min == p.t_var_max);
  cfg = parse_config(std::string(kBuck) + "t_var_min = 300n\nt_var_max = 600n\ntiming = degenerate\n");
  p = cfg.converter();
  CHECK(p.t_var_min == Approx(300e-9));
  CHECK(p.t_var_max == Approx(600e-9));
  CHECK(issue_of(std::string(kBuck) + "t_var_min = 300n\n") == ConfigIssue::kBadValue);
}

TEST_CASE("errors name the line") {
  try {
    parse_config("Vin = 12\nfoo = 3\n");
    FAIL("no error");
  } catch (const ConfigParseError& e) {
    CHECK(e.issue() == ConfigIssue::kUnknownKey);
    CHECK(e.line() == 2);
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
  }
  try {
    parse_config("Vin = 12\n\nL = 240q\n");
    FAIL("no error");
  } catch (const ConfigParseError& e) {
    CHECK(e.issue() == ConfigIssue::kBadUnit);
    CHECK(e.line() == 3);
  }
  CHECK(issue_of("Vin 12\n") == ConfigIssue::kSyntax);
  CHECK(issue_of("Vin =\n") == ConfigIssue::kSyntax);
  CHECK(issue_of("Vin = 1\nVin = 2\n") == ConfigIssue::kBadValue);
  CHECK(issue_of("topology = flyback\n") == ConfigIssue::kBadValue);
  CHECK(issue_of("n_cycles = 2.5\n") == ConfigIssue::kBadValue);
}

TEST_CASE("invariants") {
  CHECK(issue_of("lambda = 1.5\n") == ConfigIssue::kBadValue);
  CHECK(issue_of("L = -1n\n") == ConfigIssue::kBadValue);
  CHECK(issue_of("alpha_hat = 0.2\nbeta_hat = 0.3\n") == ConfigIssue::kBadValue);
  CHECK(issue_of("alpha_min = 0.1\nalpha_max = 0\n") == ConfigIssue::kBadValue);
  CHECK(issue_of("n_cycles = 0\n") == ConfigIssue::kBadValue);
}

TEST_CASE("required keys per command") {
  std::string text = kBuck;
  text.erase(text.find("C = 100u"), 9);
  const RunConfig cfg = parse_config(text);
  try {
    cfg.require(Command::kSimulate);
    FAIL("no error");
  } catch (const ConfigParseError& e) {
    CHECK(e.issue() == ConfigIssue::kMissingKey);
    CHECK(e.key() == "C");
  }
  CHECK_NOTHROW(cfg.require(Command::kGainSurface));
  CHECK_NOTHROW(cfg.require(Command::kValidateTables));
  const RunConfig full = parse_config(kBuck);
  CHECK_NOTHROW(full.require(Command::kMaxSector));
  CHECK_THROWS_AS(full.require(Command::kCertify), ConfigParseError);
  CHECK_NOTHROW(parse_config(std::string(kBuck) + "interference = none\n").require(Command::kSimulate));
}

TEST_CASE("echo lists every key") {
  const RunConfig cfg = parse_config(kBuck);
  const std::string echo = cfg.echo();
  for (const auto& key : config_keys()) {
    CHECK(echo.find(key + " = ") != std::string::npos);
  }
  CHECK(echo.find("lambda = 0.5  # default") != std::string::npos);
  CHECK(echo.find("L = 240n\n") != std::string::npos);
  CHECK(echo.find("# alpha_hat = (unset)") != std::string::npos);
}

TEST_CASE("commands") {
  CHECK(parse_command("gain-surface") == Command::kGainSurface);
  CHECK_FALSE(parse_command("plot"));
  CHECK(to_string(Command::kValidateTables) == "validate-tables");
}

}
