// cmcert command-line front end. Talks to the library only through the C API.
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cmcert/cmcert.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitNegative = 1;
constexpr int kExitError = 2;

struct Failure {
  cmc_status status;
  std::string message;
};

void check(cmc_status s) {
  if (s != CMC_OK) throw Failure{s, cmc_last_error()};
}

struct CString {
  char* p = nullptr;
  ~CString() { cmc_string_free(p); }
  std::string str() const { return p ? p : ""; }
};

using ConfigPtr = std::unique_ptr<cmc_config, decltype(&cmc_config_free)>;
using ReportPtr = std::unique_ptr<cmc_report, decltype(&cmc_report_free)>;
using TracePtr = std::unique_ptr<cmc_trace, decltype(&cmc_trace_free)>;

ConfigPtr open_config(const std::string& path) {
  cmc_config* cfg = nullptr;
  if (path.empty()) {
    check(cmc_config_parse("", &cfg));
  } else {
    check(cmc_config_load(path.c_str(), &cfg));
  }
  return {cfg, &cmc_config_free};
}

std::string text_key(const cmc_config* cfg, const char* key) {
  CString s;
  check(cmc_config_text(cfg, key, &s.p));
  return s.str();
}

double number_key(const cmc_config* cfg, const char* key) {
  double v = 0.0;
  check(cmc_config_number(cfg, key, &v));
  return v;
}

std::string fmt_num(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9e", v);
  return buf;
}

void print_config(const cmc_config* cfg) {
  CString echo;
  check(cmc_config_echo(cfg, &echo.p));
  std::printf("[config]\n%s\n", echo.p);
}

std::string output_path(const std::string& dir, const std::string& name) {
  std::filesystem::path p(name);
  if (p.is_absolute() || dir.empty()) return p.string();
  std::filesystem::create_directories(dir);
  return (std::filesystem::path(dir) / p).string();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << content;
  if (!out) throw Failure{CMC_ERR_IO, "cannot write '" + path + "'"};
}

int run_equilibrium(const cmc_config* cfg) {
  cmc_converter_params p{};
  check(cmc_config_converter(cfg, &p));
  CString text;
  check(cmc_equilibrium_text(&p, number_key(cfg, "assumption_threshold"), &text.p));
  std::printf("[equilibrium]\n%s", text.p);
  return kExitOk;
}

int run_gain_surface(const cmc_config* cfg, const std::string& out_dir) {
  std::vector<double> axes[2];
  for (int axis = 0; axis < 2; ++axis) {
    size_t n = 0;
    check(cmc_config_grid(cfg, axis, nullptr, 0, &n));
    axes[axis].resize(n);
    check(cmc_config_grid(cfg, axis, axes[axis].data(), n, &n));
  }
  cmc_solver_options opts{};
  check(cmc_config_solver(cfg, &opts));
  std::vector<double> gamma(axes[0].size() * axes[1].size());
  CString csv;
  check(cmc_gain_surface(axes[0].data(), axes[0].size(), axes[1].data(), axes[1].size(),
                         &opts, gamma.data(), &csv.p));
  const std::string path = output_path(out_dir, text_key(cfg, "surface_csv"));
  write_file(path, csv.str());
  size_t infeasible = 0;
  for (double g : gamma) infeasible += std::isinf(g) ? 1 : 0;
  std::printf("[gain-surface]\nrows = %zu\ninfeasible_cells = %zu\nsurface_csv = %s\n",
              gamma.size(), infeasible, path.c_str());
  return kExitOk;
}

int run_certify(const cmc_config* cfg) {
  cmc_converter_params p{};
  check(cmc_config_converter(cfg, &p));
  double a = 0.0;
  double b = 0.0;
  check(cmc_config_sector(cfg, &a, &b));
  cmc_solver_options opts{};
  check(cmc_config_solver(cfg, &opts));
  cmc_certificate cert{};
  double gamma_hat = INFINITY;
  const cmc_status s = cmc_certify_gain(a, b, &opts, &cert);
  if (s == CMC_OK) {
    gamma_hat = cert.gamma_hat;
  } else if (s != CMC_ERR_INFEASIBLE) {
    check(s);
  }
  const double threshold = number_key(cfg, "assumption_threshold");
  cmc_report* raw = nullptr;
  if (p.topology == CMC_BOOST) {
    const int form = text_key(cfg, "boost_case_ii") == "normalized" ? CMC_CASE_II_NORMALIZED
                                                                   : CMC_CASE_II_PRINTED;
    check(cmc_boost_criterion(&p, a, b, gamma_hat, form, threshold, &raw));
  } else {
    check(cmc_buck_criterion(&p, a, b, gamma_hat, threshold, &raw));
  }
  ReportPtr report(raw, &cmc_report_free);
  CString text;
  check(cmc_report_text(report.get(), &text.p));
  std::printf("[certificate]\nsolver_status = %s\nstorage_p = %s\nmultiplier = %s\n\n",
              s == CMC_OK ? "certified" : "infeasible",
              fmt_num(s == CMC_OK ? cert.p : NAN).c_str(),
              fmt_num(s == CMC_OK ? cert.lambda_mult : NAN).c_str());
  std::printf("[report]\n%s", text.p);
  cmc_report_summary sum{};
  check(cmc_report_summary_get(report.get(), &sum));
  return sum.verdict == CMC_CERTIFIED ? kExitOk : kExitNegative;
}

int run_max_sector(const cmc_config* cfg) {
  cmc_converter_params p{};
  check(cmc_config_converter(cfg, &p));
  cmc_solver_options opts{};
  check(cmc_config_solver(cfg, &opts));
  double a = 0.0;
  check(cmc_max_stable_sector(&p, number_key(cfg, "sector_tol"), &opts, &a));
  double threshold = 0.0;
  check(cmc_buck_sector_threshold(&p, &threshold));
  std::printf("[max-sector]\nsector_threshold = %s\nmax_stable_sector = %s\n",
              fmt_num(threshold).c_str(), fmt_num(a).c_str());
  return kExitOk;
}

int run_simulate(const cmc_config* cfg, const std::string& out_dir) {
  cmc_converter_params p{};
  check(cmc_config_converter(cfg, &p));
  cmc_sim_spec spec{};
  check(cmc_config_sim_spec(cfg, &spec));
  cmc_classify_options copts{};
  check(cmc_config_classify(cfg, &copts));
  cmc_trace* raw = nullptr;
  check(cmc_simulate_step(&p, &spec, &raw));
  TracePtr trace(raw, &cmc_trace_free);

  CString csv;
  check(cmc_trace_csv(trace.get(), &csv.p));
  const std::string path = output_path(out_dir, text_key(cfg, "trace_csv"));
  write_file(path, csv.str());

  cmc_sim_verdict v{};
  check(cmc_classify(trace.get(), &copts, &v));
  CString text;
  check(cmc_sim_verdict_text(trace.get(), &copts, &text.p));
  std::printf("[simulate]\nstep = %s\n%strace_csv = %s\n", fmt_num(spec.step).c_str(), text.p,
              path.c_str());
  return v.classification == CMC_STABLE ? kExitOk : kExitNegative;
}

const char* classification_name(int c) {
  switch (c) {
    case CMC_STABLE:
      return "Stable";
    case CMC_UNSTABLE:
      return "Unstable";
    default:
      return "Indeterminate";
  }
}

const char* verdict_name(int v) { return v == CMC_CERTIFIED ? "Certified" : "NotCertified"; }

int run_validate_tables(const cmc_config* cfg) {
  cmc_reference_options opts{};
  check(cmc_config_reference_options(cfg, &opts));
  std::printf(
      "[validate-tables]\n"
      "case,load_ohm,sector_a,threshold_rhs,expected_max_sector,observed_max_sector,"
      "gamma_hat,expected_verdict,observed_verdict,expected_sim,observed_sim,final_rms_A,"
      "match\n");
  bool all = true;
  for (size_t k = 0; k < cmc_reference_case_count(); ++k) {
    cmc_reference_row r{};
    check(cmc_run_reference_case(k, &opts, &r));
    const bool match = std::abs(r.observed_max_sector - r.expected_max_sector) <= 0.03 &&
                       r.observed_verdict == r.expected_verdict &&
                       r.observed_classification == r.expected_classification;
    all = all && match;
    std::printf("%d,%s,%s,%s,%s,%s,%s,%s,%s,%s,%s,%s,%s\n", r.index, fmt_num(r.load).c_str(),
                fmt_num(r.sector_a).c_str(), fmt_num(r.sector_threshold).c_str(),
                fmt_num(r.expected_max_sector).c_str(), fmt_num(r.observed_max_sector).c_str(),
                fmt_num(r.gamma_hat).c_str(), verdict_name(r.expected_verdict),
                verdict_name(r.observed_verdict), classification_name(r.expected_classification),
                classification_name(r.observed_classification), fmt_num(r.final_rms).c_str(),
                match ? "yes" : "no");
  }
  return all ? kExitOk : kExitNegative;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Certified stability analysis for current-mode controlled converters"};
  app.require_subcommand(1);
  std::string config_path;
  std::string out_dir = ".";

  const std::vector<std::pair<std::string, std::string>> commands = {
      {"equilibrium", "Steady state, derived constants and model assumptions"},
      {"gain-surface", "Certified current-block gain over a sector grid (CSV)"},
      {"certify", "Run the stability criterion for the configured sector"},
      {"max-sector", "Largest certified symmetric sector"},
      {"simulate", "Cycle-by-cycle step response under interference (CSV)"},
      {"validate-tables", "Run both reference cases end to end"},
  };
  for (const auto& [name, help] : commands) {
    auto* sub = app.add_subcommand(name, help);
    auto* opt = sub->add_option("config", config_path, "key = value configuration file");
    if (name != "validate-tables") opt->required();
    sub->add_option("--out", out_dir, "Directory for CSV artifacts");
  }
  CLI11_PARSE(app, argc, argv);

  const std::string command = app.get_subcommands().front()->get_name();
  try {
    ConfigPtr cfg = open_config(config_path);
    check(cmc_config_require(cfg.get(), command.c_str()));
    print_config(cfg.get());
    if (command == "equilibrium") return run_equilibrium(cfg.get());
    if (command == "gain-surface") return run_gain_surface(cfg.get(), out_dir);
    if (command == "certify") return run_certify(cfg.get());
    if (command == "max-sector") return run_max_sector(cfg.get());
    if (command == "simulate") return run_simulate(cfg.get(), out_dir);
    return run_validate_tables(cfg.get());
  } catch (const Failure& f) {
    std::fprintf(stderr, "cmcert: %s: %s\n", cmc_status_name(f.status), f.message.c_str());
    return kExitError;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "cmcert: %s\n", e.what());
    return kExitError;
  }
}
