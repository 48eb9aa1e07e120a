#include <doctest.h>

#include <cmath>
#include <string>
#include <vector>

#include "cmcert/cmcert.h"

using doctest::Approx;

namespace {

const char* kBuck =
    "Vin = 12\nVout = 2.2\nL = 240n\nC = 100u\nR = 0.05\nT_on = 100n\n"
    "timing = degenerate\nalpha_hat = -0.3\nbeta_hat = 0.3\n";

}  // namespace

TEST_SUITE("capi") {

TEST_CASE("status names and errors") {
  CHECK(std::string(cmc_status_name(CMC_OK)) == "ok");
  cmc_config* cfg = nullptr;
  CHECK(cmc_config_parse("lambda = 1.5\n", &cfg) == CMC_ERR_CONFIG);
  CHECK(cfg == nullptr);
  CHECK(std::string(cmc_last_error()).find("lambda") != std::string::npos);
  CHECK(cmc_config_parse(nullptr, &cfg) == CMC_ERR_INVALID_ARGUMENT);
  CHECK(cmc_config_load("/does/not/exist.cfg", &cfg) == CMC_ERR_IO);
  cmc_config_free(nullptr);
  cmc_report_free(nullptr);
  cmc_trace_free(nullptr);
}

TEST_CASE("config round trip") {
  cmc_config* cfg = nullptr;
  REQUIRE(cmc_config_parse(kBuck, &cfg) == CMC_OK);
  CHECK(cmc_config_require(cfg, "certify") == CMC_OK);
  CHECK(cmc_config_require(cfg, "launch") == CMC_ERR_INVALID_ARGUMENT);
  cmc_converter_params p{};
  REQUIRE(cmc_config_converter(cfg, &p) == CMC_OK);
  CHECK(p.inductance == Approx(240e-9));
  CHECK(p.t_var_min == p.t_var_max);
  size_t n = 0;
  REQUIRE(cmc_config_grid(cfg, 0, nullptr, 0, &n) == CMC_OK);
  CHECK(n == 21);
  char* echo = nullptr;
  REQUIRE(cmc_config_echo(cfg, &echo) == CMC_OK);
  CHECK(std::string(echo).find("R = 0.05") != std::string::npos);
  cmc_string_free(echo);
  cmc_sim_spec spec{};
  REQUIRE(cmc_config_sim_spec(cfg, &spec) == CMC_OK);
  CHECK(spec.step == Approx(0.5 * 41.958333).epsilon(1e-6));
  CHECK(spec.interference == CMC_INTERFERENCE_SECTOR);
  cmc_config_free(cfg);

  REQUIRE(cmc_config_parse("Vin = 12\n", &cfg) == CMC_OK);
  CHECK(cmc_config_require(cfg, "simulate") == CMC_ERR_CONFIG);
  CHECK(std::string(cmc_last_error()).find("MissingKey") != std::string::npos);
  cmc_config_free(cfg);
}

TEST_CASE("model, gains and criterion") {
  cmc_converter_params p{};
  REQUIRE(cmc_reference_buck(0.05, 1, &p) == CMC_OK);
  cmc_equilibrium eq{};
  REQUIRE(cmc_equilibrium_compute(&p, &eq) == CMC_OK);
  CHECK(eq.has_i_valley == 1);
  CHECK(eq.i_valley == Approx(41.958333).epsilon(1e-6));

  cmc_certificate cert{};
  REQUIRE(cmc_certify_gain(-0.3, 0.3, nullptr, &cert) == CMC_OK);
  CHECK(cert.gamma_hat == Approx(0.75).epsilon(2e-4));
  cmc_solver_options tight{};
  cmc_solver_defaults(&tight);
  tight.gamma_sq_ceiling = 0.1;
  CHECK(cmc_certify_gain(-0.3, 0.3, &tight, &cert) == CMC_ERR_INFEASIBLE);

  cmc_report* report = nullptr;
  REQUIRE(cmc_buck_criterion(&p, -0.3, 0.3, 0.75, 0.1, &report) == CMC_OK);
  cmc_report_summary s{};
  REQUIRE(cmc_report_summary_get(report, &s) == CMC_OK);
  CHECK(s.verdict == CMC_CERTIFIED);
  CHECK(s.inequality_count == 2);
  cmc_inequality q{};
  REQUIRE(cmc_report_inequality(report, 0, &q) == CMC_OK);
  CHECK(std::string(q.name) == "sector_gain");
  CHECK(q.rhs == Approx(8.8917).epsilon(1e-4));
  CHECK(cmc_report_inequality(report, 5, &q) == CMC_ERR_INVALID_ARGUMENT);
  char* csv = nullptr;
  REQUIRE(cmc_report_csv(report, 1, &csv) == CMC_OK);
  CHECK(std::string(csv).find("buck,Certified") != std::string::npos);
  cmc_string_free(csv);
  cmc_report_free(report);

  CHECK(cmc_boost_criterion(&p, -0.3, 0.3, 0.75, 0, 0.1, &report) == CMC_ERR_TOPOLOGY);

  cmc_voltage_gain v{};
  p.t_var_min = 300e-9;
  p.t_var_max = 600e-9;
  p.load = 0.4;
  REQUIRE(cmc_voltage_gain_bound(&p, &v) == CMC_OK);
  CHECK(v.gamma_i_to_v == Approx(0.64615).epsilon(1e-4));
}

TEST_CASE("gain surface") {
  const double a[] = {-0.2, 0.0};
  const double b[] = {0.0, 0.3};
  double g[4] = {};
  char* csv = nullptr;
  REQUIRE(cmc_gain_surface(a, 2, b, 2, nullptr, g, &csv) == CMC_OK);
  CHECK(g[2] <= 1e-4);
  CHECK(std::string(csv).rfind("alpha_hat,beta_hat,gamma_hat\n", 0) == 0);
  cmc_string_free(csv);
}

TEST_CASE("simulation") {
  cmc_converter_params p{};
  REQUIRE(cmc_reference_buck(0.05, 0, &p) == CMC_OK);
  cmc_sim_spec spec{};
  spec.interference = CMC_INTERFERENCE_SECTOR;
  spec.alpha_hat = -0.3;
  spec.beta_hat = 0.3;
  spec.schedule = CMC_SCHEDULE_ALTERNATING;
  spec.n_cycles = 2000;
  spec.step = 5.0;
  spec.current_guard = 1e3;
  spec.voltage_guard = 1e3;
  cmc_trace* t = nullptr;
  REQUIRE(cmc_simulate_step(&p, &spec, &t) == CMC_OK);
  CHECK(cmc_trace_length(t) == 2001);
  cmc_cycle_state s{};
  REQUIRE(cmc_trace_state(t, 0, &s) == CMC_OK);
  CHECK(s.i_tilde == Approx(-5.0));
  cmc_classify_options o{};
  cmc_classify_defaults(&o);
  cmc_sim_verdict v{};
  REQUIRE(cmc_classify(t, &o, &v) == CMC_OK);
  CHECK(v.classification == CMC_STABLE);
  CHECK(v.divergence_cycle == -1);
  cmc_trace_free(t);

  double gain = 0.0;
  char* csv = nullptr;
  REQUIRE(cmc_estimate_l2_gain(CMC_BLOCK_CURRENT, nullptr, -0.3, 0.3, 4, 500, 1, &gain, &csv) ==
          CMC_OK);
  CHECK(gain > 0.0);
  CHECK(std::string(csv).rfind("seed,gain\n1,", 0) == 0);
  cmc_string_free(csv);
}

TEST_CASE("reference cases") {
  CHECK(cmc_reference_case_count() == 2);
  cmc_reference_options o{};
  cmc_reference_defaults(&o);
  o.n_cycles = 2000;
  cmc_reference_row r{};
  REQUIRE(cmc_run_reference_case(1, &o, &r) == CMC_OK);
  CHECK(r.load == 0.05);
  CHECK(r.sector_threshold == Approx(8.8917).epsilon(1e-4));
  CHECK(r.observed_verdict == CMC_CERTIFIED);
  CHECK(r.observed_classification == CMC_STABLE);
  CHECK(cmc_run_reference_case(7, &o, &r) == CMC_ERR_INVALID_ARGUMENT);
}

}
