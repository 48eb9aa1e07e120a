/* C interface to the cmcert stability-certification library.
 *
 * Conventions: every fallible call returns cmc_status; on failure the
 * message is available from cmc_last_error() on the same thread until the
 * next call. Strings returned through char** are heap-allocated and must be
 * released with cmc_string_free(). Handles are released with their _free
 * function; passing NULL to any _free function is a no-op. All quantities
 * are SI. */
#ifndef CMCERT_CMCERT_H
#define CMCERT_CMCERT_H

#include <stddef.h>
#include <stdint.h>

#if defined(CMCERT_BUILDING_LIBRARY)
#define CMC_API __attribute__((visibility("default")))
#else
#define CMC_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum cmc_status {
  CMC_OK = 0,
  CMC_ERR_INVALID_ARGUMENT = 1,
  CMC_ERR_CONFIG = 2,
  CMC_ERR_INFEASIBLE = 3,
  CMC_ERR_ASSUMPTION = 4,
  CMC_ERR_TOPOLOGY = 5,
  CMC_ERR_IO = 6,
  CMC_ERR_DIVERGED = 7,
  CMC_ERR_INTERNAL = 8
} cmc_status;

typedef enum cmc_topology { CMC_BUCK = 0, CMC_BOOST = 1 } cmc_topology;
typedef enum cmc_verdict { CMC_CERTIFIED = 0, CMC_NOT_CERTIFIED = 1 } cmc_verdict;
typedef enum cmc_classification {
  CMC_STABLE = 0,
  CMC_UNSTABLE = 1,
  CMC_INDETERMINATE = 2
} cmc_classification;
typedef enum cmc_case_ii_form { CMC_CASE_II_PRINTED = 0, CMC_CASE_II_NORMALIZED = 1 } cmc_case_ii_form;
typedef enum cmc_interference {
  CMC_INTERFERENCE_NONE = 0,
  CMC_INTERFERENCE_SECTOR = 1,
  CMC_INTERFERENCE_SINUSOID = 2
} cmc_interference;
typedef enum cmc_schedule {
  CMC_SCHEDULE_ALTERNATING = 0,
  CMC_SCHEDULE_CONSTANT = 1,
  CMC_SCHEDULE_RANDOM = 2
} cmc_schedule;
typedef enum cmc_gain_block { CMC_BLOCK_CURRENT = 0, CMC_BLOCK_VOLTAGE = 1 } cmc_gain_block;

typedef struct cmc_config cmc_config;
typedef struct cmc_report cmc_report;
typedef struct cmc_trace cmc_trace;

typedef struct cmc_converter_params {
  int topology; /* cmc_topology */
  double v_in, v_out, inductance, capacitance, load;
  double t_fixed; /* T_on (buck) or T_off (boost) */
  double lambda;
  double t_var_min, t_var_max;
} cmc_converter_params;

typedef struct cmc_equilibrium {
  int has_i_valley;
  double i_valley, t_var_ss, t_s_ss;
} cmc_equilibrium;

typedef struct cmc_derived_constants {
  double tau1, tau2, t_s_min, t_s_max;
} cmc_derived_constants;

typedef struct cmc_assumptions {
  double ratio_rc, ratio_ripple, threshold;
  int pass;
} cmc_assumptions;

typedef struct cmc_solver_options {
  double tolerance, gamma_sq_ceiling, margin_scale;
} cmc_solver_options;

typedef struct cmc_certificate {
  double gamma_hat, gamma_sq, p, lambda_mult, bisection_tolerance;
} cmc_certificate;

typedef struct cmc_ltv_coefficients {
  double alpha, beta, gamma;
} cmc_ltv_coefficients;

typedef struct cmc_voltage_gain {
  double gamma_1, gamma_i_to_v, closed_form;
  double alpha_max, beta_max, gamma_max;
} cmc_voltage_gain;

typedef struct cmc_report_summary {
  int topology, verdict;
  double alpha_hat, beta_hat, gamma_hat, margin;
  int has_gamma_v_to_i, has_gamma_i_to_v, has_loop_gain_product;
  double gamma_v_to_i, gamma_i_to_v, loop_gain_product;
  size_t inequality_count;
  int has_boost;
  int boost_case; /* 1 or 2 */
  double boost_discriminant, boost_threshold_case_i;
  double boost_threshold_case_ii_printed, boost_threshold_case_ii_normalized;
  int assumptions_pass;
} cmc_report_summary;

typedef struct cmc_inequality {
  const char* name; /* owned by the report */
  double lhs, rhs;
  int holds;
} cmc_inequality;

typedef struct cmc_sim_spec {
  int interference; /* cmc_interference */
  double alpha_hat, beta_hat;
  int schedule; /* cmc_schedule */
  double constant_slope;
  double sin_amplitude, sin_period, sin_phase;
  uint64_t seed;
  long n_cycles;
  double step; /* A; the run starts at the fixed point of -step, command 0 */
  double current_guard, voltage_guard;
} cmc_sim_spec;

typedef struct cmc_cycle_state {
  long n;
  double i_tilde, v_tilde, t_off, q;
  int clamped;
} cmc_cycle_state;

typedef struct cmc_classify_options {
  size_t settle_window;
  double settle_tol, growth_factor;
} cmc_classify_options;

typedef struct cmc_sim_verdict {
  int classification; /* cmc_classification */
  double peak_deviation, final_rms, mid_rms;
  long divergence_cycle; /* -1 when the run did not diverge */
} cmc_sim_verdict;

typedef struct cmc_reference_options {
  double sector_tol;
  cmc_solver_options solver;
  long n_cycles;
  double step_fraction;
  cmc_classify_options classify;
  double current_guard, voltage_guard;
} cmc_reference_options;

typedef struct cmc_reference_row {
  int index;
  double load, sector_a, command;
  double expected_max_sector, observed_max_sector, sector_threshold;
  double gamma_hat;
  int expected_verdict, observed_verdict;
  int expected_classification, observed_classification;
  double final_rms, mid_rms;
} cmc_reference_row;

/* Diagnostics */
CMC_API const char* cmc_version(void);
CMC_API const char* cmc_last_error(void);
CMC_API const char* cmc_status_name(cmc_status status);
CMC_API void cmc_string_free(char* s);

/* Configuration */
CMC_API cmc_status cmc_config_parse(const char* text, cmc_config** out);
CMC_API cmc_status cmc_config_load(const char* path, cmc_config** out);
CMC_API void cmc_config_free(cmc_config* cfg);
/* command: equilibrium, gain-surface, certify, max-sector, simulate,
 * validate-tables. CMC_ERR_CONFIG names the first missing key. */
CMC_API cmc_status cmc_config_require(const cmc_config* cfg, const char* command);
CMC_API cmc_status cmc_config_echo(const cmc_config* cfg, char** out);
CMC_API cmc_status cmc_config_number(const cmc_config* cfg, const char* key, double* out);
CMC_API cmc_status cmc_config_text(const cmc_config* cfg, const char* key, char** out);
CMC_API cmc_status cmc_config_converter(const cmc_config* cfg, cmc_converter_params* out);
CMC_API cmc_status cmc_config_sector(const cmc_config* cfg, double* alpha_hat, double* beta_hat);
CMC_API cmc_status cmc_config_solver(const cmc_config* cfg, cmc_solver_options* out);
CMC_API cmc_status cmc_config_classify(const cmc_config* cfg, cmc_classify_options* out);
/* Resolves `step` (or step_fraction * I_v) against the converter. */
CMC_API cmc_status cmc_config_sim_spec(const cmc_config* cfg, cmc_sim_spec* out);
CMC_API cmc_status cmc_config_reference_options(const cmc_config* cfg, cmc_reference_options* out);
/* axis 0 = alpha, 1 = beta. Writes up to `capacity` values and the full
 * grid length to *count; call with buf = NULL to query the length. */
CMC_API cmc_status cmc_config_grid(const cmc_config* cfg, int axis, double* buf,
                                   size_t capacity, size_t* count);

/* Converter model */
CMC_API cmc_status cmc_reference_buck(double load, int degenerate_bounds, cmc_converter_params* out);
CMC_API cmc_status cmc_equilibrium_compute(const cmc_converter_params* p, cmc_equilibrium* out);
CMC_API cmc_status cmc_derived_constants_compute(const cmc_converter_params* p,
                                                 cmc_derived_constants* out);
CMC_API cmc_status cmc_validate_class_sigma(const cmc_converter_params* p, double threshold,
                                            cmc_assumptions* out);
/* Key-value block with equilibrium, derived constants and assumptions. */
CMC_API cmc_status cmc_equilibrium_text(const cmc_converter_params* p, double threshold, char** out);

/* Current-block gain (unitless Lur'e system) */
CMC_API void cmc_solver_defaults(cmc_solver_options* out);
CMC_API cmc_status cmc_certify_gain(double alpha_hat, double beta_hat,
                                    const cmc_solver_options* options, cmc_certificate* out);
CMC_API cmc_status cmc_lti_oracle(double alpha_hat, double beta_hat, double* out);
/* gamma_out has na * nb entries, row-major over (alpha, beta); +inf marks
 * uncertified cells. csv_out (optional) receives the surface CSV. */
CMC_API cmc_status cmc_gain_surface(const double* alpha_grid, size_t na,
                                    const double* beta_grid, size_t nb,
                                    const cmc_solver_options* options,
                                    double* gamma_out, char** csv_out);

/* Voltage-block gain */
CMC_API cmc_status cmc_ltv_coefficients_at(const cmc_converter_params* p, double t_off,
                                        cmc_ltv_coefficients* out);
CMC_API cmc_status cmc_voltage_gain_bound(const cmc_converter_params* p, cmc_voltage_gain* out);

/* Criteria */
CMC_API cmc_status cmc_buck_criterion(const cmc_converter_params* p, double alpha_hat,
                                      double beta_hat, double gamma_hat,
                                      double assumption_threshold, cmc_report** out);
CMC_API cmc_status cmc_boost_criterion(const cmc_converter_params* p, double alpha_hat,
                                       double beta_hat, double gamma_hat, int case_ii_form,
                                       double assumption_threshold, cmc_report** out);
CMC_API cmc_status cmc_small_gain(double gamma_i_to_v, double gamma_v_to_i, double* product,
                                  int* holds);
CMC_API cmc_status cmc_buck_sector_threshold(const cmc_converter_params* p, double* out);
CMC_API cmc_status cmc_boost_discriminant(const cmc_converter_params* p, double* out);
CMC_API cmc_status cmc_max_stable_sector(const cmc_converter_params* p, double tol,
                                         const cmc_solver_options* options, double* out);
CMC_API void cmc_report_free(cmc_report* report);
CMC_API cmc_status cmc_report_summary_get(const cmc_report* report, cmc_report_summary* out);
CMC_API cmc_status cmc_report_inequality(const cmc_report* report, size_t index,
                                         cmc_inequality* out);
CMC_API cmc_status cmc_report_text(const cmc_report* report, char** out);
CMC_API cmc_status cmc_report_csv(const cmc_report* report, int with_header, char** out);

/* Simulation */
CMC_API cmc_status cmc_simulate_step(const cmc_converter_params* p, const cmc_sim_spec* spec,
                                     cmc_trace** out);
CMC_API void cmc_trace_free(cmc_trace* trace);
/* Number of stored states, including the initial one. */
CMC_API size_t cmc_trace_length(const cmc_trace* trace);
CMC_API cmc_status cmc_trace_state(const cmc_trace* trace, size_t index, cmc_cycle_state* out);
CMC_API cmc_status cmc_trace_csv(const cmc_trace* trace, char** out);
CMC_API void cmc_classify_defaults(cmc_classify_options* out);
CMC_API cmc_status cmc_classify(const cmc_trace* trace, const cmc_classify_options* options,
                                cmc_sim_verdict* out);
CMC_API cmc_status cmc_sim_verdict_text(const cmc_trace* trace,
                                        const cmc_classify_options* options, char** out);
/* Max over `trials` of the output/input 2-norm ratio from zero state; trial k
 * uses seed + k. csv_out (optional) receives `seed,gain` rows. */
CMC_API cmc_status cmc_estimate_l2_gain(int block, const cmc_converter_params* p,
                                        double alpha_hat, double beta_hat, size_t trials,
                                        size_t length, uint64_t seed, double* max_gain,
                                        char** csv_out);

/* Reference validation cases */
CMC_API size_t cmc_reference_case_count(void);
CMC_API void cmc_reference_defaults(cmc_reference_options* out);
CMC_API cmc_status cmc_run_reference_case(size_t index, const cmc_reference_options* options,
                                          cmc_reference_row* out);

#ifdef __cplusplus
}
#endif

#endif /* CMCERT_CMCERT_H */
