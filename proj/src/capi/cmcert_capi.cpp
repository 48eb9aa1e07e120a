#include "cmcert/cmcert.h"

#include <cstdlib>
#include <cstring>
#include <limits>
#include <new>
#include <string>

#include "core/config.hpp"
#include "core/converter_model.hpp"
#include "core/criteria.hpp"
#include "core/error.hpp"
#include "core/lure_gain.hpp"
#include "core/report.hpp"
#include "core/simulator.hpp"
#include "core/tables.hpp"
#include "core/voltage_gain.hpp"

struct cmc_config {
  cmcert::RunConfig cfg;
};

struct cmc_report {
  cmcert::StabilityReport report;
};

struct cmc_trace {
  cmcert::TransientTrace trace;
};

namespace {

using namespace cmcert;

thread_local std::string g_last_error;

cmc_status status_of(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument:
      return CMC_ERR_INVALID_ARGUMENT;
    case ErrorCode::kConfig:
      return CMC_ERR_CONFIG;
    case ErrorCode::kInfeasible:
      return CMC_ERR_INFEASIBLE;
    case ErrorCode::kAssumptionViolated:
      return CMC_ERR_ASSUMPTION;
    case ErrorCode::kTopologyMismatch:
      return CMC_ERR_TOPOLOGY;
    case ErrorCode::kIo:
      return CMC_ERR_IO;
    case ErrorCode::kDiverged:
      return CMC_ERR_DIVERGED;
  }
  return CMC_ERR_INTERNAL;
}

template <class F>
cmc_status guarded(F&& body) {
  g_last_error.clear();
  try {
    body();
    return CMC_OK;
  } catch (const Error& e) {
    g_last_error = e.what();
    return status_of(e.code());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
  } catch (const std::exception& e) {
    g_last_error = e.what();
  } catch (...) {
    g_last_error = "unknown error";
  }
  return CMC_ERR_INTERNAL;
}

void need(const void* ptr, const char* what) {
  if (ptr == nullptr) {
    throw InvalidArgument(std::string(what) + " must not be NULL");
  }
}

char* dup(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out == nullptr) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

ConverterParams from_c(const cmc_converter_params* p) {
  need(p, "params");
  ConverterParams out;
  if (p->topology != CMC_BUCK && p->topology != CMC_BOOST) {
    throw InvalidArgument("unknown topology");
  }
  out.topology =
      p->topology == CMC_BOOST ? Topology::kBoostConstOff : Topology::kBuckConstOn;
  out.v_in = p->v_in;
  out.v_out = p->v_out;
  out.inductance = p->inductance;
  out.capacitance = p->capacitance;
  out.load = p->load;
  out.t_fixed = p->t_fixed;
  out.lambda = p->lambda;
  out.t_var_min = p->t_var_min;
  out.t_var_max = p->t_var_max;
  return out;
}

cmc_converter_params to_c(const ConverterParams& p) {
  cmc_converter_params out{};
  out.topology = p.topology == Topology::kBoostConstOff ? CMC_BOOST : CMC_BUCK;
  out.v_in = p.v_in;
  out.v_out = p.v_out;
  out.inductance = p.inductance;
  out.capacitance = p.capacitance;
  out.load = p.load;
  out.t_fixed = p.t_fixed;
  out.lambda = p.lambda;
  out.t_var_min = p.t_var_min;
  out.t_var_max = p.t_var_max;
  return out;
}

GainSolverOptions solver_of(const cmc_solver_options* o) {
  GainSolverOptions out;
  if (o != nullptr) {
    out.tolerance = o->tolerance;
    out.gamma_sq_ceiling = o->gamma_sq_ceiling;
    out.margin_scale = o->margin_scale;
  }
  if (!(out.tolerance > 0.0) || !(out.gamma_sq_ceiling > 0.0) ||
      !(out.margin_scale >= 0.0)) {
    throw InvalidArgument("solver options must be positive");
  }
  return out;
}

cmc_solver_options solver_to_c(const GainSolverOptions& o) {
  return {o.tolerance, o.gamma_sq_ceiling, o.margin_scale};
}

ClassifyOptions classify_of(const cmc_classify_options* o) {
  ClassifyOptions out;
  if (o != nullptr) {
    out.settle_window = o->settle_window;
    out.settle_tol = o->settle_tol;
    out.growth_factor = o->growth_factor;
  }
  return out;
}

cmc_classify_options classify_to_c(const ClassifyOptions& o) {
  return {o.settle_window, o.settle_tol, o.growth_factor};
}

int classification_to_c(Classification c) {
  switch (c) {
    case Classification::kStable:
      return CMC_STABLE;
    case Classification::kUnstable:
      return CMC_UNSTABLE;
    case Classification::kIndeterminate:
      return CMC_INDETERMINATE;
  }
  return CMC_INDETERMINATE;
}

int verdict_to_c(Verdict v) {
  return v == Verdict::kCertified ? CMC_CERTIFIED : CMC_NOT_CERTIFIED;
}

InterferenceModel interference_of(const cmc_sim_spec& s) {
  const SectorBound sector{s.alpha_hat, s.beta_hat};
  switch (s.interference) {
    case CMC_INTERFERENCE_NONE:
      return InterferenceModel::none();
    case CMC_INTERFERENCE_SECTOR: {
      const auto len = static_cast<std::size_t>(std::max(1L, s.n_cycles));
      switch (s.schedule) {
        case CMC_SCHEDULE_ALTERNATING:
          return InterferenceModel::schedule(
              sector, {sector.alpha_hat, sector.beta_hat});
        case CMC_SCHEDULE_CONSTANT:
          return InterferenceModel::schedule(sector, {s.constant_slope});
        case CMC_SCHEDULE_RANDOM:
          return InterferenceModel::schedule(
              sector, random_schedule(sector, len, s.seed));
        default:
          throw InvalidArgument("unknown schedule");
      }
    }
    case CMC_INTERFERENCE_SINUSOID:
      return InterferenceModel::sinusoid(sector, s.sin_amplitude, s.sin_period,
                                         s.sin_phase);
    default:
      throw InvalidArgument("unknown interference kind");
  }
}

}  // namespace

extern "C" {

const char* cmc_version(void) { return "0.1.0"; }

const char* cmc_last_error(void) { return g_last_error.c_str(); }

const char* cmc_status_name(cmc_status status) {
  switch (status) {
    case CMC_OK:
      return "ok";
    case CMC_ERR_INVALID_ARGUMENT:
      return "invalid argument";
    case CMC_ERR_CONFIG:
      return "configuration error";
    case CMC_ERR_INFEASIBLE:
      return "infeasible";
    case CMC_ERR_ASSUMPTION:
      return "assumption violated";
    case CMC_ERR_TOPOLOGY:
      return "topology mismatch";
    case CMC_ERR_IO:
      return "i/o error";
    case CMC_ERR_DIVERGED:
      return "diverged";
    case CMC_ERR_INTERNAL:
      return "internal error";
  }
  return "unknown status";
}

void cmc_string_free(char* s) { std::free(s); }

cmc_status cmc_config_parse(const char* text, cmc_config** out) {
  return guarded([&] {
    need(text, "text");
    need(out, "out");
    *out = new cmc_config{parse_config(text)};
  });
}

cmc_status cmc_config_load(const char* path, cmc_config** out) {
  return guarded([&] {
    need(path, "path");
    need(out, "out");
    *out = new cmc_config{load_config(path)};
  });
}

void cmc_config_free(cmc_config* cfg) { delete cfg; }

cmc_status cmc_config_require(const cmc_config* cfg, const char* command) {
  return guarded([&] {
    need(cfg, "cfg");
    need(command, "command");
    const auto c = parse_command(command);
    if (!c) throw InvalidArgument(std::string("unknown command '") + command + "'");
    cfg->cfg.require(*c);
  });
}

cmc_status cmc_config_echo(const cmc_config* cfg, char** out) {
  return guarded([&] {
    need(cfg, "cfg");
    need(out, "out");
    *out = dup(cfg->cfg.echo());
  });
}

cmc_status cmc_config_number(const cmc_config* cfg, const char* key, double* out) {
  return guarded([&] {
    need(cfg, "cfg");
    need(key, "key");
    need(out, "out");
    *out = cfg->cfg.number(key);
  });
}

cmc_status cmc_config_text(const cmc_config* cfg, const char* key, char** out) {
  return guarded([&] {
    need(cfg, "cfg");
    need(key, "key");
    need(out, "out");
    *out = dup(cfg->cfg.text(key));
  });
}

cmc_status cmc_config_converter(const cmc_config* cfg, cmc_converter_params* out) {
  return guarded([&] {
    need(cfg, "cfg");
    need(out, "out");
    *out = to_c(cfg->cfg.converter());
  });
}

cmc_status cmc_config_sector(const cmc_config* cfg, double* alpha_hat, double* beta_hat) {
  return guarded([&] {
    need(cfg, "cfg");
    need(alpha_hat, "alpha_hat");
    need(beta_hat, "beta_hat");
    const SectorBound s = cfg->cfg.sector();
    *alpha_hat = s.alpha_hat;
    *beta_hat = s.beta_hat;
  });
}

cmc_status cmc_config_solver(const cmc_config* cfg, cmc_solver_options* out) {
  return guarded([&] {
    need(cfg, "cfg");
    need(out, "out");
    *out = solver_to_c(cfg->cfg.solver());
  });
}

cmc_status cmc_config_classify(const cmc_config* cfg, cmc_classify_options* out) {
  return guarded([&] {
    need(cfg, "cfg");
    need(out, "out");
    *out = classify_to_c(cfg->cfg.classify());
  });
}

cmc_status cmc_config_sim_spec(const cmc_config* cfg, cmc_sim_spec* out) {
  return guarded([&] {
    need(cfg, "cfg");
    need(out, "out");
    const RunConfig& c = cfg->cfg;
    cmc_sim_spec s{};
    switch (c.interference()) {
      case InterferenceChoice::kNone:
        s.interference = CMC_INTERFERENCE_NONE;
        break;
      case InterferenceChoice::kSector:
        s.interference = CMC_INTERFERENCE_SECTOR;
        break;
      case InterferenceChoice::kSinusoid:
        s.interference = CMC_INTERFERENCE_SINUSOID;
        break;
    }
    if (c.has("alpha_hat") && c.has("beta_hat")) {
      s.alpha_hat = c.number("alpha_hat");
      s.beta_hat = c.number("beta_hat");
    }
    switch (c.schedule()) {
      case ScheduleChoice::kAlternating:
        s.schedule = CMC_SCHEDULE_ALTERNATING;
        break;
      case ScheduleChoice::kConstant:
        s.schedule = CMC_SCHEDULE_CONSTANT;
        break;
      case ScheduleChoice::kRandom:
        s.schedule = CMC_SCHEDULE_RANDOM;
        break;
    }
    s.constant_slope = c.number("constant_slope");
    s.sin_amplitude = c.number("sin_amplitude");
    s.sin_period = c.number("sin_period");
    s.sin_phase = c.number("sin_phase");
    s.seed = c.seed();
    s.n_cycles = c.integer("n_cycles");
    if (c.has("step")) {
      s.step = c.number("step");
    } else {
      const Equilibrium eq = compute_equilibrium(c.converter());
      if (!eq.i_valley) throw TopologyMismatch("simulation needs the buck topology");
      s.step = c.number("step_fraction") * *eq.i_valley;
    }
    const SimOptions g = c.sim_options();
    s.current_guard = g.current_guard;
    s.voltage_guard = g.voltage_guard;
    *out = s;
  });
}

cmc_status cmc_config_reference_options(const cmc_config* cfg, cmc_reference_options* out) {
  return guarded([&] {
    need(cfg, "cfg");
    need(out, "out");
    const RunConfig& c = cfg->cfg;
    cmc_reference_options o{};
    o.sector_tol = c.number("sector_tol");
    o.solver = solver_to_c(c.solver());
    o.n_cycles = c.integer("n_cycles");
    o.step_fraction = c.number("step_fraction");
    o.classify = classify_to_c(c.classify());
    const SimOptions g = c.sim_options();
    o.current_guard = g.current_guard;
    o.voltage_guard = g.voltage_guard;
    *out = o;
  });
}

cmc_status cmc_config_grid(const cmc_config* cfg, int axis, double* buf, size_t capacity,
                           size_t* count) {
  return guarded([&] {
    need(cfg, "cfg");
    need(count, "count");
    if (axis != 0 && axis != 1) throw InvalidArgument("axis must be 0 or 1");
    const auto g = axis == 0 ? cfg->cfg.alpha_grid() : cfg->cfg.beta_grid();
    *count = g.size();
    if (buf != nullptr) {
      std::copy_n(g.begin(), std::min(capacity, g.size()), buf);
    }
  });
}

cmc_status cmc_reference_buck(double load, int degenerate_bounds, cmc_converter_params* out) {
  return guarded([&] {
    need(out, "out");
    *out = to_c(reference_buck(load, degenerate_bounds != 0));
  });
}

cmc_status cmc_equilibrium_compute(const cmc_converter_params* p, cmc_equilibrium* out) {
  return guarded([&] {
    need(out, "out");
    const Equilibrium eq = compute_equilibrium(from_c(p));
    out->has_i_valley = eq.i_valley.has_value();
    out->i_valley = eq.i_valley.value_or(std::numeric_limits<double>::quiet_NaN());
    out->t_var_ss = eq.t_var_ss;
    out->t_s_ss = eq.t_s_ss;
  });
}

cmc_status cmc_derived_constants_compute(const cmc_converter_params* p,
                                         cmc_derived_constants* out) {
  return guarded([&] {
    need(out, "out");
    const DerivedConstants d = derived_constants(from_c(p));
    *out = {d.tau1, d.tau2, d.t_s_min, d.t_s_max};
  });
}

cmc_status cmc_validate_class_sigma(const cmc_converter_params* p, double threshold,
                                    cmc_assumptions* out) {
  return guarded([&] {
    need(out, "out");
    const AssumptionReport a = validate_class_sigma(from_c(p), threshold);
    *out = {a.ratio_rc, a.ratio_ripple, a.threshold, a.pass ? 1 : 0};
  });
}

cmc_status cmc_equilibrium_text(const cmc_converter_params* p, double threshold, char** out) {
  return guarded([&] {
    need(out, "out");
    const ConverterParams params = from_c(p);
    *out = dup(describe(compute_equilibrium(params), derived_constants(params),
                        validate_class_sigma(params, threshold)));
  });
}

void cmc_solver_defaults(cmc_solver_options* out) {
  if (out != nullptr) *out = solver_to_c(GainSolverOptions{});
}

cmc_status cmc_certify_gain(double alpha_hat, double beta_hat,
                            const cmc_solver_options* options, cmc_certificate* out) {
  return guarded([&] {
    need(out, "out");
    const GainCertificate c = certify_gain(unitless_current_block(),
                                           {alpha_hat, beta_hat}, solver_of(options));
    *out = {c.gamma_hat, c.gamma_sq, c.p(0, 0), c.lambda_mult, c.bisection_tolerance};
  });
}

cmc_status cmc_lti_oracle(double alpha_hat, double beta_hat, double* out) {
  return guarded([&] {
    need(out, "out");
    *out = lti_lower_bound_oracle({alpha_hat, beta_hat});
  });
}

cmc_status cmc_gain_surface(const double* alpha_grid, size_t na, const double* beta_grid,
                            size_t nb, const cmc_solver_options* options, double* gamma_out,
                            char** csv_out) {
  return guarded([&] {
    need(alpha_grid, "alpha_grid");
    need(beta_grid, "beta_grid");
    const GainSurface s = gain_surface(unitless_current_block(),
                                       std::vector<double>(alpha_grid, alpha_grid + na),
                                       std::vector<double>(beta_grid, beta_grid + nb),
                                       solver_of(options));
    if (gamma_out != nullptr) std::copy(s.gamma.begin(), s.gamma.end(), gamma_out);
    if (csv_out != nullptr) *csv_out = dup(surface_csv(s));
  });
}

cmc_status cmc_ltv_coefficients_at(const cmc_converter_params* p, double t_off,
                                cmc_ltv_coefficients* out) {
  return guarded([&] {
    need(out, "out");
    const LtvCoefficients c = ltv_coefficients(from_c(p), t_off);
    *out = {c.alpha_n, c.beta_n, c.gamma_n};
  });
}

cmc_status cmc_voltage_gain_bound(const cmc_converter_params* p, cmc_voltage_gain* out) {
  return guarded([&] {
    need(out, "out");
    const VoltageGainBound v = voltage_block_gain_bound(from_c(p));
    *out = {v.gamma_1,          v.gamma_i_to_v,     v.closed_form,
            v.bounds.alpha_max, v.bounds.beta_max, v.bounds.gamma_max};
  });
}

cmc_status cmc_buck_criterion(const cmc_converter_params* p, double alpha_hat,
                              double beta_hat, double gamma_hat, double assumption_threshold,
                              cmc_report** out) {
  return guarded([&] {
    need(out, "out");
    *out = new cmc_report{buck_on_time_criterion(from_c(p), {alpha_hat, beta_hat},
                                                 gamma_hat, assumption_threshold)};
  });
}

cmc_status cmc_boost_criterion(const cmc_converter_params* p, double alpha_hat,
                               double beta_hat, double gamma_hat, int case_ii_form,
                               double assumption_threshold, cmc_report** out) {
  return guarded([&] {
    need(out, "out");
    if (case_ii_form != CMC_CASE_II_PRINTED && case_ii_form != CMC_CASE_II_NORMALIZED) {
      throw InvalidArgument("unknown case (ii) form");
    }
    const auto form = case_ii_form == CMC_CASE_II_NORMALIZED ? BoostCaseIiForm::kNormalized
                                                             : BoostCaseIiForm::kPrinted;
    *out = new cmc_report{boost_off_time_criterion(
        from_c(p), {alpha_hat, beta_hat}, gamma_hat, form, assumption_threshold)};
  });
}

cmc_status cmc_small_gain(double gamma_i_to_v, double gamma_v_to_i, double* product,
                          int* holds) {
  return guarded([&] {
    need(product, "product");
    need(holds, "holds");
    const SmallGainResult r = small_gain_check(gamma_i_to_v, gamma_v_to_i);
    *product = r.product;
    *holds = r.holds ? 1 : 0;
  });
}

cmc_status cmc_buck_sector_threshold(const cmc_converter_params* p, double* out) {
  return guarded([&] {
    need(out, "out");
    const ConverterParams params = from_c(p);
    params.validate();
    *out = buck_sector_threshold(params);
  });
}

cmc_status cmc_boost_discriminant(const cmc_converter_params* p, double* out) {
  return guarded([&] {
    need(out, "out");
    const ConverterParams params = from_c(p);
    params.validate();
    *out = boost_discriminant(params);
  });
}

cmc_status cmc_max_stable_sector(const cmc_converter_params* p, double tol,
                                 const cmc_solver_options* options, double* out) {
  return guarded([&] {
    need(out, "out");
    *out = max_stable_sector(from_c(p), tol, solver_of(options));
  });
}

void cmc_report_free(cmc_report* report) { delete report; }

cmc_status cmc_report_summary_get(const cmc_report* report, cmc_report_summary* out) {
  return guarded([&] {
    need(report, "report");
    need(out, "out");
    const StabilityReport& r = report->report;
    cmc_report_summary s{};
    s.topology = r.topology == Topology::kBoostConstOff ? CMC_BOOST : CMC_BUCK;
    s.verdict = verdict_to_c(r.verdict);
    s.alpha_hat = r.sector.alpha_hat;
    s.beta_hat = r.sector.beta_hat;
    s.gamma_hat = r.gamma_hat;
    s.margin = r.margin;
    s.has_gamma_v_to_i = r.gamma_v_to_i.has_value();
    s.gamma_v_to_i = r.gamma_v_to_i.value_or(0.0);
    s.has_gamma_i_to_v = r.gamma_i_to_v.has_value();
    s.gamma_i_to_v = r.gamma_i_to_v.value_or(0.0);
    s.has_loop_gain_product = r.loop_gain_product.has_value();
    s.loop_gain_product = r.loop_gain_product.value_or(0.0);
    s.inequality_count = r.inequalities.size();
    s.has_boost = r.boost.has_value();
    if (r.branch) s.boost_case = *r.branch == BoostBranch::kCaseI ? 1 : 2;
    if (r.boost) {
      s.boost_discriminant = r.boost->discriminant;
      s.boost_threshold_case_i = r.boost->threshold_case_i;
      s.boost_threshold_case_ii_printed = r.boost->threshold_case_ii_printed;
      s.boost_threshold_case_ii_normalized = r.boost->threshold_case_ii_normalized;
    }
    s.assumptions_pass = r.assumptions.pass ? 1 : 0;
    *out = s;
  });
}

cmc_status cmc_report_inequality(const cmc_report* report, size_t index, cmc_inequality* out) {
  return guarded([&] {
    need(report, "report");
    need(out, "out");
    if (index >= report->report.inequalities.size()) {
      throw InvalidArgument("inequality index out of range");
    }
    const InequalityRecord& q = report->report.inequalities[index];
    *out = {q.name.c_str(), q.lhs, q.rhs, q.holds ? 1 : 0};
  });
}

cmc_status cmc_report_text(const cmc_report* report, char** out) {
  return guarded([&] {
    need(report, "report");
    need(out, "out");
    *out = dup(describe(report->report));
  });
}

cmc_status cmc_report_csv(const cmc_report* report, int with_header, char** out) {
  return guarded([&] {
    need(report, "report");
    need(out, "out");
    std::string s = with_header ? stability_csv_header() : std::string();
    s += stability_csv_row(report->report);
    *out = dup(s);
  });
}

cmc_status cmc_simulate_step(const cmc_converter_params* p, const cmc_sim_spec* spec,
                             cmc_trace** out) {
  return guarded([&] {
    need(spec, "spec");
    need(out, "out");
    const ConverterParams params = from_c(p);
    const SimOptions guards{spec->current_guard, spec->voltage_guard};
    *out = new cmc_trace{run_transient(params, interference_of(*spec),
                                       step_command(-spec->step, 0.0), spec->n_cycles,
                                       std::nullopt, guards)};
  });
}

void cmc_trace_free(cmc_trace* trace) { delete trace; }

size_t cmc_trace_length(const cmc_trace* trace) {
  return trace == nullptr ? 0 : trace->trace.states.size();
}

cmc_status cmc_trace_state(const cmc_trace* trace, size_t index, cmc_cycle_state* out) {
  return guarded([&] {
    need(trace, "trace");
    need(out, "out");
    if (index >= trace->trace.states.size()) throw InvalidArgument("state index out of range");
    const CycleState& s = trace->trace.states[index];
    *out = {s.n, s.i_tilde, s.v_tilde, s.t_off, s.q, s.clamped ? 1 : 0};
  });
}

cmc_status cmc_trace_csv(const cmc_trace* trace, char** out) {
  return guarded([&] {
    need(trace, "trace");
    need(out, "out");
    *out = dup(trace_csv(trace->trace));
  });
}

void cmc_classify_defaults(cmc_classify_options* out) {
  if (out != nullptr) *out = classify_to_c(ClassifyOptions{});
}

cmc_status cmc_classify(const cmc_trace* trace, const cmc_classify_options* options,
                        cmc_sim_verdict* out) {
  return guarded([&] {
    need(trace, "trace");
    need(out, "out");
    const SimVerdict v = classify_stability(trace->trace, classify_of(options));
    *out = {classification_to_c(v.classification), v.peak_deviation, v.final_rms,
            v.mid_rms, v.divergence_cycle.value_or(-1)};
  });
}

cmc_status cmc_sim_verdict_text(const cmc_trace* trace, const cmc_classify_options* options,
                                char** out) {
  return guarded([&] {
    need(trace, "trace");
    need(out, "out");
    *out = dup(describe(classify_stability(trace->trace, classify_of(options)),
                        trace->trace));
  });
}

cmc_status cmc_estimate_l2_gain(int block, const cmc_converter_params* p, double alpha_hat,
                                double beta_hat, size_t trials, size_t length, uint64_t seed,
                                double* max_gain, char** csv_out) {
  return guarded([&] {
    need(max_gain, "max_gain");
    if (block != CMC_BLOCK_CURRENT && block != CMC_BLOCK_VOLTAGE) {
      throw InvalidArgument("unknown gain block");
    }
    EnsembleSpec spec;
    spec.trials = trials;
    spec.length = length;
    spec.sector = {alpha_hat, beta_hat};
    ConverterParams params;
    if (block == CMC_BLOCK_VOLTAGE) {
      params = from_c(p);
    } else {
      spec.sector.validate();
    }
    const GainEstimate e = estimate_l2_gain(
        block == CMC_BLOCK_VOLTAGE ? GainBlock::kVoltageLtv : GainBlock::kCurrentUnitless,
        params, spec, seed);
    *max_gain = e.max_gain;
    if (csv_out != nullptr) *csv_out = dup(ensemble_csv(e, seed));
  });
}

size_t cmc_reference_case_count(void) { return reference_cases().size(); }

void cmc_reference_defaults(cmc_reference_options* out) {
  if (out == nullptr) return;
  const ReferenceRunOptions o;
  *out = {o.sector_tol,    solver_to_c(o.solver),       o.n_cycles,
          o.step_fraction, classify_to_c(o.classify), o.sim.current_guard,
          o.sim.voltage_guard};
}

cmc_status cmc_run_reference_case(size_t index, const cmc_reference_options* options,
                                  cmc_reference_row* out) {
  return guarded([&] {
    need(out, "out");
    if (index >= reference_cases().size()) throw InvalidArgument("case index out of range");
    ReferenceRunOptions o;
    if (options != nullptr) {
      o.sector_tol = options->sector_tol;
      o.solver = solver_of(&options->solver);
      o.n_cycles = options->n_cycles;
      o.step_fraction = options->step_fraction;
      o.classify = classify_of(&options->classify);
      o.sim = {options->current_guard, options->voltage_guard};
    }
    const ReferenceRow r = run_reference_case(reference_cases()[index], o);
    cmc_reference_row row{};
    row.index = r.ref.index;
    row.load = r.ref.load;
    row.sector_a = r.ref.sector_a;
    row.command = r.ref.command;
    row.expected_max_sector = r.ref.expected_max_sector;
    row.observed_max_sector = r.observed_max_sector;
    row.sector_threshold = r.sector_threshold;
    row.gamma_hat = r.report.gamma_hat;
    row.expected_verdict = verdict_to_c(r.ref.expected_verdict);
    row.observed_verdict = verdict_to_c(r.report.verdict);
    row.expected_classification = classification_to_c(r.ref.expected_sim);
    row.observed_classification = classification_to_c(r.sim.classification);
    row.final_rms = r.sim.final_rms;
    row.mid_rms = r.sim.mid_rms;
    *out = row;
  });
}

}  // extern "C"
