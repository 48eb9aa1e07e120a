#include "core/voltage_gain.hpp"

#include <cmath>

#include <fmt/format.h>

#include "core/error.hpp"

namespace cmcert {

namespace {

void require_buck(const ConverterParams& params, const char* what) {
  if (params.topology != Topology::kBuckConstOn) {
    throw TopologyMismatch(
        fmt::format("{} applies to the constant on-time buck only", what));
  }
}

LtvCoefficients evaluate(const ConverterParams& p, double t_off) {
  const double t_on = p.t_fixed;
  const double rc = p.load * p.capacitance;
  const double lc = p.inductance * p.capacitance;
  LtvCoefficients c;
  c.alpha_n = 1.0 - (t_on + t_off) / rc - t_on * (t_on + t_off) / (2.0 * lc);
  c.beta_n = ((1.0 - p.lambda) * t_on + 0.5 * t_off) / p.capacitance;
  c.gamma_n = (p.lambda * t_on + 0.5 * t_off) / p.capacitance;
  return c;
}

}  // namespace

LtvCoefficients ltv_coefficients(const ConverterParams& params, double t_off) {
  params.validate();
  require_buck(params, "ltv_coefficients");
  const double slack = 1e-12 * params.t_var_max;
  if (!(t_off >= params.t_var_min - slack &&
        t_off <= params.t_var_max + slack)) {
    throw InvalidArgument(
        fmt::format("t_off={} outside [{}, {}]", t_off, params.t_var_min,
                    params.t_var_max));
  }
  return evaluate(params, t_off);
}

CoefficientBounds coefficient_bounds(const ConverterParams& params) {
  params.validate();
  require_buck(params, "coefficient_bounds");
  // alpha decreases with t_off, so its smallest admissible value sits at
  // t_var_max.
  const double alpha_min = evaluate(params, params.t_var_max).alpha_n;
  if (!(alpha_min > 0.0)) {
    throw AssumptionViolated(fmt::format(
        "alpha[n] = {} <= 0 at t_off = {}; the RC and ripple ratios are too "
        "large",
        alpha_min, params.t_var_max));
  }
  const LtvCoefficients at_min = evaluate(params, params.t_var_min);
  const LtvCoefficients at_max = evaluate(params, params.t_var_max);
  return {at_min.alpha_n, at_max.beta_n, at_max.gamma_n};
}

VoltageGainBound voltage_block_gain_bound(const ConverterParams& params) {
  VoltageGainBound out;
  out.bounds = coefficient_bounds(params);
  const CoefficientBounds& b = out.bounds;
  if (!(b.alpha_max < 1.0)) {
    throw AssumptionViolated(
        fmt::format("alpha_max = {} must be below 1", b.alpha_max));
  }
  const DerivedConstants d = derived_constants(params);
  out.gamma_1 = (b.beta_max + b.alpha_max * b.gamma_max) / (1.0 - b.alpha_max);
  out.gamma_i_to_v = out.gamma_1 + b.gamma_max;
  out.closed_form = params.load / (1.0 + params.t_fixed / (2.0 * d.tau2)) *
                    d.t_s_max / d.t_s_min;
  const double agree = std::abs(out.gamma_i_to_v - out.closed_form) /
                       std::abs(out.closed_form);
  if (agree > 1e-9) {
    throw AssumptionViolated(fmt::format(
        "voltage gain forms disagree: {} vs closed form {}", out.gamma_i_to_v,
        out.closed_form));
  }
  return out;
}

}  // namespace cmcert
