#include "core/converter_model.hpp"

#include <cmath>

#include <fmt/format.h>

#include "core/error.hpp"

namespace cmcert {

namespace {

void require_positive(double value, std::string_view name) {
  if (!(value > 0.0) || !std::isfinite(value)) {
    throw InvalidArgument(
        fmt::format("{} must be finite and strictly positive (got {})", name,
                    value));
  }
}

// Positivity and voltage ordering; everything compute_equilibrium needs.
void validate_operating_point(const ConverterParams& p) {
  require_positive(p.v_in, "v_in");
  require_positive(p.v_out, "v_out");
  require_positive(p.inductance, "inductance");
  require_positive(p.capacitance, "capacitance");
  require_positive(p.load, "load");
  require_positive(p.t_fixed, "t_fixed");
  if (!(p.lambda >= 0.0 && p.lambda <= 1.0)) {
    throw InvalidArgument(
        fmt::format("lambda must lie in [0, 1] (got {})", p.lambda));
  }
  if (p.topology == Topology::kBuckConstOn && !(p.v_out < p.v_in)) {
    throw InvalidArgument(fmt::format(
        "buck topology requires v_out < v_in (got v_out={}, v_in={})",
        p.v_out, p.v_in));
  }
  if (p.topology == Topology::kBoostConstOff && !(p.v_out > p.v_in)) {
    throw InvalidArgument(fmt::format(
        "boost topology requires v_out > v_in (got v_out={}, v_in={})",
        p.v_out, p.v_in));
  }
}

}  // namespace

std::string_view to_string(Topology topology) {
  switch (topology) {
    case Topology::kBuckConstOn:
      return "buck";
    case Topology::kBoostConstOff:
      return "boost";
  }
  return "unknown";
}

void ConverterParams::validate() const {
  validate_operating_point(*this);
  require_positive(t_var_min, "t_var_min");
  require_positive(t_var_max, "t_var_max");
  if (t_var_min > t_var_max) {
    throw InvalidArgument(fmt::format(
        "t_var_min must not exceed t_var_max (got {} > {})", t_var_min,
        t_var_max));
  }
}

Equilibrium compute_equilibrium(const ConverterParams& p) {
  validate_operating_point(p);
  Equilibrium eq;
  if (p.topology == Topology::kBuckConstOn) {
    const double t_on = p.t_fixed;
    eq.t_var_ss = (p.v_in - p.v_out) / p.v_out * t_on;
    eq.i_valley =
        p.v_out / p.load - 0.5 * (p.v_in - p.v_out) / p.inductance * t_on;
  } else {
    // Volt-second balance with the off-time fixed. The valley current is
    // left unset: no closed form is available for this topology.
    eq.t_var_ss = (p.v_out / p.v_in - 1.0) * p.t_fixed;
  }
  eq.t_s_ss = p.t_fixed + eq.t_var_ss;
  return eq;
}

TimingBounds default_timing_bounds(const ConverterParams& params) {
  const double ss = compute_equilibrium(params).t_var_ss;
  return {0.5 * ss, 2.0 * ss};
}

TimingBounds degenerate_timing_bounds(const ConverterParams& params) {
  const double ss = compute_equilibrium(params).t_var_ss;
  return {ss, ss};
}

DerivedConstants derived_constants(const ConverterParams& p) {
  p.validate();
  DerivedConstants d;
  d.tau1 = p.load * p.capacitance;
  d.tau2 = p.inductance / p.load;
  d.t_s_min = p.t_fixed + p.t_var_min;
  d.t_s_max = p.t_fixed + p.t_var_max;
  return d;
}

AssumptionReport validate_class_sigma(const ConverterParams& p,
                                      double threshold) {
  if (!(threshold > 0.0 && threshold < 1.0)) {
    throw InvalidArgument(
        fmt::format("assumption threshold must lie in (0, 1) (got {})",
                    threshold));
  }
  const DerivedConstants d = derived_constants(p);
  AssumptionReport r;
  r.threshold = threshold;
  r.ratio_rc = d.t_s_max / d.tau1;
  r.ratio_ripple =
      d.t_s_max * p.t_fixed / (2.0 * p.inductance * p.capacitance);
  r.pass = r.ratio_rc < threshold && r.ratio_ripple < threshold;
  return r;
}

}  // namespace cmcert
