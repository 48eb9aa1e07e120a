#pragma once

#include <optional>
#include <string_view>

namespace cmcert {

enum class Topology {
  kBuckConstOn,   // fixed on-time, varying off-time
  kBoostConstOff  // fixed off-time, varying on-time
};

std::string_view to_string(Topology topology);

/// Physical and control parameters of a class-Sigma converter, SI units.
///
/// `t_fixed` is the interval held constant by the controller (T_on for the
/// buck, T_off for the boost). `t_var_min`/`t_var_max` bound the interval
/// that varies cycle to cycle.
struct ConverterParams {
  Topology topology = Topology::kBuckConstOn;
  double v_in = 0.0;
  double v_out = 0.0;
  double inductance = 0.0;
  double capacitance = 0.0;
  double load = 0.0;
  double t_fixed = 0.0;
  double lambda = 0.5;
  double t_var_min = 0.0;
  double t_var_max = 0.0;

  /// Throws InvalidArgument naming the first violated invariant.
  void validate() const;
};

struct Equilibrium {
  std::optional<double> i_valley;  // unset for the boost topology
  double t_var_ss = 0.0;
  double t_s_ss = 0.0;
};

struct DerivedConstants {
  double tau1 = 0.0;  // RC
  double tau2 = 0.0;  // L/R
  double t_s_min = 0.0;
  double t_s_max = 0.0;
};

struct AssumptionReport {
  double ratio_rc = 0.0;
  double ratio_ripple = 0.0;
  double threshold = 0.1;
  bool pass = false;
};

struct TimingBounds {
  double t_var_min = 0.0;
  double t_var_max = 0.0;
};

inline constexpr double kDefaultAssumptionThreshold = 0.1;

/// Steady-state operating point. Only the voltage ordering and positivity
/// are required here, so the timing bounds may still be unset.
Equilibrium compute_equilibrium(const ConverterParams& params);

/// Default bounds on the varying interval: [t_var_ss / 2, 2 t_var_ss].
TimingBounds default_timing_bounds(const ConverterParams& params);

/// Degenerate bounds t_var_min = t_var_max = t_var_ss.
TimingBounds degenerate_timing_bounds(const ConverterParams& params);

DerivedConstants derived_constants(const ConverterParams& params);

/// Evaluates T_s^max / RC and T_s^max T_fixed / (2LC) against `threshold`.
/// Never throws on a failing ratio; the report carries the verdict.
AssumptionReport validate_class_sigma(
    const ConverterParams& params,
    double threshold = kDefaultAssumptionThreshold);

}  // namespace cmcert
