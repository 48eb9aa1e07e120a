#pragma once

#include "core/converter_model.hpp"

namespace cmcert {

/// Coefficients of v[n+1] = alpha v[n] + beta i[n] + gamma i[n+1] at a
/// realised off-time.
struct LtvCoefficients {
  double alpha_n = 0.0;
  double beta_n = 0.0;   // V/A
  double gamma_n = 0.0;  // V/A
};

struct CoefficientBounds {
  double alpha_max = 0.0;
  double beta_max = 0.0;
  double gamma_max = 0.0;
};

struct VoltageGainBound {
  double gamma_1 = 0.0;        // gain of the q-subsystem, ohms
  double gamma_i_to_v = 0.0;   // ohms
  double closed_form = 0.0;    // R / (1 + T_on / 2 tau2) * T_s^max / T_s^min
  CoefficientBounds bounds;
};

/// Throws InvalidArgument when t_off lies outside [t_var_min, t_var_max]
/// (a relative slack of 1e-12 absorbs clamping round-off).
LtvCoefficients ltv_coefficients(const ConverterParams& params, double t_off);

/// Throws AssumptionViolated if alpha drops to zero or below anywhere on the
/// admissible off-time interval.
CoefficientBounds coefficient_bounds(const ConverterParams& params);

/// Throws TopologyMismatch for a boost converter and AssumptionViolated if
/// alpha_max >= 1.
VoltageGainBound voltage_block_gain_bound(const ConverterParams& params);

}  // namespace cmcert
