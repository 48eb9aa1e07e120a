#pragma once

#include <vector>

#include "core/converter_model.hpp"
#include "core/criteria.hpp"
#include "core/lure_gain.hpp"
#include "core/simulator.hpp"

namespace cmcert {

/// Design parameters of the reference constant on-time buck: Vin 12 V,
/// Vout 2.2 V, L 240 nH, C 100 uF, T_on 100 ns, lambda 0.5. The sense
/// resistor (10 mOhm) plays no role in the model.
ConverterParams reference_buck(double load, bool degenerate_bounds);
inline constexpr double kReferenceSenseResistance = 10e-3;

struct ReferenceCase {
  int index = 0;
  double load = 0.0;         // ohms
  double sector_a = 0.0;     // symmetric interference bound used in the run
  double expected_max_sector = 0.0;
  double command = 0.0;      // A, listed command current
  Verdict expected_verdict = Verdict::kNotCertified;
  Classification expected_sim = Classification::kIndeterminate;
};

/// The two reference validation cases: R = 0.4 with |a| = 0.48 (expected
/// threshold 0.24, unstable) and R = 0.05 with |a| = 0.3 (expected 0.44,
/// stable).
const std::vector<ReferenceCase>& reference_cases();

struct ReferenceRunOptions {
  double sector_tol = 1e-4;
  GainSolverOptions solver;
  long n_cycles = 5000;
  double step_fraction = 0.5;  // step size as a fraction of I_v
  ClassifyOptions classify;
  SimOptions sim;
};

struct ReferenceRow {
  ReferenceCase ref;
  double sector_threshold = 0.0;     // rhs of the sector-gain inequality
  double observed_max_sector = 0.0;  // degenerate timing bounds
  StabilityReport report;            // at the case's |a|, degenerate bounds
  SimVerdict sim;                    // default timing bounds
  TransientTrace trace;
};

/// Step study: starts at the interference-free fixed point for command
/// deviation -step and commands 0 from cycle 0 on, under the alternating
/// -a, +a, ... slope schedule.
TransientTrace reference_step_trace(const ConverterParams& params, double a,
                                    const ReferenceRunOptions& options);

ReferenceRow run_reference_case(const ReferenceCase& ref,
                                const ReferenceRunOptions& options = {});

}  // namespace cmcert
