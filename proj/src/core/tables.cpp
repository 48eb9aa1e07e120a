#include "core/tables.hpp"

#include <limits>

#include "core/error.hpp"

namespace cmcert {

ConverterParams reference_buck(double load, bool degenerate_bounds) {
  ConverterParams p;
  p.topology = Topology::kBuckConstOn;
  p.v_in = 12.0;
  p.v_out = 2.2;
  p.inductance = 240e-9;
  p.capacitance = 100e-6;
  p.load = load;
  p.t_fixed = 100e-9;
  p.lambda = 0.5;
  const TimingBounds b = degenerate_bounds ? degenerate_timing_bounds(p)
                                           : default_timing_bounds(p);
  p.t_var_min = b.t_var_min;
  p.t_var_max = b.t_var_max;
  return p;
}

const std::vector<ReferenceCase>& reference_cases() {
  static const std::vector<ReferenceCase> cases = {
      {1, 0.4, 0.48, 0.24, 4.5, Verdict::kNotCertified,
       Classification::kUnstable},
      {2, 0.05, 0.3, 0.44, 43.0, Verdict::kCertified,
       Classification::kStable},
  };
  return cases;
}

TransientTrace reference_step_trace(const ConverterParams& params, double a,
                                    const ReferenceRunOptions& options) {
  const Equilibrium eq = compute_equilibrium(params);
  if (!eq.i_valley) {
    throw TopologyMismatch("step studies need the constant on-time buck");
  }
  const double step = options.step_fraction * *eq.i_valley;
  const auto interference = InterferenceModel::schedule(
      SectorBound::symmetric(a), alternating_schedule(a, 2));
  return run_transient(params, interference, step_command(-step, 0.0),
                       options.n_cycles, std::nullopt, options.sim);
}

ReferenceRow run_reference_case(const ReferenceCase& ref,
                                const ReferenceRunOptions& options) {
  ReferenceRow row;
  row.ref = ref;
  const ConverterParams frozen = reference_buck(ref.load, true);
  row.sector_threshold = buck_sector_threshold(frozen);
  row.observed_max_sector =
      max_stable_sector(frozen, options.sector_tol, options.solver);

  const SectorBound sector = SectorBound::symmetric(ref.sector_a);
  double gamma_hat = 0.0;
  try {
    gamma_hat =
        certify_gain(unitless_current_block(), sector, options.solver).gamma_hat;
  } catch (const Infeasible&) {
    gamma_hat = std::numeric_limits<double>::infinity();
  }
  row.report = buck_on_time_criterion(frozen, sector, gamma_hat);

  const ConverterParams dynamic = reference_buck(ref.load, false);
  row.trace = reference_step_trace(dynamic, ref.sector_a, options);
  row.sim = classify_stability(row.trace, options.classify);
  return row;
}

}  // namespace cmcert
