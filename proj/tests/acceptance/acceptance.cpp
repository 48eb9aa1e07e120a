// Acceptance gate: one PASS/FAIL line per criterion. `--only N` runs one.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "core/criteria.hpp"
#include "core/error.hpp"
#include "core/lure_gain.hpp"
#include "core/simulator.hpp"
#include "core/tables.hpp"
#include "core/voltage_gain.hpp"

using namespace cmcert;

namespace {

// Pinned tolerances.
constexpr double kZeroGainMax = 1e-4;
constexpr double kAnchorTol = 0.03;
constexpr double kIdentityRel = 1e-9;
constexpr double kChargeRel = 1e-6;
constexpr double kSolverTol = 1e-4;  // GainSolverOptions default
constexpr double kAnchorSectorTol = 1e-4;

struct Outcome {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

ConverterParams random_buck(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (;;) {
    ConverterParams p;
    p.v_in = 5 + 43 * u(rng);
    p.v_out = p.v_in * (0.05 + 0.85 * u(rng));
    p.inductance = std::pow(10.0, -7.5 + 2.5 * u(rng));
    p.capacitance = std::pow(10.0, -5.5 + 2.0 * u(rng));
    p.load = std::pow(10.0, -1.5 + 2.0 * u(rng));
    p.t_fixed = std::pow(10.0, -7.5 + 1.5 * u(rng));
    p.lambda = u(rng);
    const double ss = compute_equilibrium(p).t_var_ss;
    p.t_var_min = ss * (0.3 + 0.7 * u(rng));
    p.t_var_max = ss * (1.0 + 2.0 * u(rng));
    try {
      coefficient_bounds(p);
      if (coefficient_bounds(p).alpha_max < 1.0) return p;
    } catch (const AssumptionViolated&) {
    }
  }
}

std::vector<double> linspace(double lo, double hi, int n) {
  std::vector<double> g(n);
  for (int k = 0; k < n; ++k) g[k] = lo + (hi - lo) * k / (n - 1);
  g.back() = hi;
  return g;
}

// 1. Zero-sector gain.
Outcome zero_sector() {
  const auto t0 = Clock::now();
  const double g = certify_gain(unitless_current_block(), {0.0, 0.0}).gamma_hat;
  const double dt = seconds_since(t0);
  return {g <= kZeroGainMax && dt < 1.0,
          fmt::format("gamma_hat={:.3e} (<= {:.0e}), {:.3f}s (< 1s)", g, kZeroGainMax, dt)};
}

// 2. Threshold anchors with degenerate timing bounds.
Outcome anchors() {
  const auto t0 = Clock::now();
  const double a1 = max_stable_sector(reference_buck(0.4, true), kAnchorSectorTol);
  const double a2 = max_stable_sector(reference_buck(0.05, true), kAnchorSectorTol);
  const double dt = seconds_since(t0);
  const bool ok = std::abs(a1 - 0.24) <= kAnchorTol && std::abs(a2 - 0.44) <= kAnchorTol &&
                  dt < 120.0;
  return {ok, fmt::format("a*(R=0.4)={:.4f} want 0.24+-{}, a*(R=0.05)={:.4f} want 0.44+-{}, "
                          "{:.2f}s (< 120s)",
                          a1, kAnchorTol, a2, kAnchorTol, dt)};
}

// 3. Step-response verdicts under the alternating schedule.
Outcome simulation_verdicts() {
  const auto t0 = Clock::now();
  ReferenceRunOptions o;
  o.n_cycles = 5000;
  const SimVerdict v1 =
      classify_stability(reference_step_trace(reference_buck(0.4, false), 0.48, o));
  const SimVerdict v2 =
      classify_stability(reference_step_trace(reference_buck(0.05, false), 0.3, o));
  const double dt = seconds_since(t0);
  const bool ok = v1.classification == Classification::kUnstable &&
                  v2.classification == Classification::kStable && dt < 10.0;
  return {ok, fmt::format("case1={} (want Unstable, final_rms={:.2e}), case2={} (want Stable, "
                          "final_rms={:.2e}), 5000 cycles, {:.2f}s (< 10s)",
                          to_string(v1.classification), v1.final_rms,
                          to_string(v2.classification), v2.final_rms, dt)};
}

// 4. Voltage-bound identity.
Outcome voltage_identity() {
  std::mt19937_64 rng(4);
  double worst = 0.0;
  for (int k = 0; k < 1000; ++k) {
    const ConverterParams p = random_buck(rng);
    const CoefficientBounds b = coefficient_bounds(p);
    const DerivedConstants d = derived_constants(p);
    const double lhs = (b.beta_max + b.gamma_max) / (1.0 - b.alpha_max);
    const double rhs = p.load / (1.0 + p.t_fixed / (2.0 * d.tau2)) * d.t_s_max / d.t_s_min;
    worst = std::max(worst, std::abs(lhs - rhs) / std::abs(rhs));
  }
  return {worst <= kIdentityRel,
          fmt::format("1000 sets, worst relative error {:.2e} (<= {:.0e})", worst, kIdentityRel)};
}

struct GridCell {
  SectorBound sector;
  GainCertificate cert;
};

const std::vector<GridCell>& certified_grid() {
  static const std::vector<GridCell> cells = [] {
    std::vector<GridCell> out;
    for (double a : linspace(-0.5, 0.0, 21)) {
      for (double b : linspace(0.0, 0.5, 21)) {
        try {
          out.push_back({{a, b}, certify_gain(unitless_current_block(), {a, b})});
        } catch (const Infeasible&) {
        }
      }
    }
    return out;
  }();
  return cells;
}

// 5. Oracle domination on the 21x21 grid.
Outcome oracle_domination() {
  const auto& cells = certified_grid();
  int lti_fail = 0;
  int emp_fail = 0;
  double worst_ratio = 0.0;
  for (const auto& c : cells) {
    const double g = c.cert.gamma_hat;
    const double slack = kSolverTol * std::max(1.0, g);
    if (g < lti_lower_bound_oracle(c.sector) - slack) ++lti_fail;
    EnsembleSpec spec;
    spec.trials = 100;
    spec.length = 10000;
    spec.sector = c.sector;
    spec.schedule = EnsembleSchedule::kRandom;
    spec.input = EnsembleInput::kUniform;
    const GainEstimate e = estimate_l2_gain(GainBlock::kCurrentUnitless, {}, spec, 1000);
    if (e.max_gain > g + slack) ++emp_fail;
    if (g > 0) worst_ratio = std::max(worst_ratio, e.max_gain / g);
  }
  return {lti_fail == 0 && emp_fail == 0 && cells.size() > 0,
          fmt::format("{} certified cells of 441, LTI violations {}, empirical violations {} "
                      "(100 schedules x 1e4), max empirical/certified {:.4f}",
                      cells.size(), lti_fail, emp_fail, worst_ratio)};
}

// 6. Dissipation inequality along trajectories.
Outcome dissipation() {
  const auto& cells = certified_grid();
  int failures = 0;
  double worst = -1e300;
  for (std::size_t k = 0; k < cells.size(); ++k) {
    const auto& c = cells[k];
    const double tol = 1e-8 * (1.0 + c.cert.p(0, 0));
    for (int trial = 0; trial < 100; ++trial) {
      std::mt19937_64 rng(static_cast<std::uint64_t>(k) * 1000 + trial);
      std::uniform_real_distribution<double> u(-1.0, 1.0);
      std::vector<double> input(1000);
      for (double& x : input) x = u(rng);
      const auto slopes = random_schedule(c.sector, input.size(), rng());
      const auto trace = simulate_unitless_loop(slopes, input);
      const double r = worst_dissipation_residual(trace, c.cert, c.sector);
      worst = std::max(worst, r / (1.0 + c.cert.p(0, 0)));
      if (!dissipation_check(trace, c.cert, c.sector, tol)) ++failures;
    }
  }
  return {failures == 0, fmt::format("{} certificates x 100 trajectories, failures {}, worst "
                                     "residual/(1+P) {:.3e} (<= 1e-8)",
                                     cells.size(), failures, worst)};
}

// 7. Charge balance versus the LTV map.
Outcome charge_balance() {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<ConverterParams> sets = {reference_buck(0.4, false), reference_buck(0.05, false)};
  for (int k = 0; k < 20; ++k) sets.push_back(random_buck(rng));
  double worst = 0.0;
  for (const auto& p : sets) {
    const double iv = std::max(1e-3, std::abs(*compute_equilibrium(p).i_valley));
    for (int k = 0; k < 100; ++k) {
      const double i = (u(rng) - 0.5) * iv;
      const double v = (u(rng) - 0.5) * 0.1 * p.v_out;
      const double t_off = p.t_var_min + (p.t_var_max - p.t_var_min) * u(rng);
      const LtvCoefficients c = ltv_coefficients(p, t_off);
      const double i_next = ramp_next_current(p, i, v, t_off);
      const double v_ltv = c.alpha_n * v + c.beta_n * i + c.gamma_n * i_next;
      const double v_cb = charge_balance_next_voltage(p, i, v, t_off);
      const double scale = std::max(std::abs(v_cb), 1e-12 * p.v_out);
      worst = std::max(worst, std::abs(v_ltv - v_cb) / scale);
    }
  }
  return {worst <= kChargeRel, fmt::format("{} parameter sets x 100, worst relative error "
                                           "{:.2e} (<= {:.0e})",
                                           sets.size(), worst, kChargeRel)};
}

// 8. Certified configurations simulate stable.
Outcome small_gain_consistency() {
  const LftSystem sys = unitless_current_block();
  int configs = 0;
  int runs = 0;
  int not_stable = 0;
  std::string first_bad;
  for (double load : {0.05, 0.1, 0.2, 0.4, 1.0}) {
    for (double a : {0.1, 0.2, 0.3, 0.4, 0.45}) {
      const ConverterParams p = reference_buck(load, false);
      const SectorBound s = SectorBound::symmetric(a);
      const double g = certify_gain(sys, s).gamma_hat;
      if (buck_on_time_criterion(p, s, g).verdict != Verdict::kCertified) continue;
      ++configs;
      const double iv = *compute_equilibrium(p).i_valley;
      for (int seed = 0; seed < 50; ++seed) {
        std::mt19937_64 rng(static_cast<std::uint64_t>(seed) + 100 * configs);
        std::uniform_real_distribution<double> u(-1.0, 1.0);
        const auto slopes = seed % 5 == 0 ? alternating_schedule(a, 2)
                                          : random_schedule(s, 5000, rng());
        const auto model = InterferenceModel::schedule(s, slopes);
        // Steps land on the configured equilibrium (command deviation 0),
        // the frame in which the interference model is defined.
        const double before = 0.9 * iv * u(rng);
        const TransientTrace t = run_transient(p, model, step_command(before, 0.0), 5000);
        ++runs;
        const SimVerdict v = classify_stability(t);
        if (v.classification != Classification::kStable) {
          ++not_stable;
          if (first_bad.empty()) {
            first_bad = fmt::format(" first: R={} a={} seed={} -> {}", load, a, seed,
                                    to_string(v.classification));
          }
        }
      }
    }
  }
  return {configs > 0 && not_stable == 0,
          fmt::format("{} certified configurations, {} runs, {} not Stable{}", configs, runs,
                      not_stable, first_bad)};
}

// 9. Boost branch selection.
Outcome boost_branches() {
  ConverterParams p;
  p.topology = Topology::kBoostConstOff;
  p.v_in = 5;
  p.v_out = 12;
  p.t_fixed = 100e-9;
  p.inductance = 480e-9;
  p.load = 2;
  p.capacitance = 100e-6;
  p.lambda = 0.5;
  const TimingBounds b = degenerate_timing_bounds(p);
  p.t_var_min = b.t_var_min;
  p.t_var_max = b.t_var_max;
  const StabilityReport r1 = boost_off_time_criterion(p, {}, 0.0);

  ConverterParams q = p;
  q.inductance = 4.8e-6;
  q.capacitance = 1e-6;
  q.lambda = 0.0;
  const StabilityReport r2 = boost_off_time_criterion(q, {}, 0.0);
  const double t2 = q.t_fixed * q.t_fixed;
  const bool case_i = r1.branch == BoostBranch::kCaseI &&
                      std::abs(r1.boost->threshold_case_i - 5.3) <= 1e-9;
  const bool case_ii = r2.branch == BoostBranch::kCaseII;
  const double ratio = r2.boost->threshold_case_ii_printed / r2.boost->threshold_case_ii_normalized;
  const bool factor = std::abs(ratio - t2) <= 1e-12 * t2;
  return {case_i && case_ii && factor,
          fmt::format("example1 D={:.4e} -> {} threshold {:.6f}; example2 D={:.4e} -> {}, "
                      "printed/normalized={:.6e} (T_off^2={:.6e})",
                      r1.boost->discriminant, to_string(*r1.branch), r1.boost->threshold_case_i,
                      r2.boost->discriminant, to_string(*r2.branch), ratio, t2)};
}

}  // namespace

int main(int argc, char** argv) {
  int only = 0;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--only") == 0 && i + 1 < argc) only = std::atoi(argv[++i]);
  }
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"zero-sector gain", zero_sector},
      {"threshold anchors", anchors},
      {"simulation verdicts", simulation_verdicts},
      {"voltage-bound identity", voltage_identity},
      {"oracle domination", oracle_domination},
      {"dissipation property", dissipation},
      {"charge-balance equivalence", charge_balance},
      {"small-gain consistency", small_gain_consistency},
      {"boost branch selection", boost_branches},
  };
  int failed = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    const int n = static_cast<int>(k) + 1;
    if (only != 0 && only != n) continue;
    Outcome o;
    try {
      o = criteria[k].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::printf("criterion %d (%s): %s: %s\n", n, criteria[k].first, o.pass ? "PASS" : "FAIL",
                o.detail.c_str());
    std::fflush(stdout);
    failed += o.pass ? 0 : 1;
  }
  return failed == 0 ? 0 : 1;
}
