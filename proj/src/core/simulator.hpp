#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "core/converter_model.hpp"
#include "core/lure_gain.hpp"

namespace cmcert {

enum class InterferenceKind { kNone, kSectorGainSchedule, kSinusoid };

/// Measurement interference on the valley-current comparator.
///
/// kSectorGainSchedule realises psi(x) = -s[n] m2[n] x, so the loop
/// nonlinearity Delta(z) = -psi(z / m2[n]) has slope exactly s[n]. The
/// schedule is cycled when shorter than the run. kSinusoid uses
/// w(t) = amplitude sin(2 pi t / period + phase), t measured from the start
/// of the off-interval, and psi(x) = w(T_off + x) - w(T_off).
struct InterferenceModel {
  InterferenceKind kind = InterferenceKind::kNone;
  SectorBound sector;
  std::vector<double> slopes;
  double amplitude = 0.0;  // A
  double period = 0.0;     // s
  double phase = 0.0;      // rad

  static InterferenceModel none() { return {}; }
  static InterferenceModel schedule(const SectorBound& sector,
                                    std::vector<double> slopes);
  static InterferenceModel sinusoid(const SectorBound& declared,
                                    double amplitude, double period,
                                    double phase);

  void validate() const;
  double slope_at(long n) const;
  double psi(long n, double x, double m2, double t_off_ss) const;
};

/// -a, +a, -a, ... (starts on the lower endpoint).
std::vector<double> alternating_schedule(double a, std::size_t length);
std::vector<double> random_schedule(const SectorBound& sector,
                                    std::size_t length, std::uint64_t seed);

struct CycleState {
  long n = 0;
  double i_tilde = 0.0;  // A, one-cycle-delayed valley current deviation
  double v_tilde = 0.0;  // V, sampled output voltage deviation
  double t_off = 0.0;    // s, realised off-time of the cycle ending here
  double q = 0.0;        // V, v_tilde - gamma[n] i_tilde
  bool clamped = false;
};

struct SimOptions {
  double current_guard = 1e3;  // A
  double voltage_guard = 1e3;  // V
};

struct OffTimeSolution {
  double t_off = 0.0;
  bool clamped = false;
  bool non_monotone = false;  // residual crossed zero more than once
};

/// Off-time at which the falling ramp meets the interfered command; the
/// smallest root in [t_var_min, t_var_max], clamped to the violated bound
/// when none exists.
OffTimeSolution solve_off_time(const CycleState& prev,
                               const ConverterParams& params,
                               const InterferenceModel& interference,
                               double i_cmd_tilde);

/// One switching cycle. Throws Diverged when a guard is exceeded.
CycleState step_cycle(const CycleState& state, const ConverterParams& params,
                      const InterferenceModel& interference,
                      double i_cmd_tilde, const SimOptions& options = {});

/// Maps a cycle index to the command deviation; the value at n = -1 is the
/// pre-step command.
using CommandProfile = std::function<double(long)>;

CommandProfile step_command(double before, double after);

/// Interference-free fixed point for a constant command deviation:
/// i = cmd, v = cmd R / (1 + T_on / (2 tau2)).
CycleState pre_step_state(const ConverterParams& params, double command);

struct TransientTrace {
  std::vector<CycleState> states;  // states[0] is the initial state
  ConverterParams params;
  std::vector<double> commands;    // command applied on each step
  std::optional<long> divergence_cycle;
  long sector_violations = 0;
  long non_monotone_cycles = 0;

  bool diverged() const { return divergence_cycle.has_value(); }
};

TransientTrace run_transient(const ConverterParams& params,
                             const InterferenceModel& interference,
                             const CommandProfile& command, long n_cycles,
                             std::optional<CycleState> initial = std::nullopt,
                             const SimOptions& options = {});

enum class Classification { kStable, kUnstable, kIndeterminate };
std::string_view to_string(Classification c);

struct SimVerdict {
  Classification classification = Classification::kIndeterminate;
  double peak_deviation = 0.0;
  double final_rms = 0.0;
  double mid_rms = 0.0;
  std::optional<long> divergence_cycle;
};

struct ClassifyOptions {
  std::size_t settle_window = 500;
  double settle_tol = 1e-6;  // A
  double growth_factor = 1.05;
};

/// Deviation is i_tilde minus the final command. Unstable if the trace
/// diverged or the final-window RMS exceeds growth_factor times the
/// mid-window RMS; Stable if the final-window RMS is below settle_tol.
SimVerdict classify_stability(const TransientTrace& trace,
                              const ClassifyOptions& options = {});

/// One step of the unitless loop x[n+1] = h, p = x - h + r, h = s p, e = x.
struct UnitlessSample {
  double x = 0.0;
  double p = 0.0;
  double h = 0.0;
  double r = 0.0;
  double e = 0.0;
};

/// Zero initial state; `slopes` is cycled over the input length.
std::vector<UnitlessSample> simulate_unitless_loop(
    const std::vector<double>& slopes, const std::vector<double>& input);

/// v[n] = q[n] + gamma[n] i[n], q[n+1] = alpha[n] q[n] + (beta[n] +
/// alpha[n] gamma[n]) i[n] from zero state. Returns v.
std::vector<double> simulate_voltage_ltv(const ConverterParams& params,
                                         const std::vector<double>& t_off,
                                         const std::vector<double>& current);

enum class GainBlock { kCurrentUnitless, kVoltageLtv };
enum class EnsembleInput { kUniform, kResonantSinusoid };
enum class EnsembleSchedule { kRandom, kConstant, kAlternating };

struct EnsembleSpec {
  std::size_t trials = 100;
  std::size_t length = 10000;
  EnsembleInput input = EnsembleInput::kUniform;
  // Current block only.
  SectorBound sector;
  EnsembleSchedule schedule = EnsembleSchedule::kRandom;
  double constant_slope = 0.0;
};

struct GainEstimate {
  double max_gain = 0.0;
  std::vector<double> per_trial;  // trial k used seed + k
};

/// Max over trials of |output|_2 / |input|_2 from zero initial state.
GainEstimate estimate_l2_gain(GainBlock block, const ConverterParams& params,
                              const EnsembleSpec& spec, std::uint64_t seed);

/// Worst per-step value of
///   P x[n+1]^2 - P x[n]^2 + e^2 - gamma^2 r^2 + lambda (h - a p)(b p - h).
double worst_dissipation_residual(const std::vector<UnitlessSample>& trace,
                                  const GainCertificate& cert,
                                  const SectorBound& sector);

bool dissipation_check(const std::vector<UnitlessSample>& trace,
                       const GainCertificate& cert, const SectorBound& sector,
                       double tol);

/// Next voltage deviation assembled from the charge transferred during one
/// cycle (input charge in three segments minus load charge), in absolute
/// quantities. Independent of the LTV coefficients; used as a cross-check.
double charge_balance_next_voltage(const ConverterParams& params,
                                   double i_tilde, double v_tilde,
                                   double t_off);

/// Valley current deviation at the end of an off-interval of length t_off.
double ramp_next_current(const ConverterParams& params, double i_tilde,
                         double v_tilde, double t_off);

}  // namespace cmcert
