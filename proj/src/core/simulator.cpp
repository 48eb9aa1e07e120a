#include "core/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include <boost/math/tools/roots.hpp>
#include <fmt/format.h>

#include "core/error.hpp"
#include "core/voltage_gain.hpp"

namespace cmcert {

namespace {

constexpr double kRootTolSeconds = 1e-15;
constexpr int kScanPoints = 64;

void require_buck(const ConverterParams& params) {
  if (params.topology != Topology::kBuckConstOn) {
    throw TopologyMismatch("the cycle simulator models the constant on-time buck");
  }
}

double falling_slope(const ConverterParams& p, double v_tilde) {
  return (p.v_out + v_tilde) / p.inductance;
}

double rms(const std::vector<double>& xs, std::size_t begin, std::size_t end) {
  double acc = 0.0;
  for (std::size_t k = begin; k < end; ++k) acc += xs[k] * xs[k];
  return std::sqrt(acc / static_cast<double>(end - begin));
}

double norm2(const std::vector<double>& xs) {
  double acc = 0.0;
  for (double x : xs) acc += x * x;
  return std::sqrt(acc);
}

}  // namespace

InterferenceModel InterferenceModel::schedule(const SectorBound& sector,
                                              std::vector<double> slopes) {
  InterferenceModel m;
  m.kind = InterferenceKind::kSectorGainSchedule;
  m.sector = sector;
  m.slopes = std::move(slopes);
  m.validate();
  return m;
}

InterferenceModel InterferenceModel::sinusoid(const SectorBound& declared,
                                              double amplitude, double period,
                                              double phase) {
  InterferenceModel m;
  m.kind = InterferenceKind::kSinusoid;
  m.sector = declared;
  m.amplitude = amplitude;
  m.period = period;
  m.phase = phase;
  m.validate();
  return m;
}

void InterferenceModel::validate() const {
  switch (kind) {
    case InterferenceKind::kNone:
      return;
    case InterferenceKind::kSectorGainSchedule:
      sector.validate();
      if (slopes.empty()) {
        throw InvalidArgument("sector gain schedule must not be empty");
      }
      for (double s : slopes) {
        if (!(s >= sector.alpha_hat && s <= sector.beta_hat)) {
          throw InvalidArgument(fmt::format(
              "schedule slope {} outside sector [{}, {}]", s,
              sector.alpha_hat, sector.beta_hat));
        }
      }
      return;
    case InterferenceKind::kSinusoid:
      sector.validate();
      if (!(period > 0.0) || !std::isfinite(amplitude)) {
        throw InvalidArgument("sinusoid needs a positive period");
      }
      return;
  }
}

double InterferenceModel::slope_at(long n) const {
  if (kind != InterferenceKind::kSectorGainSchedule) return 0.0;
  const auto size = static_cast<long>(slopes.size());
  return slopes[static_cast<std::size_t>(((n % size) + size) % size)];
}

double InterferenceModel::psi(long n, double x, double m2,
                              double t_off_ss) const {
  switch (kind) {
    case InterferenceKind::kNone:
      return 0.0;
    case InterferenceKind::kSectorGainSchedule:
      return -slope_at(n) * m2 * x;
    case InterferenceKind::kSinusoid: {
      const double w = 2.0 * std::numbers::pi / period;
      return amplitude * (std::sin(w * (t_off_ss + x) + phase) -
                          std::sin(w * t_off_ss + phase));
    }
  }
  return 0.0;
}

std::vector<double> alternating_schedule(double a, std::size_t length) {
  std::vector<double> s(length);
  for (std::size_t k = 0; k < length; ++k) s[k] = (k % 2 == 0) ? -a : a;
  return s;
}

std::vector<double> random_schedule(const SectorBound& sector,
                                    std::size_t length, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(sector.alpha_hat,
                                              sector.beta_hat);
  std::vector<double> s(length);
  for (double& x : s) x = dist(rng);
  return s;
}

double ramp_next_current(const ConverterParams& p, double i_tilde,
                         double v_tilde, double t_off) {
  const Equilibrium eq = compute_equilibrium(p);
  return i_tilde - v_tilde * eq.t_s_ss / p.inductance -
         falling_slope(p, v_tilde) * (t_off - eq.t_var_ss);
}

OffTimeSolution solve_off_time(const CycleState& prev,
                               const ConverterParams& params,
                               const InterferenceModel& interference,
                               double i_cmd_tilde) {
  params.validate();
  require_buck(params);
  const Equilibrium eq = compute_equilibrium(params);
  const double m2 = falling_slope(params, prev.v_tilde);
  const double t_min = params.t_var_min;
  const double t_max = params.t_var_max;

  auto clamp = [&](double t) {
    if (t < t_min) return OffTimeSolution{t_min, true, false};
    if (t > t_max) return OffTimeSolution{t_max, true, false};
    return OffTimeSolution{t, false, false};
  };

  // Ramp residual at zero off-time deviation, before the falling slope acts.
  const double head = prev.i_tilde -
                      prev.v_tilde * eq.t_s_ss / params.inductance -
                      i_cmd_tilde;

  if (interference.kind != InterferenceKind::kSinusoid) {
    // Affine residual: head - m2 (1 + s) x = 0.
    const double s = interference.slope_at(prev.n);
    const double slope = m2 * (1.0 + s);
    if (!(slope > 0.0)) return {t_max, true, false};
    return clamp(eq.t_var_ss + head / slope);
  }

  auto residual = [&](double t) {
    const double x = t - eq.t_var_ss;
    return head - m2 * x + interference.psi(prev.n, x, m2, eq.t_var_ss);
  };

  if (t_max == t_min) return {t_min, residual(t_min) != 0.0, false};
  double f_prev = residual(t_min);
  if (f_prev <= 0.0) return {t_min, f_prev < 0.0, false};

  std::optional<std::pair<double, double>> bracket;
  int crossings = 0;
  double t_prev = t_min;
  for (int k = 1; k <= kScanPoints; ++k) {
    const double t = t_min + (t_max - t_min) * k / kScanPoints;
    const double f = residual(t);
    if ((f_prev > 0.0) != (f > 0.0)) {
      ++crossings;
      if (!bracket) bracket = std::make_pair(t_prev, t);
    }
    f_prev = f;
    t_prev = t;
  }
  if (!bracket) return {t_max, true, false};
  auto tol = [](double a, double b) { return std::abs(b - a) <= kRootTolSeconds; };
  const auto [lo, hi] = boost::math::tools::bisect(residual, bracket->first,
                                                   bracket->second, tol);
  return {0.5 * (lo + hi), false, crossings > 1};
}

CycleState step_cycle(const CycleState& state, const ConverterParams& params,
                      const InterferenceModel& interference,
                      double i_cmd_tilde, const SimOptions& options) {
  const OffTimeSolution off =
      solve_off_time(state, params, interference, i_cmd_tilde);
  // The ramp equation holds whether or not the comparator fired, so it also
  // covers the clamped case.
  const double i_next =
      ramp_next_current(params, state.i_tilde, state.v_tilde, off.t_off);
  const LtvCoefficients c = ltv_coefficients(params, off.t_off);

  CycleState next;
  next.n = state.n + 1;
  next.i_tilde = i_next;
  next.v_tilde =
      c.alpha_n * state.v_tilde + c.beta_n * state.i_tilde + c.gamma_n * i_next;
  next.t_off = off.t_off;
  next.q = next.v_tilde - c.gamma_n * next.i_tilde;
  next.clamped = off.clamped;

  if (!(std::abs(next.i_tilde) <= options.current_guard) ||
      !(std::abs(next.v_tilde) <= options.voltage_guard)) {
    throw Diverged(fmt::format("state left the guard box at cycle {}",
                               next.n));
  }
  return next;
}

CommandProfile step_command(double before, double after) {
  return [before, after](long n) { return n < 0 ? before : after; };
}

CycleState pre_step_state(const ConverterParams& params, double command) {
  params.validate();
  require_buck(params);
  const Equilibrium eq = compute_equilibrium(params);
  const DerivedConstants d = derived_constants(params);
  CycleState s;
  s.i_tilde = command;
  s.v_tilde = command * params.load / (1.0 + params.t_fixed / (2.0 * d.tau2));
  s.t_off =
      eq.t_var_ss - s.v_tilde * eq.t_s_ss / (params.v_out + s.v_tilde);
  const double gamma =
      (params.lambda * params.t_fixed + 0.5 * s.t_off) / params.capacitance;
  s.q = s.v_tilde - gamma * s.i_tilde;
  return s;
}

TransientTrace run_transient(const ConverterParams& params,
                             const InterferenceModel& interference,
                             const CommandProfile& command, long n_cycles,
                             std::optional<CycleState> initial,
                             const SimOptions& options) {
  if (n_cycles < 1) throw InvalidArgument("n_cycles must be at least 1");
  params.validate();
  require_buck(params);
  interference.validate();

  TransientTrace trace;
  trace.params = params;
  trace.states.reserve(static_cast<std::size_t>(n_cycles) + 1);
  trace.commands.reserve(static_cast<std::size_t>(n_cycles));
  CycleState state = initial ? *initial : pre_step_state(params, command(-1));
  state.n = 0;
  trace.states.push_back(state);

  const Equilibrium eq = compute_equilibrium(params);
  const SectorBound& sector = interference.sector;
  for (long n = 0; n < n_cycles; ++n) {
    const double cmd = command(n);
    trace.commands.push_back(cmd);
    if (interference.kind == InterferenceKind::kSinusoid) {
      const OffTimeSolution off =
          solve_off_time(state, params, interference, cmd);
      if (off.non_monotone) ++trace.non_monotone_cycles;
      const double x = off.t_off - eq.t_var_ss;
      const double m2 = falling_slope(params, state.v_tilde);
      if (std::abs(x) > 1e-18 && m2 > 0.0) {
        const double slope =
            -interference.psi(state.n, x, m2, eq.t_var_ss) / (m2 * x);
        if (slope < sector.alpha_hat - 1e-12 ||
            slope > sector.beta_hat + 1e-12) {
          ++trace.sector_violations;
        }
      }
    }
    try {
      state = step_cycle(state, params, interference, cmd, options);
    } catch (const Diverged&) {
      trace.divergence_cycle = n + 1;
      break;
    }
    trace.states.push_back(state);
  }
  return trace;
}

std::string_view to_string(Classification c) {
  switch (c) {
    case Classification::kStable:
      return "Stable";
    case Classification::kUnstable:
      return "Unstable";
    case Classification::kIndeterminate:
      return "Indeterminate";
  }
  return "Indeterminate";
}

SimVerdict classify_stability(const TransientTrace& trace,
                              const ClassifyOptions& options) {
  SimVerdict verdict;
  verdict.divergence_cycle = trace.divergence_cycle;
  const std::size_t w = options.settle_window;
  if (w == 0) throw InvalidArgument("settle_window must be positive");
  if (trace.diverged()) {
    verdict.classification = Classification::kUnstable;
    for (const auto& s : trace.states) {
      verdict.peak_deviation =
          std::max(verdict.peak_deviation, std::abs(s.i_tilde));
    }
    return verdict;
  }
  if (trace.states.size() < 2 * w) {
    throw InvalidArgument(fmt::format(
        "trace of {} states is shorter than twice the settle window {}",
        trace.states.size(), w));
  }
  const double target = trace.commands.empty() ? 0.0 : trace.commands.back();
  std::vector<double> dev(trace.states.size());
  for (std::size_t k = 0; k < dev.size(); ++k) {
    dev[k] = trace.states[k].i_tilde - target;
    verdict.peak_deviation = std::max(verdict.peak_deviation, std::abs(dev[k]));
  }
  const std::size_t mid_begin = dev.size() / 2 - w / 2;
  verdict.mid_rms = rms(dev, mid_begin, mid_begin + w);
  verdict.final_rms = rms(dev, dev.size() - w, dev.size());
  if (verdict.final_rms > options.growth_factor * verdict.mid_rms &&
      verdict.final_rms >= options.settle_tol) {
    verdict.classification = Classification::kUnstable;
  } else if (verdict.final_rms < options.settle_tol) {
    verdict.classification = Classification::kStable;
  } else {
    verdict.classification = Classification::kIndeterminate;
  }
  return verdict;
}

std::vector<UnitlessSample> simulate_unitless_loop(
    const std::vector<double>& slopes, const std::vector<double>& input) {
  if (slopes.empty()) throw InvalidArgument("slope schedule is empty");
  std::vector<UnitlessSample> out(input.size());
  double x = 0.0;
  for (std::size_t n = 0; n < input.size(); ++n) {
    const double s = slopes[n % slopes.size()];
    if (!(s > -1.0)) throw InvalidArgument("slope must exceed -1");
    UnitlessSample& o = out[n];
    o.x = x;
    o.r = input[n];
    o.h = s * (x + o.r) / (1.0 + s);
    o.p = x - o.h + o.r;
    o.e = x;
    x = o.h;
  }
  return out;
}

std::vector<double> simulate_voltage_ltv(const ConverterParams& params,
                                         const std::vector<double>& t_off,
                                         const std::vector<double>& current) {
  if (t_off.size() != current.size()) {
    throw InvalidArgument("t_off and current sequences differ in length");
  }
  std::vector<double> v(current.size());
  double q = 0.0;
  for (std::size_t n = 0; n < current.size(); ++n) {
    const LtvCoefficients c = ltv_coefficients(params, t_off[n]);
    v[n] = q + c.gamma_n * current[n];
    q = c.alpha_n * q + (c.beta_n + c.alpha_n * c.gamma_n) * current[n];
  }
  return v;
}

GainEstimate estimate_l2_gain(GainBlock block, const ConverterParams& params,
                              const EnsembleSpec& spec, std::uint64_t seed) {
  if (spec.trials == 0 || spec.length == 0) {
    throw InvalidArgument("ensemble needs at least one trial of length >= 1");
  }
  GainEstimate est;
  est.per_trial.reserve(spec.trials);
  for (std::size_t k = 0; k < spec.trials; ++k) {
    std::mt19937_64 rng(seed + k);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);

    std::vector<double> input(spec.length);
    double slope_for_resonance = spec.constant_slope;
    if (block == GainBlock::kCurrentUnitless &&
        spec.schedule != EnsembleSchedule::kConstant) {
      slope_for_resonance = spec.sector.alpha_hat;
    }
    // Resonance of x[n+1] = c (x + u) sits at z = sign(c).
    const double c = slope_for_resonance / (1.0 + slope_for_resonance);
    for (std::size_t n = 0; n < spec.length; ++n) {
      if (spec.input == EnsembleInput::kUniform) {
        input[n] = unit(rng);
      } else {
        input[n] = (c < 0.0 && n % 2 == 1) ? -1.0 : 1.0;
      }
    }
    const double in_norm = norm2(input);
    if (!(in_norm > 0.0)) throw InvalidArgument("zero-energy input");

    double out_norm = 0.0;
    if (block == GainBlock::kCurrentUnitless) {
      std::vector<double> slopes;
      switch (spec.schedule) {
        case EnsembleSchedule::kConstant:
          slopes = {spec.constant_slope};
          break;
        case EnsembleSchedule::kAlternating:
          slopes = {spec.sector.alpha_hat, spec.sector.beta_hat};
          break;
        case EnsembleSchedule::kRandom:
          slopes = random_schedule(spec.sector, spec.length, rng());
          break;
      }
      std::vector<double> e;
      e.reserve(spec.length);
      for (const auto& s : simulate_unitless_loop(slopes, input)) {
        e.push_back(s.e);
      }
      out_norm = norm2(e);
    } else {
      params.validate();
      std::uniform_real_distribution<double> toff(params.t_var_min,
                                                  params.t_var_max);
      std::vector<double> t_off(spec.length);
      for (double& t : t_off) t = toff(rng);
      out_norm = norm2(simulate_voltage_ltv(params, t_off, input));
    }
    const double gain = out_norm / in_norm;
    est.per_trial.push_back(gain);
    est.max_gain = std::max(est.max_gain, gain);
  }
  return est;
}

double worst_dissipation_residual(const std::vector<UnitlessSample>& trace,
                                  const GainCertificate& cert,
                                  const SectorBound& sector) {
  if (cert.p.rows() != 1 || cert.p.cols() != 1) {
    throw InvalidArgument("dissipation check needs a scalar storage matrix");
  }
  const double p = cert.p(0, 0);
  double worst = -std::numeric_limits<double>::infinity();
  for (const auto& s : trace) {
    const double x_next = s.h;
    const double value =
        p * x_next * x_next - p * s.x * s.x + s.e * s.e -
        cert.gamma_sq * s.r * s.r +
        cert.lambda_mult * (s.h - sector.alpha_hat * s.p) *
            (sector.beta_hat * s.p - s.h);
    worst = std::max(worst, value);
  }
  return worst;
}

bool dissipation_check(const std::vector<UnitlessSample>& trace,
                       const GainCertificate& cert, const SectorBound& sector,
                       double tol) {
  if (trace.empty()) return true;
  return worst_dissipation_residual(trace, cert, sector) <= tol;
}

double charge_balance_next_voltage(const ConverterParams& p, double i_tilde,
                                   double v_tilde, double t_off) {
  const Equilibrium eq = compute_equilibrium(p);
  const double t_on = p.t_fixed;
  const double lambda = p.lambda;
  const double v = p.v_out + v_tilde;
  const double m1 = (p.v_in - v) / p.inductance;
  const double m2 = v / p.inductance;
  const double i_start = *eq.i_valley + i_tilde;
  const double i_end = i_start + m1 * t_on - m2 * t_off;

  const double q1 = (i_start + 0.5 * (1.0 + lambda) * m1 * t_on) *
                    (1.0 - lambda) * t_on;
  const double q2 = 0.5 * (i_start + m1 * t_on + i_end) * t_off;
  const double q3 = (i_end + 0.5 * lambda * m1 * t_on) * lambda * t_on;
  const double q_out = v / p.load * (t_on + t_off);
  const double v_next = v + (q1 + q2 + q3 - q_out) / p.capacitance;
  return v_next - p.v_out;
}

}  // namespace cmcert
