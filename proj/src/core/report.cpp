#include "core/report.hpp"

#include <cmath>
#include <fstream>

#include <fmt/format.h>

#include "core/error.hpp"

namespace cmcert {

namespace {

std::string opt(const std::optional<double>& v) {
  return v ? format_number(*v) : std::string("none");
}

}  // namespace

std::string format_number(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  return fmt::format("{:.9e}", value);
}

std::string surface_csv(const GainSurface& surface) {
  std::string out = "alpha_hat,beta_hat,gamma_hat\n";
  for (std::size_t i = 0; i < surface.alpha_grid.size(); ++i) {
    for (std::size_t j = 0; j < surface.beta_grid.size(); ++j) {
      out += fmt::format("{},{},{}\n", format_number(surface.alpha_grid[i]),
                         format_number(surface.beta_grid[j]),
                         format_number(surface.at(i, j)));
    }
  }
  return out;
}

std::string trace_csv(const TransientTrace& trace) {
  std::string out = "n,i_tilde_A,v_tilde_V,t_off_s,clamped\n";
  for (const auto& s : trace.states) {
    out += fmt::format("{},{},{},{},{}\n", s.n, format_number(s.i_tilde),
                       format_number(s.v_tilde), format_number(s.t_off),
                       s.clamped ? 1 : 0);
  }
  return out;
}

std::string ensemble_csv(const GainEstimate& estimate, std::uint64_t seed) {
  std::string out = "seed,gain\n";
  for (std::size_t k = 0; k < estimate.per_trial.size(); ++k) {
    out += fmt::format("{},{}\n", seed + k, format_number(estimate.per_trial[k]));
  }
  return out;
}

std::string describe(const ConverterParams& p) {
  return fmt::format(
      "topology = {}\nv_in = {}\nv_out = {}\ninductance = {}\n"
      "capacitance = {}\nload = {}\nt_fixed = {}\nlambda = {}\n"
      "t_var_min = {}\nt_var_max = {}\n",
      to_string(p.topology), format_number(p.v_in), format_number(p.v_out),
      format_number(p.inductance), format_number(p.capacitance),
      format_number(p.load), format_number(p.t_fixed),
      format_number(p.lambda), format_number(p.t_var_min),
      format_number(p.t_var_max));
}

std::string describe(const Equilibrium& eq, const DerivedConstants& d,
                     const AssumptionReport& a) {
  return fmt::format(
      "i_valley = {}\nt_var_ss = {}\nt_s_ss = {}\ntau1 = {}\ntau2 = {}\n"
      "t_s_min = {}\nt_s_max = {}\nratio_rc = {}\nratio_ripple = {}\n"
      "assumption_threshold = {}\nassumptions = {}\n",
      opt(eq.i_valley), format_number(eq.t_var_ss), format_number(eq.t_s_ss),
      format_number(d.tau1), format_number(d.tau2), format_number(d.t_s_min),
      format_number(d.t_s_max), format_number(a.ratio_rc),
      format_number(a.ratio_ripple), format_number(a.threshold),
      a.pass ? "pass" : "fail");
}

std::string describe(const StabilityReport& r) {
  std::string out = fmt::format(
      "topology = {}\nverdict = {}\nalpha_hat = {}\nbeta_hat = {}\n"
      "gamma_hat = {}\ngamma_v_to_i = {}\ngamma_i_to_v = {}\n"
      "loop_gain_product = {}\nmargin = {}\n",
      to_string(r.topology), to_string(r.verdict),
      format_number(r.sector.alpha_hat), format_number(r.sector.beta_hat),
      format_number(r.gamma_hat), opt(r.gamma_v_to_i), opt(r.gamma_i_to_v),
      opt(r.loop_gain_product), format_number(r.margin));
  for (const auto& q : r.inequalities) {
    out += fmt::format("inequality.{} = {} < {} : {}\n", q.name,
                       format_number(q.lhs), format_number(q.rhs),
                       q.holds ? "holds" : "fails");
  }
  if (r.branch) out += fmt::format("boost_branch = {}\n", to_string(*r.branch));
  if (r.boost) {
    out += fmt::format(
        "boost_discriminant = {}\nboost_threshold_case_i = {}\n"
        "boost_threshold_case_ii_printed = {}\n"
        "boost_threshold_case_ii_normalized = {}\nboost_case_ii_form = {}\n",
        format_number(r.boost->discriminant),
        format_number(r.boost->threshold_case_i),
        format_number(r.boost->threshold_case_ii_printed),
        format_number(r.boost->threshold_case_ii_normalized),
        to_string(r.boost->case_ii_form));
  }
  out += fmt::format("ratio_rc = {}\nratio_ripple = {}\nassumptions = {}\n",
                     format_number(r.assumptions.ratio_rc),
                     format_number(r.assumptions.ratio_ripple),
                     r.assumptions.pass ? "pass" : "fail");
  return out;
}

std::string describe(const SimVerdict& v, const TransientTrace& trace) {
  long clamped = 0;
  for (const auto& s : trace.states) clamped += s.clamped ? 1 : 0;
  return fmt::format(
      "classification = {}\npeak_deviation = {}\nmid_rms = {}\n"
      "final_rms = {}\ndivergence_cycle = {}\ncycles = {}\n"
      "clamped_cycles = {}\nsector_violations = {}\nnon_monotone_cycles = {}\n",
      to_string(v.classification), format_number(v.peak_deviation),
      format_number(v.mid_rms), format_number(v.final_rms),
      v.divergence_cycle ? std::to_string(*v.divergence_cycle) : "none",
      trace.states.empty() ? 0 : trace.states.size() - 1, clamped,
      trace.sector_violations, trace.non_monotone_cycles);
}

std::string stability_csv_header() {
  return "topology,verdict,alpha_hat,beta_hat,gamma_hat,gamma_v_to_i,"
         "gamma_i_to_v,loop_gain_product,margin\n";
}

std::string stability_csv_row(const StabilityReport& r) {
  return fmt::format("{},{},{},{},{},{},{},{},{}\n", to_string(r.topology),
                     to_string(r.verdict), format_number(r.sector.alpha_hat),
                     format_number(r.sector.beta_hat),
                     format_number(r.gamma_hat), opt(r.gamma_v_to_i),
                     opt(r.gamma_i_to_v), opt(r.loop_gain_product),
                     format_number(r.margin));
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(fmt::format("cannot open '{}' for writing", path));
  out << content;
  if (!out) throw IoError(fmt::format("write to '{}' failed", path));
}

}  // namespace cmcert
