#include "core/criteria.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "core/error.hpp"
#include "core/voltage_gain.hpp"

namespace cmcert {

namespace {

InequalityRecord strict(std::string name, double lhs, double rhs) {
  return {std::move(name), lhs, rhs, lhs < rhs};
}

void finalize(StabilityReport& report) {
  bool all = !report.inequalities.empty();
  double margin = std::numeric_limits<double>::infinity();
  for (const auto& ineq : report.inequalities) {
    all = all && ineq.holds;
    const double scale = std::abs(ineq.rhs) > 0.0 ? std::abs(ineq.rhs) : 1.0;
    margin = std::min(margin, (ineq.rhs - ineq.lhs) / scale);
  }
  report.verdict = all ? Verdict::kCertified : Verdict::kNotCertified;
  report.margin = margin;
}

}  // namespace

std::string_view to_string(Verdict verdict) {
  return verdict == Verdict::kCertified ? "Certified" : "NotCertified";
}

std::string_view to_string(BoostBranch branch) {
  return branch == BoostBranch::kCaseI ? "CaseI" : "CaseII";
}

std::string_view to_string(BoostCaseIiForm form) {
  return form == BoostCaseIiForm::kPrinted ? "printed" : "normalized";
}

SmallGainResult small_gain_check(double gamma_i_to_v, double gamma_v_to_i) {
  if (!(gamma_i_to_v >= 0.0) || !(gamma_v_to_i >= 0.0)) {
    throw InvalidArgument("small_gain_check: gains must be nonnegative");
  }
  const double product = gamma_i_to_v * gamma_v_to_i;
  return {product, product < 1.0};
}

double buck_sector_threshold(const ConverterParams& params) {
  const DerivedConstants d = derived_constants(params);
  const Equilibrium eq = compute_equilibrium(params);
  return (d.tau2 + 0.5 * params.t_fixed) * (d.t_s_min / d.t_s_max) /
         eq.t_s_ss;
}

StabilityReport buck_on_time_criterion(const ConverterParams& params,
                                       const SectorBound& sector,
                                       double gamma_hat,
                                       double assumption_threshold) {
  params.validate();
  if (params.topology != Topology::kBuckConstOn) {
    throw TopologyMismatch("buck_on_time_criterion needs a buck converter");
  }
  sector.validate();
  if (!(gamma_hat >= 0.0)) {
    throw InvalidArgument("gamma_hat must be nonnegative");
  }
  const DerivedConstants d = derived_constants(params);

  StabilityReport report;
  report.topology = params.topology;
  report.sector = sector;
  report.gamma_hat = gamma_hat;
  report.assumptions = validate_class_sigma(params, assumption_threshold);
  report.inequalities.push_back(
      strict("sector_gain", gamma_hat, buck_sector_threshold(params)));
  report.inequalities.push_back(
      strict("rc_time_constant",
             d.t_s_max * (1.0 + params.t_fixed / (2.0 * d.tau2)), d.tau1));

  // The block gains need alpha in (0, 1); when the assumptions break the
  // product is left unset and the verdict rests on the two inequalities.
  report.gamma_v_to_i = current_block_gain_bound(params, gamma_hat);
  try {
    report.gamma_i_to_v = voltage_block_gain_bound(params).gamma_i_to_v;
    report.loop_gain_product =
        small_gain_check(*report.gamma_i_to_v, *report.gamma_v_to_i).product;
  } catch (const AssumptionViolated&) {
  }
  finalize(report);
  return report;
}

double max_stable_sector(const ConverterParams& params, double tol,
                         const GainSolverOptions& options) {
  if (!(tol > 0.0)) throw InvalidArgument("max_stable_sector: tol must be > 0");
  const LftSystem block = unitless_current_block();
  auto certified = [&](double a) {
    double gamma = 0.0;
    try {
      gamma = certify_gain(block, SectorBound::symmetric(a), options).gamma_hat;
    } catch (const Infeasible&) {
      return false;
    }
    return buck_on_time_criterion(params, SectorBound::symmetric(a), gamma)
               .verdict == Verdict::kCertified;
  };
  if (!certified(0.0)) return 0.0;
  // alpha_hat > -1 is needed for well-posedness.
  double lo = 0.0;
  double hi = 1.0 - 1e-9;
  if (certified(hi)) return hi;
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    (certified(mid) ? lo : hi) = mid;
  }
  return lo;
}

double boost_discriminant(const ConverterParams& p) {
  const Equilibrium eq = compute_equilibrium(p);
  const DerivedConstants d = derived_constants(p);
  const double t_off = p.t_fixed;
  const double rc = d.tau1;
  const double k = p.v_out * p.inductance / (p.v_in * p.load);
  const double bracket = 1.0 - eq.t_s_ss / rc - d.t_s_max / rc -
                         t_off * t_off / (2.0 * p.inductance * p.capacitance);
  return ((1.0 - p.lambda) * t_off + k) * bracket + (p.lambda * t_off - k);
}

StabilityReport boost_off_time_criterion(const ConverterParams& params,
                                         const SectorBound& sector,
                                         double gamma_hat,
                                         BoostCaseIiForm case_ii_form,
                                         double assumption_threshold) {
  params.validate();
  if (params.topology != Topology::kBoostConstOff) {
    throw TopologyMismatch("boost_off_time_criterion needs a boost converter");
  }
  sector.validate();
  if (!(gamma_hat >= 0.0)) {
    throw InvalidArgument("gamma_hat must be nonnegative");
  }
  const Equilibrium eq = compute_equilibrium(params);
  const DerivedConstants d = derived_constants(params);
  const double t_off = params.t_fixed;
  const double ts_ss = eq.t_s_ss;

  BoostDetails det;
  det.case_ii_form = case_ii_form;
  det.discriminant = boost_discriminant(params);
  det.threshold_case_i =
      0.5 + d.tau2 * (ts_ss + d.t_s_min) / (ts_ss * t_off);
  const double t_off_sq = t_off * t_off;
  const double ratio = (2.0 * d.tau2 * (d.t_s_min + ts_ss) + t_off_sq) /
                       (2.0 * d.tau2 * (d.t_s_max + ts_ss) + t_off_sq);
  const double numer =
      2.0 * d.tau1 - ts_ss - d.t_s_max - t_off_sq / (2.0 * d.tau2);
  const double denom = 2.0 * params.v_out / params.v_in +
                       (1.0 - 2.0 * params.lambda) * t_off / d.tau2;
  det.threshold_case_ii_printed = ratio * numer / denom * t_off;
  det.threshold_case_ii_normalized = det.threshold_case_ii_printed / t_off_sq;

  StabilityReport report;
  report.topology = params.topology;
  report.sector = sector;
  report.gamma_hat = gamma_hat;
  report.assumptions = validate_class_sigma(params, assumption_threshold);
  if (det.discriminant >= 0.0) {
    report.branch = BoostBranch::kCaseI;
    report.inequalities.push_back(
        strict("sector_gain_case_i", gamma_hat, det.threshold_case_i));
  } else {
    report.branch = BoostBranch::kCaseII;
    const double rhs = case_ii_form == BoostCaseIiForm::kPrinted
                           ? det.threshold_case_ii_printed
                           : det.threshold_case_ii_normalized;
    report.inequalities.push_back(
        strict(fmt::format("sector_gain_case_ii_{}", to_string(case_ii_form)),
               gamma_hat, rhs));
  }
  report.boost = det;
  finalize(report);
  return report;
}

}  // namespace cmcert
