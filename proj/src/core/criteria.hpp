#pragma once

#include <optional>
#include <string>
#include <vector>

#include "core/converter_model.hpp"
#include "core/lure_gain.hpp"

namespace cmcert {

enum class Verdict { kCertified, kNotCertified };
enum class BoostBranch { kCaseI, kCaseII };
enum class BoostCaseIiForm { kPrinted, kNormalized };

std::string_view to_string(Verdict verdict);
std::string_view to_string(BoostBranch branch);
std::string_view to_string(BoostCaseIiForm form);

/// One strict inequality lhs < rhs.
struct InequalityRecord {
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
  bool holds = false;
};

struct BoostDetails {
  double discriminant = 0.0;     // seconds
  double threshold_case_i = 0.0;
  double threshold_case_ii_printed = 0.0;     // s^2 as printed
  double threshold_case_ii_normalized = 0.0;  // printed / T_off^2
  BoostCaseIiForm case_ii_form = BoostCaseIiForm::kPrinted;
};

struct StabilityReport {
  Topology topology = Topology::kBuckConstOn;
  Verdict verdict = Verdict::kNotCertified;
  SectorBound sector;
  double gamma_hat = 0.0;
  std::optional<double> gamma_v_to_i;  // A/V
  std::optional<double> gamma_i_to_v;  // ohms
  std::optional<double> loop_gain_product;
  std::vector<InequalityRecord> inequalities;
  std::optional<BoostBranch> branch;
  std::optional<BoostDetails> boost;
  AssumptionReport assumptions;
  double margin = 0.0;  // min over inequalities of (rhs - lhs) / |rhs|
};

struct SmallGainResult {
  double product = 0.0;
  bool holds = false;
};

SmallGainResult small_gain_check(double gamma_i_to_v, double gamma_v_to_i);

/// Right-hand side of g < (tau2 + T_on/2) (T_s^min / T_s^max) / T_s^ss.
double buck_sector_threshold(const ConverterParams& params);

/// Checks g < buck_sector_threshold and T_s^max (1 + T_on / 2 tau2) < tau1.
StabilityReport buck_on_time_criterion(
    const ConverterParams& params, const SectorBound& sector,
    double gamma_hat,
    double assumption_threshold = kDefaultAssumptionThreshold);

/// Largest a (within `tol`) such that the symmetric sector [-a, a] is
/// certified by buck_on_time_criterion. Returns 0 if a = 0 already fails.
double max_stable_sector(const ConverterParams& params, double tol,
                         const GainSolverOptions& options = {});

/// Discriminant selecting case (i) (>= 0) or case (ii) (< 0).
double boost_discriminant(const ConverterParams& params);

StabilityReport boost_off_time_criterion(
    const ConverterParams& params, const SectorBound& sector,
    double gamma_hat, BoostCaseIiForm case_ii_form = BoostCaseIiForm::kPrinted,
    double assumption_threshold = kDefaultAssumptionThreshold);

}  // namespace cmcert
