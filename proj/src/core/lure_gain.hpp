#pragma once

#include <vector>

#include <Eigen/Dense>

#include "core/converter_model.hpp"

namespace cmcert {

/// Interference sector [alpha_hat, beta_hat] of the nonlinearity Delta:
/// alpha_hat z^2 <= z Delta(z) <= beta_hat z^2.
struct SectorBound {
  double alpha_hat = 0.0;
  double beta_hat = 0.0;

  /// alpha_hat <= 0 <= beta_hat and alpha_hat > -1.
  void validate() const;
  static SectorBound symmetric(double a) { return {-a, a}; }
};

/// Upper linear-fractional interconnection F_u(L, Delta):
///   x[n+1] = A x + B1 h + B2 r
///   p[n]   = C1 x + D11 h + D12 r
///   e[n]   = C2 x + D21 h + D22 r
///   h[n]   = Delta(p[n])
struct LftSystem {
  Eigen::MatrixXd a, b1, b2;
  Eigen::MatrixXd c1, d11, d12;
  Eigen::MatrixXd c2, d21, d22;

  Eigen::Index states() const { return a.rows(); }
  Eigen::Index nonlinear_channels() const { return b1.cols(); }
  Eigen::Index exogenous_inputs() const { return b2.cols(); }

  /// Throws InvalidArgument on inconsistent block sizes.
  void check_dimensions() const;

  /// Scalar Delta only: h = s (C1 x + D11 h + D12 r) is uniquely solvable
  /// for every slope s in the sector.
  bool is_well_posed(const SectorBound& sector) const;
};

struct GainCertificate {
  double gamma_hat = 0.0;
  double gamma_sq = 0.0;  // value at which the witnesses were verified
  Eigen::MatrixXd p;
  double lambda_mult = 0.0;
  double bisection_tolerance = 0.0;
  double margin_scale = 0.0;
};

struct GainSolverOptions {
  double tolerance = 1e-4;         // relative, on gamma_hat
  double gamma_sq_ceiling = 1e6;
  double margin_scale = 1e-10;     // strictness: margin_scale (1 + |M|_max)
};

struct GainSurface {
  std::vector<double> alpha_grid;
  std::vector<double> beta_grid;
  // gamma[i * beta_grid.size() + j] belongs to (alpha_grid[i], beta_grid[j]);
  // +inf marks a cell the LMI cannot certify.
  std::vector<double> gamma;

  double at(std::size_t i, std::size_t j) const {
    return gamma[i * beta_grid.size() + j];
  }
};

/// The current block in unitless LFT form: A=0, B1=1, B2=0, C1=1, D11=-1,
/// D12=1, C2=1, D21=0, D22=0.
LftSystem unitless_current_block();

/// The dissipativity matrix over [x; h; r]:
///   [A B1 B2]' P [A B1 B2] - diag(P, 0, gamma_sq I)
///   + lambda [C1 D11 D12; 0 I 0]' [-ab (a+b)/2; (a+b)/2 -1] [...]
///   + [C2 D21 D22]' [C2 D21 D22]
/// built from the general three-block sum for any consistent dimensions.
Eigen::MatrixXd build_theorem1_matrix(const LftSystem& sys,
                                      const SectorBound& sector,
                                      const Eigen::MatrixXd& p,
                                      double lambda_mult, double gamma_sq);

/// margin_scale * (1 + max |M_ij|).
double strictness_margin(const Eigen::MatrixXd& m, double margin_scale);

/// True iff the largest eigenvalue of `m` is below -margin. Throws
/// InvalidArgument for a non-square or non-symmetric input.
bool is_negative_definite(const Eigen::MatrixXd& m, double margin);

/// Smallest gamma_hat (bisection on gamma_hat^2) for which P > 0 and
/// lambda >= 0 make the dissipativity matrix negative definite. Supports a
/// scalar state, a scalar Delta channel and a scalar exogenous input.
/// Throws Infeasible if no gamma_hat^2 up to the ceiling is certified.
GainCertificate certify_gain(const LftSystem& sys, const SectorBound& sector,
                             const GainSolverOptions& options = {});

/// Peak frequency-domain gain of the unitless block closed with a constant
/// slope, maximised over the two sector endpoints. +inf when a closed loop
/// pole leaves the unit disk.
double lti_lower_bound_oracle(const SectorBound& sector);

/// certify_gain on every (alpha, beta) grid cell; infeasible cells are +inf.
GainSurface gain_surface(const LftSystem& sys,
                         const std::vector<double>& alpha_grid,
                         const std::vector<double>& beta_grid,
                         const GainSolverOptions& options = {});

/// Physical current-block gain (T_s^ss / L) gamma_hat, in A/V.
double current_block_gain_bound(const ConverterParams& params,
                                double gamma_hat);

}  // namespace cmcert
