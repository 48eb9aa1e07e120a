#include "core/lure_gain.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

#include <fmt/format.h>

#include "core/error.hpp"

namespace cmcert {

using Eigen::Index;
using Eigen::Matrix3d;
using Eigen::MatrixXd;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_shape(const MatrixXd& m, Index rows, Index cols,
                   const char* name) {
  if (m.rows() != rows || m.cols() != cols) {
    throw InvalidArgument(fmt::format("{} must be {}x{} (got {}x{})", name,
                                      rows, cols, m.rows(), m.cols()));
  }
}

MatrixXd scalar(double v) { return MatrixXd::Constant(1, 1, v); }

// The dissipativity matrix of a scalar LFT is affine in (P, lambda, gamma^2):
// F = base + P * lyap + lambda * sector - gamma^2 e3 e3'.
struct ScalarLmi {
  Matrix3d base;
  Matrix3d lyap;
  Matrix3d sector;

  Matrix3d at(double p, double lambda_mult, double gamma_sq) const {
    Matrix3d f = base + p * lyap + lambda_mult * sector;
    f(2, 2) -= gamma_sq;
    return f;
  }
};

ScalarLmi make_scalar_lmi(const LftSystem& sys, const SectorBound& sector) {
  const MatrixXd one = scalar(1.0);
  ScalarLmi lmi;
  // Read the three blocks off the general construction so the search and
  // the final re-verification share one definition.
  const MatrixXd f0 = build_theorem1_matrix(sys, sector, one * 0.0, 0.0, 0.0);
  const MatrixXd fp = build_theorem1_matrix(sys, sector, one, 0.0, 0.0);
  const MatrixXd fl = build_theorem1_matrix(sys, sector, one * 0.0, 1.0, 0.0);
  lmi.base = f0;
  lmi.lyap = fp - f0;
  lmi.sector = fl - f0;
  return lmi;
}

// Convex merit: feasible iff negative.
double merit(const ScalarLmi& lmi, double p, double lambda_mult,
             double gamma_sq, double margin_scale) {
  const Matrix3d f = lmi.at(p, lambda_mult, gamma_sq);
  // The closed-form 3x3 path loses ~sqrt(eps) relative accuracy on
  // clustered eigenvalues, which lets large-lambda points look feasible.
  Eigen::SelfAdjointEigenSolver<Matrix3d> es(f, Eigen::EigenvaluesOnly);
  return es.eigenvalues().maxCoeff() +
         margin_scale * (1.0 + f.cwiseAbs().maxCoeff());
}

struct Witness {
  double p;
  double lambda_mult;
};

template <typename F>
double golden_section_min(F&& f, double lo, double hi, double x_tol,
                          double* arg_min) {
  constexpr double kInvPhi = 0.6180339887498949;
  double a = lo, b = hi;
  double c = b - kInvPhi * (b - a);
  double d = a + kInvPhi * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > x_tol) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - kInvPhi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kInvPhi * (b - a);
      fd = f(d);
    }
  }
  if (fc <= fd) {
    *arg_min = c;
    return fc;
  }
  *arg_min = d;
  return fd;
}

constexpr double kLogLo = -8.0;
constexpr double kLogHi = 8.0;
constexpr double kLogTol = 1e-9;

std::optional<Witness> find_witness(const ScalarLmi& lmi, double gamma_sq,
                                    double margin_scale) {
  std::optional<Witness> found;
  // Once a strictly feasible point turns up the remaining probes are
  // short-circuited.
  auto eval = [&](double p, double lam) {
    if (found) return -1.0;
    const double m = merit(lmi, p, lam, gamma_sq, margin_scale);
    if (m < 0.0) found = Witness{p, lam};
    return m;
  };
  // Coarse logarithmic sweep first; most probes far from the optimum
  // resolve here.
  for (double lp = -6.0; lp <= 6.0 && !found; lp += 0.5) {
    const double p = std::pow(10.0, lp);
    eval(p, 0.0);
    for (double ll = -6.0; ll <= 6.0 && !found; ll += 0.5) {
      eval(p, std::pow(10.0, ll));
    }
  }
  if (found) return found;
  // Nested golden-section search in log coordinates. The merit is convex in
  // (P, lambda), so its partial minimum over lambda is convex in P and both
  // stay unimodal under the log reparametrisation.
  auto inner = [&](double log_p) {
    if (found) return -1.0;
    const double p = std::pow(10.0, log_p);
    double arg = 0.0;
    const double interior = golden_section_min(
        [&](double ll) { return eval(p, std::pow(10.0, ll)); }, kLogLo, kLogHi,
        kLogTol, &arg);
    return std::min(interior, eval(p, 0.0));
  };
  double arg = 0.0;
  golden_section_min(inner, kLogLo, kLogHi, kLogTol, &arg);
  return found;
}

bool verify_witness(const LftSystem& sys, const SectorBound& sector,
                    const Witness& w, double gamma_sq, double margin_scale) {
  if (!(w.p > 0.0) || !(w.lambda_mult >= 0.0)) return false;
  const MatrixXd m =
      build_theorem1_matrix(sys, sector, scalar(w.p), w.lambda_mult, gamma_sq);
  return is_negative_definite(m, strictness_margin(m, margin_scale));
}

}  // namespace

void SectorBound::validate() const {
  if (!std::isfinite(alpha_hat) || !std::isfinite(beta_hat)) {
    throw InvalidArgument("sector bounds must be finite");
  }
  if (!(alpha_hat <= 0.0 && 0.0 <= beta_hat)) {
    throw InvalidArgument(fmt::format(
        "sector must contain zero: need alpha_hat <= 0 <= beta_hat (got [{}, "
        "{}])",
        alpha_hat, beta_hat));
  }
  if (!(alpha_hat > -1.0)) {
    throw InvalidArgument(fmt::format(
        "alpha_hat must exceed -1 for a well-posed loop (got {})", alpha_hat));
  }
}

void LftSystem::check_dimensions() const {
  const Index n = a.rows();
  const Index m = b1.cols();
  const Index p = b2.cols();
  const Index q = c2.rows();
  require_shape(a, n, n, "A");
  require_shape(b1, n, m, "B1");
  require_shape(b2, n, p, "B2");
  require_shape(c1, m, n, "C1");
  require_shape(d11, m, m, "D11");
  require_shape(d12, m, p, "D12");
  require_shape(c2, q, n, "C2");
  require_shape(d21, q, m, "D21");
  require_shape(d22, q, p, "D22");
}

bool LftSystem::is_well_posed(const SectorBound& sector) const {
  check_dimensions();
  if (nonlinear_channels() != 1) {
    throw InvalidArgument("well-posedness check supports a scalar Delta only");
  }
  // 1 - s D11 is affine in s, so checking both endpoints covers the sector.
  const double d = d11(0, 0);
  const double lo = 1.0 - sector.alpha_hat * d;
  const double hi = 1.0 - sector.beta_hat * d;
  return (lo > 0.0 && hi > 0.0) || (lo < 0.0 && hi < 0.0);
}

LftSystem unitless_current_block() {
  LftSystem s;
  s.a = scalar(0.0);
  s.b1 = scalar(1.0);
  s.b2 = scalar(0.0);
  s.c1 = scalar(1.0);
  s.d11 = scalar(-1.0);
  s.d12 = scalar(1.0);
  s.c2 = scalar(1.0);
  s.d21 = scalar(0.0);
  s.d22 = scalar(0.0);
  return s;
}

MatrixXd build_theorem1_matrix(const LftSystem& sys, const SectorBound& sector,
                               const MatrixXd& p, double lambda_mult,
                               double gamma_sq) {
  sys.check_dimensions();
  const Index n = sys.states();
  const Index m = sys.nonlinear_channels();
  const Index r = sys.exogenous_inputs();
  const Index dim = n + m + r;
  require_shape(p, n, n, "P");

  MatrixXd abb(n, dim);
  abb << sys.a, sys.b1, sys.b2;
  MatrixXd lyap = abb.transpose() * p * abb;
  lyap.topLeftCorner(n, n) -= p;
  lyap.bottomRightCorner(r, r) -=
      gamma_sq * MatrixXd::Identity(r, r);

  MatrixXd g = MatrixXd::Zero(2 * m, dim);
  g.topRows(m) << sys.c1, sys.d11, sys.d12;
  g.block(m, n, m, m) = MatrixXd::Identity(m, m);
  const double ab = sector.alpha_hat * sector.beta_hat;
  const double mid = 0.5 * (sector.alpha_hat + sector.beta_hat);
  MatrixXd middle(2 * m, 2 * m);
  const MatrixXd eye = MatrixXd::Identity(m, m);
  middle << -ab * eye, mid * eye, mid * eye, -eye;
  const MatrixXd sector_block = g.transpose() * middle * g;

  MatrixXd h(sys.c2.rows(), dim);
  h << sys.c2, sys.d21, sys.d22;

  MatrixXd out = lyap + lambda_mult * sector_block + h.transpose() * h;
  // Symmetrise away round-off from the products.
  return 0.5 * (out + out.transpose());
}

double strictness_margin(const MatrixXd& m, double margin_scale) {
  return margin_scale * (1.0 + m.cwiseAbs().maxCoeff());
}

bool is_negative_definite(const MatrixXd& m, double margin) {
  if (m.rows() != m.cols() || m.rows() == 0) {
    throw InvalidArgument("is_negative_definite: matrix must be square");
  }
  const double scale = 1.0 + m.cwiseAbs().maxCoeff();
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw InvalidArgument("is_negative_definite: matrix is not symmetric");
  }
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(m, Eigen::EigenvaluesOnly);
  return es.eigenvalues().maxCoeff() < -margin;
}

GainCertificate certify_gain(const LftSystem& sys, const SectorBound& sector,
                             const GainSolverOptions& options) {
  sys.check_dimensions();
  sector.validate();
  if (sys.states() != 1 || sys.nonlinear_channels() != 1 ||
      sys.exogenous_inputs() != 1) {
    throw InvalidArgument(
        "certify_gain supports scalar state, Delta channel and input only");
  }
  if (!(options.tolerance > 0.0) || !(options.gamma_sq_ceiling > 0.0) ||
      !(options.margin_scale >= 0.0)) {
    throw InvalidArgument("certify_gain: invalid solver options");
  }
  if (!sys.is_well_posed(sector)) {
    throw InvalidArgument(fmt::format(
        "LFT loop is not well-posed on sector [{}, {}]", sector.alpha_hat,
        sector.beta_hat));
  }

  const ScalarLmi lmi = make_scalar_lmi(sys, sector);
  auto feasible = [&](double gamma_sq) -> std::optional<Witness> {
    auto w = find_witness(lmi, gamma_sq, options.margin_scale);
    if (w && verify_witness(sys, sector, *w, gamma_sq, options.margin_scale)) {
      return w;
    }
    return std::nullopt;
  };

  double lo = 0.0;
  double hi = options.gamma_sq_ceiling;
  auto best = feasible(hi);
  if (!best) {
    throw Infeasible(fmt::format(
        "no certificate with gamma_hat^2 <= {} for sector [{}, {}]", hi,
        sector.alpha_hat, sector.beta_hat));
  }
  while (std::sqrt(hi) - std::sqrt(lo) >
         options.tolerance * std::max(1.0, std::sqrt(hi))) {
    const double mid = 0.5 * (lo + hi);
    if (auto w = feasible(mid)) {
      hi = mid;
      best = w;
    } else {
      lo = mid;
    }
  }

  GainCertificate cert;
  cert.gamma_sq = hi;
  cert.gamma_hat = std::sqrt(hi);
  cert.p = scalar(best->p);
  cert.lambda_mult = best->lambda_mult;
  cert.bisection_tolerance = options.tolerance;
  cert.margin_scale = options.margin_scale;
  return cert;
}

double lti_lower_bound_oracle(const SectorBound& sector) {
  sector.validate();
  double worst = 0.0;
  for (double s : {sector.alpha_hat, sector.beta_hat}) {
    // Eliminating h from h = s (x - h + u) gives x[n+1] = c (x[n] + u[n]).
    const double c = std::abs(s / (1.0 + s));
    if (c >= 1.0) return kInf;
    worst = std::max(worst, c / (1.0 - c));
  }
  return worst;
}

GainSurface gain_surface(const LftSystem& sys,
                         const std::vector<double>& alpha_grid,
                         const std::vector<double>& beta_grid,
                         const GainSolverOptions& options) {
  if (!std::is_sorted(alpha_grid.begin(), alpha_grid.end()) ||
      !std::is_sorted(beta_grid.begin(), beta_grid.end())) {
    throw InvalidArgument("gain_surface: grids must be sorted");
  }
  for (double a : alpha_grid) {
    for (double b : beta_grid) SectorBound{a, b}.validate();
  }
  GainSurface surface;
  surface.alpha_grid = alpha_grid;
  surface.beta_grid = beta_grid;
  surface.gamma.reserve(alpha_grid.size() * beta_grid.size());
  for (double a : alpha_grid) {
    for (double b : beta_grid) {
      try {
        surface.gamma.push_back(certify_gain(sys, {a, b}, options).gamma_hat);
      } catch (const Infeasible&) {
        surface.gamma.push_back(kInf);
      }
    }
  }
  return surface;
}

double current_block_gain_bound(const ConverterParams& params,
                                double gamma_hat) {
  if (!(gamma_hat >= 0.0)) {
    throw InvalidArgument("gamma_hat must be nonnegative");
  }
  return compute_equilibrium(params).t_s_ss / params.inductance * gamma_hat;
}

}  // namespace cmcert
