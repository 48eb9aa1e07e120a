#include <doctest.h>

#include <random>

#include "core/error.hpp"
#include "core/simulator.hpp"
#include "core/tables.hpp"
#include "core/voltage_gain.hpp"
#include "helpers.hpp"

using namespace cmcert;
using doctest::Approx;

namespace {

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
      voltage_block_gain_bound(p);
      return p;
    } catch (const AssumptionViolated&) {
    }
  }
}

}  // namespace

TEST_SUITE("voltage_gain") {

TEST_CASE("coefficients at the steady-state off-time") {
  const ConverterParams p = reference_buck(0.4, false);
  const LtvCoefficients c = ltv_coefficients(p, compute_equilibrium(p).t_var_ss);
  CHECK(c.alpha_n == Approx(0.985227).epsilon(1e-6));
  CHECK(c.beta_n == Approx(2.727e-3).epsilon(1e-3));
  CHECK(c.gamma_n == Approx(2.727e-3).epsilon(1e-3));
}

TEST_CASE("coefficient bounds and block gain on [300, 600] ns") {
  const ConverterParams p = test::buck_with_bounds(0.4, 300e-9, 600e-9);
  const CoefficientBounds b = coefficient_bounds(p);
  CHECK(b.alpha_max == Approx(0.989167).epsilon(1e-6));
  CHECK(b.beta_max == Approx(3.5e-3).epsilon(1e-9));
  CHECK(b.gamma_max == Approx(3.5e-3).epsilon(1e-9));
  const VoltageGainBound v = voltage_block_gain_bound(p);
  CHECK(v.gamma_1 == Approx(0.6427).epsilon(1e-3));
  CHECK(v.gamma_i_to_v == Approx(0.64615).epsilon(1e-4));
  CHECK(v.closed_form == Approx(0.4 / (1 + 100.0 / 1200.0) * 700.0 / 400.0).epsilon(1e-12));
}

TEST_CASE("errors") {
  const ConverterParams p = test::buck_with_bounds(0.4, 300e-9, 600e-9);
  CHECK_THROWS_AS(ltv_coefficients(p, 700e-9), InvalidArgument);
  CHECK_NOTHROW(ltv_coefficients(p, 600e-9 * (1 + 1e-14)));
  ConverterParams boost = p;
  boost.topology = Topology::kBoostConstOff;
  boost.v_out = 20;
  CHECK_THROWS_AS(voltage_block_gain_bound(boost), TopologyMismatch);
  ConverterParams fast = p;
  fast.capacitance = 1e-9;  // alpha goes negative
  CHECK_THROWS_AS(voltage_block_gain_bound(fast), AssumptionViolated);
}

TEST_CASE("property: gain identity on random parameter sets") {
  std::mt19937_64 rng(2024);
  for (int k = 0; k < 300; ++k) {
    const ConverterParams p = random_buck(rng);
    const VoltageGainBound v = voltage_block_gain_bound(p);
    const CoefficientBounds& b = v.bounds;
    CHECK(test::rel_close((b.beta_max + b.gamma_max) / (1 - b.alpha_max), v.closed_form, 1e-9));
  }
}

TEST_CASE("property: lambda does not change the voltage-block gain") {
  ConverterParams p = test::buck_with_bounds(0.4, 300e-9, 600e-9);
  const double ref = voltage_block_gain_bound(p).gamma_i_to_v;
  for (double lambda : {0.0, 0.25, 1.0}) {
    p.lambda = lambda;
    CHECK(voltage_block_gain_bound(p).gamma_i_to_v == Approx(ref).epsilon(1e-12));
  }
}

TEST_CASE("property: empirical gain stays below the bound") {
  std::mt19937_64 rng(99);
  for (int k = 0; k < 10; ++k) {
    const ConverterParams p = random_buck(rng);
    EnsembleSpec spec;
    spec.trials = 10;
    spec.length = 3000;
    for (auto input : {EnsembleInput::kUniform, EnsembleInput::kResonantSinusoid}) {
      spec.input = input;
      const GainEstimate e = estimate_l2_gain(GainBlock::kVoltageLtv, p, spec, 17);
      CHECK(e.max_gain <= voltage_block_gain_bound(p).gamma_i_to_v * (1 + 1e-9));
    }
  }
}

}
