#include <doctest.h>

#include <random>

#include "core/converter_model.hpp"
#include "core/error.hpp"
#include "core/tables.hpp"
#include "helpers.hpp"

using namespace cmcert;
using doctest::Approx;

TEST_SUITE("converter_model") {

TEST_CASE("reference buck equilibrium") {
  const ConverterParams p = reference_buck(0.4, true);
  const Equilibrium eq = compute_equilibrium(p);
  CHECK(eq.t_var_ss == Approx(445.4545e-9).epsilon(1e-6));
  CHECK(eq.t_s_ss == Approx(545.4545e-9).epsilon(1e-6));
  REQUIRE(eq.i_valley);
  CHECK(*eq.i_valley == Approx(3.458333).epsilon(1e-6));

  const Equilibrium eq2 = compute_equilibrium(reference_buck(0.05, true));
  CHECK(*eq2.i_valley == Approx(41.958333).epsilon(1e-6));
  CHECK(eq2.t_var_ss == Approx(eq.t_var_ss));
}

TEST_CASE("derived constants") {
  const DerivedConstants d = derived_constants(reference_buck(0.4, true));
  CHECK(d.tau1 == Approx(40e-6));
  CHECK(d.tau2 == Approx(600e-9));
  CHECK(d.t_s_min == Approx(d.t_s_max));
}

TEST_CASE("timing bounds") {
  const ConverterParams p = reference_buck(0.4, false);
  const double ss = compute_equilibrium(p).t_var_ss;
  CHECK(p.t_var_min == Approx(ss / 2));
  CHECK(p.t_var_max == Approx(2 * ss));
  const TimingBounds d = degenerate_timing_bounds(p);
  CHECK(d.t_var_min == d.t_var_max);
}

TEST_CASE("class sigma assumptions") {
  const AssumptionReport a = validate_class_sigma(reference_buck(0.4, true));
  CHECK(a.ratio_rc == Approx(0.013636).epsilon(1e-4));
  CHECK(a.ratio_ripple == Approx(1.13636e-3).epsilon(1e-4));
  CHECK(a.pass);

  // Small RC: the first ratio breaks, the report says so without throwing.
  ConverterParams p = reference_buck(0.4, true);
  p.capacitance = 1e-9;
  const AssumptionReport bad = validate_class_sigma(p);
  CHECK_FALSE(bad.pass);
  CHECK_THROWS_AS(validate_class_sigma(p, 1.5), InvalidArgument);
  CHECK_THROWS_AS(validate_class_sigma(p, 0.0), InvalidArgument);
}

TEST_CASE("invalid parameters") {
  ConverterParams p = reference_buck(0.4, true);
  SUBCASE("lambda out of range") {
    p.lambda = 1.5;
    CHECK_THROWS_AS(p.validate(), InvalidArgument);
  }
  SUBCASE("buck needs v_out < v_in") {
    p.v_out = 13.0;
    CHECK_THROWS_AS(compute_equilibrium(p), InvalidArgument);
  }
  SUBCASE("non-positive element") {
    p.inductance = 0.0;
    CHECK_THROWS_AS(p.validate(), InvalidArgument);
  }
  SUBCASE("inverted bounds") {
    p.t_var_min = 2 * p.t_var_max;
    CHECK_THROWS_AS(p.validate(), InvalidArgument);
  }
  SUBCASE("nan") {
    p.load = std::nan("");
    CHECK_THROWS_AS(p.validate(), InvalidArgument);
  }
}

TEST_CASE("boost equilibrium") {
  ConverterParams p;
  p.topology = Topology::kBoostConstOff;
  p.v_in = 5;
  p.v_out = 12;
  p.inductance = 480e-9;
  p.capacitance = 100e-6;
  p.load = 2;
  p.t_fixed = 100e-9;
  const Equilibrium eq = compute_equilibrium(p);
  CHECK_FALSE(eq.i_valley);
  CHECK(eq.t_var_ss == Approx(140e-9));
  CHECK(eq.t_s_ss == Approx(240e-9));
  p.v_out = 4;
  CHECK_THROWS_AS(compute_equilibrium(p), InvalidArgument);
}

TEST_CASE("property: buck steady state satisfies volt-second balance") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int k = 0; k < 200; ++k) {
    ConverterParams p = reference_buck(0.4, true);
    p.v_in = 5 + 20 * u(rng);
    p.v_out = p.v_in * (0.05 + 0.9 * u(rng));
    p.t_fixed = 50e-9 + 500e-9 * u(rng);
    const Equilibrium eq = compute_equilibrium(p);
    const double rise = (p.v_in - p.v_out) * p.t_fixed;
    const double fall = p.v_out * eq.t_var_ss;
    CHECK(test::rel_close(rise, fall, 1e-12));
    // Mean inductor current equals the load current.
    const double mean = *eq.i_valley +
                        0.5 * (p.v_in - p.v_out) / p.inductance * p.t_fixed;
    CHECK(test::rel_close(mean, p.v_out / p.load, 1e-12));
  }
}

TEST_CASE("property: time scaling leaves assumption ratios unchanged") {
  const ConverterParams p = reference_buck(0.4, false);
  for (double k : {0.1, 3.0, 17.0}) {
    ConverterParams q = p;
    q.inductance *= k;
    q.capacitance *= k;
    q.t_fixed *= k;
    q.t_var_min *= k;
    q.t_var_max *= k;
    const AssumptionReport a = validate_class_sigma(p);
    const AssumptionReport b = validate_class_sigma(q);
    CHECK(b.ratio_rc == Approx(a.ratio_rc).epsilon(1e-12));
    CHECK(b.ratio_ripple == Approx(a.ratio_ripple).epsilon(1e-12));
  }
}

}
