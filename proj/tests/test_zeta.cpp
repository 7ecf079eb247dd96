#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>

#include "torsion/random_gen.hpp"
#include "torsion/selfcheck.hpp"
#include "torsion/zeta.hpp"

using namespace torsion;

namespace {

constexpr double kPi = 3.14159265358979323846;

ZetaOrbit zorbit(double holonomy_value, int index, int twist = 1,
                 double length = 1.0) {
  ZetaOrbit o;
  o.length = length;
  o.index = index;
  o.twist = twist;
  o.holonomy = Matrix::Identity(1, 1) * Scalar(holonomy_value, 0.0);
  return o;
}

ClosedOrbitDatum sys_orbit(std::string id, int index, double holonomy_value,
                           int twist = 1) {
  ClosedOrbitDatum o;
  o.id = std::move(id);
  o.index = index;
  o.period = 1.0;
  o.twist = twist;
  o.holonomy = Matrix::Identity(1, 1) * Scalar(holonomy_value, 0.0);
  return o;
}

}  // namespace

TEST_CASE("spec extraction keeps orbits and folds orientation") {
  FixedPointDatum p;
  p.id = "p";
  p.index = 0;
  p.gram = GramMetric::identity(1);
  ClosedOrbitDatum g = sys_orbit("g", 1, 2.0);
  g.period = 3.0;
  g.reverse_orientation = true;

  const MorseSmaleSystem sys(1, {p, g}, std::nullopt, true);
  const ZetaSpec spec = zeta_spec_of(sys);
  CHECK(spec.rank == 1);
  REQUIRE(spec.orbits.size() == 1);
  CHECK(spec.orbits[0].length == doctest::Approx(3.0));
  CHECK(spec.orbits[0].index == 1);
  CHECK(spec.orbits[0].twist == 1);
  // Reversal inverts the transport before it reaches the product.
  CHECK(spec.orbits[0].holonomy(0, 0).real() == doctest::Approx(0.5));
}

TEST_CASE("single-factor product values") {
  const ZetaSpec even{1, {zorbit(2.0, 0)}};

  // R(0) = 1 - 1/2 = 1/2 away from the zero set.
  const ZetaValue v0 = ruelle_eval(even, Scalar(0.0, 0.0));
  CHECK(v0.order == 0);
  CHECK(v0.leading.real() == doctest::Approx(0.5));
  CHECK(v0.leading.imag() == doctest::Approx(0.0));
  CHECK(v0.log_abs_leading == doctest::Approx(-std::log(2.0)));
  CHECK_FALSE(v0.is_zero());
  CHECK_FALSE(v0.is_pole());

  // At s = -log 2 the factor vanishes to first order with derivative
  // l mu^{-1} e^{-s l} = 1.
  const ZetaValue vz = ruelle_eval(even, Scalar(-std::log(2.0), 0.0));
  CHECK(vz.order == 1);
  CHECK(vz.is_zero());
  CHECK(vz.leading.real() == doctest::Approx(1.0));
  CHECK(vz.log_abs_leading == doctest::Approx(0.0));

  // Odd index inverts the factor: value 2 at the origin, pole at -log 2.
  const ZetaSpec odd{1, {zorbit(2.0, 1)}};
  CHECK(ruelle_eval(odd, Scalar(0.0, 0.0)).leading.real() ==
        doctest::Approx(2.0));
  const ZetaValue vp = ruelle_eval(odd, Scalar(-std::log(2.0), 0.0));
  CHECK(vp.order == -1);
  CHECK(vp.is_pole());
  CHECK(vp.leading.real() == doctest::Approx(1.0));

  CHECK_THROWS_AS(
      ruelle_eval(even, Scalar(std::numeric_limits<double>::infinity(), 0.0)),
      InputError);
  CHECK_THROWS_AS(ruelle_eval(ZetaSpec{0, {}}, Scalar(0.0, 0.0)), InputError);
  CHECK_THROWS_AS(
      ruelle_eval(ZetaSpec{1, {zorbit(2.0, 0, 1, -1.0)}}, Scalar(0.0, 0.0)),
      InputError);
  CHECK_THROWS_AS(
      ruelle_eval(ZetaSpec{1, {zorbit(0.0, 0)}}, Scalar(0.0, 0.0)),
      InputError);
}

TEST_CASE("signed multiplicities and the guard band") {
  const ZetaSpec even{1, {zorbit(2.0, 0)}};
  CHECK(order_at(even, Scalar(-std::log(2.0), 0.0)) == 1);
  CHECK(order_at(even, Scalar(0.0, 0.0)) == 0);
  CHECK(order_at(even, Scalar(-std::log(2.0), 2.0 * kPi)) == 1);

  const ZetaSpec odd{1, {zorbit(2.0, 1)}};
  CHECK(order_at(odd, Scalar(-std::log(2.0), 0.0)) == -1);

  // Two coincident even factors stack.
  const ZetaSpec doubled{1, {zorbit(2.0, 0), zorbit(2.0, 2)}};
  CHECK(order_at(doubled, Scalar(-std::log(2.0), 0.0)) == 2);

  // A factor of modulus ~5e-9 sits inside [tol, 10 tol) for tol = 1e-9 and
  // is rejected as ill-conditioned; the default tol = 1e-8 absorbs it.
  const ZetaSpec close{1, {zorbit(1.0 + 5e-9, 0)}};
  CHECK_THROWS_AS(order_at(close, Scalar(0.0, 0.0), 1e-9), NumericalError);
  CHECK(order_at(close, Scalar(0.0, 0.0)) == 1);
}

TEST_CASE("zero and pole lattices") {
  // mu = 2: vertical lattice s = -log 2 - 2 pi i k.
  const ZetaSpec even{1, {zorbit(2.0, 0)}};
  const auto pts = zeros_poles_in_rect(even, -1.0, 0.0, -7.0, 7.0);
  REQUIRE(pts.size() == 3);
  for (const auto& p : pts) {
    CHECK(p.s.real() == doctest::Approx(-std::log(2.0)));
    CHECK(p.order == 1);
  }
  CHECK(pts[0].s.imag() == doctest::Approx(-2.0 * kPi));
  CHECK(pts[1].s.imag() == doctest::Approx(0.0));
  CHECK(pts[2].s.imag() == doctest::Approx(2.0 * kPi));

  // mu = 1: lattice on the imaginary axis.
  const ZetaSpec unit{1, {zorbit(1.0, 0)}};
  const auto axis = zeros_poles_in_rect(unit, -0.5, 0.5, -0.5, 0.5);
  REQUIRE(axis.size() == 1);
  CHECK(std::abs(axis[0].s) < 1e-12);
  CHECK(axis[0].order == 1);

  // Twisted unit transport shifts the lattice to odd multiples of pi.
  const ZetaSpec twisted{1, {zorbit(1.0, 0, -1)}};
  const auto shifted = zeros_poles_in_rect(twisted, -0.1, 0.1, 0.0, 4.0);
  REQUIRE(shifted.size() == 1);
  CHECK(shifted[0].s.imag() == doctest::Approx(kPi));

  // Two eigenvalues sort by real part.
  Matrix h = Matrix::Zero(2, 2);
  h(0, 0) = Scalar(2.0, 0.0);
  h(1, 1) = Scalar(3.0, 0.0);
  ZetaOrbit wide;
  wide.holonomy = h;
  const ZetaSpec pair{2, {wide}};
  const auto two = zeros_poles_in_rect(pair, -1.2, -0.6, -0.1, 0.1);
  REQUIRE(two.size() == 2);
  CHECK(two[0].s.real() == doctest::Approx(-std::log(3.0)));
  CHECK(two[1].s.real() == doctest::Approx(-std::log(2.0)));

  // Opposite-parity coincident factors cancel to a regular point.
  const ZetaSpec cancel{1, {zorbit(2.0, 0), zorbit(2.0, 1)}};
  CHECK(zeros_poles_in_rect(cancel, -1.0, 0.0, -7.0, 7.0).empty());
  const ZetaValue flat = ruelle_eval(cancel, Scalar(0.3, -0.2));
  CHECK(flat.order == 0);
  CHECK(std::abs(flat.leading - Scalar(1.0, 0.0)) < 1e-12);

  CHECK_THROWS_AS(zeros_poles_in_rect(even, 1.0, -1.0, 0.0, 0.0), InputError);
}

TEST_CASE("winding numbers agree with the declared orders") {
  const ZetaSpec spec{1, {zorbit(2.0, 0), zorbit(3.0, 1, 1, 0.5)}};
  const Scalar zero(-std::log(2.0), 0.0);
  const Scalar pole(-2.0 * std::log(3.0), 0.0);
  CHECK(winding_order_oracle(spec, zero, 0.05) == order_at(spec, zero));
  CHECK(winding_order_oracle(spec, pole, 0.05) == order_at(spec, pole));
  CHECK(winding_order_oracle(spec, Scalar(0.1, 0.1), 0.05) == 0);
}

TEST_CASE("norm of the empty-cohomology generator inverts the zeta value") {
  const MorseSmaleSystem one(1, {sys_orbit("g", 0, 2.0)}, std::nullopt, true);
  const PropCheck pc = check_prop(one);
  CHECK(pc.log_milnor == doctest::Approx(std::log(2.0)));
  CHECK(pc.log_zeta_inverse == doctest::Approx(std::log(2.0)));
  CHECK(pc.residual < 1e-12);

  // Fixed points are outside the hypothesis.
  FixedPointDatum p;
  p.id = "p";
  p.index = 0;
  p.gram = GramMetric::identity(1);
  const MorseSmaleSystem mixed(1, {p, sys_orbit("g", 0, 2.0)}, std::nullopt,
                               true);
  CHECK_THROWS_AS(check_prop(mixed), InputError);

  // So is an orbit with eigenvalue 1 (non-acyclic piece).
  const MorseSmaleSystem flat(1, {sys_orbit("g", 0, 1.0)}, std::nullopt,
                              true);
  CHECK_THROWS_AS(check_prop(flat), InputError);
}

TEST_CASE("identity holds across random fixed-point-free systems") {
  Rng rng(53);
  for (int i = 0; i < 30; ++i) {
    const MorseSmaleSystem sys = random_pure_orbit_system(rng, 5, 4, 0.1);
    CHECK(check_prop(sys).residual < 1e-10);
  }
}
