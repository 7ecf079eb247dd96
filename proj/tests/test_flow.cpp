#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "torsion/flow.hpp"
#include "torsion/random_gen.hpp"

using namespace torsion;

namespace {

ClosedOrbitDatum orbit(std::string id, int index, double holonomy_value,
                       int twist = 1) {
  ClosedOrbitDatum o;
  o.id = std::move(id);
  o.index = index;
  o.period = 1.0;
  o.twist = twist;
  o.holonomy = Matrix::Identity(1, 1) * Scalar(holonomy_value, 0.0);
  return o;
}

FixedPointDatum fixed(std::string id, int index, double gram_value) {
  FixedPointDatum x;
  x.id = std::move(id);
  x.index = index;
  Matrix g(1, 1);
  g(0, 0) = Scalar(gram_value, 0.0);
  x.gram = GramMetric(g);
  return x;
}

}  // namespace

TEST_CASE("orbit data derives its effective transport") {
  ClosedOrbitDatum o = orbit("g", 0, 2.0);
  CHECK(o.effective_holonomy()(0, 0).real() == doctest::Approx(2.0));
  CHECK(o.atilde()(0, 0).real() == doctest::Approx(2.0));

  o.twist = -1;
  CHECK(o.atilde()(0, 0).real() == doctest::Approx(-2.0));

  o.reverse_orientation = true;
  CHECK(o.effective_holonomy()(0, 0).real() == doctest::Approx(0.5));
  CHECK(o.atilde()(0, 0).real() == doctest::Approx(-0.5));
}

TEST_CASE("orbit piece is the two-term transport complex") {
  // holonomy 2, untwisted, index 0: differential 1/2 - 1 = -1/2.
  const CochainComplex p0 = orbit_piece(orbit("g", 0, 2.0), 1);
  CHECK(p0.dims() == std::vector<int>{1, 1});
  CHECK(p0.diff(0)(0, 0).real() == doctest::Approx(-0.5));

  // Index 1 shifts the occupied degrees up by one.
  const CochainComplex p1 = orbit_piece(orbit("g", 1, 2.0), 1);
  CHECK(p1.dims() == std::vector<int>{0, 1, 1});

  CHECK_THROWS_AS(orbit_piece(orbit("g", 0, 0.0), 1), InputError);
}

TEST_CASE("orbit line norms in closed form") {
  // Acyclic untwisted orbit at even index: norm |det(1 - A^{-1})|^{-1} = 2.
  const MetricedDetLine even = orbit_line_metric(orbit("g", 0, 2.0), 1);
  CHECK(even.betti == std::vector<int>{0, 0});
  CHECK(even.log_norm == doctest::Approx(std::log(2.0)));
  CHECK(even.generator == "sigma[g]");

  // Odd index flips the exponent: norm 1/2.
  CHECK(orbit_line_metric(orbit("g", 1, 2.0), 1).log_norm ==
        doctest::Approx(-std::log(2.0)));

  // Identity transport is non-acyclic; the normalized generator has norm 1.
  const MetricedDetLine flat = orbit_line_metric(orbit("g", 0, 1.0), 1);
  CHECK(flat.betti == std::vector<int>{1, 1});
  CHECK(flat.log_norm == doctest::Approx(0.0));

  // Twisted identity transport: atilde = -1, norm |1 - (-1)|^{-1} = 1/2.
  CHECK(orbit_line_metric(orbit("g", 0, 1.0, -1), 1).log_norm ==
        doctest::Approx(-std::log(2.0)));
}

TEST_CASE("fixed point lines weigh the fiber volume") {
  const MetricedDetLine l0 = fixed_point_line(fixed("p", 0, 36.0), 1);
  CHECK(l0.log_norm == doctest::Approx(0.5 * std::log(36.0)));
  CHECK(l0.betti == std::vector<int>{1});
  CHECK(l0.generator == "detF[p]");

  // Odd index inverts the determinant-line factor.
  CHECK(fixed_point_line(fixed("p", 1, 36.0), 1).log_norm ==
        doctest::Approx(-0.5 * std::log(36.0)));
  CHECK(fixed_point_line(fixed("p", 1, 36.0), 1).betti ==
        std::vector<int>{0, 1});
}

TEST_CASE("split systems tensor their piece lines") {
  // Single odd orbit: total norm 1/2.
  const MorseSmaleSystem one(1, {orbit("g", 1, 2.0)}, std::nullopt, true);
  const MetricedDetLine line = milnor_metric(one);
  CHECK(line.log_norm == doctest::Approx(-std::log(2.0)));
  CHECK(line.betti == std::vector<int>{0, 0, 0});
  CHECK(line.generator == "sigma[g]");

  // A fixed point and an orbit multiply (log-add) their contributions.
  const MorseSmaleSystem two(1, {fixed("p", 0, 36.0), orbit("g", 0, 2.0)},
                             std::nullopt, true);
  CHECK(milnor_metric(two).log_norm ==
        doctest::Approx(0.5 * std::log(36.0) + std::log(2.0)));
  CHECK(milnor_metric(two).generator == "detF[p] (x) sigma[g]");

  // Without a chain model the metric needs a split system.
  CHECK_THROWS_AS(milnor_metric(MorseSmaleSystem(1, {orbit("g", 0, 2.0)},
                                                 std::nullopt, false)),
                  InputError);
  CHECK_THROWS_AS(MorseSmaleSystem(1, {}, std::nullopt, true), InputError);
  CHECK_THROWS_AS(MorseSmaleSystem(0, {orbit("g", 0, 2.0)}, std::nullopt,
                                   true),
                  InputError);
}

TEST_CASE("diagonal chain model realizes a split system") {
  const std::vector<CriticalElement> elems{fixed("p", 0, 1.0),
                                           orbit("g", 1, 2.0)};
  const FilteredComplex model = diagonal_chain_model(elems, 1, 3);
  CHECK(model.complex().dims() == std::vector<int>{1, 1, 1});
  CHECK(model.level(0, 0) == 0);  // the fixed point's slot
  CHECK(model.level(1, 0) == 1);  // the orbit's two slots
  CHECK(model.level(2, 0) == 1);
  CHECK(model.complex().diff(1)(0, 0).real() == doctest::Approx(-0.5));
  CHECK(model.complex().diff(0).norm() == 0.0);  // cross-level block absent

  // The model-backed system and the split system agree on acyclic totals.
  const MorseSmaleSystem split_sys(1, {orbit("g", 1, 2.0)}, std::nullopt,
                                   true);
  const MorseSmaleSystem model_sys(
      1, {orbit("g", 1, 2.0)},
      diagonal_chain_model({orbit("g", 1, 2.0)}, 1, 3), false);
  CHECK(milnor_metric(split_sys).log_norm ==
        doctest::Approx(milnor_metric(model_sys).log_norm).epsilon(1e-12));

  CHECK_THROWS_AS(diagonal_chain_model({}, 1, 2), InputError);
  CHECK_THROWS_AS(diagonal_chain_model(elems, 0, 3), InputError);
}

TEST_CASE("split and model paths agree on acyclic random systems") {
  Rng rng(37);
  for (int i = 0; i < 20; ++i) {
    const MorseSmaleSystem sys = random_pure_orbit_system(rng, 4, 3, 0.1);
    int degrees = 0;
    for (const auto& e : sys.elements())
      degrees =
          std::max(degrees, std::get<ClosedOrbitDatum>(e).index + 2);
    const MorseSmaleSystem modeled(
        sys.rank(), sys.elements(),
        diagonal_chain_model(sys.elements(), sys.rank(), degrees), false);
    CHECK(milnor_metric(sys).log_norm ==
          doctest::Approx(milnor_metric(modeled).log_norm).epsilon(1e-11));
  }
}

TEST_CASE("split and model reports differ by the generator on weighted harmonics") {
  // One fixed point with fiber gram [[2]]: the split path reports the
  // standard-basis generator (norm sqrt(2)); the model path reports the
  // harmonic generator, orthonormalized to norm 1. The gap is exactly the
  // basis change.
  const std::vector<CriticalElement> elems{fixed("p", 0, 2.0)};
  const MorseSmaleSystem split_sys(1, elems, std::nullopt, true);
  const MorseSmaleSystem model_sys(1, elems, diagonal_chain_model(elems, 1, 1),
                                   false);
  CHECK(milnor_metric(split_sys).log_norm ==
        doctest::Approx(0.5 * std::log(2.0)));
  CHECK(milnor_metric(model_sys).log_norm == doctest::Approx(0.0));
}

TEST_CASE("surgery replaces an orbit by a fixed-point pair") {
  SurgeryDatum datum;
  datum.tau_prime = Matrix::Identity(1, 1) * Scalar(3.0, 0.0);
  datum.n_a = 1;
  datum.n_a_prime = -1;
  datum.gram_x = GramMetric::identity(1);
  datum.gram_x_prime = GramMetric::identity(1);
  const SurgeryMap surgery{{"g", datum}};

  const MorseSmaleSystem sys(1, {orbit("g", 0, 2.0)}, std::nullopt, true);
  const MorseSmaleSystem cut = franks_surgery(sys, surgery);

  // x' keeps the orbit's index, x sits one higher, on consecutive levels.
  CHECK(cut.elements().size() == 2);
  const auto& xp = std::get<FixedPointDatum>(cut.elements()[0]);
  const auto& x = std::get<FixedPointDatum>(cut.elements()[1]);
  CHECK(xp.index == 0);
  CHECK(x.index == 1);
  CHECK(cut.levels() == 2);

  // Block n(a) tau(a)^{-1} + n(a') tau(a')^{-1} with tau(a) = holonomy
  // tau(a') = 6: here 1/6 - 1/3 = -1/6.
  REQUIRE(cut.chain_model().has_value());
  CHECK(cut.chain_model()->complex().diff(0)(0, 0).real() ==
        doctest::Approx(-1.0 / 6.0));

  // Twisted case with aligned signs: holonomy 1, twist -1, tau' = 1 gives
  // block 1/1 + 1/1 = 2.
  SurgeryDatum aligned;
  aligned.tau_prime = Matrix::Identity(1, 1);
  aligned.n_a = 1;
  aligned.n_a_prime = 1;
  aligned.gram_x = GramMetric::identity(1);
  aligned.gram_x_prime = GramMetric::identity(1);
  const MorseSmaleSystem twisted(1, {orbit("h", 0, 1.0, -1)}, std::nullopt,
                                 true);
  const MorseSmaleSystem cut2 =
      franks_surgery(twisted, SurgeryMap{{"h", aligned}});
  CHECK(cut2.chain_model()->complex().diff(0)(0, 0).real() ==
        doctest::Approx(2.0));

  // The sign constraint n(a) n(a') = -twist is enforced.
  SurgeryDatum wrong = datum;
  wrong.n_a_prime = 1;
  CHECK_THROWS_AS(franks_surgery(sys, SurgeryMap{{"g", wrong}}), InputError);
  // Every orbit needs a datum.
  CHECK_THROWS_AS(franks_surgery(sys, SurgeryMap{}), InputError);
}

TEST_CASE("surgery comparison matches the local formula") {
  SurgeryDatum datum;
  datum.tau_prime = Matrix::Identity(1, 1) * Scalar(3.0, 0.0);
  datum.n_a = 1;
  datum.n_a_prime = -1;
  datum.gram_x = GramMetric::identity(1);
  datum.gram_x_prime = GramMetric::identity(1);
  const SurgeryMap surgery{{"g", datum}};

  // Even index: both sides equal 2 log 3.
  const MorseSmaleSystem even(1, {orbit("g", 0, 2.0)}, std::nullopt, true);
  const FranksComparison fc = compare_milnor(even, surgery);
  CHECK(fc.rhs == doctest::Approx(2.0 * std::log(3.0)));
  CHECK(fc.lhs == doctest::Approx(2.0 * std::log(3.0)).epsilon(1e-12));
  CHECK(fc.residual < 1e-12);
  CHECK(franks_comparison_rhs(even, surgery) ==
        doctest::Approx(2.0 * std::log(3.0)));

  // Odd index flips the sign of both sides.
  const MorseSmaleSystem odd(1, {orbit("g", 1, 2.0)}, std::nullopt, true);
  const FranksComparison fo = compare_milnor(odd, surgery);
  CHECK(fo.rhs == doctest::Approx(-2.0 * std::log(3.0)));
  CHECK(fo.residual < 1e-12);

  // Weighted replacement metrics move the local side by the volume ratio.
  SurgeryDatum weighted = datum;
  Matrix gx(1, 1), gxp(1, 1);
  gx(0, 0) = Scalar(4.0, 0.0);
  gxp(0, 0) = Scalar(9.0, 0.0);
  weighted.gram_x = GramMetric(gx);
  weighted.gram_x_prime = GramMetric(gxp);
  const FranksComparison fw = compare_milnor(even, SurgeryMap{{"g", weighted}});
  CHECK(fw.rhs == doctest::Approx(2.0 * std::log(3.0) + std::log(9.0) -
                                  std::log(4.0)));
  CHECK(fw.residual < 1e-12);
}

TEST_CASE("surgery comparison holds across random systems") {
  Rng rng(41);
  for (int i = 0; i < 25; ++i) {
    SurgeryModel m = random_surgery_system(rng);
    const FranksComparison fc = compare_milnor(m.system, m.surgery);
    CHECK(fc.residual < 1e-9);
  }
}

TEST_CASE("chain models must realize the declared elements") {
  // A model whose degree-0 block has the wrong dimension is rejected.
  const std::vector<CriticalElement> elems{fixed("p", 0, 1.0)};
  const CochainComplex wrong({2}, {});
  CHECK_THROWS_AS(MorseSmaleSystem(1, elems,
                                   FilteredComplex(wrong, {{0, 0}}), false),
                  InputError);

  // An orbit's in-level block must match its transport differential.
  Matrix bad(1, 1);
  bad(0, 0) = Scalar(0.25, 0.0);
  const CochainComplex off({1, 1}, {bad});
  CHECK_THROWS_AS(
      MorseSmaleSystem(1, {orbit("g", 0, 2.0)},
                       FilteredComplex(off, {{0}, {0}}), false),
      InputError);

  // The correct block (1/2 - 1 = -1/2) passes.
  Matrix good(1, 1);
  good(0, 0) = Scalar(-0.5, 0.0);
  const CochainComplex ok({1, 1}, {good});
  CHECK_NOTHROW(MorseSmaleSystem(1, {orbit("g", 0, 2.0)},
                                 FilteredComplex(ok, {{0}, {0}}), false));
}
