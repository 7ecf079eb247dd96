#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "torsion/complex.hpp"
#include "torsion/random_gen.hpp"

using namespace torsion;

namespace {

CochainComplex two_term(Scalar c) {
  Matrix d(1, 1);
  d(0, 0) = c;
  return CochainComplex({1, 1}, {d});
}

}  // namespace

TEST_CASE("cochain complex construction validates") {
  CHECK_NOTHROW(two_term(Scalar(2, 0)));
  CHECK_NOTHROW(CochainComplex({2}, {}));

  // d_{k+1} d_k must vanish.
  Matrix d0(1, 1), d1(1, 1);
  d0(0, 0) = Scalar(1, 0);
  d1(0, 0) = Scalar(1, 0);
  CHECK_THROWS_AS(CochainComplex({1, 1, 1}, {d0, d1}), InputError);

  // Shapes must match the dimension list.
  CHECK_THROWS_AS(CochainComplex({1, 2}, {Matrix::Zero(1, 1)}), InputError);
  CHECK_THROWS_AS(CochainComplex({-1}, {}), InputError);
}

TEST_CASE("cohomology of basic complexes") {
  // Isomorphism: no cohomology.
  const CochainComplex iso = two_term(Scalar(1, 0));
  const auto r0 = cohomology(iso, GradedMetric::identity(iso.dims()));
  CHECK(r0.betti == std::vector<int>{0, 0});

  // Zero differential: everything is harmonic.
  const CochainComplex flat({2, 2}, {Matrix::Zero(2, 2)});
  const auto r1 = cohomology(flat, GradedMetric::identity(flat.dims()));
  CHECK(r1.betti == std::vector<int>{2, 2});
  CHECK((r1.representatives[0].adjoint() * r1.representatives[0] -
         Matrix::Identity(2, 2))
            .norm() == doctest::Approx(0.0).epsilon(1e-12));

  // Rank-one differential on C^2 -> C^2: one survivor on each side.
  Matrix d(2, 2);
  d << Scalar(1, 0), Scalar(0, 0), Scalar(0, 0), Scalar(0, 0);
  const CochainComplex mixed({2, 2}, {d});
  const auto r2 = cohomology(mixed, GradedMetric::identity(mixed.dims()));
  CHECK(r2.betti == std::vector<int>{1, 1});

  // Representatives are orthonormal with respect to a non-trivial metric.
  Matrix gram(2, 2);
  gram << Scalar(4, 0), Scalar(0, 0), Scalar(0, 0), Scalar(9, 0);
  GradedMetric g{{GramMetric(gram), GramMetric(gram)}};
  const auto r3 = cohomology(mixed, g);
  CHECK(r3.betti == std::vector<int>{1, 1});
  for (int k = 0; k < 2; ++k) {
    const Matrix rep = r3.representatives[k];
    CHECK(std::abs(g.at(k).inner(rep.col(0), rep.col(0)) - Scalar(1, 0)) <
          1e-12);
  }
}

TEST_CASE("canonical element norm of acyclic complexes") {
  const GradedMetric e = GradedMetric::identity({1, 1});
  CHECK(canonical_element_norm(two_term(Scalar(2, 0)), e) ==
        doctest::Approx(0.5));
  CHECK(canonical_element_norm(two_term(Scalar(0, 3)), e) ==
        doctest::Approx(1.0 / 3.0));
  CHECK(canonical_element_log_norm(two_term(Scalar(2, 0)), e) ==
        doctest::Approx(-std::log(2.0)));

  // An isometry in every degree gives torsion one.
  Rng rng(5);
  const Matrix u = random_unitary(rng, 3);
  const CochainComplex iso({3, 3}, {u});
  CHECK(canonical_element_norm(iso, GradedMetric::identity(iso.dims())) ==
        doctest::Approx(1.0));

  // Non-acyclic input is rejected.
  const CochainComplex flat({1, 1}, {Matrix::Zero(1, 1)});
  CHECK_THROWS_AS(
      canonical_element_log_norm(flat, GradedMetric::identity(flat.dims())),
      NumericalError);
}

TEST_CASE("canonical element norm is lift-independent") {
  Rng rng(11);
  for (int i = 0; i < 30; ++i) {
    const CochainComplex c =
        random_acyclic_complex(rng, rng.uniform_int(2, 4), 3);
    const GradedMetric g = random_graded_metric(rng, c.dims());
    const double base = canonical_element_log_norm(c, g);
    const auto lifts = random_lifts(rng, c);
    CHECK(base == doctest::Approx(canonical_element_log_norm(
                                      c, g, kDefaultTol, &lifts))
                      .epsilon(1e-10));
  }

  // A lift override of the wrong shape is rejected.
  const CochainComplex c = random_acyclic_complex(rng, 3, 2);
  const GradedMetric g = GradedMetric::identity(c.dims());
  std::vector<Matrix> bad(1, Matrix::Zero(1, 1));
  CHECK_THROWS_AS(canonical_element_log_norm(c, g, kDefaultTol, &bad),
                  InputError);
}

TEST_CASE("determinant-line metric transport") {
  // Acyclic: the line carries the canonical-element norm.
  const CochainComplex acyc = two_term(Scalar(2, 0));
  const GradedMetric e = GradedMetric::identity(acyc.dims());
  const MetricedDetLine line = det_metric(acyc, e);
  CHECK(line.betti == std::vector<int>{0, 0});
  CHECK(line.log_norm == doctest::Approx(-std::log(2.0)));
  CHECK(line.generator == "alternating wedge of harmonic bases, betti=[0,0]");

  // Zero differential under the Euclidean metric: harmonic generator of
  // norm one in both degrees.
  const CochainComplex flat({2, 2}, {Matrix::Zero(2, 2)});
  const MetricedDetLine flat_line =
      det_metric(flat, GradedMetric::identity(flat.dims()));
  CHECK(flat_line.betti == std::vector<int>{2, 2});
  CHECK(flat_line.log_norm == doctest::Approx(0.0));

  // The harmonic generator is orthonormalized, so a pure metric rescaling of
  // a fully harmonic complex leaves the reported log-norm at zero.
  Matrix gram(1, 1);
  gram(0, 0) = Scalar(4, 0);
  const CochainComplex point({1}, {});
  const MetricedDetLine scaled = det_metric(point, GradedMetric{{GramMetric(gram)}});
  CHECK(scaled.betti == std::vector<int>{1});
  CHECK(scaled.log_norm == doctest::Approx(0.0));
}

TEST_CASE("filtered complexes validate level structure") {
  // d entry from a low level into a higher one is allowed; the reverse is
  // structurally forbidden and must be exactly zero.
  Matrix d(1, 1);
  d(0, 0) = Scalar(1, 0);
  const CochainComplex c({1, 1}, {d});
  CHECK_NOTHROW(FilteredComplex(c, {{0}, {1}}));
  CHECK_NOTHROW(FilteredComplex(c, {{0}, {0}}));
  CHECK_THROWS_AS(FilteredComplex(c, {{1}, {0}}), InputError);

  const FilteredComplex f(c, {{0}, {1}});
  CHECK(f.levels() == 2);
  CHECK(f.level(0, 0) == 0);
  CHECK(f.level(1, 0) == 1);
}

TEST_CASE("long exact sequence of a two-level interval") {
  // 0 -> C --(1)--> C -> 0 with the degree-0 slot at level 0 and the
  // degree-1 slot at level 1: the sequence degenerates to one connecting
  // isomorphism between the quotient's H^0 and the sub's H^1.
  Matrix d(1, 1);
  d(0, 0) = Scalar(1, 0);
  const CochainComplex c({1, 1}, {d});
  const FilteredComplex f(c, {{0}, {1}});
  const GradedMetric ambient = GradedMetric::identity(c.dims());

  const CochainComplex les = les_of_split(f, ambient, 0, 1, 2);
  const auto r = cohomology(les, GradedMetric::identity(les.dims()));
  for (int b : r.betti) CHECK(b == 0);

  // Term order per degree i: H^i(sub), H^i(total), H^i(quotient).
  CHECK(les.dims() == std::vector<int>{0, 0, 1, 1, 0, 0});
  CHECK(std::abs(les.diff(2)(0, 0)) == doctest::Approx(1.0));

  // Folding the filtration reproduces the acyclic total line.
  std::vector<GradedMetric> pm;
  for (int p = 0; p < f.levels(); ++p) {
    std::vector<int> dims;
    for (int k = 0; k < c.degrees(); ++k)
      dims.push_back(static_cast<int>(f.slots(k, p, p + 1).size()));
    pm.push_back(GradedMetric::identity(dims));
  }
  const MetricedDetLine folded = fold_filtration(f, pm);
  CHECK(folded.betti == std::vector<int>{0, 0});
  CHECK(folded.log_norm == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("two-cell circle reassembles through the filtration") {
  // One 0-cell at level 0 and one 1-cell at level 1 with zero differential:
  // folding must recover one harmonic generator in each degree at norm one,
  // and the connecting maps of the sequence are exact zeros.
  const CochainComplex c({1, 1}, {Matrix::Zero(1, 1)});
  const FilteredComplex f(c, {{0}, {1}});
  Matrix g0(1, 1), g1(1, 1);
  g0(0, 0) = Scalar(4, 0);
  g1(0, 0) = Scalar(9, 0);
  GradedMetric m0, m1;
  m0.g = {GramMetric(g0), GramMetric()};  // level 0 owns the 0-cell
  m1.g = {GramMetric(), GramMetric(g1)};  // level 1 owns the 1-cell
  const std::vector<GradedMetric> pm{m0, m1};

  const MetricedDetLine folded = fold_filtration(f, pm);
  CHECK(folded.betti == std::vector<int>{1, 1});
  CHECK(folded.log_norm == doctest::Approx(0.0).epsilon(1e-12));

  const CochainComplex les =
      les_of_split(f, assemble_ambient_metric(f, pm), 0, 1, 2);
  CHECK(les.diff(2).norm() == 0.0);  // connecting map snapped to exact zero
}

TEST_CASE("folding is independent of the association order") {
  Rng rng(23);
  for (int i = 0; i < 10; ++i) {
    RandomFiltered rf = random_filtered_complex(rng, 4, rng.uniform_int(3, 4), 4);
    CHECK(fusion_order_invariance_check(rf.filtered, rf.piece_metrics, 6,
                                        100 + i) < 1e-9);
  }
}

TEST_CASE("folding agrees with direct transport under the ambient metric") {
  // The fold through long exact sequences and the one-shot determinant-line
  // transport of the total complex compute the same metric.
  Rng rng(29);
  for (int i = 0; i < 25; ++i) {
    RandomFiltered rf = random_filtered_complex(rng, rng.uniform_int(2, 4),
                                                rng.uniform_int(3, 4), 4);
    const GradedMetric ambient =
        assemble_ambient_metric(rf.filtered, rf.piece_metrics);
    const MetricedDetLine folded =
        fold_filtration(rf.filtered, rf.piece_metrics);
    const MetricedDetLine direct = det_metric(rf.filtered.complex(), ambient);
    CHECK(folded.betti == direct.betti);
    CHECK(folded.log_norm ==
          doctest::Approx(direct.log_norm).epsilon(1e-11));
  }
}

TEST_CASE("ambient metric assembly is block diagonal over levels") {
  Rng rng(31);
  RandomFiltered rf = random_filtered_complex(rng, 3, 3, 3);
  const GradedMetric ambient =
      assemble_ambient_metric(rf.filtered, rf.piece_metrics);
  const CochainComplex& c = rf.filtered.complex();
  for (int k = 0; k < c.degrees(); ++k) {
    const Matrix& gram = ambient.at(k).gram();
    for (int i = 0; i < c.dim(k); ++i)
      for (int j = 0; j < c.dim(k); ++j)
        if (rf.filtered.level(k, i) != rf.filtered.level(k, j))
          CHECK(std::abs(gram(i, j)) == 0.0);
  }
}
