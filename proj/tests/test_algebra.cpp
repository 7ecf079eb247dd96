#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "torsion/algebra.hpp"
#include "torsion/random_gen.hpp"
#include "torsion/selfcheck.hpp"

using namespace torsion;

namespace {
constexpr double kPi = 3.14159265358979323846;

Matrix mat2(Scalar a, Scalar b, Scalar c, Scalar d) {
  Matrix m(2, 2);
  m << a, b, c, d;
  return m;
}
}  // namespace

TEST_CASE("determinants and ranks") {
  CHECK(det(mat2(2, 0, 0, 3)).real() == doctest::Approx(6.0));
  CHECK(det(mat2(0, 1, 1, 0)).real() == doctest::Approx(-1.0));
  CHECK(log_abs_det(mat2(-2, 0, 0, 3)) == doctest::Approx(std::log(6.0)));
  CHECK(det(Matrix::Identity(0, 0)) == Scalar(1.0, 0.0));

  CHECK(numerical_rank(Matrix::Zero(3, 2)) == 0);
  CHECK(numerical_rank(Matrix::Identity(3, 3)) == 3);
  Matrix outer = Matrix::Ones(3, 1) * Matrix::Ones(1, 4);
  CHECK(numerical_rank(outer) == 1);
  CHECK(kernel_basis(outer).cols() == 3);

  Matrix k = kernel_basis(outer);
  CHECK((outer * k).norm() == doctest::Approx(0.0).epsilon(1e-12));
  CHECK((k.adjoint() * k - Matrix::Identity(3, 3)).norm() ==
        doctest::Approx(0.0).epsilon(1e-12));

  CHECK_THROWS_AS(det(Matrix::Zero(2, 3)), InputError);
  CHECK_THROWS_AS(log_abs_det(Matrix::Zero(2, 2)), NumericalError);
}

TEST_CASE("gram metrics whiten correctly") {
  Matrix g = mat2(1, 0, 0, 4);
  GramMetric metric(g);
  CHECK(metric.log_det() == doctest::Approx(std::log(4.0)));

  Vector e2 = Vector::Zero(2);
  e2(1) = 1.0;
  CHECK(metric.inner(e2, e2).real() == doctest::Approx(4.0));

  const Matrix w = metric.whitener();
  CHECK((w.adjoint() * w - g).norm() == doctest::Approx(0.0).epsilon(1e-12));
  CHECK((metric.whitener_inverse() * w - Matrix::Identity(2, 2)).norm() ==
        doctest::Approx(0.0).epsilon(1e-12));

  CHECK_THROWS_AS(GramMetric(mat2(1, 2, 3, 1)), InputError);   // not Hermitian
  CHECK_THROWS_AS(GramMetric(mat2(1, 2, 2, 1)), InputError);   // not positive
  CHECK_THROWS_AS(GramMetric(Matrix::Zero(2, 3)), InputError);  // not square
}

TEST_CASE("wedge norms against hand values") {
  // Single vector (2, 0) under the Euclidean metric: plain length.
  Matrix v(2, 1);
  v << Scalar(2, 0), Scalar(0, 0);
  CHECK(wedge_gram_norm(v, GramMetric::identity(2)) == doctest::Approx(2.0));

  // (1,0) wedge (1,1) under diag(1,4): squared norm is det [[1,1],[1,5]] = 4.
  Matrix v2(2, 2);
  v2 << Scalar(1, 0), Scalar(1, 0), Scalar(0, 0), Scalar(1, 0);
  GramMetric g(mat2(1, 0, 0, 4));
  CHECK(wedge_gram_norm(v2, g) == doctest::Approx(2.0));
  CHECK(log_wedge_gram_norm(v2, g) == doctest::Approx(std::log(2.0)));

  // Dependent columns have a vanishing wedge; the log form refuses them.
  Matrix dep(2, 2);
  dep << Scalar(1, 0), Scalar(2, 0), Scalar(1, 0), Scalar(2, 0);
  CHECK(wedge_gram_norm(dep, GramMetric::identity(2)) ==
        doctest::Approx(0.0).epsilon(1e-12));
  CHECK_THROWS_AS(log_wedge_gram_norm(dep, GramMetric::identity(2)),
                  NumericalError);

  CHECK_THROWS_AS(wedge_gram_norm(v2, GramMetric::identity(3)), InputError);
}

TEST_CASE("wedge norms agree with the exterior-algebra oracle") {
  Rng rng(91);
  for (int i = 0; i < 50; ++i) {
    const int n = rng.uniform_int(1, 6);
    const int k = rng.uniform_int(1, n);
    const Matrix v = random_matrix(rng, n, k);
    const GramMetric g = random_gram(rng, n);
    CHECK(log_wedge_gram_norm(v, g) ==
          doctest::Approx(wedge_oracle_log_norm(v, g)).epsilon(1e-10));
  }
}

TEST_CASE("multivector wedge calculus") {
  Multivector e0 = Multivector::generator(3, 0);
  Multivector e1 = Multivector::generator(3, 1);

  // Anticommutativity and nilpotency.
  Multivector ab = e0.wedge(e1);
  Multivector ba = e1.wedge(e0);
  CHECK(ab.coefficient(0b011).real() == doctest::Approx(1.0));
  CHECK(ba.coefficient(0b011).real() == doctest::Approx(-1.0));
  CHECK(e0.wedge(e0).term_count() == 0);

  Vector coeffs(3);
  coeffs << Scalar(1, 0), Scalar(2, 0), Scalar(0, 1);
  Multivector v = Multivector::from_vector(coeffs);
  CHECK(v.coefficient(0b001) == Scalar(1, 0));
  CHECK(v.coefficient(0b010) == Scalar(2, 0));
  CHECK(v.coefficient(0b100) == Scalar(0, 1));

  // exp of s + a e0^e1 in two generators: e^s (1 + a e0^e1).
  Multivector arg = Multivector::scalar(2, Scalar(0.5, 0));
  arg.add_term(0b11, Scalar(3, 0));
  Multivector ex = Multivector::exp_even(arg);
  CHECK(ex.coefficient(0).real() == doctest::Approx(std::exp(0.5)));
  CHECK(ex.top_coefficient().real() == doctest::Approx(3.0 * std::exp(0.5)));

  CHECK_THROWS_AS(Multivector::exp_even(Multivector::generator(2, 0)),
                  InputError);
  CHECK_THROWS_AS(e0.wedge(Multivector::generator(2, 0)), InputError);
}

TEST_CASE("berezin integral normalization") {
  // One generator, w = c e0: integral is -c / sqrt(pi).
  const Scalar c(2.0, -1.0);
  Multivector w1 = Multivector::generator(1, 0) * c;
  const Scalar b1 = berezin_integral(w1);
  CHECK(std::abs(b1 - (-c / std::sqrt(kPi))) < 1e-14);

  // Two generators, w = 5 e0^e1: integral is -5 / pi.
  Multivector w2 = Multivector::scalar(2, Scalar(0, 0));
  w2.add_term(0b11, Scalar(5, 0));
  CHECK(berezin_integral(w2).real() == doctest::Approx(-5.0 / kPi));

  // No top coefficient: zero.
  CHECK(std::abs(berezin_integral(Multivector::generator(2, 0))) ==
        doctest::Approx(0.0));
}

TEST_CASE("pfaffian hand values") {
  RealMatrix a2(2, 2);
  a2 << 0, 3, -3, 0;
  CHECK(pfaffian(AntisymMatrix(a2)) == doctest::Approx(3.0));

  // Two diagonal blocks with entries a and b: pfaffian a * b.
  RealMatrix a4 = RealMatrix::Zero(4, 4);
  a4(0, 1) = 2.0;
  a4(1, 0) = -2.0;
  a4(2, 3) = -5.0;
  a4(3, 2) = 5.0;
  CHECK(pfaffian(AntisymMatrix(a4)) == doctest::Approx(-10.0));
  CHECK(pfaffian_berezin(AntisymMatrix(a4)) == doctest::Approx(-10.0));

  // Odd dimension: identically zero.
  RealMatrix a3 = RealMatrix::Zero(3, 3);
  a3(0, 1) = 1.0;
  a3(1, 0) = -1.0;
  a3(1, 2) = 4.0;
  a3(2, 1) = -4.0;
  CHECK(pfaffian(AntisymMatrix(a3)) == doctest::Approx(0.0));

  // The antisymmetry validation has no tolerance.
  RealMatrix skew(2, 2);
  skew << 0, 1, -1 + 1e-14, 0;
  CHECK_THROWS_AS(AntisymMatrix{skew}, InputError);
  RealMatrix diag(2, 2);
  diag << 1e-300, 1, -1, 0;
  CHECK_THROWS_AS(AntisymMatrix{diag}, InputError);
}

TEST_CASE("pfaffian identities on random input") {
  Rng rng(17);
  for (int i = 0; i < 30; ++i) {
    const int n = 2 * rng.uniform_int(1, 3);
    RealMatrix m(n, n);
    for (int r = 0; r < n; ++r)
      for (int c = 0; c < n; ++c) m(r, c) = rng.gaussian().real();
    const RealMatrix a = 0.5 * (m - m.transpose());
    const double p = pfaffian(AntisymMatrix(a));
    CHECK(p * p == doctest::Approx(a.determinant()).epsilon(1e-10));
    CHECK(p == doctest::Approx(pfaffian_berezin(AntisymMatrix(a)))
                   .epsilon(1e-10));

    RealMatrix b(n, n);
    for (int r = 0; r < n; ++r)
      for (int c = 0; c < n; ++c) b(r, c) = rng.gaussian().real();
    const RealMatrix t_raw = b * a * b.transpose();
    const RealMatrix t = 0.5 * (t_raw - t_raw.transpose());
    CHECK(pfaffian(AntisymMatrix(t)) ==
          doctest::Approx(b.determinant() * p).epsilon(1e-9));
  }
}

TEST_CASE("one-dimensional vertical Gaussian integral") {
  CHECK(psi_dim_one(0.5) == doctest::Approx(-0.5));
  CHECK(psi_dim_one(1.0) == doctest::Approx(-0.5));
  CHECK(psi_dim_one(-2.0) == doctest::Approx(0.5));
  CHECK_THROWS_AS(psi_dim_one(0.0), InputError);

  // The quadrature oracle integrates the exterior-algebra integrand.
  for (double y : {0.5, -1.0, 2.0})
    CHECK(psi_quadrature_oracle(y) ==
          doctest::Approx(psi_dim_one(y)).epsilon(1e-6));
}
