#pragma once
// Scalar / matrix / exterior-algebra substrate.
//
// Provides the numeric kernels everything else builds on:
//   - determinants, numerical ranks and kernels (SVD with a relative cutoff),
//   - Hermitian positive-definite inner products with cached whiteners,
//   - Gram norms of wedge systems,
//   - sparse multivectors over anticommuting generators e^1..e^n,
//   - the Berezin integral, two independent Pfaffian routes,
//   - the rank-one vertical Gaussian integral psi(y).
//
// Conventions: inner products are conjugate-linear in the first slot; the
// Berezin integral of a top-degree monomial alpha e^1...e^n is
// (-1)^{n(n+1)/2} pi^{-n/2} alpha, and lower-degree terms integrate to zero.

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace torsion {

using Scalar = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using RealMatrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXcd;

// Error taxonomy: InputError means the caller handed us malformed data
// (CLI exit 2); NumericalError means a well-formed computation failed a
// numerical precondition or check (CLI exit 1).
struct InputError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Relative singular-value cutoff shared by every rank decision.
inline constexpr double kDefaultTol = 1e-9;

bool is_finite(Scalar s);
void require_finite(const Matrix& m, const char* what);

// Determinant via partially pivoted elimination (exact for triangular input
// up to rounding). Throws InputError on non-square input.
Scalar det(const Matrix& m);

// log |det m|. Throws NumericalError when m is singular at machine precision.
double log_abs_det(const Matrix& m);

// Rank with the relative cutoff tol * sigma_max. Throws
// NumericalError("ill-conditioned rank...") when singular values straddle the
// cutoff within a factor of 10 on both sides.
int numerical_rank(const Matrix& m, double tol = kDefaultTol);

// Euclidean-orthonormal basis of ker(m), returned as columns. Same rank
// policy as numerical_rank.
Matrix kernel_basis(const Matrix& m, double tol = kDefaultTol);

// Hermitian positive-definite metric on C^n with a cached Cholesky whitener:
// <x,y>_g = <W x, W y>_euclid where W = L^* and g = L L^*.
class GramMetric {
 public:
  GramMetric() = default;  // dimension 0
  explicit GramMetric(Matrix gram, double tol = kDefaultTol);

  static GramMetric identity(int n);

  int dim() const { return static_cast<int>(gram_.rows()); }
  const Matrix& gram() const { return gram_; }
  const Matrix& whitener() const { return w_; }
  const Matrix& whitener_inverse() const { return winv_; }
  double log_det() const { return log_det_; }

  Scalar inner(const Vector& x, const Vector& y) const;

 private:
  Matrix gram_, w_, winv_;
  double log_det_ = 0.0;
};

// sqrt(det(V^* g V)) for the column system V: the induced norm of
// v_1 ^ ... ^ v_k. Returns 0 for dependent systems; the empty system has
// norm 1.
double wedge_gram_norm(const Matrix& vectors, const GramMetric& g);

// log of the same quantity; throws NumericalError for dependent systems.
double log_wedge_gram_norm(const Matrix& vectors, const GramMetric& g);

// Sparse element of the exterior algebra on n anticommuting generators,
// stored as {sorted index subset (bitmask) -> coefficient}. Dense tabulation
// is never materialized, so n well above 16 stays cheap as long as the term
// count does.
class Multivector {
 public:
  explicit Multivector(int n);

  static Multivector scalar(int n, Scalar c);
  // e^{i} for 0 <= i < n.
  static Multivector generator(int n, int i);
  // sum_i coeffs[i] e^{i}.
  static Multivector from_vector(const Vector& coeffs);

  int generators() const { return n_; }
  std::size_t term_count() const { return terms_.size(); }

  void add_term(std::uint32_t mask, Scalar c);
  Scalar coefficient(std::uint32_t mask) const;
  Scalar top_coefficient() const;

  Multivector& operator+=(const Multivector& rhs);
  Multivector operator*(Scalar c) const;
  Multivector wedge(const Multivector& rhs) const;

  // exp(a) = sum a^k / k! for an argument with even-degree terms only (so
  // the series is central): the scalar part exponentiates exactly and the
  // positive-degree part terminates at the top exterior degree.
  static Multivector exp_even(const Multivector& a);

 private:
  int n_;
  std::map<std::uint32_t, Scalar> terms_;
};

// Berezin integral over all n generators: picks the top coefficient and
// applies the (-1)^{n(n+1)/2} pi^{-n/2} normalization.
Scalar berezin_integral(const Multivector& w);

// Real antisymmetric matrix; entries must satisfy a(i,j) == -a(j,i) exactly
// (validated with zero tolerance, diagonal included).
class AntisymMatrix {
 public:
  explicit AntisymMatrix(RealMatrix a);
  int dim() const { return static_cast<int>(a_.rows()); }
  const RealMatrix& mat() const { return a_; }

 private:
  RealMatrix a_;
};

// Pfaffian, fast path: recursive expansion along the first row. Odd
// dimension gives 0; Pf of the empty matrix is 1.
double pfaffian(const AntisymMatrix& a);

// Pfaffian, slow path: (2 pi)^{n/2} * berezin_integral(exp(-adot/2)) with
// adot = sum_{i<j} a_{ij} e^i e^j. Kept as an independent route; the two
// must agree to 1e-10 relative.
double pfaffian_berezin(const AntisymMatrix& a);

// Vertical Gaussian integral in fiber rank one: psi(y) = -sgn(y)/2.
// Throws InputError at y == 0 where the current is undefined.
double psi_dim_one(double y);

}  // namespace torsion
