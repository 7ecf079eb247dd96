#include "torsion/algebra.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>

namespace torsion {

namespace {

// Rank decision shared by numerical_rank / kernel_basis: singular values
// below tol * sigma_max are zero. If the spectrum has values within a factor
// of 10 of the cutoff on both sides, the rank is not trustworthy.
int rank_from_singular_values(const Eigen::VectorXd& sv, double tol,
                              const char* what) {
  if (sv.size() == 0) return 0;
  const double smax = sv(0);
  if (!(smax > 0.0)) return 0;
  const double cutoff = tol * smax;
  int rank = 0;
  double kept_min = std::numeric_limits<double>::infinity();
  double dropped_max = 0.0;
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    if (sv(i) > cutoff) {
      ++rank;
      kept_min = std::min(kept_min, sv(i));
    } else {
      dropped_max = std::max(dropped_max, sv(i));
    }
  }
  if (rank > 0 && rank < sv.size() && kept_min < 10.0 * cutoff &&
      dropped_max > 0.1 * cutoff) {
    throw NumericalError(std::string("ill-conditioned rank in ") + what +
                         ": singular values " + std::to_string(dropped_max) +
                         " and " + std::to_string(kept_min) +
                         " straddle the cutoff " + std::to_string(cutoff));
  }
  return rank;
}

}  // namespace

bool is_finite(Scalar s) {
  return std::isfinite(s.real()) && std::isfinite(s.imag());
}

void require_finite(const Matrix& m, const char* what) {
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    for (Eigen::Index i = 0; i < m.rows(); ++i)
      if (!is_finite(m(i, j)))
        throw InputError(std::string(what) + ": non-finite entry at (" +
                         std::to_string(i) + "," + std::to_string(j) + ")");
}

Scalar det(const Matrix& m) {
  if (m.rows() != m.cols()) throw InputError("det: matrix is not square");
  require_finite(m, "det");
  if (m.rows() == 0) return Scalar(1.0, 0.0);
  return Eigen::PartialPivLU<Matrix>(m).determinant();
}

double log_abs_det(const Matrix& m) {
  if (m.rows() != m.cols()) throw InputError("log_abs_det: matrix is not square");
  require_finite(m, "log_abs_det");
  if (m.rows() == 0) return 0.0;
  Eigen::PartialPivLU<Matrix> lu(m);
  double acc = 0.0;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    const double p = std::abs(lu.matrixLU()(i, i));
    if (!(p > 0.0) || !std::isfinite(p))
      throw NumericalError("log_abs_det: singular matrix");
    acc += std::log(p);
  }
  return acc;
}

int numerical_rank(const Matrix& m, double tol) {
  require_finite(m, "numerical_rank");
  if (m.rows() == 0 || m.cols() == 0) return 0;
  Eigen::JacobiSVD<Matrix> svd(m);
  return rank_from_singular_values(svd.singularValues(), tol, "numerical_rank");
}

Matrix kernel_basis(const Matrix& m, double tol) {
  require_finite(m, "kernel_basis");
  const Eigen::Index n = m.cols();
  if (n == 0) return Matrix(0, 0);
  if (m.rows() == 0) return Matrix::Identity(n, n);
  Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeFullV);
  const int rank =
      rank_from_singular_values(svd.singularValues(), tol, "kernel_basis");
  return svd.matrixV().rightCols(n - rank);
}

GramMetric::GramMetric(Matrix gram, double tol) : gram_(std::move(gram)) {
  if (gram_.rows() != gram_.cols())
    throw InputError("gram metric: matrix is not square");
  require_finite(gram_, "gram metric");
  const double scale = std::max(gram_.norm(), 1.0);
  if ((gram_ - gram_.adjoint()).norm() > tol * scale)
    throw InputError("gram metric: matrix is not Hermitian");
  gram_ = 0.5 * (gram_ + gram_.adjoint());  // kill rounding skew
  if (gram_.rows() == 0) return;
  Eigen::LLT<Matrix> llt(gram_);
  if (llt.info() != Eigen::Success)
    throw InputError("gram metric: matrix is not positive definite");
  Matrix l = llt.matrixL();
  w_ = l.adjoint();
  winv_ = w_.triangularView<Eigen::Upper>().solve(
      Matrix::Identity(gram_.rows(), gram_.cols()));
  log_det_ = 0.0;
  for (Eigen::Index i = 0; i < l.rows(); ++i)
    log_det_ += 2.0 * std::log(std::real(l(i, i)));
}

GramMetric GramMetric::identity(int n) {
  if (n < 0) throw InputError("gram metric: negative dimension");
  return n == 0 ? GramMetric() : GramMetric(Matrix::Identity(n, n));
}

Scalar GramMetric::inner(const Vector& x, const Vector& y) const {
  if (x.size() != dim() || y.size() != dim())
    throw InputError("gram metric: inner-product dimension mismatch");
  return (x.adjoint() * gram_ * y)(0, 0);
}

namespace {

// Eigenvalues of the k x k Hermitian Gram matrix of the column system.
Eigen::VectorXd wedge_gram_eigenvalues(const Matrix& vectors,
                                       const GramMetric& g) {
  if (vectors.rows() != g.dim())
    throw InputError("wedge_gram_norm: vector dimension does not match metric");
  require_finite(vectors, "wedge_gram_norm");
  if (vectors.cols() == 0) return Eigen::VectorXd();
  const Matrix gram = vectors.adjoint() * g.gram() * vectors;
  Eigen::SelfAdjointEigenSolver<Matrix> es(gram, Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

}  // namespace

double wedge_gram_norm(const Matrix& vectors, const GramMetric& g) {
  const Eigen::VectorXd ev = wedge_gram_eigenvalues(vectors, g);
  double acc = 0.0;
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    if (!(ev(i) > 0.0)) return 0.0;
    acc += std::log(ev(i));
  }
  return std::exp(0.5 * acc);
}

double log_wedge_gram_norm(const Matrix& vectors, const GramMetric& g) {
  const Eigen::VectorXd ev = wedge_gram_eigenvalues(vectors, g);
  double acc = 0.0;
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    if (!(ev(i) > 0.0))
      throw NumericalError("log_wedge_gram_norm: dependent vector system");
    acc += std::log(ev(i));
  }
  return 0.5 * acc;
}

namespace {

constexpr int kMaxGenerators = 30;

// Sign of merging two disjoint sorted index sets: parity of the number of
// pairs (i in a, j in b) with i > j.
int merge_sign(std::uint32_t a, std::uint32_t b) {
  int inversions = 0;
  while (b != 0) {
    const int j = std::countr_zero(b);
    b &= b - 1;
    inversions += std::popcount(a >> (j + 1));
  }
  return (inversions & 1) ? -1 : 1;
}

}  // namespace

Multivector::Multivector(int n) : n_(n) {
  if (n < 0 || n > kMaxGenerators)
    throw InputError("multivector: generator count out of range");
}

Multivector Multivector::scalar(int n, Scalar c) {
  Multivector w(n);
  w.add_term(0u, c);
  return w;
}

Multivector Multivector::generator(int n, int i) {
  Multivector w(n);
  if (i < 0 || i >= n) throw InputError("multivector: generator index out of range");
  w.add_term(1u << i, Scalar(1.0, 0.0));
  return w;
}

Multivector Multivector::from_vector(const Vector& coeffs) {
  Multivector w(static_cast<int>(coeffs.size()));
  for (Eigen::Index i = 0; i < coeffs.size(); ++i)
    w.add_term(1u << i, coeffs(i));
  return w;
}

void Multivector::add_term(std::uint32_t mask, Scalar c) {
  if (n_ < 32 && (mask >> n_) != 0)
    throw InputError("multivector: term index exceeds generator count");
  if (!is_finite(c)) throw InputError("multivector: non-finite coefficient");
  if (c == Scalar(0.0, 0.0)) return;
  auto [it, inserted] = terms_.emplace(mask, c);
  if (!inserted) {
    it->second += c;
    if (it->second == Scalar(0.0, 0.0)) terms_.erase(it);
  }
}

Scalar Multivector::coefficient(std::uint32_t mask) const {
  auto it = terms_.find(mask);
  return it == terms_.end() ? Scalar(0.0, 0.0) : it->second;
}

Scalar Multivector::top_coefficient() const {
  return coefficient(n_ == 32 ? ~0u : (1u << n_) - 1u);
}

Multivector& Multivector::operator+=(const Multivector& rhs) {
  if (rhs.n_ != n_) throw InputError("multivector: generator count mismatch");
  for (const auto& [mask, c] : rhs.terms_) add_term(mask, c);
  return *this;
}

Multivector Multivector::operator*(Scalar c) const {
  Multivector out(n_);
  for (const auto& [mask, v] : terms_) out.add_term(mask, v * c);
  return out;
}

Multivector Multivector::wedge(const Multivector& rhs) const {
  if (rhs.n_ != n_) throw InputError("multivector: generator count mismatch");
  Multivector out(n_);
  for (const auto& [ma, ca] : terms_) {
    for (const auto& [mb, cb] : rhs.terms_) {
      if ((ma & mb) != 0) continue;
      out.add_term(ma | mb, ca * cb * static_cast<double>(merge_sign(ma, mb)));
    }
  }
  return out;
}

Multivector Multivector::exp_even(const Multivector& a) {
  for (const auto& [mask, c] : a.terms_)
    if (std::popcount(mask) % 2 != 0)
      throw InputError("multivector: exp_even requires even-degree terms");
  // Split off the scalar part: exp(s + nu) = e^s * exp(nu) with nu of
  // positive degree, whose series terminates at the top degree.
  const Scalar s = a.coefficient(0);
  Multivector nu = a;
  nu.add_term(0, -s);
  Multivector result = Multivector::scalar(a.generators(), Scalar(1.0, 0.0));
  Multivector power = result;
  double factorial = 1.0;
  const int max_k = a.generators() / 2 + 1;
  for (int k = 1; k <= max_k; ++k) {
    power = power.wedge(nu);
    if (power.term_count() == 0) break;
    factorial *= k;
    result += power * Scalar(1.0 / factorial, 0.0);
  }
  return result * std::exp(s);
}

Scalar berezin_integral(const Multivector& w) {
  const int n = w.generators();
  const int half_turns = (n * (n + 1) / 2) % 2;
  const double sign = half_turns ? -1.0 : 1.0;
  return w.top_coefficient() * sign * std::pow(M_PI, -0.5 * n);
}

AntisymMatrix::AntisymMatrix(RealMatrix a) : a_(std::move(a)) {
  if (a_.rows() != a_.cols())
    throw InputError("antisymmetric matrix: not square");
  for (Eigen::Index i = 0; i < a_.rows(); ++i)
    for (Eigen::Index j = 0; j < a_.cols(); ++j) {
      if (!std::isfinite(a_(i, j)))
        throw InputError("antisymmetric matrix: non-finite entry");
      if (a_(i, j) != -a_(j, i))
        throw InputError(
            "antisymmetric matrix: a(i,j) == -a(j,i) violated exactly at (" +
            std::to_string(i) + "," + std::to_string(j) + ")");
    }
}

namespace {

double pfaffian_expand(const RealMatrix& a, std::vector<int>& alive) {
  const std::size_t m = alive.size();
  if (m == 0) return 1.0;
  // Expansion along the first surviving row.
  const int i0 = alive[0];
  double acc = 0.0;
  for (std::size_t j = 1; j < m; ++j) {
    const double aij = a(i0, alive[j]);
    if (aij == 0.0) continue;
    std::vector<int> rest;
    rest.reserve(m - 2);
    for (std::size_t k = 1; k < m; ++k)
      if (k != j) rest.push_back(alive[k]);
    const double sign = (j % 2 == 1) ? 1.0 : -1.0;
    acc += sign * aij * pfaffian_expand(a, rest);
  }
  return acc;
}

}  // namespace

double pfaffian(const AntisymMatrix& a) {
  const int n = a.dim();
  if (n % 2 != 0) return 0.0;
  std::vector<int> alive(n);
  for (int i = 0; i < n; ++i) alive[i] = i;
  return pfaffian_expand(a.mat(), alive);
}

double pfaffian_berezin(const AntisymMatrix& a) {
  const int n = a.dim();
  if (n % 2 != 0) return 0.0;
  Multivector adot(n);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      adot.add_term((1u << i) | (1u << j), Scalar(a.mat()(i, j), 0.0));
  const Multivector integrand = Multivector::exp_even(adot * Scalar(-0.5, 0.0));
  const Scalar value = berezin_integral(integrand) *
                       std::pow(2.0 * M_PI, 0.5 * n);
  return value.real();
}

double psi_dim_one(double y) {
  if (!(y != 0.0) || !std::isfinite(y))
    throw InputError("psi_dim_one: undefined at y == 0");
  return y > 0.0 ? -0.5 : 0.5;
}

}  // namespace torsion
