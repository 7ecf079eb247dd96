#include "torsion/rs_circle.hpp"

#include <algorithm>
#include <cmath>

namespace torsion {
namespace {

constexpr double kPi = 3.1415926535897932384626433832795;

// B_2, B_4, ..., B_16.
constexpr double kBernoulli[8] = {1.0 / 6.0,      -1.0 / 30.0, 1.0 / 42.0,
                                  -1.0 / 30.0,    5.0 / 66.0,  -691.0 / 2730.0,
                                  7.0 / 6.0,      -3617.0 / 510.0};

void validate_params(const HurwitzParams& p) {
  if (p.m < 10) throw InputError("Hurwitz cut index must be at least 10");
  if (p.k < 2 || p.k > 8)
    throw InputError("Hurwitz correction depth must lie in [2, 8]");
}

Scalar cpow(double base, Scalar expo) {
  return std::exp(expo * std::log(base));  // base > 0
}

}  // namespace

HurwitzResult hurwitz_zeta(Scalar s, double a, HurwitzParams p) {
  validate_params(p);
  if (!(a > 0.0) || a > 1.0)
    throw InputError("Hurwitz parameter must lie in (0, 1]");
  if (!is_finite(s)) throw InputError("Hurwitz argument must be finite");
  if (std::abs(s - Scalar(1.0, 0.0)) < 1e-12)
    throw InputError("Hurwitz zeta has a pole at s = 1");

  HurwitzResult r;
  for (int j = 0; j < p.m; ++j) {
    const double base = j + a;
    const double lg = std::log(base);
    const Scalar term = cpow(base, -s);
    r.value += term;
    r.deriv += -lg * term;
  }

  const double x = p.m + a;
  const double lx = std::log(x);
  const Scalar sm1 = s - Scalar(1.0, 0.0);
  const Scalar tail = cpow(x, Scalar(1.0, 0.0) - s) / sm1;
  r.value += tail;
  r.deriv += tail * (-lx - Scalar(1.0, 0.0) / sm1);
  const Scalar half = 0.5 * cpow(x, -s);
  r.value += half;
  r.deriv += -lx * half;

  // Corrections B_{2j}/(2j)! * s(s+1)...(s+2j-2) * x^{-s-2j+1}, with the
  // rising factorial and the power differentiated term by term.
  double fact = 1.0;  // (2j)!
  for (int j = 1; j <= p.k; ++j) {
    fact *= (2.0 * j - 1.0) * (2.0 * j);
    Scalar rising(1.0, 0.0), rising_d(0.0, 0.0);
    for (int l = 0; l <= 2 * j - 2; ++l) {
      const Scalar f = s + static_cast<double>(l);
      rising_d = rising_d * f + rising;
      rising = rising * f;
    }
    const Scalar pw = cpow(x, -s - Scalar(2.0 * j - 1.0, 0.0));
    const double coef = kBernoulli[j - 1] / fact;
    r.value += coef * rising * pw;
    r.deriv += coef * (rising_d - rising * lx) * pw;
  }
  return r;
}

CircleRSSpec CircleRSSpec::from_unitary(const Matrix& a) {
  if (a.rows() != a.cols() || a.rows() == 0)
    throw InputError("circle holonomy must be a nonempty square matrix");
  require_finite(a, "circle holonomy");
  const Matrix defect =
      a.adjoint() * a - Matrix::Identity(a.rows(), a.cols());
  if (defect.norm() >= 1e-10)
    throw InputError("circle holonomy is not unitary");
  Eigen::ComplexEigenSolver<Matrix> es(a, false);
  if (es.info() != Eigen::Success)
    throw NumericalError("eigenvalue computation failed for circle holonomy");
  CircleRSSpec spec;
  spec.holonomy_ = a;
  for (int i = 0; i < es.eigenvalues().size(); ++i) {
    double alpha = std::arg(es.eigenvalues()(i)) / (2.0 * kPi);
    if (alpha < 0.0) alpha += 1.0;
    if (alpha >= 1.0) alpha -= 1.0;
    if (std::min(alpha, 1.0 - alpha) < 1e-12) alpha = 0.0;
    spec.phases_.push_back(alpha);
  }
  std::sort(spec.phases_.begin(), spec.phases_.end());
  return spec;
}

CircleRSSpec CircleRSSpec::from_phases(std::vector<double> phases) {
  if (phases.empty()) throw InputError("phase list must be nonempty");
  CircleRSSpec spec;
  for (double alpha : phases)
    if (!(alpha >= 0.0) || alpha >= 1.0)
      throw InputError("holonomy phases must lie in [0, 1)");
  std::sort(phases.begin(), phases.end());
  spec.phases_ = std::move(phases);
  const int r = static_cast<int>(spec.phases_.size());
  spec.holonomy_ = Matrix::Zero(r, r);
  for (int i = 0; i < r; ++i)
    spec.holonomy_(i, i) =
        std::exp(Scalar(0.0, 2.0 * kPi * spec.phases_[i]));
  return spec;
}

double log_zeta_reg_det(double alpha, HurwitzParams p) {
  if (!(alpha > 0.0) || !(alpha < 1.0))
    throw InputError(
        "regularized determinant needs a phase in (0, 1): phase 0 carries a "
        "zero mode");
  const Scalar zero(0.0, 0.0);
  const HurwitzResult za = hurwitz_zeta(zero, alpha, p);
  const HurwitzResult zb = hurwitz_zeta(zero, 1.0 - alpha, p);
  // zeta_D(s) = (4 pi^2)^{-s} [zeta_H(2s, alpha) + zeta_H(2s, 1-alpha)];
  // d/ds at 0 = -log(4 pi^2) (values) + 2 (derivatives).
  const Scalar deriv0 = -std::log(4.0 * kPi * kPi) * (za.value + zb.value) +
                        2.0 * (za.deriv + zb.deriv);
  return -deriv0.real();
}

double zeta_reg_det(double alpha, HurwitzParams p) {
  return std::exp(log_zeta_reg_det(alpha, p));
}

double rs_log_norm_sq_circle(const CircleRSSpec& spec, HurwitzParams p) {
  double acc = 0.0;
  for (double alpha : spec.phases()) {
    if (alpha == 0.0)
      throw InputError(
          "circle complex is not acyclic: a unit eigenvalue (phase 0) sector "
          "is present");
    acc -= log_zeta_reg_det(alpha, p);
  }
  return acc;
}

double rs_norm_sq_circle(const CircleRSSpec& spec, HurwitzParams p) {
  return std::exp(rs_log_norm_sq_circle(spec, p));
}

BzCircleCheck bz_check_circle(const CircleRSSpec& spec, HurwitzParams p,
                              double tol) {
  BzCircleCheck out;
  out.log_rs_sq = rs_log_norm_sq_circle(spec, p);
  ClosedOrbitDatum rotation{"rotation", 0, 1.0, 1, spec.holonomy(), false};
  const MetricedDetLine line = orbit_line_metric(rotation, spec.rank(), tol);
  for (int b : line.betti)
    if (b != 0)
      throw NumericalError(
          "rotation system is not acyclic despite nonzero phases");
  out.log_milnor_sq = 2.0 * line.log_norm;
  out.residual = std::abs(out.log_rs_sq - out.log_milnor_sq);
  return out;
}

}  // namespace torsion
