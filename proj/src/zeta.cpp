#include "torsion/zeta.hpp"

#include <algorithm>
#include <cmath>

namespace torsion {
namespace {

void validate_spec(const ZetaSpec& spec) {
  if (spec.rank < 1) throw InputError("bundle rank must be positive");
  for (const auto& o : spec.orbits) {
    if (!(o.length > 0.0)) throw InputError("orbit length must be positive");
    if (o.twist != 1 && o.twist != -1)
      throw InputError("orbit twist must be +1 or -1");
    if (o.holonomy.rows() != spec.rank || o.holonomy.cols() != spec.rank)
      throw InputError("orbit holonomy does not match the bundle rank");
    require_finite(o.holonomy, "orbit holonomy");
  }
}

Vector atilde_eigenvalues(const ZetaOrbit& o) {
  const Matrix a = static_cast<double>(o.twist) * o.holonomy;
  Eigen::ComplexEigenSolver<Matrix> es(a, false);
  if (es.info() != Eigen::Success)
    throw NumericalError("eigenvalue computation failed for an orbit");
  for (int i = 0; i < es.eigenvalues().size(); ++i)
    if (std::abs(es.eigenvalues()(i)) < 1e-14)
      throw InputError("orbit holonomy is not invertible");
  return es.eigenvalues();
}

}  // namespace

ZetaSpec zeta_spec_of(const MorseSmaleSystem& sys) {
  ZetaSpec spec;
  spec.rank = sys.rank();
  for (const auto& e : sys.elements())
    if (const auto* o = std::get_if<ClosedOrbitDatum>(&e))
      spec.orbits.push_back(
          {o->period, o->index, o->twist, o->effective_holonomy()});
  return spec;
}

ZetaValue ruelle_eval(const ZetaSpec& spec, Scalar s, double tol) {
  validate_spec(spec);
  if (!is_finite(s)) throw InputError("zeta evaluation point must be finite");
  ZetaValue out;
  Scalar log_acc(0.0, 0.0);
  for (const auto& o : spec.orbits) {
    const int eps = (o.index % 2 == 0) ? 1 : -1;
    const Scalar decay = std::exp(-s * o.length);
    const Vector mu = atilde_eigenvalues(o);
    for (int i = 0; i < mu.size(); ++i) {
      const Scalar f = Scalar(1.0, 0.0) - decay / mu(i);
      if (std::abs(f) < tol) {
        out.order += eps;
        log_acc += static_cast<double>(eps) *
                   std::log(o.length * decay / mu(i));
      } else {
        log_acc += static_cast<double>(eps) * std::log(f);
      }
    }
  }
  out.leading = std::exp(log_acc);
  out.log_abs_leading = log_acc.real();
  return out;
}

int order_at(const ZetaSpec& spec, Scalar s0, double tol) {
  validate_spec(spec);
  if (!is_finite(s0)) throw InputError("zeta evaluation point must be finite");
  int order = 0;
  for (const auto& o : spec.orbits) {
    const int eps = (o.index % 2 == 0) ? 1 : -1;
    const Scalar decay = std::exp(-s0 * o.length);
    const Vector mu = atilde_eigenvalues(o);
    for (int i = 0; i < mu.size(); ++i) {
      const double f = std::abs(Scalar(1.0, 0.0) - decay / mu(i));
      if (f < tol) {
        order += eps;
      } else if (f < 10.0 * tol) {
        throw NumericalError(
            "ill-conditioned order: an eigenvalue factor falls in the guard "
            "band [tol, 10 tol) at the requested point");
      }
    }
  }
  return order;
}

std::vector<ZetaPoint> zeros_poles_in_rect(const ZetaSpec& spec, double re_lo,
                                           double re_hi, double im_lo,
                                           double im_hi) {
  validate_spec(spec);
  if (!(re_lo <= re_hi) || !(im_lo <= im_hi))
    throw InputError("zero/pole search rectangle is empty or not finite");
  constexpr double kTwoPi = 6.283185307179586476925286766559;
  std::vector<ZetaPoint> raw;
  for (const auto& o : spec.orbits) {
    const int eps = (o.index % 2 == 0) ? 1 : -1;
    const Vector mu = atilde_eigenvalues(o);
    for (int i = 0; i < mu.size(); ++i) {
      // e^{-s l} = mu  <=>  s = -(Log mu + 2 pi i k) / l, k integer: one
      // vertical line of solutions per eigenvalue.
      const double re = -std::log(std::abs(mu(i))) / o.length;
      if (re < re_lo - 1e-12 || re > re_hi + 1e-12) continue;
      const double arg = std::arg(mu(i));
      const double k_lo = (-im_hi * o.length - arg) / kTwoPi;
      const double k_hi = (-im_lo * o.length - arg) / kTwoPi;
      for (long k = static_cast<long>(std::floor(k_lo)) - 1;
           k <= static_cast<long>(std::ceil(k_hi)) + 1; ++k) {
        const double im = -(arg + kTwoPi * static_cast<double>(k)) / o.length;
        if (im < im_lo - 1e-12 || im > im_hi + 1e-12) continue;
        raw.push_back({Scalar(re, im), eps});
      }
    }
  }
  std::sort(raw.begin(), raw.end(), [](const ZetaPoint& a, const ZetaPoint& b) {
    if (a.s.real() != b.s.real()) return a.s.real() < b.s.real();
    return a.s.imag() < b.s.imag();
  });
  std::vector<ZetaPoint> merged;
  for (const auto& p : raw) {
    if (!merged.empty() && std::abs(merged.back().s - p.s) < 1e-9)
      merged.back().order += p.order;
    else
      merged.push_back(p);
  }
  merged.erase(std::remove_if(merged.begin(), merged.end(),
                              [](const ZetaPoint& p) { return p.order == 0; }),
               merged.end());
  return merged;
}

PropCheck check_prop(const MorseSmaleSystem& sys, double tol) {
  for (const auto& e : sys.elements())
    if (const auto* x = std::get_if<FixedPointDatum>(&e))
      throw InputError("hypothesis violated: system has a fixed point ('" +
                       x->id + "')");
  const ZetaSpec spec = zeta_spec_of(sys);
  for (std::size_t j = 0; j < spec.orbits.size(); ++j) {
    const Vector mu = atilde_eigenvalues(spec.orbits[j]);
    for (int i = 0; i < mu.size(); ++i)
      if (std::abs(mu(i) - Scalar(1.0, 0.0)) <= 100.0 * tol)
        throw InputError(
            "hypothesis violated: the twist is an eigenvalue of the holonomy "
            "for orbit '" +
            std::get<ClosedOrbitDatum>(sys.elements()[j]).id + "'");
  }

  const MetricedDetLine line = milnor_metric(sys, tol);
  for (int b : line.betti)
    if (b != 0)
      throw NumericalError(
          "system is not acyclic despite the eigenvalue hypothesis");
  const ZetaValue r0 = ruelle_eval(spec, Scalar(0.0, 0.0));
  if (r0.order != 0)
    throw NumericalError(
        "zeta vanishes at s = 0 despite the eigenvalue hypothesis");

  PropCheck out;
  out.log_milnor = line.log_norm;
  out.log_zeta_inverse = -r0.log_abs_leading;
  out.residual = std::abs(out.log_milnor - out.log_zeta_inverse);
  return out;
}

}  // namespace torsion
