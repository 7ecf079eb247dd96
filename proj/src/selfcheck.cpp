#include "torsion/selfcheck.hpp"

#include <Eigen/Eigenvalues>

#include <bit>
#include <cmath>
#include <cstdio>
#include <limits>
#include <utility>

#include "torsion/complex.hpp"
#include "torsion/flow.hpp"
#include "torsion/random_gen.hpp"

namespace torsion {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

// ---------------------------------------------------------------------------
// Oracles.

double wedge_oracle_log_norm(const Matrix& vectors, const GramMetric& g) {
  const int n = static_cast<int>(vectors.rows());
  const int k = static_cast<int>(vectors.cols());
  if (g.dim() != n)
    throw InputError("wedge oracle: metric dimension does not match vectors");
  if (n > 20) throw InputError("wedge oracle: too many generators");
  if (k == 0) return 0.0;
  Multivector w = Multivector::scalar(n, Scalar(1.0, 0.0));
  for (int j = 0; j < k; ++j)
    w = w.wedge(Multivector::from_vector(g.whitener() * vectors.col(j)));
  double sq = 0.0;
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask)
    if (std::popcount(mask) == k) sq += std::norm(w.coefficient(mask));
  return 0.5 * std::log(sq);
}

int winding_order_oracle(const ZetaSpec& spec, Scalar s0, double radius,
                         int samples) {
  if (!(radius > 0)) throw InputError("winding oracle: radius must be positive");
  if (samples < 8) throw InputError("winding oracle: too few samples");
  // Factors on the circle stay far above this cutoff whenever the radius
  // separates s0 from every other zero/pole, so no factor is miscounted.
  const double tiny = 1e-13;
  double total = 0.0;
  double prev = 0.0;
  for (int j = 0; j <= samples; ++j) {
    const double theta = 2.0 * kPi * j / samples;
    const Scalar s = s0 + radius * Scalar(std::cos(theta), std::sin(theta));
    const ZetaValue v = ruelle_eval(spec, s, tiny);
    if (v.order != 0)
      throw NumericalError(
          "winding oracle: sample point sits on a zero or pole");
    const double a = std::arg(v.leading);
    if (j > 0) total += std::remainder(a - prev, 2.0 * kPi);
    prev = a;
  }
  return static_cast<int>(std::lround(total / (2.0 * kPi)));
}

double psi_quadrature_oracle(double y) {
  // One-dimensional slice of the vertical Gaussian integral: the T-integrand
  // evaluated through the exterior-algebra machinery, substituted T = u^2 to
  // remove the endpoint singularity, then Simpson on [eps, U]. The omitted
  // mass on [0, eps] is below eps in magnitude.
  const auto beta = [y](double t) {
    Multivector a = Multivector::scalar(1, Scalar(-t * y * y, 0.0));
    Multivector w =
        Multivector::generator(1, 0) * Scalar(y / (2.0 * std::sqrt(t)), 0.0);
    return berezin_integral(w.wedge(Multivector::exp_even(a))).real();
  };
  const double eps = 1e-8;
  const double upper = 40.0 / std::max(0.25, std::abs(y));
  const int n = 20000;
  const double h = (upper - eps) / n;
  double acc = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double u = eps + i * h;
    const double f = beta(u * u) * 2.0 * u;
    const double w = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
    acc += w * f;
  }
  return acc * h / 3.0;
}

Scalar hurwitz_fd_derivative(Scalar s, double a, double h, HurwitzParams p) {
  const Scalar plus = hurwitz_zeta(s + Scalar(h, 0.0), a, p).value;
  const Scalar minus = hurwitz_zeta(s - Scalar(h, 0.0), a, p).value;
  return (plus - minus) / Scalar(2.0 * h, 0.0);
}

// ---------------------------------------------------------------------------
// Harness.

namespace {

class Suite {
 public:
  Suite(std::string name, double budget) {
    r_.name = std::move(name);
    r_.budget = budget;
  }
  void observe(double dev) { r_.worst = std::max(r_.worst, std::abs(dev)); }
  void require(bool ok) {
    if (!ok) hard_fail_ = true;
  }
  CheckResult finish(std::string detail) {
    r_.detail = std::move(detail);
    r_.pass = !hard_fail_ && r_.worst < r_.budget;
    if (hard_fail_) r_.detail += " [structural mismatch]";
    return r_;
  }

 private:
  CheckResult r_;
  bool hard_fail_ = false;
};

template <typename F>
CheckResult guarded(const char* name, double budget, F&& body) {
  try {
    return body();
  } catch (const std::exception& e) {
    CheckResult r;
    r.name = name;
    r.budget = budget;
    r.pass = false;
    r.worst = std::numeric_limits<double>::infinity();
    r.detail = std::string("exception: ") + e.what();
    return r;
  }
}

double real_gaussian(Rng& rng) { return rng.gaussian().real(); }

RealMatrix random_real_matrix(Rng& rng, int rows, int cols) {
  RealMatrix m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m(i, j) = real_gaussian(rng);
  return m;
}

RealMatrix antisymmetrize(const RealMatrix& m) {
  return 0.5 * (m - m.transpose());
}

CochainComplex direct_sum(const CochainComplex& a, const CochainComplex& b) {
  std::vector<int> dims(a.degrees());
  for (int k = 0; k < a.degrees(); ++k) dims[k] = a.dim(k) + b.dim(k);
  std::vector<Matrix> diffs;
  for (int k = 0; k + 1 < a.degrees(); ++k) {
    Matrix d = Matrix::Zero(dims[k + 1], dims[k]);
    d.topLeftCorner(a.dim(k + 1), a.dim(k)) = a.diff(k);
    d.bottomRightCorner(b.dim(k + 1), b.dim(k)) = b.diff(k);
    diffs.push_back(std::move(d));
  }
  return CochainComplex(std::move(dims), std::move(diffs));
}

GradedMetric direct_sum_metric(const GradedMetric& a, const GradedMetric& b) {
  GradedMetric out;
  for (int k = 0; k < a.degrees(); ++k) {
    const int na = a.at(k).dim();
    const int nb = b.at(k).dim();
    Matrix gram = Matrix::Zero(na + nb, na + nb);
    gram.topLeftCorner(na, na) = a.at(k).gram();
    gram.bottomRightCorner(nb, nb) = b.at(k).gram();
    out.g.emplace_back(std::move(gram));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Headline suites.

CheckResult headline_circle_norm(std::uint64_t seed) {
  return guarded("circle-norm-identity", 1e-9, [seed] {
    Suite s("circle-norm-identity", 1e-9);
    Rng rng(seed ^ 0xA1);
    for (int i = 0; i < 200; ++i) {
      const int r = rng.uniform_int(1, 4);
      const Matrix a = random_gapped_invertible(rng, r, 0.1);
      ClosedOrbitDatum o;
      o.id = "g";
      o.index = 0;
      o.period = 1.0;
      o.twist = 1;
      o.holonomy = a;
      const MetricedDetLine line = orbit_line_metric(o, r);
      for (int b : line.betti) s.require(b == 0);
      const double closed =
          -log_abs_det(Matrix::Identity(r, r) - a.inverse());
      s.observe(line.log_norm - closed);
    }
    return s.finish("200 one-orbit lines, rank <= 4, spectral gap 0.1");
  });
}

CheckResult headline_orbit_zeta(std::uint64_t seed) {
  return guarded("orbit-zeta-identity", 1e-10, [seed] {
    Suite s("orbit-zeta-identity", 1e-10);
    Rng rng(seed ^ 0xA2);
    for (int i = 0; i < 100; ++i)
      s.observe(check_prop(random_pure_orbit_system(rng, 5, 4, 0.1)).residual);
    return s.finish("100 pure-orbit systems, <= 5 orbits, rank <= 4");
  });
}

CheckResult headline_fusion_order(std::uint64_t seed) {
  return guarded("fusion-order-independence", 1e-9, [seed] {
    Suite s("fusion-order-independence", 1e-9);
    Rng rng(seed ^ 0xA3);
    for (int i = 0; i < 50; ++i) {
      RandomFiltered rf =
          random_filtered_complex(rng, 4, rng.uniform_int(3, 4), 4);
      s.observe(fusion_order_invariance_check(rf.filtered, rf.piece_metrics,
                                              10, seed * 1000 + i));
    }
    return s.finish("50 four-level filtered complexes x 10 fold orders");
  });
}

CheckResult headline_surgery(std::uint64_t seed) {
  return guarded("surgery-comparison", 1e-9, [seed] {
    Suite s("surgery-comparison", 1e-9);
    Rng rng(seed ^ 0xA4);
    for (int i = 0; i < 100; ++i) {
      SurgeryModel m = random_surgery_system(rng);
      s.observe(compare_milnor(m.system, m.surgery).residual);
    }
    return s.finish("100 systems with surgery data, <= 3 orbits, rank <= 3");
  });
}

CheckResult headline_rs_circle(std::uint64_t seed) {
  return guarded("rs-circle-agreement", 1e-8, [seed] {
    Suite s("rs-circle-agreement", 1e-8);
    Rng rng(seed ^ 0xA5);
    for (int i = 0; i < 50; ++i) {
      const int r = rng.uniform_int(1, 4);
      const Matrix a = random_gapped_unitary(rng, r, 0.01);
      s.observe(bz_check_circle(CircleRSSpec::from_unitary(a)).residual);
    }
    for (int i = 1; i <= 9; ++i) {
      const double alpha = 0.1 * i;
      const double exact = 4.0 * std::pow(std::sin(kPi * alpha), 2);
      s.observe((zeta_reg_det(alpha) - exact) / exact);
    }
    return s.finish("50 unitary holonomies, rank <= 4, + 9 closed-form sectors");
  });
}

CheckResult headline_pfaffian(std::uint64_t seed) {
  return guarded("pfaffian-identities", 1e-9, [seed] {
    Suite s("pfaffian-identities", 1e-9);
    Rng rng(seed ^ 0xA6);
    for (int i = 0; i < 100; ++i) {
      const int n = 2 * (1 + i % 3);
      const RealMatrix a = antisymmetrize(random_real_matrix(rng, n, n));
      const AntisymMatrix am(a);
      const double p = pfaffian(am);
      const double d = a.determinant();
      s.observe((p * p - d) / std::max(1.0, std::abs(d)));
      s.observe((p - pfaffian_berezin(am)) / std::max(1.0, std::abs(p)));
      if (n <= 4) {
        const RealMatrix b = random_real_matrix(rng, n, n);
        const RealMatrix c = antisymmetrize(b * a * b.transpose());
        const double lhs = pfaffian(AntisymMatrix(c));
        const double rhs = b.determinant() * p;
        s.observe((lhs - rhs) / std::max(1.0, std::abs(rhs)));
      }
    }
    for (int n : {1, 3, 5}) {
      const RealMatrix a = antisymmetrize(random_real_matrix(rng, n, n));
      s.observe(pfaffian(AntisymMatrix(a)));
    }
    return s.finish("100 cases n in {2,4,6}: square, transform, slow path, odd");
  });
}

CheckResult headline_psi(std::uint64_t seed) {
  (void)seed;
  return guarded("vertical-gaussian-closed-form", 1e-6, [] {
    Suite s("vertical-gaussian-closed-form", 1e-6);
    for (double y : {0.5, -0.5, 1.0, -1.0, 2.0, -2.0}) {
      const double closed = y > 0 ? -0.5 : 0.5;
      s.observe(psi_quadrature_oracle(y) - closed);
      s.observe(psi_dim_one(y) - closed);
    }
    return s.finish("quadrature vs closed form at y in {+-0.5, +-1, +-2}");
  });
}

CheckResult headline_multiplicativity(std::uint64_t seed) {
  return guarded("torsion-multiplicativity-lifts", 1e-9, [seed] {
    Suite s("torsion-multiplicativity-lifts", 1e-9);
    Rng rng(seed ^ 0xA8);
    for (int i = 0; i < 200; ++i) {
      const int degs = rng.uniform_int(2, 4);
      const CochainComplex c1 = random_acyclic_complex(rng, degs, 3);
      const GradedMetric g1 = random_graded_metric(rng, c1.dims());
      const double t1 = canonical_element_log_norm(c1, g1);
      const auto lifts = random_lifts(rng, c1);
      s.observe(t1 - canonical_element_log_norm(c1, g1, kDefaultTol, &lifts));
      if (i % 2 == 0) {
        const CochainComplex c2 = random_acyclic_complex(rng, degs, 3);
        const GradedMetric g2 = random_graded_metric(rng, c2.dims());
        const double t2 = canonical_element_log_norm(c2, g2);
        s.observe(canonical_element_log_norm(direct_sum(c1, c2),
                                             direct_sum_metric(g1, g2)) -
                  (t1 + t2));
      }
    }
    return s.finish("200 acyclic complexes: lift overrides + direct sums");
  });
}

// ---------------------------------------------------------------------------
// Property suites.

CheckResult property_metric_scaling(std::uint64_t seed) {
  return guarded("metric-scaling", 1e-10, [seed] {
    Suite s("metric-scaling", 1e-10);
    Rng rng(seed ^ 0xB1);
    for (int i = 0; i < 100; ++i) {
      const CochainComplex c =
          random_acyclic_complex(rng, rng.uniform_int(2, 4), 3);
      if (c.total_dim() == 0) continue;
      const GradedMetric g = random_graded_metric(rng, c.dims());
      const double base = canonical_element_log_norm(c, g);
      int k = rng.uniform_int(0, c.degrees() - 1);
      while (c.dim(k) == 0) k = (k + 1) % c.degrees();
      const double t = rng.uniform(0.25, 4.0);
      GradedMetric g2 = g;
      g2.g[k] = GramMetric(t * g.at(k).gram());
      const double predicted =
          (k % 2 == 0 ? 1.0 : -1.0) * 0.5 * c.dim(k) * std::log(t);
      s.observe(canonical_element_log_norm(c, g2) - base - predicted);
    }
    return s.finish("100 acyclic complexes, one degree rescaled");
  });
}

CheckResult property_milnor_conjugation(std::uint64_t seed) {
  return guarded("milnor-conjugation-invariance", 1e-9, [seed] {
    Suite s("milnor-conjugation-invariance", 1e-9);
    Rng rng(seed ^ 0xB2);
    for (int i = 0; i < 100; ++i) {
      const MorseSmaleSystem sys = random_pure_orbit_system(rng, 4, 3, 0.1);
      const Matrix conj = random_invertible(rng, sys.rank());
      const Matrix conj_inv = conj.inverse();
      std::vector<CriticalElement> elems = sys.elements();
      for (auto& e : elems) {
        auto& o = std::get<ClosedOrbitDatum>(e);
        o.holonomy = conj * o.holonomy * conj_inv;
      }
      const MorseSmaleSystem sys2(sys.rank(), std::move(elems), std::nullopt,
                                  true);
      s.observe(milnor_metric(sys2).log_norm - milnor_metric(sys).log_norm);
    }
    return s.finish("100 pure-orbit systems under holonomy conjugation");
  });
}

CheckResult property_gram_scaling(std::uint64_t seed) {
  return guarded("gram-scaling-shift", 1e-10, [seed] {
    Suite s("gram-scaling-shift", 1e-10);
    Rng rng(seed ^ 0xB3);
    for (int i = 0; i < 100; ++i) {
      const int r = rng.uniform_int(1, 3);
      const int nf = rng.uniform_int(1, 3);
      std::vector<CriticalElement> elems;
      for (int j = 0; j < nf; ++j) {
        FixedPointDatum x;
        x.id = "p" + std::to_string(j);
        x.index = rng.uniform_int(0, 3);
        x.gram = random_gram(rng, r);
        elems.emplace_back(std::move(x));
      }
      if (rng.coin()) {
        ClosedOrbitDatum o;
        o.id = "g";
        o.index = rng.uniform_int(0, 2);
        o.period = rng.uniform(0.5, 2.0);
        o.twist = rng.coin() ? 1 : -1;
        o.holonomy = random_gapped_invertible(rng, r, 0.05);
        elems.emplace_back(std::move(o));
      }
      const MorseSmaleSystem sys(r, elems, std::nullopt, true);
      const double base = milnor_metric(sys).log_norm;
      const int j = rng.uniform_int(0, nf - 1);
      const double t = rng.uniform(0.3, 3.0);
      auto& x = std::get<FixedPointDatum>(elems[j]);
      const double predicted =
          (x.index % 2 == 0 ? 1.0 : -1.0) * 0.5 * r * std::log(t);
      x.gram = GramMetric(t * x.gram.gram());
      const MorseSmaleSystem sys2(r, std::move(elems), std::nullopt, true);
      s.observe(milnor_metric(sys2).log_norm - base - predicted);
    }
    return s.finish("100 split systems, one fiber metric rescaled");
  });
}

CheckResult property_orientation_reversal(std::uint64_t seed) {
  return guarded("orientation-reversal", 1e-9, [seed] {
    Suite s("orientation-reversal", 1e-9);
    Rng rng(seed ^ 0xB4);
    for (int i = 0; i < 100; ++i) {
      const int r = rng.uniform_int(1, 4);
      ClosedOrbitDatum o;
      o.id = "g";
      o.index = rng.uniform_int(0, 3);
      o.period = rng.uniform(0.5, 2.0);
      o.twist = rng.coin() ? 1 : -1;
      o.holonomy = random_gapped_invertible(rng, r, 0.1);
      o.reverse_orientation = true;
      ClosedOrbitDatum oi = o;
      oi.holonomy = o.holonomy.inverse();
      oi.reverse_orientation = false;
      s.observe((o.effective_holonomy() - oi.holonomy).norm() /
                std::max(1.0, oi.holonomy.norm()));
      s.observe(orbit_line_metric(o, r).log_norm -
                orbit_line_metric(oi, r).log_norm);
      if (o.index % 2 == 0 && o.twist == 1)
        s.observe(orbit_line_metric(o, r).log_norm +
                  log_abs_det(Matrix::Identity(r, r) - o.holonomy));
    }
    return s.finish("100 orbits traversed backwards vs inverted holonomy");
  });
}

CheckResult property_zeta_conjugation(std::uint64_t seed) {
  return guarded("zeta-conjugation-invariance", 1e-9, [seed] {
    Suite s("zeta-conjugation-invariance", 1e-9);
    Rng rng(seed ^ 0xB5);
    int points = 0;
    for (int i = 0; i < 50; ++i) {
      const MorseSmaleSystem sys = random_pure_orbit_system(rng, 4, 3, 0.1);
      const ZetaSpec spec = zeta_spec_of(sys);
      const Matrix conj = random_invertible(rng, spec.rank);
      const Matrix conj_inv = conj.inverse();
      ZetaSpec spec2 = spec;
      for (auto& orb : spec2.orbits)
        orb.holonomy = conj * orb.holonomy * conj_inv;
      for (int j = 0; j < 5; ++j) {
        const Scalar sp(rng.uniform(-2.0, 2.0), rng.uniform(-3.0, 3.0));
        const ZetaValue v1 = ruelle_eval(spec, sp);
        const ZetaValue v2 = ruelle_eval(spec2, sp);
        if (v1.order != 0 || v2.order != 0) continue;
        ++points;
        s.observe(std::abs(v1.leading - v2.leading) /
                  std::max(1.0, std::abs(v1.leading)));
        s.observe(std::log(std::abs(v1.leading)) - v1.log_abs_leading);
        s.observe(std::log(std::abs(v2.leading)) - v2.log_abs_leading);
      }
    }
    return s.finish(std::to_string(points) +
                    " regular points across 50 conjugated systems");
  });
}

CheckResult property_order_winding(std::uint64_t seed) {
  return guarded("order-winding-consistency", 0.5, [seed] {
    Suite s("order-winding-consistency", 0.5);
    Rng rng(seed ^ 0xB6);
    int cases = 0;
    for (int i = 0; i < 40; ++i) {
      const MorseSmaleSystem sys = random_pure_orbit_system(rng, 3, 3, 0.1);
      const ZetaSpec spec = zeta_spec_of(sys);
      const int oi = rng.uniform_int(0, static_cast<int>(spec.orbits.size()) - 1);
      const ZetaOrbit& orb = spec.orbits[oi];
      const Matrix atil = static_cast<double>(orb.twist) * orb.holonomy;
      Eigen::ComplexEigenSolver<Matrix> es(atil);
      const Scalar mu = es.eigenvalues()(rng.uniform_int(0, atil.rows() - 1));
      const int krow = rng.uniform_int(-1, 1);
      const Scalar s0 =
          -(std::log(mu) + Scalar(0.0, 2.0 * kPi * krow)) / orb.length;
      const auto pts =
          zeros_poles_in_rect(spec, s0.real() - 0.7, s0.real() + 0.7,
                              s0.imag() - 0.7, s0.imag() + 0.7);
      int best = -1;
      double best_d = 1e300;
      for (int p = 0; p < static_cast<int>(pts.size()); ++p) {
        const double d = std::abs(pts[p].s - s0);
        if (d < best_d) {
          best_d = d;
          best = p;
        }
      }
      if (best < 0 || best_d > 1e-6) continue;  // net order cancelled away
      double sep = 1e300;
      for (int p = 0; p < static_cast<int>(pts.size()); ++p)
        if (p != best) sep = std::min(sep, std::abs(pts[p].s - pts[best].s));
      const double radius = std::min(0.3, 0.45 * sep);
      if (radius < 2e-3) continue;
      int direct = 0;
      try {
        direct = order_at(spec, pts[best].s);
      } catch (const NumericalError&) {
        continue;  // another factor in the guard band: ambiguous by contract
      }
      ++cases;
      const int wound = winding_order_oracle(spec, pts[best].s, radius);
      s.observe(static_cast<double>(wound - direct));
      s.observe(static_cast<double>(wound - pts[best].order));
      s.require(pts[best].order != 0);
    }
    s.require(cases >= 20);
    return s.finish(std::to_string(cases) +
                    " lattice points: winding vs direct count");
  });
}

CheckResult property_det_zeta_symmetry(std::uint64_t seed) {
  (void)seed;
  return guarded("det-zeta-symmetry", 1e-12, [] {
    Suite s("det-zeta-symmetry", 1e-12);
    double prev = 0.0;
    for (int i = 1; i <= 9; ++i) {
      const double alpha = 0.05 * i;
      s.observe(log_zeta_reg_det(alpha) - log_zeta_reg_det(1.0 - alpha));
      const double v = zeta_reg_det(alpha);
      s.require(v > prev);  // strictly increasing toward alpha = 1/2
      prev = v;
    }
    return s.finish("alpha vs 1-alpha agreement + monotone on (0, 1/2]");
  });
}

CheckResult property_hurwitz_derivative(std::uint64_t seed) {
  (void)seed;
  return guarded("hurwitz-derivative", 1e-7, [] {
    Suite s("hurwitz-derivative", 1e-7);
    const Scalar svals[] = {Scalar(2.0, 0.0),  Scalar(3.5, 0.0),
                            Scalar(-0.5, 0.0), Scalar(0.25, 0.0),
                            Scalar(2.0, 1.0),  Scalar(1.5, -0.7)};
    for (const Scalar& sv : svals)
      for (double a : {0.3, 0.7, 1.0})
        s.observe(std::abs(hurwitz_zeta(sv, a).deriv -
                           hurwitz_fd_derivative(sv, a)));
    return s.finish("18 points: series derivative vs central difference");
  });
}

CheckResult property_rs_conjugation(std::uint64_t seed) {
  return guarded("rs-unitary-conjugation", 1e-9, [seed] {
    Suite s("rs-unitary-conjugation", 1e-9);
    Rng rng(seed ^ 0xB9);
    for (int i = 0; i < 50; ++i) {
      const int r = rng.uniform_int(1, 4);
      const Matrix a = random_gapped_unitary(rng, r, 0.02);
      const Matrix u = random_unitary(rng, r);
      const Matrix b = u * a * u.adjoint();
      s.observe(rs_log_norm_sq_circle(CircleRSSpec::from_unitary(a)) -
                rs_log_norm_sq_circle(CircleRSSpec::from_unitary(b)));
    }
    return s.finish("50 unitary holonomies conjugated, spectral side");
  });
}

CheckResult property_kernel_wedge(std::uint64_t seed) {
  return guarded("kernel-and-wedge", 1e-9, [seed] {
    Suite s("kernel-and-wedge", 1e-9);
    Rng rng(seed ^ 0xBA);
    for (int i = 0; i < 100; ++i) {
      const int n = rng.uniform_int(1, 6);
      const int m = rng.uniform_int(1, 6);
      Matrix d;
      if (rng.coin()) {
        d = random_matrix(rng, m, n);
      } else {
        const int rr = rng.uniform_int(0, std::min(m, n));
        d = rr == 0 ? Matrix(Matrix::Zero(m, n))
                    : Matrix(random_matrix(rng, m, rr) *
                             random_matrix(rng, rr, n));
      }
      const Matrix kb = kernel_basis(d);
      s.require(static_cast<int>(kb.cols()) == n - numerical_rank(d));
      if (kb.cols() > 0) {
        s.observe((d * kb).norm() / std::max(1.0, d.norm()));
        s.observe(
            (kb.adjoint() * kb - Matrix::Identity(kb.cols(), kb.cols()))
                .norm());
      }
      const int k = rng.uniform_int(1, n);
      const Matrix v = random_matrix(rng, n, k);
      const GramMetric g = random_gram(rng, n);
      s.observe(log_wedge_gram_norm(v, g) - wedge_oracle_log_norm(v, g));
    }
    return s.finish("100 kernels (incl. rank-deficient) + 100 wedge norms");
  });
}

}  // namespace

// ---------------------------------------------------------------------------
// Entry points.

std::vector<CheckResult> run_headline_checks(std::uint64_t seed) {
  std::vector<CheckResult> out;
  out.push_back(headline_circle_norm(seed));
  out.push_back(headline_orbit_zeta(seed));
  out.push_back(headline_fusion_order(seed));
  out.push_back(headline_surgery(seed));
  out.push_back(headline_rs_circle(seed));
  out.push_back(headline_pfaffian(seed));
  out.push_back(headline_psi(seed));
  out.push_back(headline_multiplicativity(seed));
  return out;
}

std::vector<CheckResult> run_property_checks(std::uint64_t seed) {
  std::vector<CheckResult> out;
  out.push_back(property_metric_scaling(seed));
  out.push_back(property_milnor_conjugation(seed));
  out.push_back(property_gram_scaling(seed));
  out.push_back(property_orientation_reversal(seed));
  out.push_back(property_zeta_conjugation(seed));
  out.push_back(property_order_winding(seed));
  out.push_back(property_det_zeta_symmetry(seed));
  out.push_back(property_hurwitz_derivative(seed));
  out.push_back(property_rs_conjugation(seed));
  out.push_back(property_kernel_wedge(seed));
  return out;
}

std::vector<CheckResult> run_selfcheck(std::uint64_t seed) {
  std::vector<CheckResult> out = run_headline_checks(seed);
  std::vector<CheckResult> props = run_property_checks(seed);
  out.insert(out.end(), props.begin(), props.end());
  return out;
}

bool all_pass(const std::vector<CheckResult>& results) {
  for (const auto& r : results)
    if (!r.pass) return false;
  return true;
}

std::string render_check_table(const std::vector<CheckResult>& results) {
  std::string out;
  char buf[320];
  std::snprintf(buf, sizeof buf, "%-32s %-4s %-10s %-8s %s\n", "check", "ok",
                "worst", "budget", "detail");
  out += buf;
  out += std::string(100, '-') + "\n";
  int failed = 0;
  for (const auto& r : results) {
    if (!r.pass) ++failed;
    std::snprintf(buf, sizeof buf, "%-32s %-4s %-10.3e %-8.0e %s\n",
                  r.name.c_str(), r.pass ? "PASS" : "FAIL", r.worst, r.budget,
                  r.detail.c_str());
    out += buf;
  }
  out += std::string(100, '-') + "\n";
  if (failed == 0)
    out += "all " + std::to_string(results.size()) + " checks passed\n";
  else
    out += std::to_string(failed) + " of " + std::to_string(results.size()) +
           " checks FAILED\n";
  return out;
}

}  // namespace torsion
