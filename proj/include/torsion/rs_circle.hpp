#pragma once
// Zeta-regularized spectral torsion on the circle with unitary holonomy.
//
// The twisted flat Laplacian on the circle bundle sector with phase
// alpha in (0,1) has spectrum {4 pi^2 (k + alpha)^2 : k integer}, so its
// spectral zeta function is
//   zeta_D(s) = (4 pi^2)^{-s} [zeta_H(2s, alpha) + zeta_H(2s, 1 - alpha)]
// with zeta_H the Hurwitz zeta function, evaluated by Euler-Maclaurin with
// term-wise analytic s-derivatives. The regularized determinant
// exp(-zeta_D'(0)) must come out as 4 sin^2(pi alpha), and the squared
// spectral norm of the canonical generator, prod_j det^{-1} over the phase
// sectors, must match the squared combinatorial norm |det(1 - A^{-1})|^{-2}
// of the rank-one rotation system carrying the same holonomy.

#include "torsion/flow.hpp"

#include <vector>

namespace torsion {

struct HurwitzParams {
  int m = 50;  // Euler-Maclaurin cut index, >= 10
  int k = 6;   // Bernoulli correction depth, in [2, 8]
};

struct HurwitzResult {
  Scalar value = Scalar(0.0, 0.0);
  Scalar deriv = Scalar(0.0, 0.0);  // d/ds
};

// zeta_H(s, a) = sum_{k>=0} (k+a)^{-s} continued via Euler-Maclaurin:
// truncated sum + (M+a)^{1-s}/(s-1) + (M+a)^{-s}/2 + Bernoulli corrections.
// Accuracy ~1e-10 for |s| <= 4 at the default parameters. a in (0, 1].
HurwitzResult hurwitz_zeta(Scalar s, double a, HurwitzParams p = {});

// Holonomy phases of a unitary circle bundle: eigenvalues e^{2 pi i alpha_j}
// with alpha_j in [0, 1), sorted. Phase 0 marks a harmonic (non-acyclic)
// sector.
class CircleRSSpec {
 public:
  // Validates ||A* A - I|| < 1e-10.
  static CircleRSSpec from_unitary(const Matrix& a);
  // Phases must lie in [0, 1); the holonomy is synthesized as the diagonal
  // unitary with those phases.
  static CircleRSSpec from_phases(std::vector<double> phases);

  int rank() const { return static_cast<int>(phases_.size()); }
  const std::vector<double>& phases() const { return phases_; }
  const Matrix& holonomy() const { return holonomy_; }

 private:
  std::vector<double> phases_;
  Matrix holonomy_;
};

// exp(-zeta_D'(0)) for one phase sector; equals 4 sin^2(pi alpha)
// analytically. alpha in (0, 1).
double log_zeta_reg_det(double alpha, HurwitzParams p = {});
double zeta_reg_det(double alpha, HurwitzParams p = {});

// log ||1||^{RS,2} = -sum_j log det_zeta(alpha_j) over the phase sectors.
// Errors when a phase-0 (harmonic) sector is present.
double rs_log_norm_sq_circle(const CircleRSSpec& spec, HurwitzParams p = {});
double rs_norm_sq_circle(const CircleRSSpec& spec, HurwitzParams p = {});

struct BzCircleCheck {
  double log_rs_sq = 0.0;      // spectral side
  double log_milnor_sq = 0.0;  // combinatorial side, via the rotation system
  double residual = 0.0;
};

// Compare the spectral norm with the combinatorial norm of the one-orbit
// rotation system (index 0, untwisted, holonomy A). The two sides share no
// code: one runs Hurwitz zeta sums, the other determinant-line folding.
BzCircleCheck bz_check_circle(const CircleRSSpec& spec, HurwitzParams p = {},
                              double tol = kDefaultTol);

}  // namespace torsion
