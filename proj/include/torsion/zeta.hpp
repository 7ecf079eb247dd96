#pragma once
// Dynamical zeta function of the closed orbits: the finite product
//   R(s) = prod_orbits det(1 - twist * rho^{-1} e^{-s l})^{(-1)^{ind}},
// its order at a point, the lattice of all zeros and poles, and the identity
// relating |R(0)| to the Milnor-style norm of a fixed-point-free system.
//
// Convention: rho^{-1} appears because the cochain models are duals of chain
// models; each factor's eigenvalues are mu^{-1} for mu in the spectrum of
// atilde = twist * rho.

#include "torsion/flow.hpp"

#include <vector>

namespace torsion {

struct ZetaOrbit {
  double length = 1.0;  // positive
  int index = 0;
  int twist = 1;      // +1 or -1
  Matrix holonomy;    // effective (orientation already applied), invertible
};

struct ZetaSpec {
  int rank = 1;
  std::vector<ZetaOrbit> orbits;
};

// Extract the orbit data of a system (fixed points are ignored); orientation
// flags are folded into the holonomy.
ZetaSpec zeta_spec_of(const MorseSmaleSystem& sys);

// Value of R at a point, as the leading Laurent coefficient plus the signed
// multiplicity. order == 0: R(s) = leading. order > 0: R has a zero of that
// order and R(s) = 0; leading is the coefficient of (s - s0)^order.
// order < 0: pole marker; leading is the coefficient of (s - s0)^order.
struct ZetaValue {
  int order = 0;
  Scalar leading = Scalar(1.0, 0.0);
  double log_abs_leading = 0.0;
  bool is_pole() const { return order < 0; }
  bool is_zero() const { return order > 0; }
};

// Evaluate the product. Eigenvalue factors 1 - mu^{-1} e^{-s l} smaller than
// tol in modulus are counted into the order and replaced by their first
// s-derivative l mu^{-1} e^{-s l} in the leading coefficient.
ZetaValue ruelle_eval(const ZetaSpec& spec, Scalar s, double tol = 1e-8);

// Signed multiplicity of s0: +1 per matching eigenvalue at even index, -1 at
// odd. A factor with modulus in [tol, 10 tol) is ambiguous and throws
// NumericalError("ill-conditioned order ...").
int order_at(const ZetaSpec& spec, Scalar s0, double tol = 1e-8);

struct ZetaPoint {
  Scalar s;
  int order = 0;
};

// All zeros/poles inside [re_lo, re_hi] x [im_lo, im_hi]: per orbit and per
// eigenvalue mu of atilde they form the vertical lattice
// s = -(Log mu + 2 pi i k) / l. Coincident locations (within 1e-9) merge by
// summing signed orders; net-zero points are dropped. Sorted by (Re, Im).
std::vector<ZetaPoint> zeros_poles_in_rect(const ZetaSpec& spec, double re_lo,
                                           double re_hi, double im_lo,
                                           double im_hi);

struct PropCheck {
  double log_milnor = 0.0;        // log ||1||^M of the acyclic system
  double log_zeta_inverse = 0.0;  // -log |R(0)|
  double residual = 0.0;          // |difference|
};

// The identity ||1||^M = |R(0)|^{-1} for a system with no fixed points whose
// every orbit satisfies the acyclicity hypothesis (1 is not an eigenvalue of
// twist * rho). Both sides are computed through independent code paths.
PropCheck check_prop(const MorseSmaleSystem& sys, double tol = kDefaultTol);

}  // namespace torsion
