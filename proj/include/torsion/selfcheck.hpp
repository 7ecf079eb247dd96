#pragma once

// Self-verification suites: every identity the library computes through its
// main code paths is recomputed here through an independent route (closed
// forms, direct determinant arithmetic, quadrature, winding numbers) and the
// two are compared over randomized inputs. The headline suites are the
// acceptance gates; the property suites pin finer behavioral contracts
// (scaling laws, conjugation invariance, symmetry, oracle agreement).

#include <cstdint>
#include <string>
#include <vector>

#include "torsion/algebra.hpp"
#include "torsion/rs_circle.hpp"
#include "torsion/zeta.hpp"

namespace torsion {

// ---------------------------------------------------------------------------
// Oracles: independent recomputations that share no intermediate steps with
// the library paths they are checked against.

// Norm of the wedge of the matrix columns under g, evaluated by expanding
// the wedge product of the whitened columns in the exterior algebra and
// summing squared coefficients -- never forming the Gram matrix of pairings.
double wedge_oracle_log_norm(const Matrix& vectors, const GramMetric& g);

// Signed multiplicity of s0 as the winding number of the zeta product along
// a circle of the given radius around s0. The radius must separate s0 from
// every other zero/pole.
int winding_order_oracle(const ZetaSpec& spec, Scalar s0, double radius,
                         int samples = 720);

// The one-dimensional vertical Gaussian integral evaluated by Simpson
// quadrature of the substituted exterior-algebra integrand; accurate to well
// under 1e-6 for |y| >= 0.25.
double psi_quadrature_oracle(double y);

// Central finite-difference s-derivative of the Hurwitz zeta value.
Scalar hurwitz_fd_derivative(Scalar s, double a, double h = 1e-5,
                             HurwitzParams p = {});

// ---------------------------------------------------------------------------
// Check harness.

struct CheckResult {
  std::string name;
  bool pass = false;
  double worst = 0.0;   // worst deviation observed across the suite
  double budget = 0.0;  // the deviation allowed
  std::string detail;   // one-line description of what was exercised
};

// The eight headline suites, in fixed order, at their full case counts.
// Deterministic for a fixed seed.
std::vector<CheckResult> run_headline_checks(std::uint64_t seed);

// The finer-grained property suites. Deterministic for a fixed seed.
std::vector<CheckResult> run_property_checks(std::uint64_t seed);

// Headline suites followed by property suites.
std::vector<CheckResult> run_selfcheck(std::uint64_t seed);

bool all_pass(const std::vector<CheckResult>& results);

// Fixed-width text table with one row per result and a final verdict line;
// byte-deterministic for fixed results.
std::string render_check_table(const std::vector<CheckResult>& results);

}  // namespace torsion
