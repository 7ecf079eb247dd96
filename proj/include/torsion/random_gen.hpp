#pragma once
// Deterministic random input generators for the verification suites.
//
// Everything draws from one mt19937_64 stream, so a fixed seed fixes every
// generated object byte for byte. Spectra are assembled directly (rejection
// sampling on the eigenvalues, then a bounded-condition similarity) so the
// suites can demand explicit gaps from the degenerate loci; filtered
// complexes are built level-diagonal and then conjugated by a unit-diagonal
// level-raising map, which keeps the structurally forbidden differential
// entries exactly zero.

#include "torsion/flow.hpp"

#include <cstdint>
#include <random>
#include <vector>

namespace torsion {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  double uniform(double lo, double hi);
  // Inclusive bounds.
  int uniform_int(int lo, int hi);
  bool coin();
  // Standard complex Gaussian (independent N(0, 1/2) parts).
  Scalar gaussian();

 private:
  std::mt19937_64 eng_;
};

// iid complex Gaussian entries.
Matrix random_matrix(Rng& rng, int rows, int cols);

// U1 * diag(s) * U2 with Haar unitaries and singular values in [0.5, 1.5]:
// invertible with condition number at most 3.
Matrix random_invertible(Rng& rng, int n);

// Haar-distributed unitary (QR of a Gaussian matrix with the R-diagonal
// phase fix).
Matrix random_unitary(Rng& rng, int n);

// Invertible matrix whose eigenvalues all satisfy |lambda - 1| >= gap,
// |lambda + 1| >= gap, |lambda| in [0.4, 2.2], and pairwise distance
// >= min(gap, 0.02); conjugated by a bounded-condition similarity.
Matrix random_gapped_invertible(Rng& rng, int n, double gap);

// Unitary whose eigenphases (fractions of a full turn) lie in
// [margin, 1 - margin] with pairwise phase distance >= margin / 2,
// conjugated by a Haar unitary. The spectrum stays away from 1.
Matrix random_gapped_unitary(Rng& rng, int n, double margin);

// Hermitian positive definite with eigenvalues in [0.5, 2].
GramMetric random_gram(Rng& rng, int n);

GradedMetric random_graded_metric(Rng& rng, const std::vector<int>& dims);

// Acyclic complex spanning `degrees` degrees: differential ranks
// r_k in [1, max_rank] drive dims n_k = r_{k-1} + r_k; shift blocks
// conjugated degree-wise by bounded-condition similarities.
CochainComplex random_acyclic_complex(Rng& rng, int degrees, int max_rank);

// Random lift choice for canonical_element_log_norm: per degree,
// (coimage basis) * T + (kernel basis) * S with T invertible, S arbitrary.
std::vector<Matrix> random_lifts(Rng& rng, const CochainComplex& c,
                                 double tol = kDefaultTol);

struct RandomFiltered {
  FilteredComplex filtered;
  std::vector<GradedMetric> piece_metrics;  // one per level
};

// Filtered complex over `levels` levels and `degrees` degrees with at most
// max_dim basis vectors per degree in total. Per-level pieces mix harmonic
// and acyclic summands and are conjugated within their level; the assembled
// block-diagonal total is then conjugated by I + N with N strictly
// level-raising, which adds cross-level blocks without touching the
// in-level ones. Piece metrics are random Grams.
RandomFiltered random_filtered_complex(Rng& rng, int levels, int degrees,
                                       int max_dim);

// Fixed-point-free split system: 1..max_orbits orbits over a common bundle
// rank in [1, max_rank], mixed indices, twists, orientations and periods;
// holonomy spectra bounded away from +-1 by gap (so twist * holonomy never
// has eigenvalue 1 in either orientation).
MorseSmaleSystem random_pure_orbit_system(Rng& rng, int max_orbits,
                                          int max_rank, double gap);

struct SurgeryModel {
  MorseSmaleSystem system;
  SurgeryMap surgery;
};

// System mixing 1..3 closed orbits with 0..2 fixed points over rank 1..3,
// orbit spectra gapped by 0.05, plus consistent surgery data for every
// orbit (random transports and Grams, signs satisfying
// n(a) * n(a') = -twist). Rotates through three model flavors: split with
// no stored model, split with the explicit diagonal model, and a non-split
// model obtained by a level-raising conjugation of the diagonal one.
SurgeryModel random_surgery_system(Rng& rng);

}  // namespace torsion
