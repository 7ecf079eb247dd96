#pragma once
// Morse-Smale flow data and the metrics it induces on the determinant line
// of total twisted cohomology.
//
// A system is an ordered list of critical elements (nondegenerate fixed
// points and closed orbits) of a flow carrying a rank-r flat bundle. Each
// element owns one filtration level. A fixed point contributes its fiber in
// degree ind with a declared Gram metric; a closed orbit contributes the
// two-term complex C^r -> C^r in degrees (ind, ind+1) with differential
// atilde^{-1} - 1, atilde = twist * holonomy, carrying the metric that gives
// the image of the canonical generator of its determinant line norm one.
// Folding these pieces through the long exact sequences of an optional
// filtered chain model (or tensoring directly when the system splits)
// produces the Milnor-style metric.
//
// Surgery replaces each closed orbit by a pair of fixed points joined by a
// differential block n(a) tau(a)^{-1} + n(a') tau(a')^{-1}; the comparison of
// the two metrics on a common generator equals an explicit local formula in
// the tau data.

#include "torsion/complex.hpp"

#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace torsion {

struct FixedPointDatum {
  std::string id;
  int index = 0;     // Morse index
  GramMetric gram;   // fiber metric at the point, r x r
};

struct ClosedOrbitDatum {
  std::string id;
  int index = 0;                     // orbit index
  double period = 1.0;               // primitive period, > 0
  int twist = 1;                     // +1 untwisted / -1 twisted unstable bundle
  Matrix holonomy;                   // r x r, invertible
  bool reverse_orientation = false;  // traverse the orbit backwards

  // Holonomy along the declared orientation.
  Matrix effective_holonomy() const;
  // twist * effective holonomy; drives the two-term orbit complex.
  Matrix atilde() const;
};

using CriticalElement = std::variant<FixedPointDatum, ClosedOrbitDatum>;

// Data attached to one orbit for surgery: the comparison map tau(a') along
// the surviving curve, the two attaching signs with n_a * n_a' = -twist, and
// the fiber metrics at the two replacement fixed points.
struct SurgeryDatum {
  Matrix tau_prime;
  int n_a = 1;
  int n_a_prime = -1;
  GramMetric gram_x;        // at x (index ind+1)
  GramMetric gram_x_prime;  // at x' (index ind)
};

using SurgeryMap = std::map<std::string, SurgeryDatum>;

class MorseSmaleSystem {
 public:
  // elements are listed in filtration order, one level each. A chain model,
  // when present, must realize every element: a fixed point of index q owns
  // exactly r slots in degree q at its level; an orbit owns r slots in each
  // of degrees (q, q+1) and its in-level differential block must equal
  // atilde^{-1} - 1. `split` asserts there are no cross-level blocks.
  MorseSmaleSystem(int rank, std::vector<CriticalElement> elements,
                   std::optional<FilteredComplex> chain_model, bool split,
                   double tol = kDefaultTol);

  int rank() const { return rank_; }
  int levels() const { return static_cast<int>(elements_.size()); }
  const std::vector<CriticalElement>& elements() const { return elements_; }
  const std::optional<FilteredComplex>& chain_model() const { return model_; }
  bool split() const { return split_; }

  // Morse index of the element at a level; orbits report their orbit index.
  int element_index(int level) const;
  // Number of degrees spanned by the elements (max occupied degree + 1).
  int degree_span() const;

 private:
  int rank_;
  std::vector<CriticalElement> elements_;
  std::optional<FilteredComplex> model_;
  bool split_;
};

// Two-term complex of a closed orbit in degrees (ind, ind+1).
CochainComplex orbit_piece(const ClosedOrbitDatum& o, int rank);

// Block-diagonal chain model of a split system: each level owns the slots of
// its element in the element's occupied degrees, and the only nonzero
// differential blocks are the in-level orbit blocks atilde^{-1} - 1. This is
// the model milnor_metric synthesizes for a split system; exposed so model
// producers can start from it.
FilteredComplex diagonal_chain_model(
    const std::vector<CriticalElement>& elements, int rank, int degrees);

// Determinant line of the orbit piece with the normalization that the image
// of the canonical generator of the piece's determinant line has norm one;
// computed as det_metric of the piece under Euclidean metrics.
MetricedDetLine orbit_line_metric(const ClosedOrbitDatum& o, int rank,
                                  double tol = kDefaultTol);

// (det fiber)^{(-1)^ind}: log-norm (-1)^ind * (1/2) * log det gram.
MetricedDetLine fixed_point_line(const FixedPointDatum& x, int rank);

// The Milnor-style metric on det H of the total complex: fold the chain
// model with the per-level piece metrics, or tensor the piece lines when the
// system splits. Reports Betti numbers through the returned line.
MetricedDetLine milnor_metric(const MorseSmaleSystem& sys,
                              double tol = kDefaultTol);

// Replace every orbit by the fixed-point pair (x' at ind, x at ind + 1
// on consecutive levels) with differential block
// n(a) tau(a)^{-1} + n(a') tau(a')^{-1}, tau(a) = holonomy * tau(a').
// A split system without a chain model gets the diagonal model synthesized
// first. Every orbit must have a surgery datum.
MorseSmaleSystem franks_surgery(const MorseSmaleSystem& sys,
                                const SurgeryMap& surgery,
                                double tol = kDefaultTol);

// Local side of the comparison:
// sum_gamma (-1)^{ind} [ 2 log|det tau(a')| + log det gram_x' - log det gram_x ].
double franks_comparison_rhs(const MorseSmaleSystem& sys,
                             const SurgeryMap& surgery);

struct FranksComparison {
  double lhs = 0.0;       // log ratio of the squared metrics on a common generator
  double rhs = 0.0;       // local tau formula
  double residual = 0.0;  // |lhs - rhs|
};

// Evaluate both squared Milnor metrics on the same reference generator of
// the total determinant line (the surgery conjugation identifies the two
// cohomologies) and compare with the local formula. The two code paths are
// disjoint: the lhs runs the fold machinery, the rhs only determinant
// arithmetic on the surgery data.
FranksComparison compare_milnor(const MorseSmaleSystem& sys,
                                const SurgeryMap& surgery,
                                double tol = kDefaultTol);

}  // namespace torsion
