#pragma once
// Finite cochain complexes with graded Hermitian metrics.
//
// The engine computes Hodge-style cohomology (harmonic representatives per
// degree), transports the metric from the complex to the determinant line of
// its cohomology via the canonical element of an acyclic complex, builds the
// long exact sequence of a filtered pair with explicit zig-zag connecting
// maps, and fuses determinant-line metrics along a filtration.
//
// Metric bookkeeping is done on log-norms throughout; raw products of norms
// are never formed.

#include "torsion/algebra.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace torsion {

// One Hermitian positive-definite metric per degree.
struct GradedMetric {
  std::vector<GramMetric> g;

  static GradedMetric identity(const std::vector<int>& dims);
  int degrees() const { return static_cast<int>(g.size()); }
  const GramMetric& at(int k) const;
};

// Cochain complex 0 -> C^0 -> ... -> C^m -> 0. diffs[k] maps degree k to
// degree k+1 and has shape dims[k+1] x dims[k]. d_{k+1} d_k = 0 is validated
// at construction up to 1e-12 relative to the factor norms.
class CochainComplex {
 public:
  CochainComplex(std::vector<int> dims, std::vector<Matrix> diffs);

  int degrees() const { return static_cast<int>(dims_.size()); }
  int dim(int k) const;
  const std::vector<int>& dims() const { return dims_; }
  // Differential out of degree k, for 0 <= k < degrees() - 1.
  const Matrix& diff(int k) const;
  int total_dim() const;

 private:
  std::vector<int> dims_;
  std::vector<Matrix> diffs_;
};

// Harmonic (metric-orthonormal) cocycle representatives per degree.
struct CohomologyReport {
  std::vector<int> betti;
  std::vector<Matrix> representatives;  // dims[k] x betti[k], g-orthonormal
};

// A metric on the determinant line of a graded cohomology, recorded as the
// log-norm of a reference generator (the alternating wedge of the harmonic
// basis) together with a formal description of that generator.
struct MetricedDetLine {
  std::string generator;
  std::vector<int> betti;
  double log_norm = 0.0;
};

CohomologyReport cohomology(const CochainComplex& c, const GradedMetric& g,
                            double tol = kDefaultTol);

// log of the norm of the canonical element of an acyclic complex: the
// alternating product over degrees of the Gram norms of
// (images of degree-(k-1) lifts, degree-k lifts). Lift-independent. Optional
// explicit lifts (original coordinates, one matrix per degree with rank(d_k)
// columns) override the default choice of the d_k row space.
double canonical_element_log_norm(
    const CochainComplex& c, const GradedMetric& g, double tol = kDefaultTol,
    const std::vector<Matrix>* lifts = nullptr);

double canonical_element_norm(const CochainComplex& c, const GradedMetric& g,
                              double tol = kDefaultTol);

// Metric on det H(c) transported from (c, g) through the canonical
// isomorphism between the determinant line of the complex and that of its
// cohomology: the harmonic-basis generator receives the torsion of the
// orthogonal complement of the harmonic subspaces.
MetricedDetLine det_metric(const CochainComplex& c, const GradedMetric& g,
                           const CohomologyReport& report,
                           double tol = kDefaultTol);
MetricedDetLine det_metric(const CochainComplex& c, const GradedMetric& g,
                           double tol = kDefaultTol);

// Cochain complex with a level assignment per basis vector such that the
// span of levels >= p is a subcomplex for every p: a nonzero differential
// entry d[i,j] requires level(i) >= level(j). Structurally forbidden entries
// must be exactly zero (no tolerance), which every producer in this codebase
// guarantees.
class FilteredComplex {
 public:
  FilteredComplex(CochainComplex c, std::vector<std::vector<int>> levels,
                  int n_levels = -1);

  const CochainComplex& complex() const { return c_; }
  int levels() const { return n_levels_; }
  int level(int degree, int index) const;

  // Indices (ascending) of degree-k basis vectors with level in [lo, hi).
  std::vector<int> slots(int degree, int lo, int hi) const;
  // Subquotient complex spanned by levels in [lo, hi); same degree layout.
  CochainComplex range(int lo, int hi) const;
  GradedMetric range_metric(const GradedMetric& ambient, int lo,
                            int hi) const;

 private:
  CochainComplex c_;
  std::vector<std::vector<int>> levels_;
  int n_levels_;
};

// Long exact sequence of 0 -> [mid,hi) -> [lo,hi) -> [lo,mid) -> 0,
// materialized as an acyclic complex whose degree-(3i), (3i+1), (3i+2) terms
// are H^i(sub), H^i(total), H^i(quotient) in Euclidean harmonic coordinates
// (with respect to the ambient metric restricted to each range).
CochainComplex les_of_split(const FilteredComplex& f,
                            const GradedMetric& ambient, int lo, int mid,
                            int hi, double tol = kDefaultTol);

// The pair at level p: sub = levels >= p inside the full complex.
CochainComplex les_of_pair(const FilteredComplex& f,
                           const GradedMetric& ambient, int p,
                           double tol = kDefaultTol);

// Combine determinant-line metrics through a long exact sequence: the fused
// log-norm is sub + quot + the torsion of the LES complex. Throws InputError
// when the Betti bookkeeping of the lines does not match the LES terms and
// NumericalError when the LES fails to be acyclic.
MetricedDetLine fuse(const MetricedDetLine& sub_line,
                     const MetricedDetLine& quot_line, const CochainComplex& les,
                     double tol = kDefaultTol);

// Association tree over the leaf pieces [0, N): either a leaf or a split
// point with two subtrees. fold_filtration uses the left comb by default.
using SplitChooser = std::function<int(int lo, int hi)>;

// Fold the filtration: leaves are det_metric of the level pieces under the
// supplied per-level metrics; internal nodes fuse through the LES of the
// corresponding range split. Returns the metriced determinant line of the
// total cohomology.
MetricedDetLine fold_filtration(const FilteredComplex& f,
                                const std::vector<GradedMetric>& piece_metrics,
                                double tol = kDefaultTol,
                                const SplitChooser& chooser = nullptr);

// Re-fold under `trials` random association orders (seeded) and return the
// maximum absolute deviation of the resulting log-norms from the default
// fold.
double fusion_order_invariance_check(
    const FilteredComplex& f, const std::vector<GradedMetric>& piece_metrics,
    int trials, std::uint64_t seed, double tol = kDefaultTol);

// Ambient block-diagonal metric on the total complex assembled from
// per-level piece metrics.
GradedMetric assemble_ambient_metric(
    const FilteredComplex& f, const std::vector<GradedMetric>& piece_metrics);

}  // namespace torsion
