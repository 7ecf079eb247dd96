#include "torsion/flow.hpp"

#include <algorithm>
#include <set>
#include <utility>

namespace torsion {
namespace {

Matrix inverse_of(const Matrix& m, const std::string& what) {
  Eigen::FullPivLU<Matrix> lu(m);
  if (!lu.isInvertible()) throw InputError(what + " is not invertible");
  return lu.inverse();
}

const FixedPointDatum* as_fixed(const CriticalElement& e) {
  return std::get_if<FixedPointDatum>(&e);
}
const ClosedOrbitDatum* as_orbit(const CriticalElement& e) {
  return std::get_if<ClosedOrbitDatum>(&e);
}

std::string element_id(const CriticalElement& e) {
  if (const auto* x = as_fixed(e)) return x->id;
  return as_orbit(e)->id;
}

// Degrees in which the element contributes slots: (q) for a fixed point of
// index q, (q, q+1) for an orbit.
std::pair<int, int> occupied_degrees(const CriticalElement& e) {
  if (const auto* x = as_fixed(e)) return {x->index, x->index};
  const auto* o = as_orbit(e);
  return {o->index, o->index + 1};
}

int slot_count(const CriticalElement& e, int degree, int rank) {
  const auto [lo, hi] = occupied_degrees(e);
  return (degree >= lo && degree <= hi) ? rank : 0;
}

// One GradedMetric per level: the declared fiber gram on a fixed point's
// degree, Euclidean elsewhere (orbit pieces carry their normalization
// through det_metric of the two-term complex, which needs no extra data).
std::vector<GradedMetric> piece_metrics_for(
    const std::vector<CriticalElement>& elements, const FilteredComplex& f) {
  const int K = f.complex().degrees();
  std::vector<GradedMetric> out;
  out.reserve(elements.size());
  for (int p = 0; p < static_cast<int>(elements.size()); ++p) {
    GradedMetric gm;
    gm.g.resize(K);
    for (int k = 0; k < K; ++k) {
      const int n = static_cast<int>(f.slots(k, p, p + 1).size());
      const auto* x = as_fixed(elements[p]);
      if (x && k == x->index)
        gm.g[k] = x->gram;
      else
        gm.g[k] = GramMetric::identity(n);
    }
    out.push_back(std::move(gm));
  }
  return out;
}

// Per-level slot offsets for the block-diagonal model of a split system.
struct DiagonalLayout {
  std::vector<int> dims;                    // per degree
  std::vector<std::vector<int>> start;      // [level][degree] -> first slot
  std::vector<std::vector<int>> levels;     // per degree, level per slot
};

DiagonalLayout diagonal_layout(const std::vector<CriticalElement>& elements,
                               int rank, int degrees) {
  DiagonalLayout lay;
  lay.dims.assign(degrees, 0);
  lay.start.assign(elements.size(), std::vector<int>(degrees, 0));
  lay.levels.resize(degrees);
  for (int p = 0; p < static_cast<int>(elements.size()); ++p)
    for (int k = 0; k < degrees; ++k) {
      const int n = slot_count(elements[p], k, rank);
      lay.start[p][k] = lay.dims[k];
      lay.dims[k] += n;
      lay.levels[k].insert(lay.levels[k].end(), n, p);
    }
  return lay;
}

FilteredComplex synthesize_diagonal_model(
    const std::vector<CriticalElement>& elements, int rank, int degrees) {
  const DiagonalLayout lay = diagonal_layout(elements, rank, degrees);
  std::vector<Matrix> diffs(degrees > 0 ? degrees - 1 : 0);
  for (int k = 0; k + 1 < degrees; ++k)
    diffs[k] = Matrix::Zero(lay.dims[k + 1], lay.dims[k]);
  for (int p = 0; p < static_cast<int>(elements.size()); ++p) {
    const auto* o = as_orbit(elements[p]);
    if (!o) continue;
    const int q = o->index;
    const Matrix block =
        inverse_of(o->atilde(), "orbit '" + o->id + "' holonomy") -
        Matrix::Identity(rank, rank);
    diffs[q].block(lay.start[p][q + 1], lay.start[p][q], rank, rank) = block;
  }
  return FilteredComplex(CochainComplex(lay.dims, std::move(diffs)),
                         lay.levels, static_cast<int>(elements.size()));
}

FilteredComplex resolve_model(const MorseSmaleSystem& sys,
                              const std::string& op) {
  if (sys.chain_model()) return *sys.chain_model();
  if (sys.split())
    return synthesize_diagonal_model(sys.elements(), sys.rank(),
                                     sys.degree_span());
  throw InputError(op + " requires a chain model or a split system");
}

const SurgeryDatum& surgery_datum_for(const ClosedOrbitDatum& o, int rank,
                                      const SurgeryMap& surgery) {
  const auto it = surgery.find(o.id);
  if (it == surgery.end())
    throw InputError("missing surgery datum for orbit '" + o.id + "'");
  const SurgeryDatum& s = it->second;
  if (s.tau_prime.rows() != rank || s.tau_prime.cols() != rank)
    throw InputError("surgery map for orbit '" + o.id +
                     "' does not match the bundle rank");
  require_finite(s.tau_prime, "surgery map");
  if (std::abs(s.n_a) != 1 || std::abs(s.n_a_prime) != 1)
    throw InputError("surgery attaching signs for orbit '" + o.id +
                     "' must be +1 or -1");
  if (s.n_a * s.n_a_prime != -o.twist)
    throw InputError("surgery signs for orbit '" + o.id +
                     "' violate n(a) n(a') = -twist");
  if (s.gram_x.dim() != rank || s.gram_x_prime.dim() != rank)
    throw InputError("surgery fiber metrics for orbit '" + o.id +
                     "' do not match the bundle rank");
  return s;
}

void check_surgery_keys(const std::vector<CriticalElement>& elements,
                        const SurgeryMap& surgery) {
  std::set<std::string> orbit_ids;
  for (const auto& e : elements)
    if (const auto* o = as_orbit(e)) orbit_ids.insert(o->id);
  for (const auto& [id, unused] : surgery)
    if (!orbit_ids.count(id))
      throw InputError("surgery datum refers to unknown orbit '" + id + "'");
}

struct SurgeryParts {
  std::vector<CriticalElement> elements;
  FilteredComplex model;
  std::vector<Matrix> phi;  // one change of cochain coordinates per degree
};

// Conjugate the base model by the map that is the identity except
// M = -n(a') tau(a')^{-1} on the upper-degree slots of every orbit, then
// split each orbit level into two consecutive levels (x' below x). The
// conjugated in-level orbit block M (atilde^{-1} - 1) becomes
// n(a) tau(a)^{-1} + n(a') tau(a')^{-1} with tau(a) = holonomy tau(a'),
// which is the differential of the replacement fixed-point pair.
SurgeryParts build_surgery(const MorseSmaleSystem& sys,
                           const FilteredComplex& base,
                           const SurgeryMap& surgery) {
  const int rank = sys.rank();
  const auto& elements = sys.elements();
  const int L = static_cast<int>(elements.size());
  const CochainComplex& c = base.complex();
  const int K = c.degrees();
  check_surgery_keys(elements, surgery);

  std::vector<int> newbase(L);
  int orbits_before = 0;
  for (int p = 0; p < L; ++p) {
    newbase[p] = p + orbits_before;
    if (as_orbit(elements[p])) ++orbits_before;
  }

  SurgeryParts parts{
      {},
      base,  // placeholder; replaced below
      {}};
  parts.phi.resize(K);
  std::vector<Matrix> phi_inv(K);
  for (int k = 0; k < K; ++k) {
    parts.phi[k] = Matrix::Identity(c.dim(k), c.dim(k));
    phi_inv[k] = Matrix::Identity(c.dim(k), c.dim(k));
  }

  std::vector<std::vector<int>> new_levels(K);
  for (int k = 0; k < K; ++k) new_levels[k].assign(c.dim(k), 0);

  for (int p = 0; p < L; ++p) {
    const auto* o = as_orbit(elements[p]);
    for (int k = 0; k < K; ++k)
      for (int idx : base.slots(k, p, p + 1)) new_levels[k][idx] = newbase[p];
    if (!o) {
      parts.elements.push_back(elements[p]);
      continue;
    }
    const SurgeryDatum& s = surgery_datum_for(*o, rank, surgery);
    const int q = o->index;
    const double sgn = -static_cast<double>(s.n_a_prime);
    const Matrix m =
        sgn * inverse_of(s.tau_prime, "surgery map for orbit '" + o->id + "'");
    const Matrix m_inv = sgn * s.tau_prime;
    const std::vector<int> rows = base.slots(q + 1, p, p + 1);
    for (int i = 0; i < rank; ++i)
      for (int j = 0; j < rank; ++j) {
        parts.phi[q + 1](rows[i], rows[j]) = m(i, j);
        phi_inv[q + 1](rows[i], rows[j]) = m_inv(i, j);
      }
    for (int idx : rows) new_levels[q + 1][idx] = newbase[p] + 1;
    parts.elements.push_back(
        FixedPointDatum{o->id + "/x'", q, s.gram_x_prime});
    parts.elements.push_back(
        FixedPointDatum{o->id + "/x", q + 1, s.gram_x});
  }

  std::vector<Matrix> diffs(K > 0 ? K - 1 : 0);
  for (int k = 0; k + 1 < K; ++k)
    diffs[k] = parts.phi[k + 1] * c.diff(k) * phi_inv[k];
  parts.model = FilteredComplex(CochainComplex(c.dims(), std::move(diffs)),
                                new_levels, L + orbits_before);
  return parts;
}

}  // namespace

Matrix ClosedOrbitDatum::effective_holonomy() const {
  if (!reverse_orientation) return holonomy;
  return inverse_of(holonomy, "orbit '" + id + "' holonomy");
}

Matrix ClosedOrbitDatum::atilde() const {
  return static_cast<double>(twist) * effective_holonomy();
}

MorseSmaleSystem::MorseSmaleSystem(int rank,
                                   std::vector<CriticalElement> elements,
                                   std::optional<FilteredComplex> chain_model,
                                   bool split, double tol)
    : rank_(rank),
      elements_(std::move(elements)),
      model_(std::move(chain_model)),
      split_(split) {
  if (rank_ < 1) throw InputError("bundle rank must be positive");
  if (elements_.empty()) throw InputError("system has no critical elements");

  std::set<std::string> ids;
  for (const auto& e : elements_) {
    const std::string id = element_id(e);
    if (id.empty()) throw InputError("critical element id must be nonempty");
    if (!ids.insert(id).second)
      throw InputError("duplicate critical element id '" + id + "'");
    if (const auto* x = as_fixed(e)) {
      if (x->index < 0)
        throw InputError("fixed point '" + id + "' has negative index");
      if (x->gram.dim() != rank_)
        throw InputError("fiber metric at '" + id +
                         "' does not match the bundle rank");
    } else {
      const auto* o = as_orbit(e);
      if (o->index < 0)
        throw InputError("orbit '" + id + "' has negative index");
      if (!(o->period > 0.0))
        throw InputError("orbit '" + id + "' must have positive period");
      if (o->twist != 1 && o->twist != -1)
        throw InputError("orbit '" + id + "' twist must be +1 or -1");
      if (o->holonomy.rows() != rank_ || o->holonomy.cols() != rank_)
        throw InputError("orbit '" + id +
                         "' holonomy does not match the bundle rank");
      require_finite(o->holonomy, "orbit holonomy");
      (void)inverse_of(o->holonomy, "orbit '" + id + "' holonomy");
    }
  }

  if (!model_) return;

  const int L = levels();
  if (model_->levels() != L)
    throw InputError("chain model has " + std::to_string(model_->levels()) +
                     " levels, system declares " + std::to_string(L) +
                     " critical elements");
  const CochainComplex& c = model_->complex();
  const int K = c.degrees();
  if (K < degree_span())
    throw InputError("chain model does not cover the degrees of the system");

  for (int p = 0; p < L; ++p) {
    const CriticalElement& e = elements_[p];
    for (int k = 0; k < K; ++k) {
      const int want = slot_count(e, k, rank_);
      const int have = static_cast<int>(model_->slots(k, p, p + 1).size());
      if (want != have)
        throw InputError("model does not realize the element at level " +
                         std::to_string(p) + ": degree " + std::to_string(k) +
                         " has " + std::to_string(have) + " slots, expected " +
                         std::to_string(want));
    }
    if (const auto* o = as_orbit(e)) {
      const int q = o->index;
      const Matrix expected =
          inverse_of(o->atilde(), "orbit '" + o->id + "' holonomy") -
          Matrix::Identity(rank_, rank_);
      const auto rows = model_->slots(q + 1, p, p + 1);
      const auto cols = model_->slots(q, p, p + 1);
      Matrix block(rank_, rank_);
      for (int i = 0; i < rank_; ++i)
        for (int j = 0; j < rank_; ++j)
          block(i, j) = c.diff(q)(rows[i], cols[j]);
      if ((block - expected).norm() >
          10.0 * tol * std::max(1.0, expected.norm()))
        throw InputError("model does not realize the element at level " +
                         std::to_string(p) +
                         ": orbit differential block mismatch");
    }
  }

  if (split_) {
    for (int k = 0; k + 1 < K; ++k) {
      const Matrix& d = c.diff(k);
      for (int i = 0; i < d.rows(); ++i)
        for (int j = 0; j < d.cols(); ++j)
          if (d(i, j) != Scalar(0.0) &&
              model_->level(k + 1, i) != model_->level(k, j))
            throw InputError(
                "split system carries a cross-level differential block at "
                "degree " +
                std::to_string(k));
    }
  }
}

int MorseSmaleSystem::element_index(int level) const {
  if (level < 0 || level >= levels())
    throw InputError("level out of range");
  const auto [lo, hi] = occupied_degrees(elements_[level]);
  (void)hi;
  return lo;
}

int MorseSmaleSystem::degree_span() const {
  int span = 0;
  for (const auto& e : elements_)
    span = std::max(span, occupied_degrees(e).second + 1);
  return span;
}

FilteredComplex diagonal_chain_model(
    const std::vector<CriticalElement>& elements, int rank, int degrees) {
  if (rank < 1) throw InputError("bundle rank must be positive");
  if (elements.empty()) throw InputError("system has no critical elements");
  return synthesize_diagonal_model(elements, rank, degrees);
}

CochainComplex orbit_piece(const ClosedOrbitDatum& o, int rank) {
  if (rank < 1) throw InputError("bundle rank must be positive");
  if (o.holonomy.rows() != rank || o.holonomy.cols() != rank)
    throw InputError("orbit '" + o.id +
                     "' holonomy does not match the bundle rank");
  const int q = o.index;
  if (q < 0) throw InputError("orbit '" + o.id + "' has negative index");
  std::vector<int> dims(q + 2, 0);
  dims[q] = rank;
  dims[q + 1] = rank;
  std::vector<Matrix> diffs(q + 1);
  for (int k = 0; k < q; ++k) diffs[k] = Matrix::Zero(dims[k + 1], dims[k]);
  diffs[q] = inverse_of(o.atilde(), "orbit '" + o.id + "' holonomy") -
             Matrix::Identity(rank, rank);
  return CochainComplex(std::move(dims), std::move(diffs));
}

MetricedDetLine orbit_line_metric(const ClosedOrbitDatum& o, int rank,
                                  double tol) {
  const CochainComplex piece = orbit_piece(o, rank);
  MetricedDetLine line =
      det_metric(piece, GradedMetric::identity(piece.dims()), tol);
  line.generator = "sigma[" + o.id + "]";
  return line;
}

MetricedDetLine fixed_point_line(const FixedPointDatum& x, int rank) {
  if (x.gram.dim() != rank)
    throw InputError("fiber metric at '" + x.id +
                     "' does not match the bundle rank");
  if (x.index < 0)
    throw InputError("fixed point '" + x.id + "' has negative index");
  MetricedDetLine line;
  line.generator = "detF[" + x.id + "]";
  line.betti.assign(x.index + 1, 0);
  line.betti[x.index] = rank;
  line.log_norm = (x.index % 2 == 0 ? 0.5 : -0.5) * x.gram.log_det();
  return line;
}

MetricedDetLine milnor_metric(const MorseSmaleSystem& sys, double tol) {
  if (sys.chain_model()) {
    const FilteredComplex& f = *sys.chain_model();
    return fold_filtration(f, piece_metrics_for(sys.elements(), f), tol);
  }
  if (!sys.split())
    throw InputError("milnor metric requires a chain model or a split system");
  MetricedDetLine total;
  total.betti.assign(sys.degree_span(), 0);
  std::string gen;
  for (const auto& e : sys.elements()) {
    MetricedDetLine piece;
    if (const auto* x = as_fixed(e))
      piece = fixed_point_line(*x, sys.rank());
    else
      piece = orbit_line_metric(*as_orbit(e), sys.rank(), tol);
    for (int k = 0; k < static_cast<int>(piece.betti.size()); ++k)
      total.betti[k] += piece.betti[k];
    total.log_norm += piece.log_norm;
    if (!gen.empty()) gen += " (x) ";
    gen += piece.generator;
  }
  total.generator = gen;
  return total;
}

MorseSmaleSystem franks_surgery(const MorseSmaleSystem& sys,
                                const SurgeryMap& surgery, double tol) {
  const FilteredComplex base = resolve_model(sys, "surgery");
  SurgeryParts parts = build_surgery(sys, base, surgery);
  return MorseSmaleSystem(sys.rank(), std::move(parts.elements),
                          std::move(parts.model), false, tol);
}

double franks_comparison_rhs(const MorseSmaleSystem& sys,
                             const SurgeryMap& surgery) {
  check_surgery_keys(sys.elements(), surgery);
  double rhs = 0.0;
  for (const auto& e : sys.elements()) {
    const auto* o = as_orbit(e);
    if (!o) continue;
    const SurgeryDatum& s = surgery_datum_for(*o, sys.rank(), surgery);
    const double sign = (o->index % 2 == 0) ? 1.0 : -1.0;
    rhs += sign * (2.0 * log_abs_det(s.tau_prime) + s.gram_x_prime.log_det() -
                   s.gram_x.log_det());
  }
  return rhs;
}

FranksComparison compare_milnor(const MorseSmaleSystem& sys,
                                const SurgeryMap& surgery, double tol) {
  const FilteredComplex base = resolve_model(sys, "surgery comparison");
  const std::vector<GradedMetric> metrics_v =
      piece_metrics_for(sys.elements(), base);
  SurgeryParts parts = build_surgery(sys, base, surgery);
  const MorseSmaleSystem surgered(sys.rank(), parts.elements, parts.model,
                                  false, tol);
  const std::vector<GradedMetric> metrics_f =
      piece_metrics_for(surgered.elements(), parts.model);

  const MetricedDetLine line_v = fold_filtration(base, metrics_v, tol);
  const MetricedDetLine line_f = fold_filtration(parts.model, metrics_f, tol);
  if (line_v.betti != line_f.betti)
    throw NumericalError("surgery changed cohomology: Betti numbers differ");

  // Both folds report the norm of their own harmonic generator. Transport
  // the base generator through the conjugation and express it in the
  // surgered harmonic basis; the change of coordinates enters the
  // determinant line with alternating exponents.
  const GradedMetric gv = assemble_ambient_metric(base, metrics_v);
  const GradedMetric gf = assemble_ambient_metric(parts.model, metrics_f);
  const CohomologyReport rv = cohomology(base.complex(), gv, tol);
  const CohomologyReport rf = cohomology(parts.model.complex(), gf, tol);
  double corr = 0.0;
  for (int k = 0; k < base.complex().degrees(); ++k) {
    if (rv.betti[k] == 0) continue;
    const Matrix mapped = parts.phi[k] * rv.representatives[k];
    const Matrix coords =
        rf.representatives[k].adjoint() * gf.at(k).gram() * mapped;
    corr += (k % 2 == 0 ? 1.0 : -1.0) * log_abs_det(coords);
  }

  FranksComparison cmp;
  cmp.lhs = 2.0 * (line_f.log_norm + corr - line_v.log_norm);
  cmp.rhs = franks_comparison_rhs(sys, surgery);
  cmp.residual = std::abs(cmp.lhs - cmp.rhs);
  return cmp;
}

}  // namespace torsion
