#include "torsion/complex.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

namespace torsion {

namespace {

void validate_metric(const CochainComplex& c, const GradedMetric& g) {
  if (g.degrees() != c.degrees())
    throw InputError("graded metric: degree count does not match complex");
  for (int k = 0; k < c.degrees(); ++k)
    if (g.g[k].dim() != c.dim(k))
      throw InputError("graded metric: dimension mismatch at degree " +
                       std::to_string(k));
}

std::string betti_string(const std::vector<int>& betti) {
  std::ostringstream os;
  os << "[";
  for (std::size_t i = 0; i < betti.size(); ++i)
    os << (i ? "," : "") << betti[i];
  os << "]";
  return os.str();
}

std::string generator_descriptor(const std::vector<int>& betti) {
  return "alternating wedge of harmonic bases, betti=" + betti_string(betti);
}

// Whitened differentials: D_k = W_{k+1} d_k W_k^{-1}, so that all Gram
// geometry becomes Euclidean while wedge norms are preserved.
std::vector<Matrix> whiten(const CochainComplex& c, const GradedMetric& g) {
  validate_metric(c, g);
  std::vector<Matrix> d;
  if (c.degrees() < 2) return d;
  d.reserve(c.degrees() - 1);
  for (int k = 0; k + 1 < c.degrees(); ++k)
    d.push_back(g.at(k + 1).whitener() * c.diff(k) *
                g.at(k).whitener_inverse());
  return d;
}

// Coordinates of the columns of v in the g-orthonormal column basis h.
Matrix harmonic_coordinates(const Matrix& h, const GramMetric& g,
                            const Matrix& v) {
  if (h.cols() == 0) return Matrix(0, v.cols());
  return h.adjoint() * g.gram() * v;
}

}  // namespace

GradedMetric GradedMetric::identity(const std::vector<int>& dims) {
  GradedMetric m;
  m.g.reserve(dims.size());
  for (int d : dims) m.g.push_back(GramMetric::identity(d));
  return m;
}

const GramMetric& GradedMetric::at(int k) const {
  if (k < 0 || k >= degrees())
    throw InputError("graded metric: degree out of range");
  return g[k];
}

CochainComplex::CochainComplex(std::vector<int> dims, std::vector<Matrix> diffs)
    : dims_(std::move(dims)), diffs_(std::move(diffs)) {
  if (dims_.empty()) throw InputError("cochain complex: empty degree list");
  for (int d : dims_)
    if (d < 0) throw InputError("cochain complex: negative dimension");
  if (diffs_.size() + 1 != dims_.size())
    throw InputError(
        "cochain complex: expected one differential per consecutive degree "
        "pair");
  for (std::size_t k = 0; k < diffs_.size(); ++k) {
    if (diffs_[k].rows() != dims_[k + 1] || diffs_[k].cols() != dims_[k])
      throw InputError("cochain complex: differential shape mismatch at degree " +
                       std::to_string(k));
    require_finite(diffs_[k], "cochain complex differential");
  }
  for (std::size_t k = 0; k + 1 < diffs_.size(); ++k) {
    if (dims_[k] == 0 || dims_[k + 1] == 0 || dims_[k + 2] == 0) continue;
    const double scale = std::max(1.0, diffs_[k + 1].norm() * diffs_[k].norm());
    if ((diffs_[k + 1] * diffs_[k]).norm() > 1e-12 * scale)
      throw InputError("cochain complex: d(d(.)) != 0 between degrees " +
                       std::to_string(k) + " and " + std::to_string(k + 2));
  }
}

int CochainComplex::dim(int k) const {
  if (k < 0 || k >= degrees())
    throw InputError("cochain complex: degree out of range");
  return dims_[k];
}

const Matrix& CochainComplex::diff(int k) const {
  if (k < 0 || k + 1 >= degrees())
    throw InputError("cochain complex: differential index out of range");
  return diffs_[k];
}

int CochainComplex::total_dim() const {
  int t = 0;
  for (int d : dims_) t += d;
  return t;
}

CohomologyReport cohomology(const CochainComplex& c, const GradedMetric& g,
                            double tol) {
  const std::vector<Matrix> D = whiten(c, g);
  const int K = c.degrees();
  CohomologyReport rep;
  rep.betti.assign(K, 0);
  rep.representatives.assign(K, Matrix());
  for (int k = 0; k < K; ++k) {
    const int n = c.dim(k);
    if (n == 0) {
      rep.representatives[k] = Matrix(0, 0);
      continue;
    }
    const int rows_up = (k + 1 < K) ? c.dim(k + 1) : 0;
    const int rows_dn = (k > 0) ? c.dim(k - 1) : 0;
    // Harmonic subspace = ker d_k intersect ker d_{k-1}^*, as the kernel of
    // the stacked map (all in whitened coordinates).
    Matrix h;
    if (rows_up + rows_dn == 0) {
      h = Matrix::Identity(n, n);
    } else {
      Matrix stacked(rows_up + rows_dn, n);
      if (rows_up > 0) stacked.topRows(rows_up) = D[k];
      if (rows_dn > 0) stacked.bottomRows(rows_dn) = D[k - 1].adjoint();
      h = kernel_basis(stacked, tol);
    }
    const int rank_up = (rows_up > 0) ? numerical_rank(D[k], tol) : 0;
    const int rank_dn = (rows_dn > 0) ? numerical_rank(D[k - 1], tol) : 0;
    const int b = n - rank_up - rank_dn;
    if (b != static_cast<int>(h.cols()))
      throw NumericalError(
          "ill-conditioned rank: harmonic dimension disagrees with rank "
          "bookkeeping at degree " +
          std::to_string(k));
    rep.betti[k] = b;
    rep.representatives[k] = g.at(k).whitener_inverse() * h;
  }
  return rep;
}

double canonical_element_log_norm(const CochainComplex& c,
                                  const GradedMetric& g, double tol,
                                  const std::vector<Matrix>* lifts) {
  const CohomologyReport rep = cohomology(c, g, tol);
  for (int k = 0; k < c.degrees(); ++k)
    if (rep.betti[k] != 0)
      throw NumericalError("canonical element: complex is not acyclic (H^" +
                           std::to_string(k) + " has dimension " +
                           std::to_string(rep.betti[k]) + ")");
  const std::vector<Matrix> D = whiten(c, g);
  const int K = c.degrees();
  if (lifts && static_cast<int>(lifts->size()) != K)
    throw InputError(
        "canonical element: lift override must supply one matrix per degree");

  double acc = 0.0;
  Matrix images(c.dim(0), 0);  // images of degree-(k-1) lifts in degree k
  for (int k = 0; k < K; ++k) {
    const int n = c.dim(k);
    // Lifts spanning a complement of ker d_k: default is the d_k row space.
    Matrix s(n, 0);
    if (k + 1 < K && n > 0 && c.dim(k + 1) > 0) {
      const int rank_k = numerical_rank(D[k], tol);
      if (lifts) {
        const Matrix& raw = (*lifts)[k];
        if (raw.rows() != n || raw.cols() != rank_k)
          throw InputError(
              "canonical element: lift override shape mismatch at degree " +
              std::to_string(k));
        s = g.at(k).whitener() * raw;
      } else if (rank_k > 0) {
        Eigen::JacobiSVD<Matrix> svd(D[k], Eigen::ComputeFullV);
        s = svd.matrixV().leftCols(rank_k);
      }
    }
    if (n > 0) {
      if (images.cols() + s.cols() != n)
        throw NumericalError(
            "canonical element: acyclicity bookkeeping failed at degree " +
            std::to_string(k));
      Matrix m(n, n);
      if (images.cols() > 0) m.leftCols(images.cols()) = images;
      if (s.cols() > 0) m.rightCols(s.cols()) = s;
      const double w = log_wedge_gram_norm(m, GramMetric::identity(n));
      acc += (k % 2 == 0) ? w : -w;
    }
    images = (k + 1 < K) ? Matrix(D[k] * s) : Matrix();
  }
  return acc;
}

double canonical_element_norm(const CochainComplex& c, const GradedMetric& g,
                              double tol) {
  return std::exp(canonical_element_log_norm(c, g, tol));
}

MetricedDetLine det_metric(const CochainComplex& c, const GradedMetric& g,
                           const CohomologyReport& report, double tol) {
  validate_metric(c, g);
  const int K = c.degrees();
  if (static_cast<int>(report.betti.size()) != K ||
      static_cast<int>(report.representatives.size()) != K)
    throw InputError("stale cohomology report: degree count mismatch");
  // Freshness checks: representatives must be g-orthonormal cocycles of c.
  for (int k = 0; k < K; ++k) {
    const Matrix& h = report.representatives[k];
    if (h.rows() != c.dim(k) || h.cols() != report.betti[k])
      throw InputError("stale cohomology report: representative shape mismatch");
    if (h.cols() == 0) continue;
    const Matrix gram = h.adjoint() * g.at(k).gram() * h;
    if ((gram - Matrix::Identity(h.cols(), h.cols())).norm() > 1e-6)
      throw InputError(
          "stale cohomology report: representatives are not orthonormal at "
          "degree " +
          std::to_string(k));
    if (k + 1 < K && c.dim(k + 1) > 0) {
      const double scale = std::max(1.0, c.diff(k).norm());
      if ((c.diff(k) * h).norm() > 1e-6 * scale)
        throw InputError(
            "stale cohomology report: representatives are not cocycles at "
            "degree " +
            std::to_string(k));
    }
  }

  const std::vector<Matrix> D = whiten(c, g);
  // Orthogonal complements of the harmonic subspaces carry the acyclic part.
  std::vector<int> adims(K, 0);
  std::vector<Matrix> q(K);
  for (int k = 0; k < K; ++k) {
    const int n = c.dim(k);
    const int b = report.betti[k];
    adims[k] = n - b;
    if (n == 0) {
      q[k] = Matrix(0, 0);
    } else if (b == 0) {
      q[k] = Matrix::Identity(n, n);
    } else {
      const Matrix ht = g.at(k).whitener() * report.representatives[k];
      Eigen::JacobiSVD<Matrix> svd(ht, Eigen::ComputeFullU);
      q[k] = svd.matrixU().rightCols(n - b);
    }
  }
  std::vector<Matrix> adiffs;
  adiffs.reserve(K > 0 ? K - 1 : 0);
  for (int k = 0; k + 1 < K; ++k) {
    Matrix dk = q[k + 1].adjoint() * D[k] * q[k];
    // The differential must restrict to the complement exactly (harmonics are
    // closed and co-closed); a large residual means the report is stale.
    const double scale = std::max(1.0, D[k].norm());
    if ((D[k] * q[k] - q[k + 1] * dk).norm() > 1e-7 * scale)
      throw InputError(
          "stale cohomology report: differential does not restrict to the "
          "harmonic complement at degree " +
          std::to_string(k));
    adiffs.push_back(std::move(dk));
  }
  const CochainComplex acyclic(adims, adiffs);
  MetricedDetLine line;
  line.betti = report.betti;
  line.generator = generator_descriptor(report.betti);
  line.log_norm =
      canonical_element_log_norm(acyclic, GradedMetric::identity(adims), tol);
  return line;
}

MetricedDetLine det_metric(const CochainComplex& c, const GradedMetric& g,
                           double tol) {
  return det_metric(c, g, cohomology(c, g, tol), tol);
}

FilteredComplex::FilteredComplex(CochainComplex c,
                                 std::vector<std::vector<int>> levels,
                                 int n_levels)
    : c_(std::move(c)), levels_(std::move(levels)) {
  if (static_cast<int>(levels_.size()) != c_.degrees())
    throw InputError("filtered complex: level table degree count mismatch");
  int max_level = -1;
  for (int k = 0; k < c_.degrees(); ++k) {
    if (static_cast<int>(levels_[k].size()) != c_.dim(k))
      throw InputError("filtered complex: level count mismatch at degree " +
                       std::to_string(k));
    for (int lv : levels_[k]) {
      if (lv < 0) throw InputError("filtered complex: negative level");
      max_level = std::max(max_level, lv);
    }
  }
  n_levels_ = (n_levels >= 0) ? n_levels : max_level + 1;
  if (n_levels_ <= 0) n_levels_ = 1;
  if (max_level >= n_levels_)
    throw InputError("filtered complex: level exceeds declared level count");
  // Level discipline: a nonzero entry d[i,j] must have level(i) >= level(j)
  // so that the span of levels >= p is a subcomplex for every p. Forbidden
  // entries must be exactly zero.
  for (int k = 0; k + 1 < c_.degrees(); ++k) {
    const Matrix& d = c_.diff(k);
    for (Eigen::Index j = 0; j < d.cols(); ++j)
      for (Eigen::Index i = 0; i < d.rows(); ++i)
        if (d(i, j) != Scalar(0.0, 0.0) &&
            levels_[k + 1][i] < levels_[k][j])
          throw InputError(
              "filtration not respected: nonzero differential entry from "
              "level " +
              std::to_string(levels_[k][j]) + " into lower level " +
              std::to_string(levels_[k + 1][i]) + " at degree " +
              std::to_string(k));
  }
}

int FilteredComplex::level(int degree, int index) const {
  if (degree < 0 || degree >= c_.degrees())
    throw InputError("filtered complex: degree out of range");
  if (index < 0 || index >= c_.dim(degree))
    throw InputError("filtered complex: index out of range");
  return levels_[degree][index];
}

std::vector<int> FilteredComplex::slots(int degree, int lo, int hi) const {
  if (degree < 0 || degree >= c_.degrees())
    throw InputError("filtered complex: degree out of range");
  std::vector<int> out;
  for (int i = 0; i < c_.dim(degree); ++i)
    if (levels_[degree][i] >= lo && levels_[degree][i] < hi) out.push_back(i);
  return out;
}

CochainComplex FilteredComplex::range(int lo, int hi) const {
  if (lo < 0 || hi > n_levels_ || lo > hi)
    throw InputError("filtered complex: invalid level range");
  const int K = c_.degrees();
  std::vector<int> dims(K, 0);
  std::vector<std::vector<int>> idx(K);
  for (int k = 0; k < K; ++k) {
    idx[k] = slots(k, lo, hi);
    dims[k] = static_cast<int>(idx[k].size());
  }
  std::vector<Matrix> diffs;
  diffs.reserve(K > 0 ? K - 1 : 0);
  for (int k = 0; k + 1 < K; ++k) {
    Matrix d(dims[k + 1], dims[k]);
    for (std::size_t j = 0; j < idx[k].size(); ++j)
      for (std::size_t i = 0; i < idx[k + 1].size(); ++i)
        d(i, j) = c_.diff(k)(idx[k + 1][i], idx[k][j]);
    diffs.push_back(std::move(d));
  }
  return CochainComplex(dims, diffs);
}

GradedMetric FilteredComplex::range_metric(const GradedMetric& ambient, int lo,
                                           int hi) const {
  validate_metric(c_, ambient);
  GradedMetric out;
  for (int k = 0; k < c_.degrees(); ++k) {
    const std::vector<int> idx = slots(k, lo, hi);
    Matrix g(idx.size(), idx.size());
    for (std::size_t j = 0; j < idx.size(); ++j)
      for (std::size_t i = 0; i < idx.size(); ++i)
        g(i, j) = ambient.at(k).gram()(idx[i], idx[j]);
    out.g.push_back(idx.empty() ? GramMetric() : GramMetric(g));
  }
  return out;
}

namespace {

// The LES differentials are harmonic projections of O(1)-normalized data, so
// a map that vanishes in exact arithmetic comes back as rounding junk whose
// largest entry would masquerade as the scale for relative rank cutoffs.
// A whole matrix at rounding scale is therefore snapped to exact zero.
Matrix snap_junk_matrix(Matrix m, double scale) {
  if (m.size() > 0 && m.norm() < 1e-10 * std::max(1.0, scale)) m.setZero();
  return m;
}

}  // namespace

CochainComplex les_of_split(const FilteredComplex& f,
                            const GradedMetric& ambient, int lo, int mid,
                            int hi, double tol) {
  if (!(0 <= lo && lo <= mid && mid <= hi && hi <= f.levels()))
    throw InputError("les_of_split: invalid level split");
  const int K = f.complex().degrees();

  const CochainComplex A = f.range(mid, hi);
  const CochainComplex B = f.range(lo, hi);
  const CochainComplex Q = f.range(lo, mid);
  const GradedMetric gA = f.range_metric(ambient, mid, hi);
  const GradedMetric gB = f.range_metric(ambient, lo, hi);
  const GradedMetric gQ = f.range_metric(ambient, lo, mid);
  const CohomologyReport cA = cohomology(A, gA, tol);
  const CohomologyReport cB = cohomology(B, gB, tol);
  const CohomologyReport cQ = cohomology(Q, gQ, tol);

  // Positions of the sub/quotient slots inside the B coordinate system.
  std::vector<std::vector<int>> apos(K), qpos(K);
  for (int k = 0; k < K; ++k) {
    const std::vector<int> sB = f.slots(k, lo, hi);
    std::vector<int> pos_of_total(f.complex().dim(k), -1);
    for (std::size_t i = 0; i < sB.size(); ++i) pos_of_total[sB[i]] = static_cast<int>(i);
    for (int idx : f.slots(k, mid, hi)) apos[k].push_back(pos_of_total[idx]);
    for (int idx : f.slots(k, lo, mid)) qpos[k].push_back(pos_of_total[idx]);
  }

  std::vector<int> tdims(3 * K, 0);
  for (int i = 0; i < K; ++i) {
    tdims[3 * i] = cA.betti[i];
    tdims[3 * i + 1] = cB.betti[i];
    tdims[3 * i + 2] = cQ.betti[i];
  }
  std::vector<Matrix> tdiffs(3 * K - 1);

  for (int i = 0; i < K; ++i) {
    // Sub classes into total classes: place the representative on the sub
    // slots and project onto the harmonic basis of the total range.
    Matrix emb(B.dim(i), cA.betti[i]);
    emb.setZero();
    for (int col = 0; col < cA.betti[i]; ++col)
      for (std::size_t r = 0; r < apos[i].size(); ++r)
        emb(apos[i][r], col) = cA.representatives[i](r, col);
    tdiffs[3 * i] = snap_junk_matrix(
        harmonic_coordinates(cB.representatives[i], gB.at(i), emb), 1.0);

    // Total classes onto quotient classes: restrict coordinates to the
    // quotient slots and project.
    Matrix restr(Q.dim(i), cB.betti[i]);
    for (int col = 0; col < cB.betti[i]; ++col)
      for (std::size_t r = 0; r < qpos[i].size(); ++r)
        restr(r, col) = cB.representatives[i](qpos[i][r], col);
    tdiffs[3 * i + 1] = snap_junk_matrix(
        harmonic_coordinates(cQ.representatives[i], gQ.at(i), restr), 1.0);

    // Connecting map: lift a quotient class into the total range, apply the
    // differential, check the quotient part dies, and read the sub part.
    if (3 * i + 2 < 3 * K - 1) {
      Matrix delta(cA.betti[i + 1], cQ.betti[i]);
      delta.setZero();
      if (cQ.betti[i] > 0 && cA.betti[i + 1] > 0) {
        Matrix lift(B.dim(i), cQ.betti[i]);
        lift.setZero();
        for (int col = 0; col < cQ.betti[i]; ++col)
          for (std::size_t r = 0; r < qpos[i].size(); ++r)
            lift(qpos[i][r], col) = cQ.representatives[i](r, col);
        const Matrix du = B.diff(i) * lift;
        const double scale = std::max(1.0, B.diff(i).norm());
        Matrix sub_part(A.dim(i + 1), cQ.betti[i]);
        for (int col = 0; col < cQ.betti[i]; ++col) {
          double quot_residual = 0.0;
          for (std::size_t r = 0; r < qpos[i + 1].size(); ++r)
            quot_residual += std::norm(du(qpos[i + 1][r], col));
          if (std::sqrt(quot_residual) > 1e-7 * scale)
            throw NumericalError(
                "filtration not respected: zig-zag lift leaves the "
                "subcomplex at degree " +
                std::to_string(i));
          for (std::size_t r = 0; r < apos[i + 1].size(); ++r)
            sub_part(r, col) = du(apos[i + 1][r], col);
        }
        delta = snap_junk_matrix(
            harmonic_coordinates(cA.representatives[i + 1], gA.at(i + 1),
                                 sub_part),
            scale);
      }
      tdiffs[3 * i + 2] = std::move(delta);
    }
  }
  return CochainComplex(tdims, tdiffs);
}

CochainComplex les_of_pair(const FilteredComplex& f, const GradedMetric& ambient,
                           int p, double tol) {
  return les_of_split(f, ambient, 0, p, f.levels(), tol);
}

MetricedDetLine fuse(const MetricedDetLine& sub_line,
                     const MetricedDetLine& quot_line,
                     const CochainComplex& les, double tol) {
  if (les.degrees() % 3 != 0)
    throw InputError("fuse: LES complex does not have the triple-degree layout");
  const int K = les.degrees() / 3;
  auto betti_at = [](const MetricedDetLine& l, int i) {
    return i < static_cast<int>(l.betti.size()) ? l.betti[i] : 0;
  };
  for (int i = 0; i < K; ++i) {
    if (les.dim(3 * i) != betti_at(sub_line, i) ||
        les.dim(3 * i + 2) != betti_at(quot_line, i))
      throw InputError(
          "fuse: Betti bookkeeping mismatch between the lines and the LES at "
          "degree " +
          std::to_string(i));
  }
  MetricedDetLine out;
  out.betti.resize(K);
  for (int i = 0; i < K; ++i) out.betti[i] = les.dim(3 * i + 1);
  out.generator = generator_descriptor(out.betti);
  out.log_norm =
      sub_line.log_norm + quot_line.log_norm +
      canonical_element_log_norm(les, GradedMetric::identity(les.dims()), tol);
  return out;
}

GradedMetric assemble_ambient_metric(
    const FilteredComplex& f, const std::vector<GradedMetric>& piece_metrics) {
  if (static_cast<int>(piece_metrics.size()) != f.levels())
    throw InputError("fold: one piece metric per level required");
  const CochainComplex& c = f.complex();
  GradedMetric ambient;
  for (int k = 0; k < c.degrees(); ++k) {
    Matrix g = Matrix::Zero(c.dim(k), c.dim(k));
    for (int p = 0; p < f.levels(); ++p) {
      const std::vector<int> idx = f.slots(k, p, p + 1);
      const GramMetric& gm = piece_metrics[p].at(k);
      if (gm.dim() != static_cast<int>(idx.size()))
        throw InputError(
            "fold: piece metric dimension mismatch at level " +
            std::to_string(p) + ", degree " + std::to_string(k));
      for (std::size_t j = 0; j < idx.size(); ++j)
        for (std::size_t i = 0; i < idx.size(); ++i)
          g(idx[i], idx[j]) = gm.gram()(i, j);
    }
    ambient.g.push_back(c.dim(k) == 0 ? GramMetric() : GramMetric(g));
  }
  return ambient;
}

MetricedDetLine fold_filtration(const FilteredComplex& f,
                                const std::vector<GradedMetric>& piece_metrics,
                                double tol, const SplitChooser& chooser) {
  const GradedMetric ambient = assemble_ambient_metric(f, piece_metrics);
  std::function<MetricedDetLine(int, int)> fold = [&](int lo,
                                                      int hi) -> MetricedDetLine {
    if (hi - lo == 1)
      return det_metric(f.range(lo, hi), f.range_metric(ambient, lo, hi), tol);
    const int mid = chooser ? chooser(lo, hi) : hi - 1;
    if (mid <= lo || mid >= hi)
      throw InputError("fold: split chooser produced an invalid split point");
    const MetricedDetLine quot = fold(lo, mid);
    const MetricedDetLine sub = fold(mid, hi);
    return fuse(sub, quot, les_of_split(f, ambient, lo, mid, hi, tol), tol);
  };
  return fold(0, f.levels());
}

double fusion_order_invariance_check(
    const FilteredComplex& f, const std::vector<GradedMetric>& piece_metrics,
    int trials, std::uint64_t seed, double tol) {
  const MetricedDetLine base = fold_filtration(f, piece_metrics, tol);
  double max_dev = 0.0;
  std::mt19937_64 rng(seed);
  for (int t = 0; t < trials; ++t) {
    const SplitChooser chooser = [&rng](int lo, int hi) {
      std::uniform_int_distribution<int> dist(lo + 1, hi - 1);
      return dist(rng);
    };
    const MetricedDetLine line = fold_filtration(f, piece_metrics, tol, chooser);
    if (line.betti != base.betti)
      throw NumericalError(
          "fusion order check: association orders disagree on Betti numbers");
    max_dev = std::max(max_dev, std::abs(line.log_norm - base.log_norm));
  }
  return max_dev;
}

}  // namespace torsion
