#include "torsion/random_gen.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

namespace torsion {

namespace {

constexpr double kPi = 3.14159265358979323846;

// I + N with N strictly level-raising is unipotent; the Neumann series for
// the inverse terminates at the level count. Products of such patterned
// matrices keep structurally forbidden entries exactly zero because every
// contributing term contains an exact-zero factor.
Matrix unipotent_inverse(const Matrix& n_part, int nilpotency) {
  const int n = static_cast<int>(n_part.rows());
  Matrix inv = Matrix::Identity(n, n);
  Matrix power = Matrix::Identity(n, n);
  double sign = 1.0;
  for (int j = 1; j < nilpotency; ++j) {
    power = power * n_part;
    sign = -sign;
    inv += sign * power;
  }
  return inv;
}

}  // namespace

double Rng::uniform(double lo, double hi) {
  std::uniform_real_distribution<double> d(lo, hi);
  return d(eng_);
}

int Rng::uniform_int(int lo, int hi) {
  std::uniform_int_distribution<int> d(lo, hi);
  return d(eng_);
}

bool Rng::coin() { return uniform_int(0, 1) == 1; }

Scalar Rng::gaussian() {
  std::normal_distribution<double> d(0.0, 1.0 / std::sqrt(2.0));
  const double re = d(eng_);
  const double im = d(eng_);
  return Scalar(re, im);
}

Matrix random_matrix(Rng& rng, int rows, int cols) {
  if (rows < 0 || cols < 0) throw InputError("negative matrix shape");
  Matrix m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m(i, j) = rng.gaussian();
  return m;
}

Matrix random_unitary(Rng& rng, int n) {
  if (n == 0) return Matrix(0, 0);
  const Matrix g = random_matrix(rng, n, n);
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ();
  const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < n; ++j) {
    const Scalar d = r(j, j);
    const double a = std::abs(d);
    q.col(j) *= (a > 0 ? d / a : Scalar(1.0, 0.0));
  }
  return q;
}

Matrix random_invertible(Rng& rng, int n) {
  if (n == 0) return Matrix(0, 0);
  const Matrix u1 = random_unitary(rng, n);
  const Matrix u2 = random_unitary(rng, n);
  Vector s(n);
  for (int i = 0; i < n; ++i) s(i) = Scalar(rng.uniform(0.5, 1.5), 0.0);
  return u1 * s.asDiagonal() * u2;
}

Matrix random_gapped_invertible(Rng& rng, int n, double gap) {
  if (n < 1) throw InputError("gapped matrix needs positive dimension");
  if (gap <= 0 || gap >= 0.5) throw InputError("gap must lie in (0, 0.5)");
  const double sep = std::min(gap, 0.02);
  std::vector<Scalar> eig;
  eig.reserve(n);
  while (static_cast<int>(eig.size()) < n) {
    const double mod = rng.uniform(0.4, 2.2);
    const double arg = rng.uniform(0.0, 2.0 * kPi);
    const Scalar lam(mod * std::cos(arg), mod * std::sin(arg));
    if (std::abs(lam - Scalar(1.0, 0.0)) < gap) continue;
    if (std::abs(lam + Scalar(1.0, 0.0)) < gap) continue;
    bool close = false;
    for (const Scalar& mu : eig)
      if (std::abs(lam - mu) < sep) close = true;
    if (close) continue;
    eig.push_back(lam);
  }
  Matrix d = Matrix::Zero(n, n);
  for (int i = 0; i < n; ++i) d(i, i) = eig[i];
  const Matrix p = random_invertible(rng, n);
  return p * d * p.inverse();
}

Matrix random_gapped_unitary(Rng& rng, int n, double margin) {
  if (n < 1) throw InputError("gapped unitary needs positive dimension");
  if (margin <= 0 || margin >= 0.5)
    throw InputError("phase margin must lie in (0, 0.5)");
  const double sep = margin / 2.0;
  std::vector<double> phases;
  phases.reserve(n);
  while (static_cast<int>(phases.size()) < n) {
    const double a = rng.uniform(margin, 1.0 - margin);
    bool close = false;
    for (double b : phases)
      if (std::abs(a - b) < sep) close = true;
    if (close) continue;
    phases.push_back(a);
  }
  Matrix d = Matrix::Zero(n, n);
  for (int i = 0; i < n; ++i)
    d(i, i) = Scalar(std::cos(2.0 * kPi * phases[i]),
                     std::sin(2.0 * kPi * phases[i]));
  const Matrix u = random_unitary(rng, n);
  return u * d * u.adjoint();
}

GramMetric random_gram(Rng& rng, int n) {
  if (n == 0) return GramMetric();
  const Matrix u = random_unitary(rng, n);
  Vector s(n);
  for (int i = 0; i < n; ++i) s(i) = Scalar(rng.uniform(0.5, 2.0), 0.0);
  Matrix g = u * s.asDiagonal() * u.adjoint();
  // Exact Hermitian symmetrization against rounding in the triple product.
  g = ((g + Matrix(g.adjoint())) * Scalar(0.5, 0.0)).eval();
  return GramMetric(std::move(g));
}

GradedMetric random_graded_metric(Rng& rng, const std::vector<int>& dims) {
  GradedMetric g;
  g.g.reserve(dims.size());
  for (int d : dims) g.g.push_back(random_gram(rng, d));
  return g;
}

CochainComplex random_acyclic_complex(Rng& rng, int degrees, int max_rank) {
  if (degrees < 2) throw InputError("acyclic complex needs >= 2 degrees");
  if (max_rank < 1) throw InputError("max_rank must be positive");
  std::vector<int> ranks(degrees - 1);
  for (int& r : ranks) r = rng.uniform_int(1, max_rank);
  std::vector<int> dims(degrees);
  for (int k = 0; k < degrees; ++k) {
    const int in = k > 0 ? ranks[k - 1] : 0;
    const int out = k < degrees - 1 ? ranks[k] : 0;
    dims[k] = in + out;
  }
  // Shift blocks: the "outgoing" tail of degree k maps identically onto the
  // "incoming" head of degree k+1.
  std::vector<Matrix> diffs(degrees - 1);
  for (int k = 0; k + 1 < degrees; ++k) {
    Matrix d = Matrix::Zero(dims[k + 1], dims[k]);
    d.block(0, dims[k] - ranks[k], ranks[k], ranks[k]) =
        Matrix::Identity(ranks[k], ranks[k]);
    diffs[k] = d;
  }
  std::vector<Matrix> p(degrees), pinv(degrees);
  for (int k = 0; k < degrees; ++k) {
    p[k] = random_invertible(rng, dims[k]);
    pinv[k] = p[k].inverse();
  }
  for (int k = 0; k + 1 < degrees; ++k)
    diffs[k] = p[k + 1] * diffs[k] * pinv[k];
  return CochainComplex(std::move(dims), std::move(diffs));
}

std::vector<Matrix> random_lifts(Rng& rng, const CochainComplex& c,
                                 double tol) {
  std::vector<Matrix> lifts(c.degrees());
  if (c.degrees() > 0)
    lifts[c.degrees() - 1] = Matrix(c.dim(c.degrees() - 1), 0);
  for (int k = 0; k + 1 < c.degrees(); ++k) {
    const Matrix& d = c.diff(k);
    const int r = numerical_rank(d, tol);
    Eigen::JacobiSVD<Matrix> svd(d, Eigen::ComputeFullV);
    const Matrix coimage = svd.matrixV().leftCols(r);
    const Matrix kernel = svd.matrixV().rightCols(d.cols() - r);
    Matrix lift = coimage * random_invertible(rng, r);
    if (kernel.cols() > 0)
      lift += kernel * random_matrix(rng, static_cast<int>(kernel.cols()), r);
    lifts[k] = std::move(lift);
  }
  return lifts;
}

RandomFiltered random_filtered_complex(Rng& rng, int levels, int degrees,
                                       int max_dim) {
  if (levels < 2) throw InputError("filtered complex needs >= 2 levels");
  if (degrees < 2) throw InputError("filtered complex needs >= 2 degrees");
  if (max_dim < levels)
    throw InputError("max_dim too small to give every level a slot");

  // Per level: harmonic dims h[k] and staircase ranks r[k] (rank of the
  // piece differential out of degree k), spent against a shared per-degree
  // budget so the total dimension stays within max_dim per degree.
  std::vector<int> budget(degrees, max_dim);
  std::vector<std::vector<int>> h(levels, std::vector<int>(degrees, 0));
  std::vector<std::vector<int>> r(levels, std::vector<int>(degrees, 0));
  // One guaranteed slot per level first, so later extras cannot starve a
  // level of its slot.
  for (int p = 0; p < levels; ++p) {
    std::vector<int> open;
    for (int k = 0; k < degrees; ++k)
      if (budget[k] > 0) open.push_back(k);
    const int k0 = open[rng.uniform_int(0, static_cast<int>(open.size()) - 1)];
    h[p][k0] += 1;
    budget[k0] -= 1;
  }
  for (int p = 0; p < levels; ++p) {
    for (int k = 0; k < degrees; ++k) {
      if (budget[k] > 0 && rng.uniform(0.0, 1.0) < 0.35) {
        h[p][k] += 1;
        budget[k] -= 1;
      }
      if (k + 1 < degrees && budget[k] > 0 && budget[k + 1] > 0 &&
          rng.uniform(0.0, 1.0) < 0.45) {
        r[p][k] += 1;
        budget[k] -= 1;
        budget[k + 1] -= 1;
      }
    }
  }

  // Piece complexes: degree k of level p holds, in order, the harmonic
  // slots, the incoming staircase slots, and the outgoing staircase slots.
  std::vector<std::vector<int>> piece_dims(levels,
                                           std::vector<int>(degrees, 0));
  std::vector<std::vector<Matrix>> piece_diffs(levels);
  for (int p = 0; p < levels; ++p) {
    for (int k = 0; k < degrees; ++k) {
      const int in = k > 0 ? r[p][k - 1] : 0;
      piece_dims[p][k] = h[p][k] + in + r[p][k];
    }
    piece_diffs[p].resize(degrees - 1);
    for (int k = 0; k + 1 < degrees; ++k) {
      Matrix d = Matrix::Zero(piece_dims[p][k + 1], piece_dims[p][k]);
      if (r[p][k] > 0)
        d.block(h[p][k + 1], piece_dims[p][k] - r[p][k], r[p][k], r[p][k]) =
            Matrix::Identity(r[p][k], r[p][k]);
      piece_diffs[p][k] = d;
    }
    // Genericize within the level.
    std::vector<Matrix> q(degrees), qinv(degrees);
    for (int k = 0; k < degrees; ++k) {
      q[k] = random_invertible(rng, piece_dims[p][k]);
      qinv[k] = piece_dims[p][k] > 0 ? q[k].inverse() : Matrix(0, 0);
    }
    for (int k = 0; k + 1 < degrees; ++k)
      piece_diffs[p][k] = q[k + 1] * piece_diffs[p][k] * qinv[k];
  }

  // Assemble the block-diagonal total, level-major within each degree.
  std::vector<int> dims(degrees, 0);
  std::vector<std::vector<int>> offsets(levels, std::vector<int>(degrees, 0));
  std::vector<std::vector<int>> slot_levels(degrees);
  for (int k = 0; k < degrees; ++k)
    for (int p = 0; p < levels; ++p) {
      offsets[p][k] = dims[k];
      dims[k] += piece_dims[p][k];
      slot_levels[k].insert(slot_levels[k].end(), piece_dims[p][k], p);
    }
  std::vector<Matrix> diffs(degrees - 1);
  for (int k = 0; k + 1 < degrees; ++k) {
    diffs[k] = Matrix::Zero(dims[k + 1], dims[k]);
    for (int p = 0; p < levels; ++p)
      if (piece_dims[p][k] > 0 && piece_dims[p][k + 1] > 0)
        diffs[k].block(offsets[p][k + 1], offsets[p][k], piece_dims[p][k + 1],
                       piece_dims[p][k]) = piece_diffs[p][k];
  }

  // Level-raising conjugation: entries only from lower-level to
  // higher-level slots, so forbidden differential entries stay exactly zero.
  std::vector<Matrix> psi(degrees), psi_inv(degrees);
  for (int k = 0; k < degrees; ++k) {
    Matrix n_part = Matrix::Zero(dims[k], dims[k]);
    for (int i = 0; i < dims[k]; ++i)
      for (int j = 0; j < dims[k]; ++j)
        if (slot_levels[k][i] > slot_levels[k][j])
          n_part(i, j) = rng.gaussian() * Scalar(0.5, 0.0);
    psi[k] = Matrix::Identity(dims[k], dims[k]) + n_part;
    psi_inv[k] = unipotent_inverse(n_part, levels);
  }
  for (int k = 0; k + 1 < degrees; ++k)
    diffs[k] = psi[k + 1] * diffs[k] * psi_inv[k];

  RandomFiltered out{
      FilteredComplex(CochainComplex(dims, std::move(diffs)), slot_levels,
                      levels),
      {}};
  out.piece_metrics.reserve(levels);
  for (int p = 0; p < levels; ++p)
    out.piece_metrics.push_back(random_graded_metric(rng, piece_dims[p]));
  return out;
}

MorseSmaleSystem random_pure_orbit_system(Rng& rng, int max_orbits,
                                          int max_rank, double gap) {
  const int n_orbits = rng.uniform_int(1, max_orbits);
  const int rank = rng.uniform_int(1, max_rank);
  std::vector<CriticalElement> elements;
  elements.reserve(n_orbits);
  for (int i = 0; i < n_orbits; ++i) {
    ClosedOrbitDatum o;
    o.id = "orbit" + std::to_string(i);
    o.index = rng.uniform_int(0, 2);
    o.period = rng.uniform(0.5, 2.0);
    o.twist = rng.coin() ? 1 : -1;
    o.holonomy = random_gapped_invertible(rng, rank, gap);
    o.reverse_orientation = rng.coin();
    elements.emplace_back(std::move(o));
  }
  return MorseSmaleSystem(rank, std::move(elements), std::nullopt, true);
}

SurgeryModel random_surgery_system(Rng& rng) {
  const int n_orbits = rng.uniform_int(1, 3);
  const int n_fixed = rng.uniform_int(0, 2);
  const int rank = rng.uniform_int(1, 3);
  const double gap = 0.05;

  std::vector<CriticalElement> elements;
  for (int i = 0; i < n_orbits; ++i) {
    ClosedOrbitDatum o;
    o.id = "orbit" + std::to_string(i);
    o.index = rng.uniform_int(0, 2);
    o.period = rng.uniform(0.5, 2.0);
    o.twist = rng.coin() ? 1 : -1;
    o.holonomy = random_gapped_invertible(rng, rank, gap);
    o.reverse_orientation = rng.coin();
    elements.emplace_back(std::move(o));
  }
  for (int i = 0; i < n_fixed; ++i) {
    FixedPointDatum x;
    x.id = "point" + std::to_string(i);
    x.index = rng.uniform_int(0, 3);
    x.gram = random_gram(rng, rank);
    elements.emplace_back(std::move(x));
  }
  for (int i = static_cast<int>(elements.size()) - 1; i > 0; --i)
    std::swap(elements[i], elements[rng.uniform_int(0, i)]);

  SurgeryMap surgery;
  for (const auto& e : elements) {
    const auto* o = std::get_if<ClosedOrbitDatum>(&e);
    if (!o) continue;
    SurgeryDatum s;
    s.tau_prime = random_invertible(rng, rank);
    s.n_a_prime = rng.coin() ? 1 : -1;
    s.n_a = -o->twist * s.n_a_prime;
    s.gram_x = random_gram(rng, rank);
    s.gram_x_prime = random_gram(rng, rank);
    surgery.emplace(o->id, std::move(s));
  }

  const int flavor = rng.uniform_int(0, 2);
  if (flavor == 0)
    return SurgeryModel{
        MorseSmaleSystem(rank, std::move(elements), std::nullopt, true),
        std::move(surgery)};

  int degrees = 0;
  for (const auto& e : elements) {
    if (const auto* o = std::get_if<ClosedOrbitDatum>(&e))
      degrees = std::max(degrees, o->index + 2);
    else
      degrees = std::max(degrees, std::get<FixedPointDatum>(e).index + 1);
  }
  FilteredComplex model = diagonal_chain_model(elements, rank, degrees);
  if (flavor == 1)
    return SurgeryModel{
        MorseSmaleSystem(rank, std::move(elements), std::move(model), true),
        std::move(surgery)};

  const CochainComplex& c = model.complex();
  const int n_levels = model.levels();
  std::vector<Matrix> psi(c.degrees()), psi_inv(c.degrees());
  for (int k = 0; k < c.degrees(); ++k) {
    const int nk = c.dim(k);
    Matrix n_part = Matrix::Zero(nk, nk);
    for (int i = 0; i < nk; ++i)
      for (int j = 0; j < nk; ++j)
        if (model.level(k, i) > model.level(k, j))
          n_part(i, j) = rng.gaussian() * Scalar(0.5, 0.0);
    psi[k] = Matrix::Identity(nk, nk) + n_part;
    psi_inv[k] = unipotent_inverse(n_part, n_levels);
  }
  std::vector<Matrix> diffs(c.degrees() - 1);
  for (int k = 0; k + 1 < c.degrees(); ++k)
    diffs[k] = psi[k + 1] * c.diff(k) * psi_inv[k];
  std::vector<std::vector<int>> slot_levels(c.degrees());
  for (int k = 0; k < c.degrees(); ++k) {
    slot_levels[k].resize(c.dim(k));
    for (int i = 0; i < c.dim(k); ++i) slot_levels[k][i] = model.level(k, i);
  }
  FilteredComplex noised(CochainComplex(c.dims(), std::move(diffs)),
                         std::move(slot_levels), n_levels);
  return SurgeryModel{
      MorseSmaleSystem(rank, std::move(elements), std::move(noised), false),
      std::move(surgery)};
}

}  // namespace torsion
