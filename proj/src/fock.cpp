#include "qlevy/fock.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "qlevy/error.hpp"

namespace qlevy {

namespace {

void enumerate(std::size_t m, std::size_t total, std::vector<std::size_t>& cur, std::size_t j,
               std::vector<std::vector<std::size_t>>& out) {
  if (j + 1 == m) {
    cur[j] = total;
    out.push_back(cur);
    return;
  }
  for (std::size_t k = total + 1; k-- > 0;) {
    cur[j] = k;
    enumerate(m, total - k, cur, j + 1, out);
  }
}

SparseMatrix from_triplets(std::size_t n, const std::vector<Eigen::Triplet<cplx>>& ts) {
  SparseMatrix a(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  a.setFromTriplets(ts.begin(), ts.end());
  return a;
}

double binom(std::size_t n, std::size_t k) {
  double r = 1.0;
  for (std::size_t i = 1; i <= k; ++i) r = r * static_cast<double>(n - k + i) / static_cast<double>(i);
  return r;
}

std::vector<std::uint32_t> iota_tuple(std::size_t n) {
  std::vector<std::uint32_t> t(n);
  std::iota(t.begin(), t.end(), 0u);
  return t;
}

}  // namespace

// Lanczos with full reorthogonalization
// above a few hundred rows, stopped when both extreme Ritz pairs have
// residual below 1e-12 of the estimate
double hermitian_spectral_radius(const CMatrix& H) {
  const Eigen::Index n = H.rows();
  if (n == 0) return 0.0;
  if (n <= 300) {
    Eigen::SelfAdjointEigenSolver<CMatrix> es(H, Eigen::EigenvaluesOnly);
    return es.eigenvalues().cwiseAbs().maxCoeff();
  }
  std::mt19937_64 rng(1);
  std::normal_distribution<double> g;
  CMatrix Q(n, 0);
  std::vector<double> alpha, beta;
  CVector q(n);
  for (Eigen::Index i = 0; i < n; ++i) q(i) = cplx(g(rng), g(rng));
  q.normalize();
  double est = 0.0;
  for (Eigen::Index k = 0; k < n; ++k) {
    Q.conservativeResize(n, k + 1);
    Q.col(k) = q;
    CVector w = H * q;
    alpha.push_back(q.dot(w).real());
    for (int pass = 0; pass < 2; ++pass) w -= Q * (Q.adjoint() * w);
    const double b = w.norm();
    const Eigen::Index m = k + 1;
    Eigen::MatrixXd Tm = Eigen::MatrixXd::Zero(m, m);
    for (Eigen::Index i = 0; i < m; ++i) {
      Tm(i, i) = alpha[i];
      if (i + 1 < m) Tm(i, i + 1) = Tm(i + 1, i) = beta[i];
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Tm);
    const auto& ev = es.eigenvalues();
    est = std::max(std::abs(ev(0)), std::abs(ev(m - 1)));
    const double r0 = b * std::abs(es.eigenvectors()(m - 1, 0));
    const double r1 = b * std::abs(es.eigenvectors()(m - 1, m - 1));
    if (b < 1e-14 * std::max(est, 1e-300) || (k >= 10 && std::max(r0, r1) < 1e-12 * est)) break;
    beta.push_back(b);
    q = w / b;
  }
  return est;
}

FockFactor::FockFactor(std::size_t modeDim, std::size_t particleCap) : m_(modeDim), N_(particleCap) {
  basis_.push_back(std::vector<std::size_t>(m_, 0));
  if (m_ > 0) {
    std::vector<std::size_t> cur(m_);
    for (std::size_t p = 1; p <= N_; ++p) enumerate(m_, p, cur, 0, basis_);
  }
  for (std::size_t i = 0; i < basis_.size(); ++i) index_.emplace(basis_[i], i);
  for (std::size_t j = 0; j < m_; ++j) {
    std::vector<Eigen::Triplet<cplx>> ts;
    for (std::size_t i = 0; i < basis_.size(); ++i) {
      if (particles(i) == N_) continue;
      std::vector<std::size_t> occ = basis_[i];
      ++occ[j];
      ts.emplace_back(static_cast<int>(index_.at(occ)), static_cast<int>(i), std::sqrt(static_cast<double>(occ[j])));
    }
    raise_.push_back(from_triplets(dim(), ts));
    lower_.push_back(SparseMatrix(raise_.back().adjoint()));
  }
}

std::size_t FockFactor::particles(std::size_t i) const {
  const auto& o = basis_.at(i);
  return std::accumulate(o.begin(), o.end(), std::size_t{0});
}

std::size_t FockFactor::index(const std::vector<std::size_t>& occ) const {
  auto it = index_.find(occ);
  if (it == index_.end()) throw InvalidParameter("occupation tuple outside the truncated factor");
  return it->second;
}

CVector FockFactor::vacuum() const {
  CVector v = CVector::Zero(static_cast<Eigen::Index>(dim()));
  v(0) = 1.0;
  return v;
}

SparseMatrix FockFactor::identity() const {
  SparseMatrix a(static_cast<Eigen::Index>(dim()), static_cast<Eigen::Index>(dim()));
  a.setIdentity();
  return a;
}

SparseMatrix FockFactor::projector(std::size_t k) const {
  std::vector<Eigen::Triplet<cplx>> ts;
  for (std::size_t i = 0; i < dim(); ++i)
    if (particles(i) <= k) ts.emplace_back(static_cast<int>(i), static_cast<int>(i), 1.0);
  return from_triplets(dim(), ts);
}

SparseMatrix noise_matrix(NoiseKind kind, const std::variant<CVector, CMatrix>& arg, double h, const FockFactor& f) {
  if (!(h >= 0.0)) throw InvalidParameter("noise operator: interval length must be >= 0");
  const auto m = static_cast<Eigen::Index>(f.modes());
  SparseMatrix a(static_cast<Eigen::Index>(f.dim()), static_cast<Eigen::Index>(f.dim()));
  if (kind == NoiseKind::Preservation) {
    const CMatrix* T = std::get_if<CMatrix>(&arg);
    if (!T || T->rows() != m || T->cols() != m) throw DimensionMismatch("preservation needs an m x m matrix");
    for (Eigen::Index j = 0; j < m; ++j)
      for (Eigen::Index l = 0; l < m; ++l)
        if ((*T)(j, l) != cplx{}) a += (*T)(j, l) * (f.raise(j) * f.lower(l));
    return a;
  }
  const CVector* k = std::get_if<CVector>(&arg);
  if (!k || k->size() != m) throw DimensionMismatch("creation/annihilation needs a vector of length m");
  const double s = std::sqrt(h);
  for (Eigen::Index j = 0; j < m; ++j) {
    if ((*k)(j) == cplx{}) continue;
    if (kind == NoiseKind::Creation)
      a += (s * (*k)(j)) * f.raise(j);
    else
      a += (s * std::conj((*k)(j))) * f.lower(j);
  }
  return a;
}

// ---------------------------------------------------------------------------

FactorizedFockVector FactorizedFockVector::vacuum(const Partition& p, const FockFactor& f) {
  FactorizedFockVector v;
  v.partition = p;
  v.table = {f.vacuum()};
  v.terms[std::vector<std::uint32_t>(p.size(), 0)] = 1.0;
  return v;
}

cplx inner(const FactorizedFockVector& u, const FactorizedFockVector& v) {
  if (u.partition.times() != v.partition.times()) throw InvalidParameter("inner: vectors on different partitions");
  return tuple_sum_pairing(u.terms, v.terms, u.partition.size(), [&](std::size_t, std::uint32_t a, std::uint32_t b) {
    return u.table[a].dot(v.table[b]);
  });
}

FactorizedFockVector add(const FactorizedFockVector& u, const FactorizedFockVector& v, cplx c) {
  if (u.partition.times() != v.partition.times()) throw InvalidParameter("add: vectors on different partitions");
  FactorizedFockVector r = u;
  const auto off = static_cast<std::uint32_t>(r.table.size());
  r.table.insert(r.table.end(), v.table.begin(), v.table.end());
  for (const auto& [t, w] : v.terms) {
    std::vector<std::uint32_t> s = t;
    for (auto& x : s) x += off;
    r.terms[s] += c * w;
  }
  return r;
}

FockOperator FockOperator::local(const Partition& p, std::size_t i, const SparseMatrix& a, const FockFactor& f) {
  if (i >= p.size()) throw InvalidParameter("local operator: interval index out of range");
  FockOperator op;
  op.partition = p;
  op.table = {f.identity(), a};
  std::vector<std::uint32_t> t(p.size(), 0);
  t[i] = 1;
  op.terms[t] = 1.0;
  return op;
}

FactorizedFockVector FockOperator::apply(const FactorizedFockVector& v, std::size_t budget) const {
  if (partition.times() != v.partition.times()) throw InvalidParameter("apply: operator and vector partitions differ");
  FactorizedFockVector r;
  r.partition = partition;
  std::map<std::pair<std::uint32_t, std::uint32_t>, std::uint32_t> memo;
  auto entry = [&](std::uint32_t a, std::uint32_t b) {
    auto [it, inserted] = memo.try_emplace({a, b}, static_cast<std::uint32_t>(r.table.size()));
    if (inserted) r.table.push_back(a == 0 ? v.table[b] : CVector(table[a] * v.table[b]));
    return it->second;
  };
  std::vector<std::uint32_t> t(partition.size());
  for (const auto& [ta, ca] : terms)
    for (const auto& [tb, cb] : v.terms) {
      for (std::size_t i = 0; i < t.size(); ++i) t[i] = entry(ta[i], tb[i]);
      r.terms[t] += ca * cb;
      if (r.terms.size() > budget) throw TermBudgetExceeded("operator application exceeds the term budget");
    }
  return r;
}

FactorizedFockVector FockOperator::apply_vacuum(const FockFactor& f) const {
  return apply(FactorizedFockVector::vacuum(partition, f));
}

FockOperator add(const FockOperator& a, const FockOperator& b, cplx c) {
  if (a.partition.times() != b.partition.times()) throw InvalidParameter("add: operators on different partitions");
  FockOperator r = a;
  const auto off = static_cast<std::uint32_t>(r.table.size()) - 1;
  r.table.insert(r.table.end(), b.table.begin() + 1, b.table.end());
  for (const auto& [t, w] : b.terms) {
    std::vector<std::uint32_t> s = t;
    for (auto& x : s)
      if (x != 0) x += off;
    r.terms[s] += c * w;
  }
  return r;
}

FockOperator compose(const FockOperator& a, const FockOperator& b, std::size_t budget) {
  if (a.partition.times() != b.partition.times()) throw InvalidParameter("compose: operators on different partitions");
  FockOperator r;
  r.partition = a.partition;
  r.table = {a.table[0]};
  std::map<std::pair<std::uint32_t, std::uint32_t>, std::uint32_t> memo{{{0u, 0u}, 0u}};
  auto entry = [&](std::uint32_t i, std::uint32_t j) {
    auto [it, inserted] = memo.try_emplace({i, j}, static_cast<std::uint32_t>(r.table.size()));
    if (inserted) r.table.push_back(i == 0 ? b.table[j] : j == 0 ? a.table[i] : SparseMatrix(a.table[i] * b.table[j]));
    return it->second;
  };
  std::vector<std::uint32_t> t(r.partition.size());
  for (const auto& [ta, ca] : a.terms)
    for (const auto& [tb, cb] : b.terms) {
      for (std::size_t i = 0; i < t.size(); ++i) t[i] = entry(ta[i], tb[i]);
      r.terms[t] += ca * cb;
      if (r.terms.size() > budget) throw TermBudgetExceeded("operator product exceeds the term budget");
    }
  return r;
}

FockOperator quantum_noise_op(NoiseKind kind, const std::variant<CVector, CMatrix>& arg, double s, double t,
                              const FockFactor& f) {
  const Partition p({s, t});
  return FockOperator::local(p, 0, noise_matrix(kind, arg, t - s, f), f);
}

// ---------------------------------------------------------------------------

double exp_tail(double x, std::size_t N) {
  if (x < 0.0) throw InvalidParameter("exp_tail needs x >= 0");
  if (x == 0.0) return 0.0;
  const double p0 = static_cast<double>(N + 1);
  double term = std::exp(p0 * std::log(x) - std::lgamma(p0 + 1.0));
  double sum = 0.0;
  for (double p = p0; term > 0.0; ++p) {
    sum += term;
    if (p > x && term < 1e-18 * sum) break;
    term *= x / (p + 1.0);
  }
  return sum;
}

FactorizedFockVector exponential_vector(const CVector& k, const Partition& p, const FockFactor& f) {
  if (k.size() != static_cast<Eigen::Index>(f.modes())) throw DimensionMismatch("exponential vector: |k| != m");
  FactorizedFockVector v;
  v.partition = p;
  const double nk = k.squaredNorm();
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double h = p.length(i);
    if (nk * h > std::log(10.0) * static_cast<double>(f.cap()) / 3.0)
      throw TailBoundExceeded("exponential vector: |k|^2 (t - s) too large for the particle cap");
    if (exp_tail(nk * h, f.cap()) > 1e-6) throw TailBoundExceeded("exponential vector: truncation error above 1e-6");
    const SparseMatrix c = noise_matrix(NoiseKind::Creation, k, h, f);
    CVector term = f.vacuum(), sum = term;
    for (std::size_t q = 1; q <= f.cap(); ++q) {
      term = (c * term) / static_cast<double>(q);
      sum += term;
    }
    v.table.push_back(sum);
  }
  v.terms[iota_tuple(p.size())] = 1.0;
  return v;
}

double exponential_tail_bound(const CVector& f, const CVector& g, const Partition& p, std::size_t N) {
  const cplx z = f.dot(g);
  double exact = 1.0, bounded = 1.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double h = p.length(i);
    const double b = std::abs(std::exp(h * z));
    exact *= b;
    bounded *= b + exp_tail(h * std::abs(z), N);
  }
  return bounded - exact;
}

// ---------------------------------------------------------------------------

SparseMatrix generator_matrix(const LevyTriple& t, const NcPoly& b, double h, const FockFactor& f) {
  if (t.k_dim() != f.modes()) throw DimensionMismatch("Fock factor mode count differs from the triple's K");
  const BialgebraSpec& B = *t.bialgebra();
  const AlgebraSpec& alg = B.algebra();
  const NcPoly nb = alg.normal_form(b);
  const cplx d = B.counit(nb);
  const auto m = static_cast<Eigen::Index>(f.modes());
  SparseMatrix a = f.identity() * (d + t.psi()(nb - d * NcPoly::unit()) * h);
  if (m == 0) return a;
  a += noise_matrix(NoiseKind::Annihilation, t.eta(alg.involute(nb)), h, f);
  a += noise_matrix(NoiseKind::Preservation, CMatrix(t.rho(nb) - d * CMatrix::Identity(m, m)), h, f);
  a += noise_matrix(NoiseKind::Creation, t.eta(nb), h, f);
  a.prune(cplx(0.0));
  return a;
}

FockOperator generator_process(const LevyTriple& t, const NcPoly& b, double s, double u, const FockFactor& f) {
  return FockOperator::local(Partition({s, u}), 0, generator_matrix(t, b, u - s, f), f);
}

FockOperator convolution_product_process(const LevyTriple& t, const NcPoly& b, const Partition& p,
                                         const FockFactor& f, std::size_t budget) {
  const BialgebraSpec& B = *t.bialgebra();
  const SweedlerExpansion e = iterated_coproduct(B.algebra().normal_form(b), p.size(), B, budget);
  FockOperator op;
  op.partition = p;
  op.table = {f.identity()};
  std::map<std::pair<double, Word>, std::uint32_t> cache;
  std::vector<std::uint32_t> tuple(p.size());
  for (const auto& [legs, c] : e.terms) {
    for (std::size_t i = 0; i < legs.size(); ++i) {
      if (legs[i].empty()) {
        tuple[i] = 0;
        continue;
      }
      auto [it, inserted] = cache.try_emplace({p.length(i), legs[i]}, static_cast<std::uint32_t>(op.table.size()));
      if (inserted) op.table.push_back(generator_matrix(t, NcPoly::monomial(legs[i]), p.length(i), f));
      tuple[i] = it->second;
    }
    op.terms[tuple] += c;
  }
  return op;
}

FactorizedFockVector grouplike_product_vector(const LevyTriple& t, const NcPoly& g, const Partition& p,
                                              const FockFactor& f) {
  const BialgebraSpec& B = *t.bialgebra();
  const NcPoly ng = B.algebra().normal_form(g);
  if (std::abs(B.counit(ng) - 1.0) > 1e-12) throw InvalidParameter("group-like element must have counit 1");
  const cplx psi = t.psi()(ng - NcPoly::unit());
  FactorizedFockVector v = exponential_vector(t.eta(ng), p, f);
  for (std::size_t i = 0; i < p.size(); ++i) v.table[i] *= std::exp(p.length(i) * psi);
  return v;
}

// ---------------------------------------------------------------------------

std::size_t feasible_defect_particles(const FockFactor& f, std::size_t intervals, int d, std::size_t maxDim) {
  std::size_t best = 0;
  double dim = 1.0;
  for (std::size_t k = 1; k <= intervals; ++k) {
    dim += binom(intervals, k) * std::pow(static_cast<double>(f.modes()), static_cast<double>(k));
    if (static_cast<double>(d) * dim > static_cast<double>(maxDim)) break;
    best = k;
  }
  return best;
}

ProductEvolution unitary_product_evolution(const LevyTriple& t, int d, const Partition& p, const FockFactor& f,
                                           std::size_t defectParticles) {
  if (d < 1) throw InvalidParameter("unitary evolution needs d >= 1");
  if (f.cap() < 2) throw InvalidParameter("defect subspace needs a particle cap of at least 2");
  const auto dd = static_cast<std::size_t>(d);
  const std::size_t n = p.size(), D2 = dd * dd;
  const AlgebraSpec& alg = t.bialgebra()->algebra();
  if (alg.size() != 2 * D2) throw DimensionMismatch("triple is not over U<d>");

  // dense per-interval blocks G_i[a][b] = I_{h_i}(x_ab)
  std::map<double, std::vector<CMatrix>> blocks;
  for (std::size_t i = 0; i < n; ++i) {
    auto [it, inserted] = blocks.try_emplace(p.length(i));
    if (!inserted) continue;
    for (int a = 0; a < d; ++a)
      for (int b = 0; b < d; ++b)
        it->second.push_back(CMatrix(generator_matrix(t, NcPoly::monomial({unitary_x(d, a, b)}), p.length(i), f)));
  }
  auto G = [&](std::size_t i, std::size_t a, std::size_t b) -> const CMatrix& {
    return blocks.at(p.length(i))[a * dd + b];
  };

  ProductEvolution r;
  r.vacuumBlock = CMatrix::Identity(d, d);
  for (std::size_t i = 0; i < n; ++i) {
    CMatrix M(d, d);
    for (std::size_t a = 0; a < dd; ++a)
      for (std::size_t b = 0; b < dd; ++b) M(a, b) = G(i, a, b)(0, 0);
    r.vacuumBlock = r.vacuumBlock * M;
  }

  // global configurations: at most one particle per interval, <= K in total;
  // slot 0 is the vacuum, slot s the one-particle state of mode s - 1
  const std::size_t K = defectParticles;
  r.defectParticles = K;
  const std::size_t S = f.modes() + 1;
  std::vector<std::size_t> slotState(S, 0);
  for (std::size_t j = 0; j < f.modes(); ++j) {
    std::vector<std::size_t> occ(f.modes(), 0);
    occ[j] = 1;
    slotState[j + 1] = f.index(occ);
  }
  using Config = std::vector<std::pair<std::uint32_t, std::uint32_t>>;
  std::vector<Config> configs;
  Config cur;
  std::function<void(std::size_t, std::size_t)> gen = [&](std::size_t from, std::size_t left) {
    configs.push_back(cur);
    if (left == 0) return;
    for (std::size_t i = from; i < n; ++i)
      for (std::size_t s = 1; s < S; ++s) {
        cur.emplace_back(static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(s));
        gen(i + 1, left - 1);
        cur.pop_back();
      }
  };
  gen(0, K);
  const std::size_t D = configs.size();
  r.defectDim = D * dd;

  // T[(b,a),(b',a')] = <G[b][b'] e_o, G[a][a'] e_in>, per distinct interval length
  std::map<double, std::size_t> lengthIndex;
  std::vector<std::size_t> hIdx(n);
  std::vector<std::vector<CMatrix>> transfer;
  for (std::size_t i = 0; i < n; ++i) {
    auto [it, inserted] = lengthIndex.try_emplace(p.length(i), transfer.size());
    hIdx[i] = it->second;
    if (!inserted) continue;
    std::vector<CMatrix> tab(S * S, CMatrix(D2, D2));
    for (std::size_t so = 0; so < S; ++so)
      for (std::size_t si = 0; si < S; ++si) {
        CMatrix& M = tab[so * S + si];
        for (std::size_t b = 0; b < dd; ++b)
          for (std::size_t a = 0; a < dd; ++a)
            for (std::size_t b2 = 0; b2 < dd; ++b2)
              for (std::size_t a2 = 0; a2 < dd; ++a2)
                M(b * dd + a, b2 * dd + a2) =
                    G(i, b, b2).col(slotState[so]).dot(G(i, a, a2).col(slotState[si]));
      }
    transfer.push_back(std::move(tab));
  }
  auto T = [&](std::size_t i, std::size_t so, std::size_t si) -> const CMatrix& {
    return transfer[hIdx[i]][so * S + si];
  };
  // vacuum runs over [lo, hi)
  std::vector<CMatrix> runs((n + 1) * (n + 1));
  std::vector<char> have((n + 1) * (n + 1), 0);
  std::function<const CMatrix&(std::size_t, std::size_t)> run = [&](std::size_t lo, std::size_t hi) -> const CMatrix& {
    const std::size_t k = lo * (n + 1) + hi;
    if (!have[k]) {
      runs[k] = hi == lo ? CMatrix(CMatrix::Identity(D2, D2)) : CMatrix(run(lo, hi - 1) * T(hi - 1, 0, 0));
      have[k] = 1;
    }
    return runs[k];
  };
  for (std::size_t lo = 0; lo <= n; ++lo) run(lo, n);

  Eigen::RowVectorXcd start = Eigen::RowVectorXcd::Zero(D2);
  for (std::size_t l = 0; l < dd; ++l) start(l * dd + l) = 1.0;
  CMatrix H = CMatrix::Zero(r.defectDim, r.defectDim);
  Eigen::RowVectorXcd v(D2), tmp(D2);
  for (std::size_t x = 0; x < D; ++x)
    for (std::size_t y = x; y < D; ++y) {
      const Config &cx = configs[x], &cy = configs[y];
      v = start;
      std::size_t pos = 0, ix = 0, iy = 0;
      while (ix < cx.size() || iy < cy.size()) {
        const std::size_t i = std::min(ix < cx.size() ? cx[ix].first : n, iy < cy.size() ? cy[iy].first : n);
        const std::size_t so = (ix < cx.size() && cx[ix].first == i) ? cx[ix++].second : 0;
        const std::size_t si = (iy < cy.size() && cy[iy].first == i) ? cy[iy++].second : 0;
        tmp.noalias() = v * run(pos, i);
        v.noalias() = tmp * T(i, so, si);
        pos = i + 1;
      }
      tmp.noalias() = v * run(pos, n);
      for (std::size_t j = 0; j < dd; ++j)
        for (std::size_t k = 0; k < dd; ++k) {
          cplx e = tmp(j * dd + k);
          if (x == y && j == k) e -= 1.0;
          H(x * dd + j, y * dd + k) = e;
          H(y * dd + k, x * dd + j) = std::conj(e);
        }
    }
  r.unitarityDefect = hermitian_spectral_radius(H);
  return r;
}

// ---------------------------------------------------------------------------

AzemaWienerReport azema_wiener_experiment(double q, const Partition& p, std::size_t cap) {
  const AzemaModel m = make_azema(q);
  const LevyTriple tr = azema_triple(m);
  const FockFactor f(1, cap);
  const std::size_t n = p.size();
  const CVector one = CVector::Ones(1);
  const AlgebraSpec& alg = m.azema->algebra();

  AzemaWienerReport r;
  r.q = q;
  r.n = n;
  r.mesh = p.mesh();
  const double t = p.end() - p.start();

  auto local = [&](std::size_t i, const SparseMatrix& a) { return FockOperator::local(p, i, a, f); };
  auto wiener = [&](std::size_t i) {
    const double h = p.length(i);
    return SparseMatrix(noise_matrix(NoiseKind::Creation, one, h, f) + noise_matrix(NoiseKind::Annihilation, one, h, f));
  };
  auto gen = [&](std::size_t i, Letter l) { return generator_matrix(tr, NcPoly::monomial({l}), p.length(i), f); };
  // sum_j A_j (x) Y_{j+1} (x) ... (x) Y_{last}
  auto chain = [&](const std::function<SparseMatrix(std::size_t)>& A, std::size_t last) {
    FockOperator op;
    op.partition = p;
    op.table = {f.identity()};
    std::vector<std::uint32_t> yIdx(n);
    for (std::size_t i = 0; i < n; ++i) {
      yIdx[i] = static_cast<std::uint32_t>(op.table.size());
      op.table.push_back(gen(i, m.y));
    }
    for (std::size_t j = 0; j < last; ++j) {
      std::vector<std::uint32_t> tup(n, 0);
      tup[j] = static_cast<std::uint32_t>(op.table.size());
      op.table.push_back(A(j));
      for (std::size_t i = j + 1; i < last; ++i) tup[i] = yIdx[i];
      op.terms[tup] += 1.0;
    }
    return op;
  };

  const NcPoly z = parse_poly("x + x^*", alg);
  FockOperator wsum;
  wsum.partition = p;
  wsum.table = {f.identity()};
  for (std::size_t j = 0; j < n; ++j) {
    std::vector<std::uint32_t> tup(n, 0);
    tup[j] = static_cast<std::uint32_t>(wsum.table.size());
    wsum.table.push_back(generator_matrix(tr, z, p.length(j), f));
    wsum.terms[tup] += 1.0;
  }
  const FactorizedFockVector wv = wsum.apply_vacuum(f);
  r.wienerNormSq = inner(wv, wv).real();
  const FactorizedFockVector zv = chain(wiener, n).apply_vacuum(f);
  r.azemaNormSq = inner(zv, zv).real();
  const NcPoly z2 = alg.multiply(z, z);
  r.wienerTarget = conv_exp(m.psi, t, z2, *m.primitive).real();
  r.azemaTarget = conv_exp(m.psi, t, z2, *m.azema).real();

  const FactorizedFockVector xv = chain([&](std::size_t i) { return gen(i, m.x); }, n).apply_vacuum(f);
  r.xOmegaNorm = std::sqrt(std::max(0.0, inner(xv, xv).real()));

  // dX = (q - 1) X dLambda + dA on low-order test vectors
  const CMatrix oneM = CMatrix::Ones(1, 1);
  for (std::size_t k = 1; k < n; ++k) {
    const double h = p.length(k);
    const FockOperator Xt = chain([&](std::size_t i) { return gen(i, m.x); }, k);
    const FockOperator Xth = chain([&](std::size_t i) { return gen(i, m.x); }, k + 1);
    FockOperator R = add(Xth, Xt, -1.0);
    R = add(R, compose(Xt, local(k, noise_matrix(NoiseKind::Preservation, oneM, h, f))), -(q - 1.0));
    R = add(R, local(k, noise_matrix(NoiseKind::Annihilation, one, h, f)), -1.0);
    std::vector<FactorizedFockVector> tests{FactorizedFockVector::vacuum(p, f)};
    const SparseMatrix cr = noise_matrix(NoiseKind::Creation, one, 1.0, f);
    for (std::size_t j : {std::size_t{0}, k - 1, k}) tests.push_back(local(j, cr).apply(tests[0]));
    tests.push_back(local(k, cr).apply(tests[1]));
    for (const auto& w : tests) {
      const FactorizedFockVector rw = R.apply(w);
      r.qsdeResidual = std::max(r.qsdeResidual, std::sqrt(std::max(0.0, inner(rw, rw).real())));
    }
  }
  return r;
}

}  // namespace qlevy
