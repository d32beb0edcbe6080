#include "qlevy/subcoalg.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <deque>

#include "qlevy/error.hpp"

namespace qlevy {

Subcoalgebra::Subcoalgebra(const BialgebraSpec& B, std::size_t dimCap) : B_(&B), dimCap_(dimCap) {
  if (dimCap < 1) throw InvalidParameter("subcoalgebra dimension cap must be at least 1");
}

bool Subcoalgebra::insert(NcPoly v) {
  const double scale = std::max(1.0, v.max_abs());
  std::vector<std::pair<std::size_t, cplx>> hits;
  for (const auto& [w, c] : v.terms()) {
    auto it = pivotIndex_.find(w);
    if (it != pivotIndex_.end()) hits.emplace_back(it->second, c);
  }
  for (const auto& [i, c] : hits) v -= c * basis_[i];
  v.prune(kPivotTolerance * scale);
  if (v.is_zero()) return false;

  const Word* best = nullptr;
  double bestAbs = 0.0;
  for (const auto& [w, c] : v.terms())
    if (std::abs(c) > bestAbs * (1.0 + 1e-12)) {
      bestAbs = std::abs(c);
      best = &w;
    }
  const Word pivot = *best;
  v *= 1.0 / v.coeff(pivot);
  for (NcPoly& b : basis_) {
    const cplx c = b.coeff(pivot);
    if (c != cplx{}) {
      b -= c * v;
      b.prune();
    }
  }
  if (basis_.size() >= dimCap_)
    throw DimCapExceeded("subcoalgebra dimension exceeds cap " + std::to_string(dimCap_));
  pivotIndex_.emplace(pivot, basis_.size());
  pivots_.push_back(pivot);
  basis_.push_back(std::move(v));
  built_ = false;
  return true;
}

void Subcoalgebra::absorb(const NcPoly& p) {
  std::deque<NcPoly> queue;
  auto push = [&](NcPoly v) {
    if (insert(v)) queue.push_back(basis_.back());
  };
  push(B_->algebra().normal_form(p));
  while (!queue.empty()) {
    const NcPoly b = std::move(queue.front());
    queue.pop_front();
    const TensorPoly d = B_->coproduct(b);
    std::map<Word, NcPoly, DegLex> cols, rows;
    for (const auto& [k, c] : d.terms) {
      cols[k.second].add(k.first, c);
      rows[k.first].add(k.second, c);
    }
    for (auto& [w, v] : cols) push(std::move(v));
    for (auto& [w, v] : rows) push(std::move(v));
  }
}

void Subcoalgebra::build_constants() const {
  const std::size_t n = dim();
  constants_.assign(n, CMatrix::Zero(n, n));
  counit_ = CVector::Zero(n);
  for (std::size_t i = 0; i < n; ++i) {
    counit_(i) = B_->counit(basis_[i]);
    for (const auto& [k, c] : B_->coproduct(basis_[i]).terms) {
      auto a = pivotIndex_.find(k.first);
      auto b = pivotIndex_.find(k.second);
      if (a != pivotIndex_.end() && b != pivotIndex_.end()) constants_[i](a->second, b->second) = c;
    }
  }
  built_ = true;
}

const std::vector<CMatrix>& Subcoalgebra::delta_constants() const {
  if (!built_) build_constants();
  return constants_;
}

const CVector& Subcoalgebra::counit_vector() const {
  if (!built_) build_constants();
  return counit_;
}

NcPoly Subcoalgebra::element(const CVector& c) const {
  NcPoly out;
  for (std::size_t i = 0; i < dim(); ++i) {
    if (c(i) == cplx{}) continue;
    out += c(i) * basis_[i];
  }
  out.prune();
  return out;
}

bool Subcoalgebra::contains(const NcPoly& p, double tol) const {
  CVector c(dim());
  for (std::size_t i = 0; i < dim(); ++i) c(i) = p.coeff(pivots_[i]);
  return max_diff(element(c), p) <= tol * std::max(1.0, p.max_abs());
}

CVector Subcoalgebra::coords(const NcPoly& p) const {
  CVector c(dim());
  for (std::size_t i = 0; i < dim(); ++i) c(i) = p.coeff(pivots_[i]);
  if (max_diff(element(c), p) > 1e-9 * std::max(1.0, p.max_abs()))
    throw InvalidParameter("element is not in the subcoalgebra span");
  return c;
}

double Subcoalgebra::closure_residual() const {
  const auto& C = delta_constants();
  double worst = 0.0;
  for (std::size_t i = 0; i < dim(); ++i) {
    TensorPoly rebuilt;
    for (std::size_t j = 0; j < dim(); ++j)
      for (std::size_t k = 0; k < dim(); ++k) {
        const cplx c = C[i](j, k);
        if (c == cplx{}) continue;
        for (const auto& [u, a] : basis_[j].terms())
          for (const auto& [v, b] : basis_[k].terms()) rebuilt.add(u, v, c * a * b);
      }
    const TensorPoly d = B_->coproduct(basis_[i]);
    worst = std::max(worst, max_diff(d, rebuilt) / std::max(1.0, d.max_abs()));
  }
  return worst;
}

Subcoalgebra subcoalgebra_of(const NcPoly& p, const BialgebraSpec& B, std::size_t dimCap) {
  Subcoalgebra s(B, dimCap);
  s.absorb(p);
  return s;
}

TransferMatrix transfer_matrix(const LinearFunctional& psi, const Subcoalgebra& sub) {
  const std::size_t n = sub.dim();
  CVector pv(n);
  for (std::size_t k = 0; k < n; ++k) pv(k) = psi(sub.basis()[k]);
  TransferMatrix T;
  T.functional = psi;
  T.matrix = CMatrix::Zero(n, n);
  const auto& C = sub.delta_constants();
  for (std::size_t i = 0; i < n; ++i) T.matrix.col(i) = C[i] * pv;
  return T;
}

cplx conv_exp(const LinearFunctional& psi, double t, const NcPoly& p, const Subcoalgebra& sub) {
  if (!std::isfinite(t)) throw InvalidParameter("conv_exp: t must be finite");
  if (t == 0.0) return sub.bialgebra().counit(p);
  if (sub.dim() == 0) return 0.0;
  const CVector c = sub.coords(p);
  const CMatrix E = (t * transfer_matrix(psi, sub).matrix).exp();
  return sub.counit_vector().transpose() * (E * c);
}

cplx conv_exp(const LinearFunctional& psi, double t, const NcPoly& p, const BialgebraSpec& B, std::size_t dimCap) {
  const NcPoly q = B.algebra().normal_form(p);
  if (q.is_zero()) return 0.0;
  return conv_exp(psi, t, q, subcoalgebra_of(q, B, dimCap));
}

SeriesResult conv_exp_series(const LinearFunctional& psi, double t, const NcPoly& p, const BialgebraSpec& B,
                             double tol) {
  if (!(tol > 0.0)) throw InvalidParameter("conv_exp_series: tol must be positive");
  NcPoly q = B.algebra().normal_form(p);
  SeriesResult r;
  r.value = B.counit(q);
  r.terms = 1;
  double factor = 1.0;
  int small = 0;
  for (std::size_t n = 1; n < 64; ++n) {
    q = slice_right(q, psi, B);
    if (q.is_zero()) return r;
    factor *= t / static_cast<double>(n);
    const cplx inc = factor * B.counit(q);
    r.value += inc;
    r.terms = n + 1;
    small = std::abs(inc) < tol ? small + 1 : 0;
    if (small >= 3) return r;
  }
  throw NonConvergence("convolution exponential series did not settle within 64 terms");
}

LinearFunctional conv_exp_functional(const LinearFunctional& psi, double t, const BialgebraPtr& B) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "exp(%g %s)", t, psi.name().c_str());
  return LinearFunctional(
      buf, [psi, t, B](const Word& w) { return conv_exp(psi, t, NcPoly::monomial(w), *B); }, psi.hermitian());
}

}  // namespace qlevy
