#include "qlevy/gns.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include <cmath>

#include "qlevy/error.hpp"

namespace qlevy {

LevyTriple::LevyTriple(BialgebraPtr B, std::size_t kDim, std::vector<CVector> etaGen, std::vector<CMatrix> rhoGen,
                       LinearFunctional psi, double tolUsed)
    : B_(std::move(B)),
      kDim_(kDim),
      etaGen_(std::move(etaGen)),
      rhoGen_(std::move(rhoGen)),
      psi_(std::move(psi)),
      tolUsed_(tolUsed) {
  const std::size_t n = B_->algebra().size();
  if (etaGen_.size() != n || rhoGen_.size() != n)
    throw DimensionMismatch("Levy triple: eta/rho tables do not cover the alphabet");
  for (std::size_t g = 0; g < n; ++g)
    if (static_cast<std::size_t>(etaGen_[g].size()) != kDim_ || static_cast<std::size_t>(rhoGen_[g].rows()) != kDim_ ||
        static_cast<std::size_t>(rhoGen_[g].cols()) != kDim_)
      throw DimensionMismatch("Levy triple: generator data has the wrong dimension");
}

CVector LevyTriple::eta(const Word& w) const {
  if (w.empty()) return CVector::Zero(kDim_);
  if (w.size() == 1) return etaGen_.at(w[0]);
  {
    std::lock_guard lk(memo_->mu);
    auto it = memo_->eta.find(w);
    if (it != memo_->eta.end()) return it->second;
  }
  const Word rest(w.begin() + 1, w.end());
  CVector v = rhoGen_.at(w[0]) * eta(rest) + etaGen_.at(w[0]) * B_->counit_word(rest);
  std::lock_guard lk(memo_->mu);
  memo_->eta.try_emplace(w, v);
  return v;
}

CVector LevyTriple::eta(const NcPoly& p) const {
  CVector v = CVector::Zero(kDim_);
  for (const auto& [w, c] : p.terms())
    if (!w.empty()) v += c * eta(w);
  return v;
}

CMatrix LevyTriple::rho(const Word& w) const {
  CMatrix m = CMatrix::Identity(kDim_, kDim_);
  for (Letter l : w) m = m * rhoGen_.at(l);
  return m;
}

CMatrix LevyTriple::rho(const NcPoly& p) const {
  CMatrix m = CMatrix::Zero(kDim_, kDim_);
  for (const auto& [w, c] : p.terms()) m += c * rho(w);
  return m;
}

// ---------------------------------------------------------------------------

CMatrix conditional_gram(const LinearFunctional& psi, const BialgebraSpec& B, std::size_t degreeCap,
                         std::vector<Word>* words) {
  const AlgebraSpec& alg = B.algebra();
  std::vector<Word> ws = normal_words(alg, degreeCap);
  const auto n = static_cast<Eigen::Index>(ws.size());
  std::vector<NcPoly> stars(ws.size());
  std::vector<cplx> eps(ws.size()), psiStar(ws.size()), psiW(ws.size());
  for (std::size_t i = 0; i < ws.size(); ++i) {
    stars[i] = alg.involute(NcPoly::monomial(ws[i]));
    eps[i] = B.counit_word(ws[i]);
    psiStar[i] = psi(stars[i]);
    psiW[i] = psi(ws[i]);
  }
  const cplx psi1 = psi(Word{});
  CMatrix G(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) {
      const cplx vw = psi(alg.multiply(stars[i], NcPoly::monomial(ws[j])));
      G(i, j) = vw - std::conj(eps[i]) * psiW[j] - eps[j] * psiStar[i] + std::conj(eps[i]) * eps[j] * psi1;
    }
  if (words) *words = std::move(ws);
  return G;
}

PositivityReport check_conditional_positivity(const LinearFunctional& psi, const BialgebraSpec& B,
                                              std::size_t degreeCap) {
  PositivityReport rep;
  std::vector<Word> ws;
  const CMatrix G = conditional_gram(psi, B, degreeCap, &ws);
  rep.basisSize = ws.size();
  for (const Word& w : ws)
    rep.hermitianResidual =
        std::max(rep.hermitianResidual, std::abs(psi(B.algebra().involute(NcPoly::monomial(w))) - std::conj(psi(w))));
  rep.hermitianResidual = std::max(rep.hermitianResidual, (G - G.adjoint()).cwiseAbs().maxCoeff());
  if (G.size() == 0) return rep;
  const CMatrix Hm = 0.5 * (G + G.adjoint());
  Eigen::SelfAdjointEigenSolver<CMatrix> es(Hm, Eigen::EigenvaluesOnly);
  rep.minEigenvalue = es.eigenvalues().minCoeff();
  rep.maxEigenvalue = es.eigenvalues().maxCoeff();
  return rep;
}

LevyTriple gns_construct(const LinearFunctional& psi, const BialgebraPtr& B, std::size_t degreeCap,
                         double nullTol) {
  if (degreeCap < 2) throw InvalidParameter("GNS construction needs degreeCap >= 2");
  const AlgebraSpec& alg = B->algebra();
  std::vector<Word> ws;
  const CMatrix G = conditional_gram(psi, *B, degreeCap, &ws);
  const auto n = G.rows();
  const CMatrix Hm = 0.5 * (G + G.adjoint());
  Eigen::SelfAdjointEigenSolver<CMatrix> es(Hm);
  const Eigen::VectorXd& lam = es.eigenvalues();
  const double lmax = n > 0 ? std::max(0.0, lam.maxCoeff()) : 0.0;
  if (n > 0 && lam.minCoeff() < -1e-10 * std::max(1.0, lmax))
    throw PositivityViolation("generator is not conditionally positive (min eigenvalue " +
                              std::to_string(lam.minCoeff()) + ")");

  std::vector<Eigen::Index> keep;
  for (Eigen::Index k = n - 1; k >= 0; --k)
    if (lam(k) > nullTol * lmax && lam(k) > 0.0) keep.push_back(k);
  const std::size_t kDim = keep.size();

  // eta(w)_k = sqrt(l_k) conj(e_k[w])
  CMatrix Eta(kDim, n);
  for (std::size_t k = 0; k < kDim; ++k) {
    CVector e = es.eigenvectors().col(keep[k]);
    const double emax = e.cwiseAbs().maxCoeff();
    for (Eigen::Index i = 0; i < n; ++i)
      if (std::abs(e(i)) > 1e-8 * emax) {
        e *= std::conj(e(i)) / std::abs(e(i));
        break;
      }
    Eta.row(k) = std::sqrt(lam(keep[k])) * e.conjugate().transpose();
  }
  std::map<Word, Eigen::Index, DegLex> index;
  for (Eigen::Index i = 0; i < n; ++i) index.emplace(ws[i], i);
  auto eta_poly = [&](const NcPoly& p) {
    CVector v = CVector::Zero(kDim);
    for (const auto& [w, c] : p.terms()) {
      if (w.empty()) continue;
      auto it = index.find(w);
      if (it == index.end()) throw DegreeCapExceeded("GNS: word past the degree cap");
      v += c * Eta.col(it->second);
    }
    return v;
  };

  std::vector<CVector> etaGen(alg.size());
  for (Letter g = 0; g < alg.size(); ++g) etaGen[g] = Eta.col(index.at(Word{g}));

  std::vector<Eigen::Index> lower;
  for (Eigen::Index i = 0; i < n; ++i)
    if (ws[i].size() + 1 <= degreeCap) lower.push_back(i);
  CMatrix Ein(kDim, lower.size());
  for (std::size_t j = 0; j < lower.size(); ++j) Ein.col(j) = Eta.col(lower[j]);
  std::vector<CMatrix> rho(alg.size(), CMatrix::Zero(kDim, kDim));
  if (kDim > 0) {
    Eigen::CompleteOrthogonalDecomposition<CMatrix> cod(Ein.transpose());
    cod.setThreshold(1e-10);
    if (static_cast<std::size_t>(cod.rank()) < kDim)
      throw RankDeficiency("GNS: eta of words below the degree cap does not span K; raise degreeCap");
    for (Letter g = 0; g < alg.size(); ++g) {
      CMatrix Tout(kDim, lower.size());
      for (std::size_t j = 0; j < lower.size(); ++j) {
        const Word& w = ws[lower[j]];
        Tout.col(j) = eta_poly(alg.multiply_words(Word{g}, w)) - B->counit_word(w) * etaGen[g];
      }
      rho[g] = cod.solve(Tout.transpose()).transpose();
      const double res = (rho[g] * Ein - Tout).cwiseAbs().maxCoeff();
      if (res > 1e-6)
        throw RankDeficiency("GNS: rho(" + alg.generator(g).name + ") is not well defined at this degree cap (residual " +
                             std::to_string(res) + ")");
    }
  }
  LevyTriple t(B, kDim, std::move(etaGen), std::move(rho), psi, nullTol);
  t.fittedWords = std::move(ws);
  return t;
}

// ---------------------------------------------------------------------------

LevyTriple unitary_triple(const UnitaryTripleParams& p, const BialgebraPtr& Ud) {
  const int d = p.d;
  if (d < 1 || static_cast<int>(Ud->algebra().size()) != 2 * d * d)
    throw InvalidParameter("unitary triple: d does not match the bialgebra");
  if (p.W.rows() != p.W.cols() || p.W.rows() % d != 0) throw InvalidParameter("unitary triple: W must be dm x dm");
  const auto m = p.W.rows() / d;
  const auto N = p.W.rows();
  if ((p.W.adjoint() * p.W - CMatrix::Identity(N, N)).cwiseAbs().maxCoeff() > 1e-12)
    throw InvalidParameter("unitary triple: W is not unitary");
  if (p.H.rows() != d || p.H.cols() != d || (p.H - p.H.adjoint()).cwiseAbs().maxCoeff() > 1e-12)
    throw InvalidParameter("unitary triple: H must be a self-adjoint d x d matrix");
  if (static_cast<int>(p.L.size()) != d) throw InvalidParameter("unitary triple: L must be d x d");
  for (const auto& row : p.L) {
    if (static_cast<int>(row.size()) != d) throw InvalidParameter("unitary triple: L must be d x d");
    for (const auto& v : row)
      if (v.size() != m) throw InvalidParameter("unitary triple: L entries must lie in C^m");
  }

  const std::size_t ng = 2 * d * d;
  std::vector<CVector> eta(ng);
  std::vector<CMatrix> rho(ng);
  std::vector<cplx> psiGen(ng);
  for (int k = 0; k < d; ++k)
    for (int l = 0; l < d; ++l) {
      rho[unitary_x(d, k, l)] = p.W.block(k * m, l * m, m, m);
      rho[unitary_xs(d, k, l)] = p.W.block(k * m, l * m, m, m).adjoint();
      eta[unitary_x(d, k, l)] = p.L[k][l];
      cplx M = 0.0;
      for (int i = 0; i < d; ++i) M += p.L[i][k].dot(p.L[i][l]);
      psiGen[unitary_x(d, k, l)] = -0.5 * M + cplx(0.0, 1.0) * p.H(k, l);
    }
  // x*x = 1 gives eta(x*_ji) = -sum_k W_ki^* L_kj
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      CVector v = CVector::Zero(m);
      for (int k = 0; k < d; ++k) v -= p.W.block(k * m, i * m, m, m).adjoint() * p.L[k][j];
      eta[unitary_xs(d, j, i)] = v;
    }
  for (int k = 0; k < d; ++k)
    for (int l = 0; l < d; ++l) psiGen[unitary_xs(d, k, l)] = std::conj(psiGen[unitary_x(d, k, l)]);

  LevyTriple base(Ud, m, eta, rho, LinearFunctional{});
  const AlgebraSpec* alg = &Ud->algebra();
  auto psiMemo = std::make_shared<std::map<Word, cplx, DegLex>>();
  auto mu = std::make_shared<std::mutex>();
  auto rec = std::make_shared<std::function<cplx(const Word&)>>();
  *rec = [base, psiGen, Ud, alg, psiMemo, mu, recw = std::weak_ptr(rec)](const Word& w) -> cplx {
    if (w.empty()) return 0.0;
    if (w.size() == 1) return psiGen[w[0]];
    {
      std::lock_guard lk(*mu);
      auto it = psiMemo->find(w);
      if (it != psiMemo->end()) return it->second;
    }
    auto self = recw.lock();
    const Letter g = w[0];
    const Word rest(w.begin() + 1, w.end());
    const GeneratorSymbol& sym = alg->generator(g);
    const CVector etaGs = sym.adjointScale * base.eta(Word{sym.adjoint});
    const cplx v = Ud->counit_word(Word{g}) * (*self)(rest) + psiGen[g] * Ud->counit_word(rest) +
                   etaGs.dot(base.eta(rest));
    std::lock_guard lk(*mu);
    psiMemo->emplace(w, v);
    return v;
  };
  LinearFunctional psi("unitary_psi", [rec](const Word& w) { return (*rec)(w); }, true);
  return LevyTriple(Ud, m, std::move(eta), std::move(rho), std::move(psi), 1e-12);
}

UnitaryTripleParams random_unitary_params(int d, int m, std::mt19937_64& rng, double lScale) {
  std::normal_distribution<double> g(0.0, 1.0);
  const int N = d * m;
  CMatrix A(N, N);
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j) A(i, j) = cplx(g(rng), g(rng));
  Eigen::HouseholderQR<CMatrix> qr(A);
  UnitaryTripleParams p;
  p.d = d;
  p.W = qr.householderQ() * CMatrix::Identity(N, N);
  p.L.assign(d, std::vector<CVector>(d, CVector::Zero(m)));
  for (int k = 0; k < d; ++k)
    for (int l = 0; l < d; ++l)
      for (int a = 0; a < m; ++a) p.L[k][l](a) = lScale * cplx(g(rng), g(rng));
  CMatrix Hr(d, d);
  for (int k = 0; k < d; ++k)
    for (int l = 0; l < d; ++l) Hr(k, l) = cplx(g(rng), g(rng));
  p.H = 0.5 * (Hr + Hr.adjoint());
  return p;
}

LevyTriple azema_triple(const AzemaModel& m) {
  std::vector<CVector> eta(3, CVector::Zero(1));
  eta[m.xs](0) = 1.0;
  std::vector<CMatrix> rho(3, CMatrix::Zero(1, 1));
  rho[m.y](0, 0) = m.q;
  return LevyTriple(m.azema, 1, std::move(eta), std::move(rho), m.psi);
}

// ---------------------------------------------------------------------------

TripleResiduals levy_triple_residuals(const LevyTriple& t, std::size_t nSamples, std::mt19937_64& rng,
                                      std::size_t maxDegree) {
  const BialgebraSpec& B = *t.bialgebra();
  const AlgebraSpec& alg = B.algebra();
  const LinearFunctional& psi = t.psi();
  std::vector<std::pair<NcPoly, NcPoly>> pairs;
  for (Letter a = 0; a < alg.size(); ++a)
    for (Letter b = 0; b < alg.size(); ++b) pairs.emplace_back(NcPoly::monomial({a}), NcPoly::monomial({b}));
  for (std::size_t k = 0; k < nSamples; ++k)
    pairs.emplace_back(random_poly(alg, maxDegree, 2, rng), random_poly(alg, maxDegree, 2, rng));

  TripleResiduals r;
  auto rel = [](double v, double scale) { return v / std::max(1.0, scale); };
  for (const auto& [a, b] : pairs) {
    const NcPoly ab = alg.multiply(a, b);
    const cplx da = B.counit(a), db = B.counit(b);
    const CVector etaAb = t.eta(ab);
    const cplx psiAb = psi(ab);
    const cplx rhs = da * psi(b) + psi(a) * db + t.eta(alg.involute(a)).dot(t.eta(b));
    r.eq21 = std::max(r.eq21, rel(std::abs(psiAb - rhs), std::abs(psiAb)));
    if (t.k_dim() == 0) continue;
    const CVector coc = t.rho(a) * t.eta(b) + t.eta(a) * db;
    r.cocycle = std::max(r.cocycle, rel((etaAb - coc).cwiseAbs().maxCoeff(), etaAb.cwiseAbs().maxCoeff()));
    const CMatrix rab = t.rho(ab);
    r.rhoMultiplicative = std::max(
        r.rhoMultiplicative, rel((rab - t.rho(a) * t.rho(b)).cwiseAbs().maxCoeff(), rab.cwiseAbs().maxCoeff()));
    const CMatrix ras = t.rho(alg.involute(a));
    r.rhoStar = std::max(r.rhoStar, rel((ras - t.rho(a).adjoint()).cwiseAbs().maxCoeff(), ras.cwiseAbs().maxCoeff()));
  }
  return r;
}

}  // namespace qlevy
