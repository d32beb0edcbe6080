#include "qlevy/gram.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <deque>
#include <iostream>
#include <limits>
#include <optional>

#include "qlevy/error.hpp"

namespace qlevy {

namespace {

struct PolyLess {
  bool operator()(const NcPoly& a, const NcPoly& b) const {
    if (a.size() != b.size()) return a.size() < b.size();
    DegLex less;
    for (auto ia = a.terms().begin(), ib = b.terms().begin(); ia != a.terms().end(); ++ia, ++ib) {
      if (less(ia->first, ib->first)) return true;
      if (less(ib->first, ia->first)) return false;
      if (ia->second.real() != ib->second.real()) return ia->second.real() < ib->second.real();
      if (ia->second.imag() != ib->second.imag()) return ia->second.imag() < ib->second.imag();
    }
    return false;
  }
};

struct Interner {
  std::mutex mu;
  std::deque<NcPoly> polys;
  std::map<NcPoly, EntryId, PolyLess> index;
};

Interner& interner() {
  static Interner in;
  return in;
}

std::vector<EntryId> repeat(EntryId a, std::size_t m) { return std::vector<EntryId>(m, a); }

/// Cartesian product of per-position expansions.
using Piece = std::vector<std::pair<std::vector<EntryId>, cplx>>;

void expand_product(const std::vector<const Piece*>& pieces, cplx coef, FactorizedVectorSum& out,
                    std::size_t budget) {
  std::vector<std::pair<std::vector<EntryId>, cplx>> acc{{{}, coef}};
  for (const Piece* p : pieces) {
    std::vector<std::pair<std::vector<EntryId>, cplx>> next;
    next.reserve(acc.size() * p->size());
    for (const auto& [prefix, c] : acc)
      for (const auto& [tuple, d] : *p) {
        std::vector<EntryId> t = prefix;
        t.insert(t.end(), tuple.begin(), tuple.end());
        next.emplace_back(std::move(t), c * d);
      }
    acc = std::move(next);
    if (acc.size() > budget) throw TermBudgetExceeded("vector expansion exceeds " + std::to_string(budget) + " terms");
  }
  for (auto& [t, c] : acc) out.add(t, c);
  if (out.size() > budget) throw TermBudgetExceeded("vector expansion exceeds " + std::to_string(budget) + " terms");
}

bool same_times(const Partition& a, const Partition& b) { return a.times() == b.times(); }

// Legs of Delta_m(a), interned; m = 1 is a itself.
class PieceCache {
 public:
  PieceCache(const BialgebraSpec& B, std::size_t budget) : B_(B), budget_(budget) {}

  const Piece& get(EntryId a, std::size_t m) {
    auto it = cache_.find({a, m});
    if (it != cache_.end()) return it->second;
    Piece p;
    if (m == 1) {
      p.emplace_back(std::vector<EntryId>{a}, 1.0);
    } else {
      for (const auto& [legs, c] : iterated_coproduct(entry_poly(a), m, B_, budget_).terms) {
        std::vector<EntryId> t;
        for (const Word& w : legs) {
          const NcPoly q = B_.algebra().normal_form(NcPoly::monomial(w));
          if (q.is_zero()) break;
          t.push_back(intern_entry(q));
        }
        if (t.size() == legs.size()) p.emplace_back(std::move(t), c);
      }
    }
    return cache_.emplace(std::make_pair(a, m), std::move(p)).first->second;
  }

 private:
  const BialgebraSpec& B_;
  std::size_t budget_;
  std::map<std::pair<EntryId, std::size_t>, Piece> cache_;
};

// Suffix-shared form of a vector sum: node = list of (entry, child, factor),
// node 0 is the empty suffix. Nodes are hash-consed on their edge lists with
// the first factor pulled out, so equal suffix sums share a node.
struct Dag {
  struct Edge {
    EntryId a;
    std::uint32_t child;
    cplx f;
    bool operator<(const Edge& o) const {
      if (a != o.a) return a < o.a;
      if (child != o.child) return child < o.child;
      if (f.real() != o.f.real()) return f.real() < o.f.real();
      return f.imag() < o.f.imag();
    }
  };
  /// tuple (x) leaf node, weighted.
  struct Item {
    std::vector<EntryId> tuple;
    std::uint32_t leaf;
    cplx w;
  };
  using Node = std::pair<std::uint32_t, cplx>;

  std::vector<std::vector<Edge>> nodes{{}};
  std::map<std::vector<Edge>, std::uint32_t> memo;
  std::uint32_t root = 0;
  cplx rootFactor = 0.0;

  Node intern(std::vector<Edge> edges) {
    std::erase_if(edges, [](const Edge& e) { return e.f == cplx{}; });
    if (edges.empty()) return {0, 0.0};
    const cplx lead = edges.front().f;
    for (Edge& e : edges) e.f /= lead;
    auto [pos, inserted] = memo.try_emplace(edges, static_cast<std::uint32_t>(nodes.size()));
    if (inserted) nodes.push_back(std::move(edges));
    return {pos->second, lead};
  }

  /// items[lo, hi) sorted by (tuple, leaf), sharing tuple[0, k).
  Node build(const std::vector<Item>& items, std::size_t lo, std::size_t hi, std::size_t k) {
    const std::size_t L = items[lo].tuple.size();
    std::vector<Edge> edges;
    for (std::size_t i = lo; i < hi;) {
      const EntryId a = items[i].tuple[k];
      std::size_t end = i;
      while (end < hi && items[end].tuple[k] == a) ++end;
      if (k + 1 == L) {
        for (std::size_t j = i; j < end; ++j) {
          if (!edges.empty() && edges.back().a == a && edges.back().child == items[j].leaf)
            edges.back().f += items[j].w;
          else
            edges.push_back({a, items[j].leaf, items[j].w});
        }
      } else {
        auto [child, f] = build(items, i, end, k + 1);
        edges.push_back({a, child, f});
      }
      i = end;
    }
    return intern(std::move(edges));
  }

  Node build(std::vector<Item> items) {
    if (items.empty()) return {0, 0.0};
    std::sort(items.begin(), items.end(), [](const Item& x, const Item& y) {
      return x.tuple != y.tuple ? x.tuple < y.tuple : x.leaf < y.leaf;
    });
    return build(items, 0, items.size(), 0);
  }

  explicit Dag(const TupleSum& terms) {
    if (terms.empty()) return;
    std::vector<Item> items;
    for (const auto& [t, c] : terms) items.push_back({t, 0, c});
    std::tie(root, rootFactor) = build(std::move(items));
  }

  /// Same vector over a refinement: each edge at position i is replaced by the
  /// legs of Delta_{count[i]} of its entry.
  Dag(const Dag& d, const std::vector<std::size_t>& count, PieceCache& pieces) {
    std::vector<std::optional<Node>> done(d.nodes.size());
    done[0] = Node{0, 1.0};
    std::function<Node(std::uint32_t, std::size_t)> expand = [&](std::uint32_t id, std::size_t depth) -> Node {
      if (done[id]) return *done[id];
      std::vector<Item> items;
      for (const Edge& e : d.nodes[id]) {
        const auto [child, fc] = expand(e.child, depth + 1);
        if (fc == cplx{}) continue;
        for (const auto& [t, c] : pieces.get(e.a, count[depth])) items.push_back({t, child, e.f * fc * c});
      }
      return *(done[id] = build(std::move(items)));
    };
    if (d.rootFactor == cplx{}) return;
    const auto [r, f] = expand(d.root, 0);
    root = r;
    rootFactor = d.rootFactor * f;
  }
};

std::vector<std::size_t> piece_counts(const Partition& coarse, const Partition& gamma) {
  if (!gamma.refines(coarse)) throw InvalidParameter("refine: target partition is not a refinement");
  const auto& gt = gamma.times();
  std::vector<std::size_t> count;
  for (std::size_t i = 0; i < coarse.size(); ++i) {
    const auto lo = std::lower_bound(gt.begin(), gt.end(), coarse.times()[i]);
    const auto hi = std::lower_bound(gt.begin(), gt.end(), coarse.times()[i + 1]);
    count.push_back(static_cast<std::size_t>(hi - lo));
  }
  return count;
}

struct PairHash {
  std::size_t operator()(std::uint64_t k) const noexcept { return std::hash<std::uint64_t>{}(k * 0x9e3779b97f4a7c15ull); }
};

}  // namespace

EntryId intern_entry(const NcPoly& p) {
  Interner& in = interner();
  std::lock_guard lock(in.mu);
  auto it = in.index.find(p);
  if (it != in.index.end()) return it->second;
  const auto id = static_cast<EntryId>(in.polys.size());
  in.polys.push_back(p);
  in.index.emplace(p, id);
  return id;
}

const NcPoly& entry_poly(EntryId id) {
  Interner& in = interner();
  std::lock_guard lock(in.mu);
  return in.polys.at(id);
}

void FactorizedVectorSum::add(const std::vector<EntryId>& tuple, cplx c) {
  if (tuple.size() != partition.size()) throw InvalidParameter("vector term length does not match the partition");
  auto [it, inserted] = terms.try_emplace(tuple, c);
  if (!inserted) it->second += c;
}

void FactorizedVectorSum::prune() {
  for (auto it = terms.begin(); it != terms.end();) {
    if (std::abs(it->second) <= kDropThreshold)
      it = terms.erase(it);
    else
      ++it;
  }
}

FactorizedVectorSum singleton_vector(const NcPoly& b, double s, double t) {
  FactorizedVectorSum u;
  u.partition = Partition({s, t});
  if (!b.is_zero()) u.add({intern_entry(b)}, 1.0);
  return u;
}

FactorizedVectorSum theta_expand(const NcPoly& c, const Morphism& kappa, const Partition& alpha,
                                 std::size_t budget) {
  const SweedlerExpansion e = iterated_coproduct(kappa.source->algebra().normal_form(c), alpha.size(),
                                                 *kappa.source, budget);
  FactorizedVectorSum u;
  u.partition = alpha;
  std::map<Word, std::optional<EntryId>, DegLex> image;
  std::vector<EntryId> tuple;
  for (const auto& [legs, coef] : e.terms) {
    tuple.clear();
    for (const Word& w : legs) {
      auto it = image.find(w);
      if (it == image.end()) {
        const NcPoly p = apply_morphism(kappa, NcPoly::monomial(w));
        it = image.emplace(w, p.is_zero() ? std::nullopt : std::optional<EntryId>(intern_entry(p))).first;
      }
      if (!it->second) break;
      tuple.push_back(*it->second);
    }
    if (tuple.size() == legs.size()) u.add(tuple, coef);
  }
  u.prune();
  return u;
}

FactorizedVectorSum theta_expand(const GroupLikeCarrier::Element& c, const GroupLikeCarrier& C,
                                 const Partition& alpha) {
  FactorizedVectorSum u;
  u.partition = alpha;
  for (const auto& [k, coef] : c) u.add(repeat(intern_entry(C.key_poly(k)), alpha.size()), coef);
  u.prune();
  return u;
}

FactorizedVectorSum zeta_expand(const NcPoly& b, const TensorBialgebra& Tind, const GroupLikeCarrier& C,
                                const Partition& alpha, std::size_t innerMeshFactor, std::size_t budget) {
  if (innerMeshFactor < 1) throw InvalidParameter("inner mesh factor must be at least 1");
  const BialgebraSpec& B = *Tind.base;
  const std::size_t n = alpha.size(), m = innerMeshFactor;
  std::vector<double> ts{alpha.start()};
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 1; j < m; ++j)
      ts.push_back(alpha.times()[i] + alpha.length(i) * static_cast<double>(j) / static_cast<double>(m));
    ts.push_back(alpha.times()[i + 1]);
  }
  FactorizedVectorSum u;
  u.partition = Partition(std::move(ts));

  const SweedlerExpansion e = iterated_coproduct(B.algebra().normal_form(b), n, B, budget);
  std::map<Word, Piece, DegLex> pieces;
  std::vector<const Piece*> row(n);
  for (const auto& [legs, coef] : e.terms) {
    for (std::size_t i = 0; i < n; ++i) {
      auto it = pieces.find(legs[i]);
      if (it == pieces.end()) {
        const NcPoly leg = B.algebra().normal_form(NcPoly::monomial(legs[i]));
        Piece p;
        for (const auto& [k, c] : C.kappa_tilde(Tind.lift(leg), Tind))
          if (std::abs(c) > kDropThreshold) p.emplace_back(repeat(intern_entry(C.key_poly(k)), m), c);
        it = pieces.emplace(legs[i], std::move(p)).first;
      }
      row[i] = &it->second;
    }
    expand_product(row, coef, u, budget);
  }
  u.prune();
  return u;
}

FactorizedVectorSum refine(const FactorizedVectorSum& u, const Partition& gamma, const BialgebraSpec& B,
                           std::size_t budget) {
  if (same_times(u.partition, gamma)) return u;
  const std::vector<std::size_t> count = piece_counts(u.partition, gamma);
  FactorizedVectorSum out;
  out.partition = gamma;
  PieceCache pieces(B, budget);
  std::vector<const Piece*> row(u.partition.size());
  for (const auto& [tuple, coef] : u.terms) {
    for (std::size_t i = 0; i < tuple.size(); ++i) row[i] = &pieces.get(tuple[i], count[i]);
    expand_product(row, coef, out, budget);
  }
  out.prune();
  return out;
}

// ---------------------------------------------------------------------------

PhiCache::PhiCache(LinearFunctional psi, BialgebraPtr B) : psi_(std::move(psi)), B_(std::move(B)) {
  if (!psi_ || !B_) throw InvalidParameter("PhiCache needs a functional and a bialgebra");
}

PhiCache::Block& PhiCache::block(const NcPoly& p) {
  const EntryId id = intern_entry(p);
  auto it = blocks_.find(id);
  if (it != blocks_.end()) return it->second;
  Block b;
  b.sub = std::make_shared<Subcoalgebra>(subcoalgebra_of(p, *B_));
  b.M = transfer_matrix(psi_, *b.sub).matrix;
  b.coords = b.sub->coords(p);
  return blocks_.emplace(id, std::move(b)).first->second;
}

cplx PhiCache::phi(double h, const NcPoly& p) {
  if (!std::isfinite(h) || h < 0.0) throw InvalidParameter("phi: interval length must be finite and >= 0");
  const NcPoly q = B_->algebra().normal_form(p);
  if (q.is_zero()) return 0.0;
  std::lock_guard lock(mu_);
  if (h == 0.0) return B_->counit(q);
  Block& b = block(q);
  auto it = b.values.find(h);
  if (it != b.values.end()) return it->second;
  const CMatrix E = (h * b.M).exp();
  const cplx v = b.sub->counit_vector().transpose() * (E * b.coords);
  if (++evaluations_ > 100'000 && !warned_) {
    warned_ = true;
    std::cerr << "warning: more than 100000 distinct phi_h evaluations\n";
  }
  return b.values.emplace(h, v).first->second;
}

cplx PhiCache::phi(double h, EntryId a, EntryId b) {
  EntryId prod;
  {
    std::lock_guard lock(mu_);
    auto it = products_.find({a, b});
    if (it != products_.end()) {
      prod = it->second;
    } else {
      const AlgebraSpec& alg = B_->algebra();
      prod = intern_entry(alg.multiply(alg.involute(entry_poly(a)), entry_poly(b)));
      products_.emplace(std::make_pair(a, b), prod);
    }
  }
  return phi(h, entry_poly(prod));
}

// ---------------------------------------------------------------------------

namespace {

cplx dag_pairing(const Dag& du, const Dag& dv, std::size_t n, const PairKernel& kernel) {
  if (du.rootFactor == cplx{} || dv.rootFactor == cplx{}) return 0.0;
  std::vector<std::unordered_map<std::uint64_t, cplx, PairHash>> memo(n);
  std::function<cplx(std::uint32_t, std::uint32_t, std::size_t)> G = [&](std::uint32_t a, std::uint32_t b,
                                                                         std::size_t depth) -> cplx {
    if (depth == n) return 1.0;
    const std::uint64_t key = (static_cast<std::uint64_t>(a) << 32) | b;
    auto it = memo[depth].find(key);
    if (it != memo[depth].end()) return it->second;
    cplx s = 0.0;
    for (const auto& ea : du.nodes[a])
      for (const auto& eb : dv.nodes[b]) {
        const cplx k = kernel(depth, ea.a, eb.a);
        if (k == cplx{}) continue;
        s += std::conj(ea.f) * eb.f * k * G(ea.child, eb.child, depth + 1);
      }
    memo[depth].emplace(key, s);
    return s;
  };
  return std::conj(du.rootFactor) * dv.rootFactor * G(du.root, dv.root, 0);
}

}  // namespace

cplx tuple_sum_pairing(const TupleSum& u, const TupleSum& v, std::size_t n, const PairKernel& kernel) {
  for (const TupleSum* w : {&u, &v})
    if (!w->empty() && w->begin()->first.size() != n) throw InvalidParameter("tuple length does not match");
  if (u.empty() || v.empty()) return 0.0;
  return dag_pairing(Dag(u), Dag(v), n, kernel);
}

cplx gram(const FactorizedVectorSum& u, const FactorizedVectorSum& v, PhiCache& cache) {
  if (u.partition.start() != v.partition.start() || u.partition.end() != v.partition.end())
    throw InvalidParameter("gram: vectors live on different intervals");
  if (u.terms.empty() || v.terms.empty()) return 0.0;
  const Partition gamma = common_refinement(u.partition, v.partition);
  PieceCache pieces(*cache.bialgebra(), kExpansionBudget);
  const Dag du(Dag(u.terms), piece_counts(u.partition, gamma), pieces);
  const Dag dv(Dag(v.terms), piece_counts(v.partition, gamma), pieces);
  return dag_pairing(du, dv, gamma.size(),
                     [&](std::size_t i, EntryId a, EntryId b) { return cache.phi(gamma.length(i), a, b); });
}

cplx gram(const FactorizedVectorSum& u, const FactorizedVectorSum& v, const LinearFunctional& psi,
          const BialgebraPtr& B) {
  PhiCache cache(psi, B);
  return gram(u, v, cache);
}

cplx gram_pairs(const FactorizedVectorSum& u, const FactorizedVectorSum& v, PhiCache& cache) {
  const Partition gamma = common_refinement(u.partition, v.partition);
  const BialgebraSpec& B = *cache.bialgebra();
  const FactorizedVectorSum ru = refine(u, gamma, B), rv = refine(v, gamma, B);
  cplx total = 0.0;
  for (const auto& [ta, ca] : ru.terms)
    for (const auto& [tb, cb] : rv.terms) {
      cplx p = std::conj(ca) * cb;
      for (std::size_t i = 0; i < ta.size() && p != cplx{}; ++i) p *= cache.phi(gamma.length(i), ta[i], tb[i]);
      total += p;
    }
  return total;
}

cplx convolved_pairing(const NcPoly& c, const NcPoly& d, const Morphism& kappa, const Partition& alpha,
                       PhiCache& cache) {
  const BialgebraSpec& S = *kappa.source;
  const AlgebraSpec& alg = S.algebra();
  std::map<Word, EntryId, DegLex> image;
  auto img = [&](const Word& w) {
    auto it = image.find(w);
    if (it == image.end()) it = image.emplace(w, intern_entry(apply_morphism(kappa, NcPoly::monomial(w)))).first;
    return it->second;
  };
  auto L = [&](std::size_t i, const Word& a, const Word& b) {
    return cache.phi(alpha.length(i), img(a), img(b));
  };

  using PairPoly = std::map<std::pair<Word, Word>, cplx>;
  PairPoly state;
  const NcPoly nc = alg.normal_form(c), nd = alg.normal_form(d);
  for (const auto& [w, cw] : nc.terms())
    for (const auto& [v, cv] : nd.terms()) state[{w, v}] += std::conj(cw) * cv;
  for (std::size_t i = alpha.size(); i-- > 1;) {
    PairPoly next;
    for (const auto& [wv, s] : state) {
      const TensorPoly& dw = S.coproduct_word(wv.first);
      const TensorPoly& dv = S.coproduct_word(wv.second);
      for (const auto& [lw, cw] : dw.terms)
        for (const auto& [lv, cv] : dv.terms) {
          const cplx k = L(i, lw.second, lv.second);
          if (k == cplx{}) continue;
          next[{lw.first, lv.first}] += s * std::conj(cw) * cv * k;
        }
    }
    state.clear();
    for (auto& [k, s] : next)
      if (std::abs(s) > kDropThreshold) state.emplace(k, s);
  }
  cplx v = 0.0;
  for (const auto& [wv, s] : state) v += s * L(0, wv.first, wv.second);
  return v;
}

cplx grouplike_conv_exp(const LinearFunctional& psi, double t, const GroupLikeCarrier::Element& c,
                        const GroupLikeCarrier& C) {
  cplx v = 0.0;
  for (const auto& [k, coef] : c) v += coef * std::exp(t * psi(C.key_poly(k)));
  return v;
}

LinearFunctional pullback(const LinearFunctional& psi, const Morphism& kappa) {
  return LinearFunctional(
      psi.name() + " o " + kappa.name,
      [psi, kappa](const Word& w) { return psi(apply_morphism(kappa, NcPoly::monomial(w))); }, psi.hermitian());
}

// ---------------------------------------------------------------------------

namespace {

void fit_bound(std::vector<ConvergenceRow>& rows, double len) {
  if (rows.empty()) return;
  double C = 0.0;
  const std::size_t from = rows.size() >= 2 ? rows.size() - 2 : 0;
  for (std::size_t i = from; i < rows.size(); ++i)
    if (rows[i].mesh > 0.0) C = std::max(C, rows[i].defect / (rows[i].mesh * len));
  for (auto& r : rows) r.bound = C * r.mesh * len;
}

}  // namespace

std::vector<ConvergenceRow> convergence_sweep(const VectorBuilder& c, const VectorBuilder& d, cplx target,
                                              double s, double t, const std::vector<std::size_t>& meshes,
                                              PhiCache& cache, std::optional<double> normTarget) {
  std::vector<ConvergenceRow> rows;
  FactorizedVectorSum prev;
  double prevNorm = 0.0;
  for (std::size_t n : meshes) {
    const Partition a = Partition::uniform(s, t, n);
    FactorizedVectorSum u = c(a);
    const FactorizedVectorSum v = d(a);
    ConvergenceRow r;
    r.n = n;
    r.mesh = a.mesh();
    r.normSq = gram(u, u, cache).real();
    r.cross = gram(u, v, cache);
    r.defect = std::abs(r.cross - target);
    r.normDefect = normTarget ? std::abs(r.normSq - *normTarget) : std::numeric_limits<double>::quiet_NaN();
    r.cauchy = rows.empty() ? std::numeric_limits<double>::quiet_NaN()
                            : std::max(0.0, r.normSq + prevNorm - 2.0 * gram(prev, u, cache).real());
    rows.push_back(r);
    prev = std::move(u);
    prevNorm = r.normSq;
  }
  fit_bound(rows, t - s);
  return rows;
}

std::vector<ConvergenceRow> reverse_check(const NcPoly& b, const NcPoly& d, const TensorBialgebra& Tind,
                                          const GroupLikeCarrier& C, double s, double t,
                                          const std::vector<std::size_t>& meshes, std::size_t innerMeshFactor,
                                          PhiCache& cache) {
  const AlgebraSpec& alg = Tind.base->algebra();
  const cplx target = cache.phi(t - s, alg.multiply(alg.involute(b), d));
  const double normTarget = cache.phi(t - s, alg.multiply(alg.involute(b), b)).real();
  const FactorizedVectorSum right = singleton_vector(alg.normal_form(d), s, t);
  return convergence_sweep(
      [&](const Partition& a) { return zeta_expand(b, Tind, C, a, innerMeshFactor); },
      [&](const Partition&) { return right; }, target, s, t, meshes, cache, normTarget);
}

std::string sweep_csv(const std::vector<ConvergenceRow>& rows) {
  std::string out = "mesh,n,norm_sq,re_cross,im_cross,defect,bound\n";
  char buf[256];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%.17g,%zu,%.17g,%.17g,%.17g,%.17g,%.17g\n", r.mesh, r.n, r.normSq,
                  r.cross.real(), r.cross.imag(), r.defect, r.bound);
    out += buf;
  }
  return out;
}

}  // namespace qlevy
