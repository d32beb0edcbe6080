#include <cmath>
#include <cstdio>
#include <string>

#include "qlevy/constructions.hpp"
#include "qlevy/error.hpp"

namespace qlevy {

namespace {
std::string short_num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}
}  // namespace

AzemaModel make_azema(double q) {
  if (q == 0.0 || !std::isfinite(q)) throw InvalidParameter("Azema parameter q must be finite and nonzero");
  AzemaModel m;
  m.q = q;
  std::vector<GeneratorSymbol> alphabet{{"x", 1, 1.0}, {"x^*", 0, 1.0}, {"y", 2, 1.0}};
  // x y = q y x oriented so that y moves right.
  std::vector<RewriteRule> rules;
  rules.push_back({{2, 0}, NcPoly::monomial({0, 2}, 1.0 / q)});
  rules.push_back({{2, 1}, NcPoly::monomial({1, 2}, q)});
  auto alg = std::make_shared<const AlgebraSpec>(std::move(alphabet), std::move(rules));

  std::vector<TensorPoly> dAz(3), dPrim(3);
  dAz[0].add({0}, {2}, 1.0);
  dAz[0].add({}, {0}, 1.0);
  dAz[1].add({1}, {2}, 1.0);
  dAz[1].add({}, {1}, 1.0);
  dAz[2].add({2}, {2}, 1.0);
  for (Letter g : {0, 1}) {
    dPrim[g].add({g}, {}, 1.0);
    dPrim[g].add({}, {g}, 1.0);
  }
  dPrim[2].add({2}, {2}, 1.0);
  const std::vector<cplx> eps{0.0, 0.0, 1.0};
  m.azema = std::make_shared<const BialgebraSpec>("azema(" + short_num(q) + ")", alg, std::move(dAz), eps);
  m.primitive =
      std::make_shared<const BialgebraSpec>("azema_primitive(" + short_num(q) + ")", alg, std::move(dPrim), eps);
  m.psi = LinearFunctional(
      "azema_psi",
      [](const Word& w) {
        std::size_t n = w.size();
        while (n > 0 && w[n - 1] == 2) --n;
        return (n == 2 && w[0] == 0 && w[1] == 1) ? cplx{1.0} : cplx{};
      },
      true);
  return m;
}

namespace {
std::string entry_name(int d, int k, int l) {
  if (d == 1) return "x";
  if (d <= 9) return "x" + std::to_string(k + 1) + std::to_string(l + 1);
  return "x_" + std::to_string(k + 1) + "_" + std::to_string(l + 1);
}
}  // namespace

BialgebraPtr make_unitary_bialgebra(int d) {
  if (d < 1 || d > 64) throw InvalidParameter("unitary bialgebra needs 1 <= d <= 64");
  const int n = d * d;
  std::vector<GeneratorSymbol> alphabet(2 * n);
  for (int k = 0; k < d; ++k)
    for (int l = 0; l < d; ++l) {
      const Letter a = unitary_x(d, k, l), b = unitary_xs(d, k, l);
      alphabet[a] = {entry_name(d, k, l), b, 1.0};
      alphabet[b] = {entry_name(d, k, l) + "^*", a, 1.0};
    }
  // x x* = 1: x_{k,d} x*_{l,d} -> delta_kl - sum_{i<d} x_{k,i} x*_{l,i}
  // x* x = 1: x*_{d,k} x_{d,l} -> delta_kl - sum_{i<d} x*_{i,k} x_{i,l}
  std::vector<RewriteRule> rules;
  const int last = d - 1;
  for (int k = 0; k < d; ++k)
    for (int l = 0; l < d; ++l) {
      NcPoly rhs = NcPoly::scalar(k == l ? 1.0 : 0.0);
      for (int i = 0; i < last; ++i) rhs.add({unitary_x(d, k, i), unitary_xs(d, l, i)}, -1.0);
      rules.push_back({{unitary_x(d, k, last), unitary_xs(d, l, last)}, rhs});
    }
  for (int k = 0; k < d; ++k)
    for (int l = 0; l < d; ++l) {
      NcPoly rhs = NcPoly::scalar(k == l ? 1.0 : 0.0);
      for (int i = 0; i < last; ++i) rhs.add({unitary_xs(d, i, k), unitary_x(d, i, l)}, -1.0);
      rules.push_back({{unitary_xs(d, last, k), unitary_x(d, last, l)}, rhs});
    }
  auto alg = std::make_shared<const AlgebraSpec>(std::move(alphabet), std::move(rules));

  std::vector<TensorPoly> delta(2 * n);
  std::vector<cplx> eps(2 * n);
  for (int k = 0; k < d; ++k)
    for (int l = 0; l < d; ++l) {
      for (int i = 0; i < d; ++i) {
        delta[unitary_x(d, k, l)].add({unitary_x(d, k, i)}, {unitary_x(d, i, l)}, 1.0);
        delta[unitary_xs(d, k, l)].add({unitary_xs(d, k, i)}, {unitary_xs(d, i, l)}, 1.0);
      }
      eps[unitary_x(d, k, l)] = eps[unitary_xs(d, k, l)] = (k == l) ? 1.0 : 0.0;
    }
  return std::make_shared<const BialgebraSpec>("unitary(" + std::to_string(d) + ")", alg, std::move(delta),
                                               std::move(eps));
}

}  // namespace qlevy
