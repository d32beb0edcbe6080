#pragma once

// Model bialgebras and the derived tensor / group-like bialgebras together
// with the counit-preserving maps between them.

#include <map>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "qlevy/bialg.hpp"

namespace qlevy {

struct AzemaModel {
  double q = 1.0;
  BialgebraPtr azema;
  BialgebraPtr primitive;
  /// 1 on x x* y^k, 0 on every other normal word.
  LinearFunctional psi;
  Letter x = 0, xs = 1, y = 2;
};

/// Throws InvalidParameter for q = 0.
AzemaModel make_azema(double q);

/// U<d>: 2d^2 generators, x_kl at k*d+l and x*_kl at d^2+k*d+l (0-based).
BialgebraPtr make_unitary_bialgebra(int d);
inline Letter unitary_x(int d, int k, int l) { return static_cast<Letter>(k * d + l); }
inline Letter unitary_xs(int d, int k, int l) { return static_cast<Letter>(d * d + k * d + l); }

// ---------------------------------------------------------------------------

struct Morphism {
  enum class Kind { Homomorphism, Section };
  std::string name;
  BialgebraPtr source;
  BialgebraPtr target;
  Kind kind = Kind::Homomorphism;
  std::vector<NcPoly> imageOnGen;
};

Morphism identity_morphism(const BialgebraPtr& B);
/// Homomorphic extension of imageOnGen, normalized in the target.
NcPoly apply_morphism(const Morphism& m, const NcPoly& p);

struct CounitReport {
  double maxResidual = 0.0;
  std::size_t samples = 0;
};
CounitReport check_counit_preserving(const Morphism& m, std::size_t nSamples, std::size_t maxDegree,
                                     std::mt19937_64& rng);

/// Tensor *-bialgebra over the basis {w - delta(w)1 : w normal, 1 <= |w| <= cap}
/// of ker(delta). Letter i stands for letterWord[i]; tensor words are capped
/// at `cap` letters.
struct TensorBialgebra {
  BialgebraPtr base;
  BialgebraPtr spec;
  bool induced = false;
  std::size_t cap = 0;
  std::vector<Word> letterWord;
  std::map<Word, Letter, DegLex> letterOf;
  /// L(w) -> w - delta(w) 1.
  Morphism kappa;

  /// Linear letter map L(p) = sum_{w != 1} c_w L(w). Throws DegreeCapExceeded.
  NcPoly letters(const NcPoly& p) const;
  /// E(b) = L(b - delta(b) 1) + delta(b) 1.
  NcPoly lift(const NcPoly& b) const;
};

using TensorPtr = std::shared_ptr<const TensorBialgebra>;

/// Every letter primitive, counit 0.
TensorPtr make_primitive_tensor(const BialgebraPtr& B, std::size_t degreeCap);
/// Letter coproduct L(w) (x) 1 + 1 (x) L(w) + sum L(u) (x) L(v) over the
/// legs of Delta(w) with u, v != 1; counit 0.
TensorPtr make_induced_tensor(const BialgebraPtr& B, std::size_t degreeCap);
/// The section L(w) -> L(w) from an induced tensor bialgebra into the
/// primitive one over the same base.
Morphism letter_identity(const TensorBialgebra& from, const TensorBialgebra& to);

// ---------------------------------------------------------------------------

/// Group-like *-bialgebra C(B_1): basis keys are normal polynomials b with
/// delta(b) = 1 and degree <= cap; Lambda(b^) = b^ (x) b^, lambda(b^) = 1.
class GroupLikeCarrier {
 public:
  using Element = std::map<std::size_t, cplx>;

  GroupLikeCarrier(BialgebraPtr base, std::size_t degreeCap);

  const BialgebraPtr& base() const { return base_; }
  std::size_t cap() const { return cap_; }

  /// Throws InvalidParameter if delta(b) != 1, DegreeCapExceeded past the cap.
  std::size_t key(const NcPoly& b) const;
  NcPoly key_poly(std::size_t k) const;
  Element hat(const NcPoly& b) const { return {{key(b), 1.0}}; }

  Element multiply(const Element& a, const Element& b) const;
  Element involute(const Element& a) const;
  cplx counit(const Element& a) const;
  std::map<std::pair<std::size_t, std::size_t>, cplx> coproduct(const Element& a) const;

  /// kappa(b^) = b.
  NcPoly kappa(const Element& a) const;
  /// kappa~ on one letter: b in ker(delta) -> (b + 1)^ - 1^.
  Element kappa_tilde_letter(const NcPoly& b0) const;
  /// kappa~ on a letter of Tind; *-compatible with the letter involution.
  Element kappa_tilde_basis(Letter l, const TensorBialgebra& Tind) const;
  /// kappa~ on an induced tensor element, homomorphic over letters.
  Element kappa_tilde(const NcPoly& t, const TensorBialgebra& Tind) const;

 private:
  struct PolyLess {
    bool operator()(const NcPoly& a, const NcPoly& b) const;
  };
  BialgebraPtr base_;
  std::size_t cap_;
  mutable std::mutex mu_;
  mutable std::vector<NcPoly> keys_;
  mutable std::map<NcPoly, std::size_t, PolyLess> index_;
};

using GroupLikePtr = std::shared_ptr<const GroupLikeCarrier>;

inline GroupLikePtr make_grouplike(const BialgebraPtr& B, std::size_t degreeCap) {
  return std::make_shared<const GroupLikeCarrier>(B, degreeCap);
}

double max_diff(const GroupLikeCarrier::Element& a, const GroupLikeCarrier::Element& b);

}  // namespace qlevy
