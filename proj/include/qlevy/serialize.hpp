#pragma once

// JSON forms of the core objects, deterministic CSV number formatting and
// builder calls such as "induced_tensor(azema(2), 2)".

#include <string>
#include <variant>

#include "json.hpp"
#include "qlevy/constructions.hpp"
#include "qlevy/gns.hpp"

namespace qlevy {

using json = nlohmann::ordered_json;

/// 17 significant digits, "nan"/"inf" spelled out.
std::string fmt17(double v);

json cplx_to_json(cplx c);
/// Accepts [re, im] or a plain number. Throws SchemaError at pointer.
cplx cplx_from_json(const json& j, const std::string& pointer);
json matrix_to_json(const CMatrix& m);
CMatrix matrix_from_json(const json& j, const std::string& pointer);
json vector_to_json(const CVector& v);
CVector vector_from_json(const json& j, const std::string& pointer);

json word_to_json(const Word& w, const AlgebraSpec& alg);
Word word_from_json(const json& j, const AlgebraSpec& alg, const std::string& pointer);
/// [{"word": [names], "coef": [re, im]}, ...]
json poly_to_json(const NcPoly& p, const AlgebraSpec& alg);
/// Term list, or a string in the polynomial syntax.
NcPoly poly_from_json(const json& j, const AlgebraSpec& alg, const std::string& pointer);

/// {"name", "alphabet": [{"name", "adjoint", "adjointScale"}], "maxDegree",
///  "rules": [{"lhs": [names], "rhs": terms}],
///  "deltaOnGen": {gen: [{"left", "right", "coef"}]}, "counitOnGen": {gen: [re, im]}}
json bialgebra_to_json(const BialgebraSpec& B);
BialgebraPtr bialgebra_from_json(const json& j, const std::string& pointer = "");

/// {"kDim", "eta": {gen: vector}, "rho": {gen: matrix}} with [re, im] pairs.
json triple_to_json(const LevyTriple& t);

/// Result of a builder call; exactly one of the carriers is set beyond B.
struct Built {
  std::string call;
  BialgebraPtr B;
  TensorPtr tensor;
  GroupLikePtr grouplike;
  std::shared_ptr<const AzemaModel> azema;
};

/// azema(q), azema_primitive(q), unitary(d), primitive_tensor(of, cap),
/// induced_tensor(of, cap), grouplike(of, cap). Throws SchemaError at pointer.
Built build(const std::string& call, const std::string& pointer);
std::vector<std::string> builtin_names();

}  // namespace qlevy
