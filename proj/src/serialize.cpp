#include "qlevy/serialize.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>

#include "qlevy/error.hpp"

namespace qlevy {

std::string fmt17(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

json cplx_to_json(cplx c) { return json::array({c.real(), c.imag()}); }

cplx cplx_from_json(const json& j, const std::string& pointer) {
  if (j.is_number()) return j.get<double>();
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
    return {j[0].get<double>(), j[1].get<double>()};
  throw SchemaError(pointer, "expected a number or an [re, im] pair");
}

json matrix_to_json(const CMatrix& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index k = 0; k < m.cols(); ++k) row.push_back(cplx_to_json(m(i, k)));
    rows.push_back(std::move(row));
  }
  return rows;
}

CMatrix matrix_from_json(const json& j, const std::string& pointer) {
  if (!j.is_array()) throw SchemaError(pointer, "expected an array of rows");
  const std::size_t r = j.size(), c = r ? j[0].size() : 0;
  CMatrix m(r, c);
  for (std::size_t i = 0; i < r; ++i) {
    const std::string pi = pointer + "/" + std::to_string(i);
    if (!j[i].is_array() || j[i].size() != c) throw SchemaError(pi, "ragged matrix row");
    for (std::size_t k = 0; k < c; ++k) m(i, k) = cplx_from_json(j[i][k], pi + "/" + std::to_string(k));
  }
  return m;
}

json vector_to_json(const CVector& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(cplx_to_json(v(i)));
  return a;
}

CVector vector_from_json(const json& j, const std::string& pointer) {
  if (!j.is_array()) throw SchemaError(pointer, "expected an array");
  CVector v(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) v(i) = cplx_from_json(j[i], pointer + "/" + std::to_string(i));
  return v;
}

json word_to_json(const Word& w, const AlgebraSpec& alg) {
  json a = json::array();
  for (Letter l : w) a.push_back(alg.generator(l).name);
  return a;
}

Word word_from_json(const json& j, const AlgebraSpec& alg, const std::string& pointer) {
  if (!j.is_array()) throw SchemaError(pointer, "expected a list of generator names");
  Word w;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::string pi = pointer + "/" + std::to_string(i);
    if (!j[i].is_string()) throw SchemaError(pi, "generator name must be a string");
    const auto l = alg.find(j[i].get<std::string>());
    if (!l) throw SchemaError(pi, "unknown generator '" + j[i].get<std::string>() + "'");
    w.push_back(*l);
  }
  return w;
}

json poly_to_json(const NcPoly& p, const AlgebraSpec& alg) {
  json a = json::array();
  for (const auto& [w, c] : p.terms()) a.push_back({{"word", word_to_json(w, alg)}, {"coef", cplx_to_json(c)}});
  return a;
}

NcPoly poly_from_json(const json& j, const AlgebraSpec& alg, const std::string& pointer) {
  if (j.is_string()) {
    try {
      return parse_poly(j.get<std::string>(), alg);
    } catch (const Error& e) {
      throw SchemaError(pointer, e.what());
    }
  }
  if (!j.is_array()) throw SchemaError(pointer, "expected a polynomial string or a term list");
  NcPoly p;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::string pi = pointer + "/" + std::to_string(i);
    if (!j[i].is_object() || !j[i].contains("word")) throw SchemaError(pi, "term needs 'word'");
    const cplx c = j[i].contains("coef") ? cplx_from_json(j[i]["coef"], pi + "/coef") : cplx(1.0);
    p.add(word_from_json(j[i]["word"], alg, pi + "/word"), c);
  }
  return p;
}

json bialgebra_to_json(const BialgebraSpec& B) {
  const AlgebraSpec& alg = B.algebra();
  json alphabet = json::array();
  for (const auto& g : alg.alphabet())
    alphabet.push_back(
        {{"name", g.name}, {"adjoint", alg.generator(g.adjoint).name}, {"adjointScale", cplx_to_json(g.adjointScale)}});
  json rules = json::array();
  for (const auto& r : alg.rules()) rules.push_back({{"lhs", word_to_json(r.lhs, alg)}, {"rhs", poly_to_json(r.rhs, alg)}});
  json delta = json::object(), counit = json::object();
  for (Letter g = 0; g < alg.size(); ++g) {
    json terms = json::array();
    for (const auto& [lr, c] : B.delta_on_gen(g).terms)
      terms.push_back({{"left", word_to_json(lr.first, alg)}, {"right", word_to_json(lr.second, alg)}, {"coef", cplx_to_json(c)}});
    delta[alg.generator(g).name] = std::move(terms);
    counit[alg.generator(g).name] = cplx_to_json(B.counit_on_gen(g));
  }
  return {{"name", B.name()},       {"alphabet", alphabet}, {"maxDegree", alg.max_degree()},
          {"rules", rules},         {"deltaOnGen", delta},  {"counitOnGen", counit}};
}

BialgebraPtr bialgebra_from_json(const json& j, const std::string& pointer) {
  if (!j.is_object()) throw SchemaError(pointer, "bialgebra spec must be an object");
  for (const char* key : {"alphabet", "deltaOnGen", "counitOnGen"})
    if (!j.contains(key)) throw SchemaError(pointer, std::string("missing '") + key + "'");
  const json& ja = j["alphabet"];
  if (!ja.is_array() || ja.empty()) throw SchemaError(pointer + "/alphabet", "expected a non-empty array");
  std::vector<GeneratorSymbol> alphabet;
  std::map<std::string, Letter> byName;
  for (std::size_t i = 0; i < ja.size(); ++i) {
    const std::string pi = pointer + "/alphabet/" + std::to_string(i);
    if (!ja[i].contains("name") || !ja[i]["name"].is_string()) throw SchemaError(pi, "generator needs a name");
    const std::string name = ja[i]["name"];
    if (!byName.emplace(name, static_cast<Letter>(i)).second) throw SchemaError(pi, "duplicate generator name");
    alphabet.push_back({name, 0, 1.0});
  }
  for (std::size_t i = 0; i < ja.size(); ++i) {
    const std::string pi = pointer + "/alphabet/" + std::to_string(i);
    const std::string adj = ja[i].value("adjoint", alphabet[i].name);
    auto it = byName.find(adj);
    if (it == byName.end()) throw SchemaError(pi + "/adjoint", "unknown generator '" + adj + "'");
    alphabet[i].adjoint = it->second;
    if (ja[i].contains("adjointScale")) alphabet[i].adjointScale = cplx_from_json(ja[i]["adjointScale"], pi + "/adjointScale");
  }
  // a bare algebra for parsing rule sides
  const auto bare = std::make_shared<const AlgebraSpec>(alphabet, std::vector<RewriteRule>{});
  std::vector<RewriteRule> rules;
  if (j.contains("rules")) {
    const json& jr = j["rules"];
    if (!jr.is_array()) throw SchemaError(pointer + "/rules", "expected an array");
    for (std::size_t i = 0; i < jr.size(); ++i) {
      const std::string pi = pointer + "/rules/" + std::to_string(i);
      if (!jr[i].contains("lhs") || !jr[i].contains("rhs")) throw SchemaError(pi, "rule needs 'lhs' and 'rhs'");
      rules.push_back({word_from_json(jr[i]["lhs"], *bare, pi + "/lhs"), poly_from_json(jr[i]["rhs"], *bare, pi + "/rhs")});
    }
  }
  std::size_t maxDegree = 0;
  if (j.contains("maxDegree")) {
    if (!(j["maxDegree"].is_number_integer() && j["maxDegree"].get<std::int64_t>() >= 0)) throw SchemaError(pointer + "/maxDegree", "expected a non-negative integer");
    maxDegree = j["maxDegree"];
  }
  AlgebraPtr alg;
  try {
    alg = std::make_shared<const AlgebraSpec>(alphabet, rules, maxDegree);
  } catch (const Error& e) {
    throw SchemaError(pointer + "/rules", e.what());
  }
  std::vector<TensorPoly> delta(alphabet.size());
  std::vector<cplx> counit(alphabet.size());
  for (std::size_t g = 0; g < alphabet.size(); ++g) {
    const std::string& name = alphabet[g].name;
    const std::string pd = pointer + "/deltaOnGen/" + name, pc = pointer + "/counitOnGen/" + name;
    if (!j["deltaOnGen"].contains(name)) throw SchemaError(pd, "missing coproduct of a generator");
    if (!j["counitOnGen"].contains(name)) throw SchemaError(pc, "missing counit of a generator");
    const json& jd = j["deltaOnGen"][name];
    if (!jd.is_array()) throw SchemaError(pd, "expected a term list");
    for (std::size_t i = 0; i < jd.size(); ++i) {
      const std::string pi = pd + "/" + std::to_string(i);
      if (!jd[i].contains("left") || !jd[i].contains("right")) throw SchemaError(pi, "term needs 'left' and 'right'");
      const cplx c = jd[i].contains("coef") ? cplx_from_json(jd[i]["coef"], pi + "/coef") : cplx(1.0);
      delta[g].add(word_from_json(jd[i]["left"], *alg, pi + "/left"), word_from_json(jd[i]["right"], *alg, pi + "/right"), c);
    }
    counit[g] = cplx_from_json(j["counitOnGen"][name], pc);
  }
  try {
    return std::make_shared<const BialgebraSpec>(j.value("name", std::string("custom")), alg, std::move(delta),
                                                 std::move(counit));
  } catch (const Error& e) {
    throw SchemaError(pointer, e.what());
  }
}

json triple_to_json(const LevyTriple& t) {
  const AlgebraSpec& alg = t.bialgebra()->algebra();
  json eta = json::object(), rho = json::object();
  for (Letter g = 0; g < alg.size(); ++g) {
    eta[alg.generator(g).name] = vector_to_json(t.eta_on_gen()[g]);
    rho[alg.generator(g).name] = matrix_to_json(t.rho_on_gen()[g]);
  }
  return {{"kDim", t.k_dim()}, {"eta", eta}, {"rho", rho}};
}

// ---------------------------------------------------------------------------

namespace {

struct Call {
  std::string name;
  std::vector<std::variant<double, Call>> args;
};

class CallParser {
 public:
  CallParser(const std::string& s, const std::string& pointer) : s_(s), ptr_(pointer) {}

  Call parse() {
    Call c = call();
    skip();
    if (pos_ != s_.size()) fail("trailing characters");
    return c;
  }

 private:
  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  [[noreturn]] void fail(const std::string& what) {
    throw SchemaError(ptr_, "builder call '" + s_ + "': " + what + " at offset " + std::to_string(pos_));
  }
  Call call() {
    skip();
    Call c;
    while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) c.name += s_[pos_++];
    if (c.name.empty()) fail("expected a builder name");
    skip();
    if (pos_ >= s_.size() || s_[pos_] != '(') fail("expected '('");
    ++pos_;
    skip();
    if (pos_ < s_.size() && s_[pos_] == ')') {
      ++pos_;
      return c;
    }
    for (;;) {
      skip();
      if (pos_ < s_.size() && (std::isdigit(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '-' || s_[pos_] == '+' || s_[pos_] == '.')) {
        std::size_t used = 0;
        try {
          c.args.emplace_back(std::stod(s_.substr(pos_), &used));
        } catch (const std::exception&) {
          fail("bad number");
        }
        pos_ += used;
      } else {
        c.args.emplace_back(call());
      }
      skip();
      if (pos_ < s_.size() && s_[pos_] == ',') {
        ++pos_;
        continue;
      }
      if (pos_ < s_.size() && s_[pos_] == ')') {
        ++pos_;
        return c;
      }
      fail("expected ',' or ')'");
    }
  }

  const std::string& s_;
  std::string ptr_;
  std::size_t pos_ = 0;
};

Built eval(const Call& c, const std::string& text, const std::string& pointer);

double number_arg(const Call& c, std::size_t i, const std::string& pointer) {
  if (c.args.size() <= i || !std::holds_alternative<double>(c.args[i]))
    throw SchemaError(pointer, c.name + ": argument " + std::to_string(i + 1) + " must be a number");
  return std::get<double>(c.args[i]);
}

std::size_t count_arg(const Call& c, std::size_t i, const std::string& pointer) {
  const double v = number_arg(c, i, pointer);
  if (v < 1 || v != std::floor(v) || v > 64)
    throw SchemaError(pointer, c.name + ": argument " + std::to_string(i + 1) + " must be an integer in [1, 64]");
  return static_cast<std::size_t>(v);
}

Built of_arg(const Call& c, const std::string& pointer) {
  if (c.args.empty() || !std::holds_alternative<Call>(c.args[0]))
    throw SchemaError(pointer, c.name + ": first argument must be a builder call");
  return eval(std::get<Call>(c.args[0]), "", pointer);
}

Built eval(const Call& c, const std::string& text, const std::string& pointer) {
  Built b;
  b.call = text;
  auto arity = [&](std::size_t n) {
    if (c.args.size() != n) throw SchemaError(pointer, c.name + " takes " + std::to_string(n) + " argument(s)");
  };
  if (c.name == "azema" || c.name == "azema_primitive") {
    arity(1);
    const double q = number_arg(c, 0, pointer);
    if (q == 0.0 || !std::isfinite(q)) throw SchemaError(pointer, "Azema parameter q must be finite and nonzero");
    b.azema = std::make_shared<const AzemaModel>(make_azema(q));
    b.B = c.name == "azema" ? b.azema->azema : b.azema->primitive;
  } else if (c.name == "unitary") {
    arity(1);
    b.B = make_unitary_bialgebra(static_cast<int>(count_arg(c, 0, pointer)));
  } else if (c.name == "primitive_tensor" || c.name == "induced_tensor") {
    arity(2);
    const Built of = of_arg(c, pointer);
    const std::size_t cap = count_arg(c, 1, pointer);
    b.azema = of.azema;
    b.tensor = c.name == "primitive_tensor" ? make_primitive_tensor(of.B, cap) : make_induced_tensor(of.B, cap);
    b.B = b.tensor->spec;
  } else if (c.name == "grouplike") {
    arity(2);
    const Built of = of_arg(c, pointer);
    b.azema = of.azema;
    b.grouplike = make_grouplike(of.B, count_arg(c, 1, pointer));
    b.B = of.B;
  } else {
    throw SchemaError(pointer, "unknown builder '" + c.name + "'");
  }
  return b;
}

}  // namespace

Built build(const std::string& call, const std::string& pointer) {
  const Call c = CallParser(call, pointer).parse();
  try {
    return eval(c, call, pointer);
  } catch (const SchemaError&) {
    throw;
  } catch (const Error& e) {
    throw SchemaError(pointer, e.what());
  }
}

std::vector<std::string> builtin_names() {
  return {"azema(q)",
          "azema_primitive(q)",
          "unitary(d)",
          "primitive_tensor(of, cap)",
          "induced_tensor(of, cap)",
          "grouplike(of, cap)"};
}

}  // namespace qlevy
