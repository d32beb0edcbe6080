#include "qlevy/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include "qlevy/error.hpp"
#include "qlevy/fock.hpp"
#include "qlevy/gram.hpp"
#include "qlevy/trotter.hpp"

namespace qlevy {

namespace {

const std::vector<std::string> kKinds{"axioms", "convexp", "gns", "sweep", "reverse", "fock-unitary",
                                      "azema-wiener", "trotter"};

bool non_negative_int(const json& j) {
  return j.is_number_unsigned() || (j.is_number_integer() && j.get<std::int64_t>() >= 0);
}

std::string ptr(const std::string& base, const std::string& key) { return base + "/" + key; }

const json& need(const json& j, const std::string& key, const std::string& base) {
  if (!j.is_object() || !j.contains(key)) throw SchemaError(base, "missing '" + key + "'");
  return j[key];
}

double num(const json& j, const std::string& key, double def, const std::string& base) {
  if (!j.contains(key)) return def;
  if (!j[key].is_number()) throw SchemaError(ptr(base, key), "expected a number");
  return j[key].get<double>();
}

std::size_t count(const json& j, const std::string& key, std::size_t def, const std::string& base) {
  if (!j.contains(key)) return def;
  if (!non_negative_int(j[key])) throw SchemaError(ptr(base, key), "expected a non-negative integer");
  return j[key].get<std::size_t>();
}

std::string str(const json& j, const std::string& key, const std::string& def, const std::string& base) {
  if (!j.contains(key)) return def;
  if (!j[key].is_string()) throw SchemaError(ptr(base, key), "expected a string");
  return j[key].get<std::string>();
}

double tol(const json& cfg, const std::string& key, double def) {
  if (!cfg.contains("tolerances")) return def;
  return num(cfg["tolerances"], key, def, "/tolerances");
}

Built bialgebra_ref(const json& j, const std::string& pointer) {
  if (j.is_string()) return build(j.get<std::string>(), pointer);
  if (j.is_object() && j.contains("spec")) {
    Built b;
    b.call = "spec";
    b.B = bialgebra_from_json(j["spec"], pointer + "/spec");
    return b;
  }
  throw SchemaError(pointer, "expected a builder call string or {\"spec\": {...}}");
}

LinearFunctional generator_ref(const json& j, const Built& b, const std::string& pointer) {
  if (j.is_string()) {
    const std::string name = j.get<std::string>();
    if (name == "azema_psi") {
      if (!b.azema) throw SchemaError(pointer, "azema_psi needs an Azema bialgebra");
      return b.azema->psi;
    }
    throw SchemaError(pointer, "unknown generator '" + name + "'");
  }
  if (j.is_object() && j.contains("table")) {
    const AlgebraSpec& alg = b.B->algebra();
    const NcPoly t = poly_from_json(j["table"], alg, pointer + "/table");
    std::map<Word, cplx> values;
    for (const auto& [w, c] : alg.normal_form(t).terms()) values[w] = c;
    return table_functional(j.value("name", std::string("table")), std::move(values), j.value("hermitian", false));
  }
  throw SchemaError(pointer, "expected a generator name or {\"table\": [...]}");
}

struct Schedule {
  double s = 0.0, t = 1.0;
  std::vector<std::size_t> meshes;
};

Schedule schedule(const json& cfg) {
  const json& j = need(cfg, "partition", "");
  Schedule r;
  r.s = num(j, "s", 0.0, "/partition");
  r.t = num(j, "t", 1.0, "/partition");
  if (!(r.t > r.s)) throw SchemaError("/partition", "need s < t");
  const json& m = need(j, "meshes", "/partition");
  if (!m.is_array() || m.empty()) throw SchemaError("/partition/meshes", "expected a non-empty array");
  for (std::size_t i = 0; i < m.size(); ++i) {
    if (!non_negative_int(m[i]) || m[i].get<std::size_t>() == 0)
      throw SchemaError("/partition/meshes/" + std::to_string(i), "expected a positive integer");
    r.meshes.push_back(m[i]);
    if (i > 0 && r.meshes[i] <= r.meshes[i - 1])
      throw SchemaError("/partition/meshes/" + std::to_string(i), "meshes must be increasing");
  }
  return r;
}

Morphism morphism_ref(const json& j, const std::string& pointer, Built* src = nullptr, Built* dst = nullptr) {
  const Built s = bialgebra_ref(need(j, "source", pointer), pointer + "/source");
  const Built t = bialgebra_ref(need(j, "target", pointer), pointer + "/target");
  Morphism m;
  m.name = str(j, "name", "morphism", pointer);
  m.source = s.B;
  m.target = t.B;
  const AlgebraSpec &sa = s.B->algebra(), &ta = t.B->algebra();
  for (Letter g = 0; g < sa.size(); ++g) {
    const std::string& name = sa.generator(g).name;
    if (j.contains("images") && j["images"].contains(name)) {
      m.imageOnGen.push_back(poly_from_json(j["images"][name], ta, pointer + "/images/" + name));
    } else {
      const auto l = ta.find(name);
      if (!l) throw SchemaError(pointer + "/images", "no image given for '" + name + "'");
      m.imageOnGen.push_back(NcPoly::monomial({*l}));
    }
  }
  if (src) *src = s;
  if (dst) *dst = t;
  return m;
}

Morphism identity_by_name(const Built& s, const Built& t) {
  json j = {{"source", "-"}, {"target", "-"}};
  Morphism m;
  m.name = "id";
  m.source = s.B;
  m.target = t.B;
  const AlgebraSpec &sa = s.B->algebra(), &ta = t.B->algebra();
  for (Letter g = 0; g < sa.size(); ++g) {
    const auto l = ta.find(sa.generator(g).name);
    if (!l) throw SchemaError("/target", "generator '" + sa.generator(g).name + "' missing in the target");
    m.imageOnGen.push_back(NcPoly::monomial({*l}));
  }
  return m;
}

UnitaryTripleParams unitary_params(const json& cfg, std::mt19937_64& rng) {
  const int d = static_cast<int>(count(cfg, "d", 1, ""));
  if (d < 1 || d > 4) throw SchemaError("/d", "d must be in [1, 4]");
  if (cfg.contains("random")) {
    const json& r = cfg["random"];
    const std::size_t m = count(r, "m", 1, "/random");
    if (m < 1) throw SchemaError("/random/m", "m must be positive");
    UnitaryTripleParams p = random_unitary_params(d, static_cast<int>(m), rng, num(r, "lScale", 1.0, "/random"));
    if (r.contains("lMax")) {
      const double lmax = num(r, "lMax", 0.0, "/random");
      for (auto& row : p.L)
        for (auto& l : row)
          if (l.norm() > lmax) l *= lmax / l.norm();
    }
    return p;
  }
  const json& j = need(cfg, "params", "");
  UnitaryTripleParams p;
  p.d = d;
  p.W = matrix_from_json(need(j, "W", "/params"), "/params/W");
  p.H = matrix_from_json(need(j, "H", "/params"), "/params/H");
  const json& L = need(j, "L", "/params");
  if (!L.is_array() || L.size() != static_cast<std::size_t>(d)) throw SchemaError("/params/L", "expected d rows");
  for (int k = 0; k < d; ++k) {
    if (!L[k].is_array() || L[k].size() != static_cast<std::size_t>(d))
      throw SchemaError("/params/L/" + std::to_string(k), "expected d entries");
    p.L.emplace_back();
    for (int l = 0; l < d; ++l)
      p.L.back().push_back(vector_from_json(L[k][l], "/params/L/" + std::to_string(k) + "/" + std::to_string(l)));
  }
  const Eigen::Index m = p.L[0][0].size();
  if (m < 1 || p.W.rows() != d * m || p.W.cols() != d * m) throw SchemaError("/params/W", "W must be dm x dm");
  if (p.H.rows() != d || p.H.cols() != d) throw SchemaError("/params/H", "H must be d x d");
  return p;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string r = "\"";
  for (char c : s) {
    if (c == '"') r += '"';
    r += c;
  }
  return r + "\"";
}

std::string short_double(double v) {
  std::ostringstream o;
  o << v;
  return o.str();
}

}  // namespace

// ---------------------------------------------------------------------------

json load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return json::parse(ss.str());
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("invalid JSON in '") + path + "'", e.byte);
  }
}

void validate_config(const json& cfg) {
  if (!cfg.is_object()) throw SchemaError("", "config must be an object");
  static const std::set<std::string> common{"name", "kind", "rngSeed", "output", "tolerances", "caps",
                                            "morphisms", "description"};
  const std::string kind = str(cfg, "kind", "", "");
  if (kind.empty()) throw SchemaError("/kind", "missing experiment kind");
  if (std::find(kKinds.begin(), kKinds.end(), kind) == kKinds.end())
    throw SchemaError("/kind", "unknown experiment kind '" + kind + "'");
  if (cfg.contains("rngSeed") && !non_negative_int(cfg["rngSeed"]))
    throw SchemaError("/rngSeed", "expected a non-negative integer");
  if (cfg.contains("output")) {
    const json& o = cfg["output"];
    if (!o.is_object()) throw SchemaError("/output", "expected an object");
    for (const char* k : {"csv", "json"})
      if (o.contains(k) && (!o[k].is_string() || o[k].get<std::string>().empty() ||
                            o[k].get<std::string>().find('/') != std::string::npos))
        throw SchemaError(std::string("/output/") + k, "expected a plain file name");
  }
  for (const char* k : {"tolerances", "caps"})
    if (cfg.contains(k)) {
      if (!cfg[k].is_object()) throw SchemaError(std::string("/") + k, "expected an object");
      for (const auto& [key, v] : cfg[k].items())
        if (!v.is_number()) throw SchemaError(std::string("/") + k + "/" + key, "expected a number");
    }
  if (cfg.contains("morphisms") && !cfg["morphisms"].is_array()) throw SchemaError("/morphisms", "expected an array");

  static const std::map<std::string, std::vector<std::string>> required{
      {"axioms", {"bialgebra"}},
      {"convexp", {"bialgebra", "generator"}},
      {"gns", {"bialgebra", "generator"}},
      {"sweep", {"source", "target", "generator"}},
      {"reverse", {"model", "b", "d", "partition"}},
      {"fock-unitary", {"d", "partition"}},
      {"azema-wiener", {"q", "partition"}},
      {"trotter", {"family"}}};
  static const std::map<std::string, std::set<std::string>> allowed{
      {"axioms", {"bialgebra"}},
      {"convexp", {"bialgebra", "generator", "elements", "times", "random", "semigroup", "moments"}},
      {"gns", {"bialgebra", "generator", "degreeCap", "nullTol", "expected"}},
      {"sweep", {"source", "target", "generator", "element", "partition", "mode", "orders"}},
      {"reverse", {"model", "generator", "b", "d", "partition", "innerMeshFactor", "cap"}},
      {"fock-unitary", {"d", "params", "random", "partition", "particleCap", "defectParticles", "vacuumMesh"}},
      {"azema-wiener", {"q", "partition", "particleCap", "crossPath", "crossPathGram"}},
      {"trotter", {"family", "G", "count", "partitions", "intervals", "dim", "muCount", "gScale", "C", "R",
                   "draws"}}};
  for (const auto& k : required.at(kind)) need(cfg, k, "");
  for (const auto& [k, v] : cfg.items())
    if (!common.count(k) && !allowed.at(kind).count(k))
      throw SchemaError("/" + k, "unexpected key for kind '" + kind + "'");
  if (kind == "sweep") {
    const std::string mode = str(cfg, "mode", "sweep", "");
    if (mode != "sweep" && mode != "orders") throw SchemaError("/mode", "expected 'sweep' or 'orders'");
    if (mode == "sweep") {
      need(cfg, "element", "");
      need(cfg, "partition", "");
    }
  }
  if (kind == "fock-unitary" && !cfg.contains("params") && !cfg.contains("random"))
    throw SchemaError("", "fock-unitary needs 'params' or 'random'");
  if (kind == "trotter") {
    const std::string f = str(cfg, "family", "", "");
    if (f != "random" && f != "nilpotent") throw SchemaError("/family", "expected 'random' or 'nilpotent'");
    if (f == "nilpotent") need(cfg, "G", "");
  }
  if (kind == "azema-wiener" || kind == "reverse" || kind == "fock-unitary" || kind == "sweep")
    if (cfg.contains("partition")) schedule(cfg);
  if (kind == "azema-wiener") {
    const double q = num(cfg, "q", 1.0, "");
    if (q == 0.0 || !std::isfinite(q)) throw SchemaError("/q", "q must be finite and nonzero");
  }
}

CheckResult check_defs(const json& cfg) {
  validate_config(cfg);
  std::mt19937_64 rng(cfg.value("rngSeed", kDefaultSeed));
  const std::string kind = cfg["kind"];
  const std::size_t deg = static_cast<std::size_t>(cfg.contains("caps") ? num(cfg["caps"], "sampleDegree", 3, "/caps") : 3);
  const std::size_t samples = static_cast<std::size_t>(cfg.contains("caps") ? num(cfg["caps"], "samples", 20, "/caps") : 20);
  const double axTol = tol(cfg, "axioms", 1e-10);

  std::vector<std::pair<std::string, Built>> bialgebras;
  std::set<std::string> seen;
  auto add = [&](const std::string& label, const json& j, const std::string& pointer) {
    Built b = bialgebra_ref(j, pointer);
    const std::string key = j.is_string() ? j.get<std::string>() : j.dump();
    if (seen.insert(key).second) bialgebras.emplace_back(label, std::move(b));
  };
  for (const char* k : {"bialgebra", "source", "target", "model"})
    if (cfg.contains(k)) add(k, cfg[k], std::string("/") + k);
  if (cfg.contains("generator") && (cfg.contains("bialgebra") || cfg.contains("target")))
    generator_ref(cfg["generator"], bialgebras.front().second, "/generator");
  if (kind == "convexp" && cfg.contains("moments"))
    for (std::size_t i = 0; i < cfg["moments"].size(); ++i)
      if (cfg["moments"][i].contains("bialgebra"))
        add("moment", cfg["moments"][i]["bialgebra"], "/moments/" + std::to_string(i) + "/bialgebra");
  if (kind == "fock-unitary") add("unitary", json("unitary(" + std::to_string(count(cfg, "d", 1, "")) + ")"), "/d");
  if (kind == "azema-wiener") add("azema", json("azema(" + short_double(num(cfg, "q", 1.0, "")) + ")"), "/q");

  CheckResult res;
  for (const auto& [label, b] : bialgebras) {
    const BialgebraPtr B = b.grouplike ? b.grouplike->base() : b.B;
    const AxiomReport r = check_bialgebra_axioms(*B, deg, samples, rng);
    const std::string name = B->name();
    for (const auto& [what, v] : std::vector<std::pair<std::string, double>>{
             {"coassociativity", r.coassociativity},
             {"counit law", r.counitLaw},
             {"coproduct multiplicative", r.deltaMultiplicative},
             {"counit multiplicative", r.counitMultiplicative},
             {"rule compatibility", r.ruleCompatibility},
             {"involution", r.involution}})
      res.items.push_back({name + ": " + what, v, axTol});
  }
  if (cfg.contains("morphisms"))
    for (std::size_t i = 0; i < cfg["morphisms"].size(); ++i) {
      const Morphism m = morphism_ref(cfg["morphisms"][i], "/morphisms/" + std::to_string(i));
      const CounitReport r = check_counit_preserving(m, samples, deg, rng);
      res.items.push_back({m.name + ": counit preservation", r.maxResidual, axTol});
    }
  for (const auto& it : res.items)
    if (!(it.residual <= it.tolerance)) res.ok = false;
  return res;
}

// ---------------------------------------------------------------------------

std::size_t thread_cap() {
  if (const char* e = std::getenv("QLEVY_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(e, &end, 10);
    if (end != e && *end == '\0' && v > 0) return static_cast<std::size_t>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

void parallel_for(std::size_t n, std::size_t threads, const std::function<void(std::size_t)>& f) {
  threads = std::max<std::size_t>(1, std::min(threads, n));
  if (threads == 1) {
    for (std::size_t i = 0; i < n; ++i) f(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr err;
  std::mutex mu;
  std::vector<std::thread> pool;
  for (std::size_t k = 0; k < threads; ++k)
    pool.emplace_back([&] {
      for (std::size_t i; (i = next++) < n;) {
        try {
          f(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(mu);
          if (!err) err = std::current_exception();
          next = n;
        }
      }
    });
  for (auto& t : pool) t.join();
  if (err) std::rethrow_exception(err);
}

std::string report_csv(const std::vector<ReportRow>& rows) {
  std::string out = "mesh,n,quantity,value_re,value_im,target_re,target_im,defect\n";
  for (const auto& r : rows)
    out += fmt17(r.mesh) + "," + std::to_string(r.n) + "," + csv_field(r.quantity) + "," + fmt17(r.value.real()) + "," +
           fmt17(r.value.imag()) + "," + fmt17(r.target.real()) + "," + fmt17(r.target.imag()) + "," + fmt17(r.defect) +
           "\n";
  return out;
}

bool Artifacts::pass() const {
  return std::all_of(assertions.begin(), assertions.end(), [](const Assertion& a) { return a.pass; });
}

std::vector<std::string> list_builtins() {
  std::vector<std::string> out;
  for (const auto& k : kKinds) out.push_back("kind " + k);
  for (const auto& b : builtin_names()) out.push_back("bialgebra " + b);
  out.push_back("generator azema_psi");
  out.push_back("generator {\"table\": terms}");
  return out;
}

// ---------------------------------------------------------------------------

namespace {

std::string sci(double v) {
  char b[32];
  std::snprintf(b, sizeof b, "%.3g", v);
  return b;
}

struct Run {
  const json& cfg;
  std::size_t threads;
  std::uint64_t seed;
  std::mt19937_64 rng;
  std::vector<ReportRow> rows;
  std::string csv;
  json results = json::object();
  std::vector<Assertion> asserts;

  void check(std::string name, bool pass, std::string detail) {
    asserts.push_back({std::move(name), pass, std::move(detail)});
  }
};

void run_axioms(Run& r) {
  const CheckResult c = check_defs(r.cfg);
  double worst = 0.0;
  for (const auto& it : c.items) {
    r.rows.push_back({0.0, 0, it.label, it.residual, 0.0, it.residual});
    worst = std::max(worst, it.residual);
  }
  r.check("axioms", c.ok, "worst residual " + sci(worst) + ", tolerance " + sci(tol(r.cfg, "axioms", 1e-10)));
}

void run_convexp(Run& r) {
  const json& cfg = r.cfg;
  const Built b = bialgebra_ref(cfg["bialgebra"], "/bialgebra");
  const LinearFunctional psi = generator_ref(cfg["generator"], b, "/generator");
  const AlgebraSpec& alg = b.B->algebra();
  struct Job {
    std::string group, label;
    std::function<std::pair<cplx, cplx>()> eval;
    double tolerance;
  };
  std::vector<Job> jobs;

  std::vector<NcPoly> elems;
  if (cfg.contains("elements")) {
    if (!cfg["elements"].is_array()) throw SchemaError("/elements", "expected an array");
    for (std::size_t i = 0; i < cfg["elements"].size(); ++i)
      elems.push_back(poly_from_json(cfg["elements"][i], alg, "/elements/" + std::to_string(i)));
  }
  if (cfg.contains("random")) {
    const json& j = cfg["random"];
    const std::size_t n = count(j, "count", 200, "/random"), deg = count(j, "degree", 4, "/random"),
                      terms = count(j, "terms", 4, "/random");
    for (std::size_t i = 0; i < n; ++i) elems.push_back(random_poly(alg, deg, terms, r.rng));
  }
  std::vector<double> times{1.0};
  if (cfg.contains("times")) {
    times.clear();
    for (std::size_t i = 0; i < cfg["times"].size(); ++i) {
      if (!cfg["times"][i].is_number()) throw SchemaError("/times/" + std::to_string(i), "expected a number");
      times.push_back(cfg["times"][i]);
    }
  }
  const double seriesTol = tol(cfg, "series", 1e-10);
  for (std::size_t i = 0; i < elems.size(); ++i)
    for (double t : times) {
      const NcPoly p = elems[i];
      jobs.push_back({"series", "series " + alg.format(p) + " t=" + short_double(t),
                      [&, p, t] {
                        return std::pair{conv_exp(psi, t, p, *b.B), conv_exp_series(psi, t, p, *b.B).value};
                      },
                      seriesTol});
    }
  if (cfg.contains("semigroup")) {
    const json& j = cfg["semigroup"];
    const std::size_t n = count(j, "count", 100, "/semigroup"), deg = count(j, "degree", 3, "/semigroup"),
                      terms = count(j, "terms", 3, "/semigroup");
    const double tmax = num(j, "maxTime", 2.0, "/semigroup");
    std::uniform_real_distribution<double> u(0.0, tmax);
    for (std::size_t i = 0; i < n; ++i) {
      const NcPoly p = random_poly(alg, deg, terms, r.rng);
      const double s = u(r.rng), t = u(r.rng);
      jobs.push_back({"semigroup", "semigroup " + alg.format(p) + " s=" + short_double(s) + " t=" + short_double(t),
                      [&, p, s, t] {
                        const cplx v = convolve_eval(
                            {conv_exp_functional(psi, s, b.B), conv_exp_functional(psi, t, b.B)}, p, *b.B);
                        return std::pair{v, conv_exp(psi, s + t, p, *b.B)};
                      },
                      tol(cfg, "semigroup", 1e-9)});
    }
  }
  if (cfg.contains("moments")) {
    const json& jm = cfg["moments"];
    if (!jm.is_array()) throw SchemaError("/moments", "expected an array");
    for (std::size_t i = 0; i < jm.size(); ++i) {
      const std::string pi = "/moments/" + std::to_string(i);
      const Built mb = jm[i].contains("bialgebra") ? bialgebra_ref(jm[i]["bialgebra"], pi + "/bialgebra") : b;
      const LinearFunctional mpsi = generator_ref(cfg["generator"], mb, "/generator");
      const NcPoly p = poly_from_json(need(jm[i], "element", pi), mb.B->algebra(), pi + "/element");
      const double t = num(jm[i], "t", 1.0, pi);
      const cplx target = cplx_from_json(need(jm[i], "target", pi), pi + "/target");
      const std::string bname = jm[i].contains("bialgebra") && jm[i]["bialgebra"].is_string()
                                    ? jm[i]["bialgebra"].get<std::string>()
                                    : b.B->name();
      jobs.push_back({"moments", "moment " + bname + " " + mb.B->algebra().format(p) + " t=" + short_double(t),
                      [mb, mpsi, p, t, target] { return std::pair{conv_exp(mpsi, t, p, *mb.B), target}; },
                      num(jm[i], "tolerance", tol(cfg, "moments", 1e-10), pi)});
    }
  }
  r.rows.resize(jobs.size());
  parallel_for(jobs.size(), r.threads, [&](std::size_t i) {
    const auto [v, t] = jobs[i].eval();
    r.rows[i] = {0.0, i, jobs[i].label, v, t, std::abs(v - t)};
  });
  for (const char* g : {"series", "semigroup", "moments"}) {
    double worst = 0.0, tl = 0.0;
    std::size_t n = 0;
    bool ok = true;
    for (std::size_t i = 0; i < jobs.size(); ++i)
      if (jobs[i].group == g) {
        ++n;
        worst = std::max(worst, r.rows[i].defect);
        tl = jobs[i].tolerance;
        ok = ok && r.rows[i].defect <= jobs[i].tolerance;
      }
    if (n) r.check(g, ok, std::to_string(n) + " cases, max |difference| " + sci(worst) + ", tolerance " + sci(tl));
  }
}

void run_gns(Run& r) {
  const json& cfg = r.cfg;
  const Built b = bialgebra_ref(cfg["bialgebra"], "/bialgebra");
  const LinearFunctional psi = generator_ref(cfg["generator"], b, "/generator");
  const AlgebraSpec& alg = b.B->algebra();
  const LevyTriple tr = gns_construct(psi, b.B, count(cfg, "degreeCap", 3, ""), num(cfg, "nullTol", 1e-9, ""));
  const json none;
  const json& exp = cfg.contains("expected") ? cfg["expected"] : none;
  const double nan = std::nan("");
  auto target_of = [&](const json* j, const std::string& pointer) { return j ? cplx_from_json(*j, pointer) : cplx(nan, nan); };
  double worst = 0.0;
  bool compared = false;
  auto row = [&](const std::string& q, cplx v, const json* tj, const std::string& pointer) {
    const cplx t = target_of(tj, pointer);
    const double d = tj ? std::abs(v - t) : nan;
    if (tj) {
      compared = true;
      worst = std::max(worst, d);
    }
    r.rows.push_back({0.0, 0, q, v, t, d});
  };
  const std::size_t k = tr.k_dim();
  bool kOk = true;
  {
    const json* tj = exp.is_object() && exp.contains("kDim") ? &exp["kDim"] : nullptr;
    row("kDim", double(k), tj, "/expected/kDim");
    if (tj) kOk = tj->is_number() && tj->get<double>() == double(k);
  }
  for (Letter g = 0; g < alg.size(); ++g) {
    const std::string name = alg.generator(g).name;
    const json* ej = exp.is_object() && exp.contains("eta") && exp["eta"].contains(name) ? &exp["eta"][name] : nullptr;
    const json* rj = exp.is_object() && exp.contains("rho") && exp["rho"].contains(name) ? &exp["rho"][name] : nullptr;
    for (std::size_t i = 0; i < k; ++i) {
      const json* e = ej && ej->is_array() && i < ej->size() ? &(*ej)[i] : nullptr;
      row("eta(" + name + ")[" + std::to_string(i) + "]", tr.eta_on_gen()[g](i), e,
          "/expected/eta/" + name + "/" + std::to_string(i));
      for (std::size_t l = 0; l < k; ++l) {
        const json* x = rj && rj->is_array() && i < rj->size() && (*rj)[i].is_array() && l < (*rj)[i].size()
                            ? &(*rj)[i][l]
                            : nullptr;
        row("rho(" + name + ")[" + std::to_string(i) + "][" + std::to_string(l) + "]", tr.rho_on_gen()[g](i, l), x,
            "/expected/rho/" + name + "/" + std::to_string(i) + "/" + std::to_string(l));
      }
    }
  }
  const TripleResiduals res = levy_triple_residuals(tr, 20, r.rng);
  r.rows.push_back({0.0, 0, "triple residual", res.worst(), 0.0, res.worst()});
  r.results["triple"] = triple_to_json(tr);
  r.check("triple_residuals", res.worst() <= tol(cfg, "residual", 1e-10),
          "worst " + sci(res.worst()) + ", tolerance " + sci(tol(cfg, "residual", 1e-10)));
  if (compared || exp.is_object())
    r.check("expected_values", kOk && worst <= tol(cfg, "expected", 1e-12),
            "kDim " + std::to_string(k) + ", max |difference| " + sci(worst) + ", tolerance " +
                sci(tol(cfg, "expected", 1e-12)));
}

json rows_json(const std::vector<ConvergenceRow>& rows) {
  json a = json::array();
  for (const auto& x : rows)
    a.push_back({{"n", x.n},
                 {"mesh", x.mesh},
                 {"normSq", x.normSq},
                 {"cross", cplx_to_json(x.cross)},
                 {"defect", x.defect},
                 {"bound", x.bound},
                 {"cauchy", std::isnan(x.cauchy) ? json(nullptr) : json(x.cauchy)},
                 {"normDefect", std::isnan(x.normDefect) ? json(nullptr) : json(x.normDefect)}});
  return a;
}

// defect(n) non-increasing for n >= 8, and defect(last) <= defect(8) / 4
void mesh_assertions(Run& r, const std::vector<ConvergenceRow>& rows, const std::string& prefix,
                     double ConvergenceRow::*field) {
  bool mono = true;
  const ConvergenceRow* at8 = nullptr;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].n == 8) at8 = &rows[i];
    if (i > 0 && rows[i - 1].n >= 8 && !(rows[i].*field <= rows[i - 1].*field)) mono = false;
  }
  const ConvergenceRow& last = rows.back();
  r.check(prefix + "nonincreasing_from_n8", mono, "values " + [&] {
    std::string s;
    for (const auto& x : rows) s += (s.empty() ? "" : " ") + sci(x.*field);
    return s;
  }());
  if (at8)
    r.check(prefix + "final_le_n8_over_4", last.*field <= at8->*field / 4.0,
            "n=" + std::to_string(last.n) + ": " + sci(last.*field) + ", n=8: " + sci(at8->*field));
}

void run_sweep(Run& r) {
  const json& cfg = r.cfg;
  const Built src = bialgebra_ref(cfg["source"], "/source");
  const Built dst = bialgebra_ref(cfg["target"], "/target");
  const LinearFunctional psi = generator_ref(cfg["generator"], dst, "/generator");
  const AlgebraSpec& alg = src.B->algebra();
  const std::string mode = str(cfg, "mode", "sweep", "");
  if (mode == "orders") {
    if (dst.grouplike) throw SchemaError("/target", "evaluation orders need a bialgebra target");
    const json none = json::object();
    const json& j = cfg.contains("orders") ? cfg["orders"] : none;
    const std::size_t n = count(j, "count", 50, "/orders"), deg = count(j, "degree", 3, "/orders"),
                      terms = count(j, "terms", 3, "/orders"), maxI = count(j, "maxIntervals", 4, "/orders");
    const double t = num(j, "t", 1.0, "/orders");
    const Morphism k = identity_by_name(src, dst);
    PhiCache cache(psi, dst.B);
    double worst = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const NcPoly c = random_poly(alg, deg, terms, r.rng), d = random_poly(alg, deg, terms, r.rng);
      const Partition a = Partition::random(0.0, t, 1 + i % std::max<std::size_t>(1, maxI), r.rng);
      const cplx g = gram(theta_expand(c, k, a), theta_expand(d, k, a), cache);
      const cplx h = convolved_pairing(c, d, k, a, cache);
      const double def = std::abs(g - h) / std::max(1.0, std::abs(g));
      worst = std::max(worst, def);
      r.rows.push_back({a.mesh(), a.size(), "instance " + std::to_string(i), g, h, def});
    }
    r.check("evaluation_orders_agree", worst <= tol(cfg, "orders", 1e-12),
            std::to_string(n) + " instances, max relative difference " + sci(worst));
    return;
  }
  const Schedule sc = schedule(cfg);
  const NcPoly c = poly_from_json(cfg["element"], alg, "/element");
  std::vector<ConvergenceRow> rows;
  cplx target;
  if (dst.grouplike) {
    const GroupLikeCarrier& C = *dst.grouplike;
    PhiCache cache(psi, C.base());
    const GroupLikeCarrier::Element e = C.kappa_tilde_letter(c);
    target = grouplike_conv_exp(psi, sc.t - sc.s, C.multiply(C.involute(e), e), C);
    auto th = [&](const Partition& a) { return theta_expand(e, C, a); };
    rows = convergence_sweep(th, th, target, sc.s, sc.t, sc.meshes, cache);
  } else {
    const Morphism k = identity_by_name(src, dst);
    PhiCache cache(psi, dst.B);
    target = conv_exp(pullback(psi, k), sc.t - sc.s, alg.multiply(alg.involute(c), c), *src.B);
    auto th = [&](const Partition& a) { return theta_expand(c, k, a); };
    rows = convergence_sweep(th, th, target, sc.s, sc.t, sc.meshes, cache);
  }
  r.csv = sweep_csv(rows);
  r.results["target"] = cplx_to_json(target);
  r.results["rows"] = rows_json(rows);
  bool exact = true, bound = true, cauchy = true;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    exact = exact && rows[i].defect <= 1e-13;
    bound = bound && rows[i].defect <= rows[i].bound * (1 + 1e-12) + 1e-15;
    if (i >= 2 && !(rows[i].cauchy <= rows[i - 1].cauchy)) cauchy = false;
  }
  r.results["exactAtEveryMesh"] = exact;
  mesh_assertions(r, rows, "defect_", &ConvergenceRow::defect);
  r.check("cauchy_nonincreasing", cauchy, "squared increments between successive meshes");
  r.check("defect_within_fitted_bound", bound, "bound = C mesh (t - s), C from the two finest meshes");
}

void run_reverse(Run& r) {
  const json& cfg = r.cfg;
  const Built m = bialgebra_ref(cfg["model"], "/model");
  const LinearFunctional psi =
      cfg.contains("generator") ? generator_ref(cfg["generator"], m, "/generator") : generator_ref(json("azema_psi"), m, "/model");
  const AlgebraSpec& alg = m.B->algebra();
  const Schedule sc = schedule(cfg);
  const std::size_t cap = count(cfg, "cap", 2, ""), inner = count(cfg, "innerMeshFactor", 4, "");
  const TensorPtr T = make_induced_tensor(m.B, cap);
  const GroupLikePtr C = make_grouplike(m.B, cap);
  PhiCache cache(psi, m.B);
  const auto rows = reverse_check(poly_from_json(cfg["b"], alg, "/b"), poly_from_json(cfg["d"], alg, "/d"), *T, *C,
                                  sc.s, sc.t, sc.meshes, inner, cache);
  r.csv = sweep_csv(rows);
  r.results["rows"] = rows_json(rows);
  const double lim = tol(cfg, "final", 1e-2);
  r.check("defect_final_le_" + sci(lim), rows.back().defect <= lim, sci(rows.back().defect));
  mesh_assertions(r, rows, "defect_", &ConvergenceRow::defect);
  r.check("norm_defect_final_le_" + sci(lim), rows.back().normDefect <= lim, sci(rows.back().normDefect));
  mesh_assertions(r, rows, "norm_defect_", &ConvergenceRow::normDefect);
}

void run_fock_unitary(Run& r) {
  const json& cfg = r.cfg;
  const UnitaryTripleParams par = unitary_params(cfg, r.rng);
  const int d = par.d;
  const BialgebraPtr U = make_unitary_bialgebra(d);
  const LevyTriple tr = unitary_triple(par, U);
  const FockFactor f(tr.k_dim(), count(cfg, "particleCap", 8, ""));
  const Schedule sc = schedule(cfg);
  const double len = sc.t - sc.s;
  const std::size_t maxDim = static_cast<std::size_t>(cfg.contains("caps") ? num(cfg["caps"], "maxDefectDim", 2500, "/caps") : 2500);
  const std::size_t K = cfg.contains("defectParticles") ? count(cfg, "defectParticles", 1, "")
                                                        : feasible_defect_particles(f, sc.meshes.back(), d, maxDim);
  if (K == 0) throw SchemaError("/caps/maxDefectDim", "too small for a one-particle defect subspace");
  CMatrix target(d, d);
  for (int j = 0; j < d; ++j)
    for (int k = 0; k < d; ++k) target(j, k) = conv_exp(tr.psi(), len, NcPoly::monomial({unitary_x(d, j, k)}), *U);
  const NcPoly x = NcPoly::monomial({unitary_x(d, 0, 0)});
  const cplx normTarget = d == 1 ? conv_exp(tr.psi(), len, U->algebra().multiply(U->algebra().involute(x), x), *U) : 0.0;

  struct MeshOut {
    ProductEvolution ev;
    double vacErr = 0.0;
    std::optional<std::pair<cplx, double>> cross;  // value, tail bound
  };
  std::vector<MeshOut> out(sc.meshes.size());
  parallel_for(sc.meshes.size(), r.threads, [&](std::size_t i) {
    const Partition p = Partition::uniform(sc.s, sc.t, sc.meshes[i]);
    out[i].ev = unitary_product_evolution(tr, d, p, f, K);
    out[i].vacErr = (out[i].ev.vacuumBlock - target).cwiseAbs().maxCoeff();
    if (d == 1) {
      try {
        const FactorizedFockVector v = grouplike_product_vector(tr, x, p, f);
        const cplx psi = tr.psi()(x);
        const CVector eta = tr.eta(x);
        const double bound = std::exp(2.0 * len * psi.real()) * exponential_tail_bound(eta, eta, p, f.cap());
        out[i].cross = std::pair{inner(v, v), bound};
      } catch (const TailBoundExceeded&) {
      }
    }
  });
  json meshes = json::array();
  bool crossOk = true, crossAny = false;
  double crossWorst = 0.0;
  for (std::size_t i = 0; i < out.size(); ++i) {
    const std::size_t n = sc.meshes[i];
    const double mesh = len / double(n);
    for (int j = 0; j < d; ++j)
      for (int k = 0; k < d; ++k)
        r.rows.push_back({mesh, n, "vacuum[" + std::to_string(j) + "," + std::to_string(k) + "]", out[i].ev.vacuumBlock(j, k),
                          target(j, k), std::abs(out[i].ev.vacuumBlock(j, k) - target(j, k))});
    r.rows.push_back({mesh, n, "unitarity_defect", out[i].ev.unitarityDefect, 0.0, out[i].ev.unitarityDefect});
    json mj = {{"n", n}, {"vacuumError", out[i].vacErr}, {"unitarityDefect", out[i].ev.unitarityDefect},
               {"defectDim", out[i].ev.defectDim}};
    if (out[i].cross) {
      const auto [v, bound] = *out[i].cross;
      const double def = std::abs(v - normTarget);
      r.rows.push_back({mesh, n, "grouplike_norm_sq", v, normTarget, def});
      crossAny = true;
      crossWorst = std::max(crossWorst, def);
      crossOk = crossOk && def <= 10.0 * bound + tol(cfg, "crossPath", 1e-12);
      mj["grouplikeTailBound"] = bound;
    }
    meshes.push_back(std::move(mj));
  }
  r.results["defectParticles"] = K;
  r.results["particleCap"] = f.cap();
  r.results["meshes"] = std::move(meshes);
  r.results["params"] = {{"W", matrix_to_json(par.W)}, {"H", matrix_to_json(par.H)}};

  const std::size_t vm = count(cfg, "vacuumMesh", sc.meshes.back(), "");
  const auto it = std::find(sc.meshes.begin(), sc.meshes.end(), vm);
  if (it == sc.meshes.end()) throw SchemaError("/vacuumMesh", "not one of the meshes");
  const double vErr = out[it - sc.meshes.begin()].vacErr;
  r.check("vacuum_error_at_n" + std::to_string(vm), vErr <= tol(cfg, "vacuum", 1e-3),
          sci(vErr) + ", tolerance " + sci(tol(cfg, "vacuum", 1e-3)));
  bool vDec = true, dDec = true;
  const double dTol = tol(cfg, "defect", 1e-4);
  double dMin = out[0].ev.unitarityDefect;
  std::string vs, ds;
  for (std::size_t i = 0; i < out.size(); ++i) {
    vs += (i ? " " : "") + sci(out[i].vacErr);
    ds += (i ? " " : "") + sci(out[i].ev.unitarityDefect);
    dMin = std::min(dMin, out[i].ev.unitarityDefect);
    if (i == 0) continue;
    vDec = vDec && out[i].vacErr < out[i - 1].vacErr;
    dDec = dDec && (out[i].ev.unitarityDefect < out[i - 1].ev.unitarityDefect || out[i - 1].ev.unitarityDefect < dTol);
  }
  r.check("vacuum_error_decreasing", vDec, vs);
  r.check("unitarity_defect_decreasing", dDec, ds + " (at most one particle per interval, at most " +
                                                   std::to_string(K) + " in total)");
  r.check("unitarity_defect_below_" + sci(dTol), dMin < dTol, "smallest " + sci(dMin));
  if (crossAny)
    r.check("cross_path_grouplike", crossOk, "max |difference| " + sci(crossWorst) + " against 10 x tail bound");
}

void run_azema_wiener(Run& r) {
  const json& cfg = r.cfg;
  const double q = num(cfg, "q", 1.0, "");
  const Schedule sc = schedule(cfg);
  const double len = sc.t - sc.s;
  const std::size_t cap = count(cfg, "particleCap", 4, "");
  const AzemaModel m = make_azema(q);
  const LevyTriple tr = azema_triple(m);
  const AlgebraSpec& alg = m.azema->algebra();
  const FockFactor f(1, cap);
  auto list = [&](const char* key, std::vector<std::string> def) {
    std::vector<std::pair<std::string, NcPoly>> v;
    if (cfg.contains(key)) {
      def.clear();
      for (const auto& e : cfg[key]) {
        if (!e.is_string()) throw SchemaError(std::string("/") + key, "expected polynomial strings");
        def.push_back(e);
      }
    }
    for (std::size_t i = 0; i < def.size(); ++i)
      v.emplace_back(def[i], poly_from_json(json(def[i]), alg, std::string("/") + key + "/" + std::to_string(i)));
    return v;
  };
  const auto vac = list("crossPath", {"1", "x^*", "y", "x^* y", "x x^*"});
  const auto grams = list("crossPathGram", {"1", "x^*", "y", "x^* y"});
  for (const auto& [s, p] : vac)
    if (p.degree() + 1 > static_cast<int>(cap)) throw SchemaError("/particleCap", "cap too small for '" + s + "'");

  std::vector<std::vector<ReportRow>> per(sc.meshes.size());
  std::vector<AzemaWienerReport> reps(sc.meshes.size());
  parallel_for(sc.meshes.size(), r.threads, [&](std::size_t i) {
    const Partition p = Partition::uniform(sc.s, sc.t, sc.meshes[i]);
    const double mesh = p.mesh();
    const std::size_t n = p.size();
    const AzemaWienerReport rep = azema_wiener_experiment(q, p, cap);
    reps[i] = rep;
    auto& rows = per[i];
    rows.push_back({mesh, n, "wiener_norm_sq", rep.wienerNormSq, rep.wienerTarget, std::abs(rep.wienerNormSq - rep.wienerTarget)});
    rows.push_back({mesh, n, "azema_norm_sq", rep.azemaNormSq, rep.azemaTarget, std::abs(rep.azemaNormSq - rep.azemaTarget)});
    rows.push_back({mesh, n, "x_omega_norm", rep.xOmegaNorm, 0.0, rep.xOmegaNorm});
    rows.push_back({mesh, n, "qsde_residual", rep.qsdeResidual, 0.0, rep.qsdeResidual});
    const FactorizedFockVector om = FactorizedFockVector::vacuum(p, f);
    for (const auto& [s, b] : vac) {
      const cplx v = inner(om, convolution_product_process(tr, b, p, f).apply_vacuum(f));
      const cplx t = conv_exp(m.psi, len, b, *m.azema);
      rows.push_back({mesh, n, "vacuum " + s, v, t, std::abs(v - t) / std::max(1.0, std::abs(t))});
    }
    std::vector<FactorizedFockVector> vs;
    for (const auto& [s, b] : grams) vs.push_back(convolution_product_process(tr, b, p, f).apply_vacuum(f));
    for (std::size_t a = 0; a < grams.size(); ++a)
      for (std::size_t b = a; b < grams.size(); ++b) {
        const cplx v = inner(vs[a], vs[b]);
        const cplx t = conv_exp(m.psi, len, alg.multiply(alg.involute(grams[a].second), grams[b].second), *m.azema);
        rows.push_back({mesh, n, "gram " + grams[a].first + " | " + grams[b].first, v, t,
                        std::abs(v - t) / std::max(1.0, std::abs(t))});
      }
  });
  double xw = 0.0, qw = 0.0, mw = 0.0, cw = 0.0;
  for (std::size_t i = 0; i < per.size(); ++i) {
    for (const auto& row : per[i]) {
      if (row.quantity.rfind("vacuum ", 0) == 0 || row.quantity.rfind("gram ", 0) == 0) cw = std::max(cw, row.defect);
      r.rows.push_back(row);
    }
    xw = std::max(xw, reps[i].xOmegaNorm);
    qw = std::max(qw, reps[i].qsdeResidual);
  }
  mw = std::max(per.back()[0].defect, per.back()[1].defect);
  r.check("x_omega_zero", xw <= tol(cfg, "xOmega", 1e-12), "max |X_t Omega| " + sci(xw));
  r.check("qsde_residual", qw <= tol(cfg, "qsde", 1e-10), "max residual " + sci(qw));
  r.check("second_moments_at_finest_mesh", mw <= tol(cfg, "moment", 1e-10), "max |difference| " + sci(mw));
  r.check("cross_path", cw <= tol(cfg, "crossPath", 1e-12),
          "max relative difference " + sci(cw) + "; truncation never reached, tail bound 0");
}

void run_trotter(Run& r) {
  const json& cfg = r.cfg;
  const std::string fam = cfg["family"];
  if (fam == "nilpotent") {
    const CMatrix G = matrix_from_json(cfg["G"], "/G");
    if (G.rows() != G.cols() || G.rows() == 0) throw SchemaError("/G", "expected a square matrix");
    if ((G * G).cwiseAbs().maxCoeff() > 0.0) throw SchemaError("/G", "G must satisfy G^2 = 0");
    const MatrixFamily fm = exact_matrix_family(G, num(cfg, "R", 1.0, ""));
    const std::size_t parts = count(cfg, "partitions", 20, ""), intervals = count(cfg, "intervals", 8, "");
    double worst = 0.0;
    bool ok = true;
    for (std::size_t k = 0; k < parts; ++k) {
      const Partition a = Partition::random(0.0, 1.0, intervals, r.rng).subdivided(fm.R);
      const BanachProductReport rep = banach_product_check(fm, a, count(cfg, "draws", 1, ""), r.rng);
      worst = std::max(worst, rep.maxLhs);
      ok = ok && rep.pass;
      r.rows.push_back({a.mesh(), a.size(), "partition " + std::to_string(k), rep.maxLhs, rep.bound,
                        std::max(0.0, rep.maxLhs - rep.bound)});
    }
    r.check("bound_holds", ok, std::to_string(parts) + " partitions");
    r.check("exact_for_nilpotent", worst <= tol(cfg, "exact", 1e-13), "max lhs " + sci(worst));
    return;
  }
  const std::size_t n = count(cfg, "count", 1000, ""), parts = count(cfg, "partitions", 20, ""),
                    intervals = count(cfg, "intervals", 6, ""), dim = count(cfg, "dim", 4, ""),
                    mu = count(cfg, "muCount", 3, ""), draws = count(cfg, "draws", 2, "");
  const double gScale = num(cfg, "gScale", 0.5, ""), C = num(cfg, "C", 1.0, ""), R = num(cfg, "R", 0.25, "");
  r.rows.resize(n);
  std::vector<char> pass(n, 0);
  parallel_for(n, r.threads, [&](std::size_t i) {
    std::seed_seq seq{static_cast<std::uint32_t>(r.seed), static_cast<std::uint32_t>(r.seed >> 32),
                      static_cast<std::uint32_t>(i)};
    std::mt19937_64 rng(seq);
    const MatrixFamily fm = random_matrix_family(dim, mu, gScale, C, R, rng);
    bool ok = true;
    double ratio = -1.0;
    ReportRow row;
    for (std::size_t k = 0; k < parts; ++k) {
      const Partition a = Partition::random(0.0, 1.0, intervals, rng).subdivided(R);
      const BanachProductReport rep = banach_product_check(fm, a, draws, rng);
      ok = ok && rep.pass;
      const double q = rep.bound > 0 ? rep.maxLhs / rep.bound : 0.0;
      if (q > ratio) {
        ratio = q;
        row = {a.mesh(), a.size(), "instance " + std::to_string(i), rep.maxLhs, rep.bound,
               std::max(0.0, rep.maxLhs - rep.bound)};
      }
    }
    r.rows[i] = row;
    pass[i] = ok;
  });
  const bool all = std::all_of(pass.begin(), pass.end(), [](char c) { return c != 0; });
  double worstRatio = 0.0;
  for (const auto& row : r.rows) worstRatio = std::max(worstRatio, row.value.real() / std::max(row.target.real(), 1e-300));
  r.check("bound_holds", all, std::to_string(n) + " instances x " + std::to_string(parts) +
                                  " partitions, worst lhs/bound " + sci(worstRatio));
}

}  // namespace

Artifacts run_experiment(const json& cfg, std::size_t threads) {
  validate_config(cfg);
  const std::string kind = cfg["kind"];
  const std::string name = cfg.value("name", kind);
  const std::uint64_t seed = cfg.value("rngSeed", kDefaultSeed);
  Run r{cfg, threads, seed, std::mt19937_64(seed), {}, {}, json::object(), {}};
  try {
    if (kind == "axioms") run_axioms(r);
    else if (kind == "convexp") run_convexp(r);
    else if (kind == "gns") run_gns(r);
    else if (kind == "sweep") run_sweep(r);
    else if (kind == "reverse") run_reverse(r);
    else if (kind == "fock-unitary") run_fock_unitary(r);
    else if (kind == "azema-wiener") run_azema_wiener(r);
    else run_trotter(r);
  } catch (const SchemaError&) {
    throw;
  } catch (const Error& e) {
    throw Error(kind + " experiment '" + name + "': " + e.what());
  }
  Artifacts a;
  const json out = cfg.contains("output") ? cfg["output"] : json::object();
  a.csvName = out.value("csv", name + ".csv");
  a.jsonName = out.value("json", name + ".json");
  a.csv = r.csv.empty() ? report_csv(r.rows) : r.csv;
  a.assertions = r.asserts;
  json as = json::array();
  for (const auto& x : a.assertions) as.push_back({{"name", x.name}, {"pass", x.pass}, {"detail", x.detail}});
  a.summary = {{"name", name},
               {"kind", kind},
               {"library", {{"name", "qlevy"}, {"version", kLibraryVersion}}},
               {"rngSeed", seed},
               {"pass", a.pass()},
               {"assertions", std::move(as)},
               {"results", std::move(r.results)},
               {"config", cfg}};
  return a;
}

}  // namespace qlevy
