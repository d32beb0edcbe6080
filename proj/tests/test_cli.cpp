#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "qlevy/error.hpp"
#include "qlevy/experiments.hpp"

using namespace qlevy;

namespace {

std::string cfg_path(const std::string& name) { return std::string(QLEVY_SOURCE_DIR) + "/configs/" + name; }

json cfg(const std::string& name) { return load_config(cfg_path(name)); }

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> f;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
      const char c = line[i];
      if (c == '"') {
        if (quoted && i + 1 < line.size() && line[i + 1] == '"') {
          cur += '"';
          ++i;
        } else {
          quoted = !quoted;
        }
      } else if (c == ',' && !quoted) {
        f.push_back(cur);
        cur.clear();
      } else {
        cur += c;
      }
    }
    f.push_back(cur);
    rows.push_back(f);
  }
  return rows;
}

std::size_t column(const std::vector<std::string>& header, const std::string& name) {
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == name) return i;
  FAIL("missing column " << name);
  return 0;
}

}  // namespace

TEST_CASE("shipped definitions pass the checker, a corrupted coproduct does not") {
  const CheckResult ok = check_defs(cfg("azema_q2.json"));
  CHECK(ok.ok);
  CHECK(ok.items.size() == 6);

  const CheckResult bad = check_defs(cfg("corrupted_delta.json"));
  CHECK_FALSE(bad.ok);
  bool counitListed = false;
  for (const auto& it : bad.items)
    if (it.label.find("counit law") != std::string::npos) {
      counitListed = true;
      // (id (x) counit) of 1 (x) x + 1.5 x (x) y is 1.5 x
      CHECK(it.residual == doctest::Approx(1.25).epsilon(1e-12));
    }
  CHECK(counitListed);
}

TEST_CASE("malformed configs") {
  json c = cfg("azema_q2.json");
  c["bialgebra"] = "azema(0)";
  CHECK_THROWS_AS(check_defs(c), SchemaError);

  json w = cfg("azema_wiener_q2.json");
  w["q"] = 0;
  try {
    validate_config(w);
    FAIL("q = 0 accepted");
  } catch (const SchemaError& e) {
    CHECK(e.pointer() == "/q");
  }

  json k = cfg("azema_q2.json");
  k["kind"] = "bogus";
  CHECK_THROWS_AS(run_experiment(k), SchemaError);

  json extra = cfg("azema_q2.json");
  extra["element"] = "x";
  CHECK_THROWS_AS(validate_config(extra), SchemaError);

  json mesh = cfg("sweep_grouplike_x.json");
  mesh["partition"]["meshes"] = json::array({4, 2});
  CHECK_THROWS_AS(validate_config(mesh), SchemaError);

  const std::string tmp = (std::filesystem::temp_directory_path() / "qlevy_bad.json").string();
  std::ofstream(tmp) << "{\"kind\": \"axioms\",\n \"bialgebra\": }";
  try {
    load_config(tmp);
    FAIL("bad JSON accepted");
  } catch (const ParseError& e) {
    CHECK(e.offset() > 20);
  }
  CHECK_THROWS_AS(load_config(tmp + ".missing"), Error);
}

TEST_CASE("every shipped config validates and its definitions check") {
  for (const auto& e : std::filesystem::directory_iterator(std::string(QLEVY_SOURCE_DIR) + "/configs")) {
    const json c = load_config(e.path().string());
    CAPTURE(e.path().filename().string());
    CHECK_NOTHROW(validate_config(c));
    if (e.path().filename() != "corrupted_delta.json") CHECK(check_defs(c).ok);
  }
}

TEST_CASE("sweep config writes six rows with non-increasing defect") {
  for (const std::string name : {"sweep_grouplike_x.json", "sweep_grouplike_xs.json", "sweep_primitive_xs2.json"}) {
    CAPTURE(name);
    const Artifacts a = run_experiment(cfg(name));
    const auto rows = parse_csv(a.csv);
    REQUIRE(rows.size() == 7);
    CHECK(rows[0] == std::vector<std::string>{"mesh", "n", "norm_sq", "re_cross", "im_cross", "defect", "bound"});
    const std::size_t d = column(rows[0], "defect");
    for (std::size_t i = 2; i < rows.size(); ++i) CHECK(std::stod(rows[i][d]) <= std::stod(rows[i - 1][d]));
    CHECK(a.pass());
  }
  // nonzero defect: strictly decreasing, roughly halving per refinement
  const auto rows = parse_csv(run_experiment(cfg("sweep_grouplike_xs.json")).csv);
  for (std::size_t i = 2; i < rows.size(); ++i) {
    const double r = std::stod(rows[i][5]) / std::stod(rows[i - 1][5]);
    CHECK(r < 1.0);
    CHECK(r > 0.4);
  }
}

TEST_CASE("nilpotent trotter config has an all-zero defect column") {
  const Artifacts a = run_experiment(cfg("trotter_nilpotent.json"));
  const auto rows = parse_csv(a.csv);
  REQUIRE(rows.size() == 21);
  const std::size_t d = column(rows[0], "defect"), v = column(rows[0], "value_re");
  for (std::size_t i = 1; i < rows.size(); ++i) {
    CHECK(std::stod(rows[i][d]) == 0.0);
    CHECK(std::stod(rows[i][v]) <= 1e-13);
  }
  CHECK(a.pass());
}

TEST_CASE("identical config and seed give identical bytes") {
  for (const std::string name : {"convexp_oracle.json", "trotter_random.json", "fock_unitary_d2.json", "reverse_xs.json"}) {
    CAPTURE(name);
    json c = cfg(name);
    if (c["kind"] == "trotter") c["count"] = 40;
    const Artifacts a = run_experiment(c, 1), b = run_experiment(c, 4);
    CHECK(a.csv == b.csv);
    CHECK(a.summary.dump(2) == b.summary.dump(2));
    c["rngSeed"] = 7;
    if (c["kind"] == "trotter" || c["kind"] == "convexp" || c.contains("random"))
      CHECK(run_experiment(c, 2).csv != a.csv);
  }
}

TEST_CASE("summary structure") {
  const Artifacts a = run_experiment(cfg("gns_azema_q2.json"));
  const json& s = a.summary;
  CHECK(s["library"]["name"] == "qlevy");
  CHECK(s["library"]["version"] == kLibraryVersion);
  CHECK(s["rngSeed"] == kDefaultSeed);
  CHECK(s["config"] == cfg("gns_azema_q2.json"));
  CHECK(s["pass"] == true);
  CHECK(s["assertions"].size() == a.assertions.size());
  const json& t = s["results"]["triple"];
  CHECK(t["kDim"] == 1);
  // eta(x^*) = 1, rho(y) = q as [re, im]
  CHECK(std::abs(t["eta"]["x^*"][0][0].get<double>() - 1.0) < 1e-12);
  CHECK(std::abs(t["rho"]["y"][0][0][0].get<double>() - 2.0) < 1e-12);
  CHECK(a.csvName == "gns_azema_q2.csv");
  CHECK(a.jsonName == "gns_azema_q2.json");
}

TEST_CASE("fock-unitary vacuum target is the closed-form exponential") {
  json c = cfg("fock_unitary_d1.json");
  c["partition"]["meshes"] = json::array({4, 8});
  c["vacuumMesh"] = 8;
  const Artifacts a = run_experiment(c);
  const auto rows = parse_csv(a.csv);
  const cplx want = std::exp(cplx(-0.3 * 0.3 / 2, 0.5));
  bool seen = false;
  for (const auto& r : rows)
    if (r[2] == "vacuum[0,0]") {
      seen = true;
      CHECK(std::abs(cplx(std::stod(r[5]), std::stod(r[6])) - want) < 1e-13);
      // first-order product error |psi|^2 t^2 / (2n)
      const double err = std::abs(cplx(std::stod(r[3]), std::stod(r[4])) - want);
      CHECK(err == doctest::Approx(std::norm(cplx(-0.045, 0.5)) / (2.0 * std::stod(r[1]))).epsilon(0.05));
    }
  CHECK(seen);
}

TEST_CASE("azema-wiener report quantities") {
  const Artifacts a = run_experiment(cfg("azema_wiener_q2.json"));
  CHECK(a.pass());
  const auto rows = parse_csv(a.csv);
  std::size_t gram = 0;
  for (const auto& r : rows) {
    if (r[2] == "wiener_norm_sq" || r[2] == "azema_norm_sq") CHECK(std::stod(r[5]) == doctest::Approx(1.0));
    if (r[2].rfind("gram ", 0) == 0) ++gram;
  }
  CHECK(gram == 4 * 10);  // 4 meshes, 10 unordered pairs of 4 elements
}

TEST_CASE("thread cap reads QLEVY_THREADS") {
  setenv("QLEVY_THREADS", "3", 1);
  CHECK(thread_cap() == 3);
  setenv("QLEVY_THREADS", "0", 1);
  CHECK(thread_cap() >= 1);
  unsetenv("QLEVY_THREADS");
  std::vector<int> hit(100, 0);
  parallel_for(100, 8, [&](std::size_t i) { hit[i] += 1; });
  CHECK(std::all_of(hit.begin(), hit.end(), [](int h) { return h == 1; }));
  CHECK_THROWS_AS(parallel_for(10, 4, [](std::size_t i) {
                    if (i == 5) throw InvalidParameter("boom");
                  }),
                  InvalidParameter);
}
