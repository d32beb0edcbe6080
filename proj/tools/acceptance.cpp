// Runs the acceptance criteria and prints one PASS/FAIL line for each.
// Exit status is 0 when the failing set equals --expected-failures (empty by default).

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "qlevy/error.hpp"
#include "qlevy/experiments.hpp"
#include "qlevy/fock.hpp"

using namespace qlevy;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

std::string sci(double v) {
  char b[32];
  std::snprintf(b, sizeof b, "%.3g", v);
  return b;
}

struct Runner {
  fs::path configs, out;
  std::size_t threads = 1;

  // runs a shipped config; keeps the assertions whose name starts with one of `only` (all if empty)
  Outcome run(const std::string& name, const std::vector<std::string>& only = {}, double* secs = nullptr) {
    const auto t0 = std::chrono::steady_clock::now();
    const json cfg = load_config((configs / (name + ".json")).string());
    validate_config(cfg);
    const CheckResult chk = check_defs(cfg);
    Outcome o;
    if (!chk.ok) return {false, name + ": definitions fail the checker"};
    const Artifacts a = run_experiment(cfg, threads);
    if (secs) *secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (!out.empty()) {
      fs::create_directories(out);
      std::ofstream(out / a.csvName, std::ios::binary) << a.csv;
      std::ofstream(out / a.jsonName, std::ios::binary) << a.summary.dump(2) << "\n";
    }
    std::ostringstream d;
    d << name << " [";
    bool first = true;
    for (const auto& as : a.assertions) {
      bool keep = only.empty();
      for (const auto& p : only) keep = keep || as.name.rfind(p, 0) == 0;
      if (!keep) continue;
      o.pass = o.pass && as.pass;
      d << (first ? "" : "; ") << (as.pass ? "" : "FAILED ") << as.name << ": " << as.detail;
      first = false;
    }
    d << "]";
    o.detail = d.str();
    return o;
  }

  static Outcome all(std::initializer_list<Outcome> parts) {
    Outcome o;
    for (const auto& p : parts) {
      o.pass = o.pass && p.pass;
      o.detail += (o.detail.empty() ? "" : " ") + p.detail;
    }
    return o;
  }
};

// truncated exponential vectors against exp(<f, g>)
Outcome exponential_vectors(std::uint64_t seed) {
  const FockFactor f1(1, 10);
  const Partition unit({0.0, 1.0});
  const CVector one = CVector::Ones(1);
  const FactorizedFockVector e = exponential_vector(one, unit, f1);
  const double unitErr = std::abs(inner(e, e) - std::exp(1.0));
  bool ok = unitErr <= 3e-8;

  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> mDist(1, 3), nDist(1, 5), capDist(8, 14);
  std::normal_distribution<double> g(0.0, 0.5);
  std::size_t checked = 0, skipped = 0;
  double worstErr = 0.0, worstExcess = -1.0;
  for (int i = 0; i < 200; ++i) {
    const int m = mDist(rng);
    const FockFactor f(m, capDist(rng));
    const Partition p = Partition::random(0.0, 1.0, nDist(rng), rng);
    CVector a(m), b(m);
    for (int j = 0; j < m; ++j) {
      a(j) = cplx(g(rng), g(rng));
      b(j) = cplx(g(rng), g(rng));
    }
    try {
      const FactorizedFockVector ea = exponential_vector(a, p, f), eb = exponential_vector(b, p, f);
      const double err = std::abs(inner(ea, eb) - std::exp(a.dot(b)));
      const double bound = exponential_tail_bound(a, b, p, f.cap());
      ok = ok && err <= bound * (1 + 1e-9) + 1e-13;
      worstErr = std::max(worstErr, err);
      worstExcess = std::max(worstExcess, err - bound);
      ++checked;
    } catch (const TailBoundExceeded&) {
      ++skipped;
    }
  }
  return {ok && checked >= 100, "unit case m=1 N=10 error " + sci(unitErr) + " (<= 3e-8); " + std::to_string(checked) +
                                    " random instances, max error " + sci(worstErr) + ", max (error - tail bound) " + sci(worstExcess) +
                                    ", " + std::to_string(skipped) + " refused by the truncation guard"};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"qlevy acceptance criteria"};
  Runner r;
  std::string configs = std::string(QLEVY_SOURCE_DIR) + "/configs", out;
  std::vector<int> expected;
  app.add_option("--configs", configs, "directory with the shipped configs");
  app.add_option("--out", out, "write every experiment's CSV and JSON here");
  app.add_option("--expected-failures", expected, "criteria known to fail")->delimiter(',');
  CLI11_PARSE(app, argc, argv);
  r.configs = configs;
  r.out = out;
  r.threads = thread_cap();

  struct Criterion {
    int id;
    std::string title;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria{
      {1, "series oracle vs subcoalgebra exponential",
       [&] {
         double secs = 0.0;
         Outcome o = r.run("convexp_oracle", {}, &secs);
         o.pass = o.pass && secs < 30.0;
         o.detail += " runtime " + sci(secs) + " s (< 30 s)";
         return o;
       }},
      {2, "semigroup law", [&] { return r.run("convexp_semigroup"); }},
      {3, "closed-form moments", [&] { return r.run("moments"); }},
      {4, "GNS reproduces the Azema triple", [&] { return r.run("gns_azema_q2"); }},
      {5, "Trotter product bound",
       [&] {
         double secs = 0.0;
         Outcome o = Runner::all({r.run("trotter_random", {}, &secs), r.run("trotter_nilpotent")});
         o.pass = o.pass && secs < 60.0;
         o.detail += " runtime " + sci(secs) + " s (< 60 s)";
         return o;
       }},
      {6, "transformation convergence sweeps",
       [&] {
         return Runner::all({r.run("sweep_grouplike_x"), r.run("sweep_primitive_x"), r.run("sweep_grouplike_xs"),
                             r.run("sweep_primitive_xs2")});
       }},
      {7, "reverse transformation", [&] { return Runner::all({r.run("reverse_x"), r.run("reverse_xs")}); }},
      {8, "exponential vectors", [&] { return exponential_vectors(kDefaultSeed); }},
      {9, "unitary evolution d=1", [&] { return r.run("fock_unitary_d1", {"vacuum", "unitarity"}); }},
      {10, "cross-path consistency",
       [&] {
         return Runner::all({r.run("azema_wiener_q2", {"cross_path"}), r.run("azema_wiener_q1", {"cross_path"}),
                             r.run("fock_unitary_d1", {"cross_path"})});
       }},
      {11, "evaluation orders agree", [&] { return r.run("orders"); }},
  };

  std::set<int> failed;
  for (const auto& c : criteria) {
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    if (!o.pass) failed.insert(c.id);
    std::cout << (o.pass ? "PASS" : "FAIL") << " " << c.id << " " << c.title << ": " << o.detail << std::endl;
  }
  const std::set<int> want(expected.begin(), expected.end());
  std::cout << (criteria.size() - failed.size()) << "/" << criteria.size() << " criteria pass";
  if (!want.empty()) std::cout << (failed == want ? ", failures match the expected set" : ", failures differ from the expected set");
  std::cout << "\n";
  return failed == want ? 0 : 1;
}
