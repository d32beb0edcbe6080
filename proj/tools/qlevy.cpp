#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "qlevy/error.hpp"
#include "qlevy/experiments.hpp"

namespace fs = std::filesystem;

namespace {

void write_file(const fs::path& p, const std::string& data) {
  std::ofstream f(p, std::ios::binary);
  if (!f) throw qlevy::Error("cannot write " + p.string());
  f << data;
}

int cmd_check(const std::string& path) {
  const qlevy::json cfg = qlevy::load_config(path);
  qlevy::validate_config(cfg);
  const qlevy::CheckResult r = qlevy::check_defs(cfg);
  for (const auto& it : r.items)
    std::cout << (it.residual <= it.tolerance ? "ok   " : "FAIL ") << it.label << "  residual " << it.residual
              << "  tolerance " << it.tolerance << "\n";
  std::cout << (r.ok ? "check passed" : "check failed") << "\n";
  return r.ok ? 0 : 1;
}

int cmd_run(const std::string& path, const std::string& outDir) {
  const auto t0 = std::chrono::steady_clock::now();
  const qlevy::json cfg = qlevy::load_config(path);
  qlevy::validate_config(cfg);
  const qlevy::CheckResult chk = qlevy::check_defs(cfg);
  if (!chk.ok) {
    for (const auto& it : chk.items)
      if (it.residual > it.tolerance) std::cerr << "FAIL " << it.label << "  residual " << it.residual << "\n";
    std::cerr << "definitions failed the checker, not running\n";
    return 1;
  }
  const qlevy::Artifacts a = qlevy::run_experiment(cfg, qlevy::thread_cap());
  fs::create_directories(outDir);
  write_file(fs::path(outDir) / a.csvName, a.csv);
  write_file(fs::path(outDir) / a.jsonName, a.summary.dump(2) + "\n");
  for (const auto& as : a.assertions)
    std::cout << (as.pass ? "PASS " : "FAIL ") << as.name << "  " << as.detail << "\n";
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::cerr << "wall time " << secs << " s\n";
  return a.pass() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"qlevy: quantum Levy process experiments"};
  app.require_subcommand(1);
  std::string cfg, out = ".";
  auto* check = app.add_subcommand("check", "validate a config and run the structure checkers");
  check->add_option("config", cfg, "config file")->required();
  auto* run = app.add_subcommand("run", "run an experiment and write CSV and JSON");
  run->add_option("config", cfg, "config file")->required();
  run->add_option("--out", out, "output directory");
  auto* list = app.add_subcommand("list-builtins", "list experiment kinds and builder calls");
  CLI11_PARSE(app, argc, argv);
  try {
    if (*check) return cmd_check(cfg);
    if (*run) return cmd_run(cfg, out);
    if (*list) {
      for (const auto& s : qlevy::list_builtins()) std::cout << s << "\n";
      return 0;
    }
  } catch (const qlevy::SchemaError& e) {
    std::cerr << "schema error: " << e.what() << "\n";
    return 2;
  } catch (const qlevy::ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
