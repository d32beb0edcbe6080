#pragma once

// Config-driven experiments: validation, the per-kind runners and the
// artifacts they write.

#include <functional>
#include <string>
#include <vector>

#include "qlevy/serialize.hpp"

namespace qlevy {

inline constexpr const char* kLibraryVersion = "0.1.0";
inline constexpr std::uint64_t kDefaultSeed = 20080131;

/// Reads and parses a JSON file; ParseError with the byte offset on bad JSON.
json load_config(const std::string& path);

/// Structural validation; throws SchemaError with a JSON pointer.
void validate_config(const json& cfg);

struct CheckResult {
  bool ok = true;
  /// (label, residual, tolerance)
  struct Item {
    std::string label;
    double residual = 0.0;
    double tolerance = 0.0;
  };
  std::vector<Item> items;
};

/// Builds every referenced object, runs the bialgebra axiom checker on each
/// bialgebra and the counit-preservation checker on each morphism.
CheckResult check_defs(const json& cfg);

struct Assertion {
  std::string name;
  bool pass = false;
  std::string detail;
};

struct Artifacts {
  std::string csvName, csv;
  std::string jsonName;
  json summary;
  std::vector<Assertion> assertions;
  bool pass() const;
};

/// QLEVY_THREADS if set and positive, else the hardware concurrency.
std::size_t thread_cap();

/// Runs f(i) for i < n on at most `threads` workers; the first exception is rethrown.
void parallel_for(std::size_t n, std::size_t threads, const std::function<void(std::size_t)>& f);

/// Runs the experiment described by cfg. The summary holds the config echo,
/// the library version and one entry per assertion; it carries no timing, so
/// identical config and seed give identical bytes.
Artifacts run_experiment(const json& cfg, std::size_t threads = 1);

/// "mesh,n,quantity,value_re,value_im,target_re,target_im,defect"
struct ReportRow {
  double mesh = 0.0;
  std::size_t n = 0;
  std::string quantity;
  cplx value;
  cplx target;
  double defect = 0.0;
};
std::string report_csv(const std::vector<ReportRow>& rows);

/// Experiment kinds and builder calls, one per line.
std::vector<std::string> list_builtins();

}  // namespace qlevy
