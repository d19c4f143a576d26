#pragma once

#include <cfv/changes/changeset.hpp>
#include <cfv/equivalence/check.hpp>
#include <cfv/harness/generalize.hpp>
#include <cfv/verification/verify.hpp>

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace cfv::pipeline {

class ConfigError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Parse or type errors in the inputs; what() holds one formatted
/// diagnostic per line.
class InputError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

inline constexpr int kExitOk = 0;
inline constexpr int kExitFail = 1;
inline constexpr int kExitUnknown = 2;
inline constexpr int kExitError = 3;

struct RunConfig {
  std::string old_dir;
  std::string new_dir;
  std::string tests_dir;
  double budget_s = 300;
  /// Fraction of the budget the equivalence phase may use.
  double equivalence_share = 0.5;
  /// timeout_s is the per-pair equivalence timeout.
  equivalence::UnrollConfig unroll{8, 0, 60};
  unsigned int_width = 32;
  unsigned parallelism = 1;
  std::string backend = "internal";
  std::string output;

  /// Throws ConfigError.
  void validate() const;
};

struct PairResult {
  std::string function;
  equivalence::EquivalenceVerdict verdict;
  double seconds = 0;
};

struct TestResult {
  harness::GeneralizedTest test;
  std::vector<std::string> triggered_by;
  verification::VerificationResult result;
  /// Outcome of re-running the concretized counterexample (Fail only).
  std::optional<verification::ConcreteOutcome> replay;
  double seconds = 0;
};

struct Totals {
  unsigned equivalent = 0;
  unsigned not_equivalent = 0;
  unsigned unknown = 0; // equivalence and verification unknowns together
  unsigned pass = 0;
  unsigned fail = 0;
};

struct Report {
  std::string old_label;
  std::string new_label;
  RunConfig config;
  changes::ChangeSet changeset;
  /// Source locations in the report resolve against this version.
  changes::Snapshot new_snapshot;
  std::vector<std::string> all_functions; // union of both snapshots, sorted
  std::vector<PairResult> equivalence;    // sorted by function
  std::vector<TestResult> verification;   // sorted by test name
  Totals totals;
  unsigned solver_invocations = 0;
  bool budget_exceeded = false;
  double total_seconds = 0;
  double equivalence_seconds = 0;
  double verification_seconds = 0;

  int exit_code() const;
};

/// Loads both snapshots and the suite, then runs change analysis, the
/// equivalence checks, test selection, generalization and verification.
/// Throws ConfigError or InputError.
Report run_pipeline(const RunConfig& cfg);

/// Compares two snapshots already in memory against `tests`.
Report run_pipeline(const RunConfig& cfg, const changes::Snapshot& old_snap, const changes::Snapshot& new_snap,
                    const std::vector<harness::TestCase>& tests);

/// JSON text; every wall-clock figure lives under "timings".
std::string render_report(const Report& r);

/// Writes `text` to `path` through a temporary file and a rename.
void write_atomically(const std::string& path, const std::string& text);

} // namespace cfv::pipeline
