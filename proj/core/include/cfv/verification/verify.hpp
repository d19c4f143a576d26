#pragma once

#include <cfv/equivalence/encode.hpp>
#include <cfv/harness/generalize.hpp>
#include <cfv/solver/solve.hpp>
#include <cfv/verification/interpreter.hpp>

#include <atomic>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace cfv::verification {

using harness::GeneralizedTest;
using harness::TestCase;

struct Counterexample {
  /// Every nondet symbol the checked test can read, including callee sites.
  Assignment valuation;
  Span failing_assert;
  std::string failing_function;
  /// Assignments along the failing path; the last entry is the failure.
  std::vector<TraceEntry> trace;
};

struct Pass {
  unsigned bound = 0;
  bool complete = true;
};

struct Fail {
  Counterexample counterexample;
};

struct Unknown {
  enum class Reason : std::uint8_t { Timeout, UnwindingIncomplete };
  Reason reason = Reason::Timeout;
  std::string detail;
};

const char* to_string(Unknown::Reason r);

struct VerificationResult {
  std::variant<Pass, Fail, Unknown> value;
  unsigned solver_calls = 0;

  bool pass() const { return std::holds_alternative<Pass>(value); }
  bool fail() const { return std::holds_alternative<Fail>(value); }
  bool unknown() const { return std::holds_alternative<Unknown>(value); }
  const Pass& as_pass() const { return std::get<Pass>(value); }
  const Fail& as_fail() const { return std::get<Fail>(value); }
  const Unknown& as_unknown() const { return std::get<Unknown>(value); }
};

/// "pass", "fail" or "unknown".
const char* verdict_class(const VerificationResult& r);

struct VerifyOptions {
  std::shared_ptr<const solver::Backend> backend;
  const std::atomic<bool>* cancel = nullptr;
  std::optional<solver::Clock::time_point> deadline;
};

/// Bounded model check of the test body against `snap` with globals at their
/// declared initial values. Only the test's reachable callees are encoded.
VerificationResult verify_test(const GeneralizedTest& gt, const Snapshot& snap,
                               const equivalence::UnrollConfig& cfg, const VerifyOptions& opts = {});

enum class ConcreteOutcome : std::uint8_t { Pass, AssertFail, OutOfFuel };

const char* to_string(ConcreteOutcome o);

struct ConcreteResult {
  ConcreteOutcome outcome = ConcreteOutcome::Pass;
  Span failing_assert; // AssertFail only
};

/// Reference execution of a nondet-free test without loop or call bounds.
/// An `assume` that does not hold ends the run as a Pass. Throws
/// std::invalid_argument when the test reads nondet values.
ConcreteResult interpret_concrete(const TestCase& t, const Snapshot& snap,
                                  std::uint64_t fuel = 1'000'000);

/// Replaces each of the test's own nondet sites with its value from `cx`
/// (0 when absent). The result is named `<origin>_cx`.
TestCase concretize(const GeneralizedTest& gt, const Counterexample& cx);

} // namespace cfv::verification
