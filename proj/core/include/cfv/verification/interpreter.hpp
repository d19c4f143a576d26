#pragma once

#include <cfv/changes/snapshot.hpp>
#include <cfv/equivalence/encode.hpp>

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace cfv::verification {

using changes::Snapshot;
using frontend::FunctionDef;
using frontend::Span;

/// Concrete values keyed by input symbol (see equivalence/symbols.hpp).
/// Missing symbols read as 0.
using Assignment = std::map<std::string, std::int64_t>;

struct ExecInputs {
  equivalence::GlobalInit globals = equivalence::GlobalInit::Declared;
  Assignment values;
};

struct ExecLimits {
  std::uint64_t fuel = 1'000'000;
  /// When set, a loop about to start iteration loop_bound+1, or a call
  /// nested deeper than inline_depth, halts with BoundExceeded.
  std::optional<unsigned> loop_bound;
  std::optional<unsigned> inline_depth;
  /// Halt at the first failed assertion; otherwise record it and go on.
  bool stop_at_failure = true;
  bool record_trace = false;
};

enum class ExecStatus : std::uint8_t { Completed, AssertFail, AssumeBlocked, BoundExceeded, OutOfFuel };

const char* to_string(ExecStatus s);

struct TraceEntry {
  Span span;
  std::string function;
  std::string variable; // `x`, `a[3]`, or `<assert>` for the final entry
  std::int64_t value = 0;
};

struct ExecResult {
  ExecStatus status = ExecStatus::Completed;
  bool assertion_ok = true;
  Span failing_span;            // first failed assertion or bounds check
  std::string failing_function;
  std::optional<std::int64_t> result;
  /// Final values of every global the run touched.
  std::map<std::string, std::vector<std::int64_t>> globals;
  std::set<std::string> written_globals;
  std::vector<TraceEntry> trace;
};

/// Big-step reference semantics, bit-exact with the encoder: two's
/// complement at the snapshot width, shift amounts modulo the width, signed
/// comparisons, zero-initialized locals, one value per nondet site.
ExecResult execute(const FunctionDef& fn, const Snapshot& snap, const ExecInputs& inputs,
                   const ExecLimits& limits = {});

} // namespace cfv::verification
