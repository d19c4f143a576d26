#pragma once

#include <cfv/equivalence/encode.hpp>
#include <cfv/solver/solve.hpp>

#include <atomic>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <variant>

namespace cfv::equivalence {

class SignatureMismatch : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Symbol -> signed value (Bool as 0/1).
using Witness = std::map<std::string, std::int64_t>;
/// `return`, `assertion_ok` and one entry per written global element.
using Observables = std::map<std::string, std::int64_t>;

struct Equivalent {
  enum class Mode : std::uint8_t { Structural, Formal };
  Mode mode = Mode::Structural;
  unsigned bound = 0;
  bool complete = true;
};

struct NotEquivalent {
  enum class Reason : std::uint8_t { Behavior, SignatureMismatch };
  Reason reason = Reason::Behavior;
  Witness witness;
  Observables old_observables;
  Observables new_observables;
  std::string detail;
};

struct Unknown {
  enum class Reason : std::uint8_t { Timeout, UnwindingIncomplete, Unsupported };
  Reason reason = Reason::Timeout;
  std::string detail;
};

struct EquivalenceVerdict {
  std::variant<Equivalent, NotEquivalent, Unknown> value;
  unsigned solver_calls = 0;

  bool equivalent() const { return std::holds_alternative<Equivalent>(value); }
  bool not_equivalent() const { return std::holds_alternative<NotEquivalent>(value); }
  bool unknown() const { return std::holds_alternative<Unknown>(value); }
  const Equivalent& as_equivalent() const { return std::get<Equivalent>(value); }
  const NotEquivalent& as_not_equivalent() const { return std::get<NotEquivalent>(value); }
  const Unknown& as_unknown() const { return std::get<Unknown>(value); }
};

const char* to_string(Equivalent::Mode m);
const char* to_string(NotEquivalent::Reason r);
const char* to_string(Unknown::Reason r);
/// "equivalent", "not_equivalent" or "unknown".
const char* verdict_class(const EquivalenceVerdict& v);

/// Satisfiable iff some shared input valuation that keeps both versions
/// within the bound and past their assumptions yields differing returns,
/// differing final values of a global written by either version, or
/// differing assertion outcomes. Both programs must share one store.
/// Throws SignatureMismatch.
solver::BitvecFormula build_miter(const SsaProgram& old_ssa, const SsaProgram& new_ssa);

struct CheckOptions {
  std::shared_ptr<const solver::Backend> backend;
  /// Old callee name -> new name, applied before the structural comparison.
  const std::map<std::string, std::string>* renames = nullptr;
  /// Globals whose initializer differs between the snapshots.
  const std::set<std::string>* changed_globals = nullptr;
  /// Stop early (reported as a timeout) when set.
  const std::atomic<bool>* cancel = nullptr;
  /// Tightens the per-check timeout when earlier.
  std::optional<solver::Clock::time_point> deadline;
};

EquivalenceVerdict check_equivalence(const FunctionDef& old_fn, const FunctionDef& new_fn,
                                     const Snapshot& old_snap, const Snapshot& new_snap,
                                     const UnrollConfig& cfg, const CheckOptions& opts = {});

/// Concrete observables of `fn` on `witness` under the same bounds.
Observables observe(const FunctionDef& fn, const Snapshot& snap, const Witness& witness,
                    const UnrollConfig& cfg, const std::set<std::string>& globals);

} // namespace cfv::equivalence
