#pragma once

#include <cfv/changes/snapshot.hpp>
#include <cfv/solver/term.hpp>

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace cfv::equivalence {

using changes::Snapshot;
using frontend::FunctionDef;
using solver::Term;
using solver::TermStore;

struct UnrollConfig {
  unsigned loop_bound = 8;
  /// 0 means "same as loop_bound".
  unsigned inline_depth = 0;
  double timeout_s = 60;

  unsigned depth() const { return inline_depth ? inline_depth : loop_bound; }
  /// Throws std::invalid_argument.
  void validate() const;
};

enum class GlobalInit : std::uint8_t {
  /// Every global starts as an input symbol (function-level equivalence).
  Symbolic,
  /// Globals start from their declared initializers (running a test).
  Declared,
};

struct InputSlot {
  enum class Kind : std::uint8_t { Param, Global, Nondet };
  Kind kind = Kind::Param;
  std::string symbol;
  unsigned width = 0; // 0 = Bool
};

struct SsaProgram {
  std::shared_ptr<TermStore> store;
  std::vector<InputSlot> inputs;
  std::optional<Term> result;
  /// Final element values of every global the encoding touched.
  std::map<std::string, std::vector<Term>> globals_final;
  /// Initial element values of the same globals.
  std::map<std::string, std::vector<Term>> globals_initial;
  std::set<std::string> written_globals;
  Term assertion_ok = 0;
  Term assume_ok = 0;
  Term unwinding_complete = 0;
};

struct EncodeOptions {
  /// Encodings that share a store share input symbols by name.
  std::shared_ptr<TermStore> store;
  GlobalInit globals = GlobalInit::Symbolic;
};

/// Bounded symbolic execution of `fn` into a term DAG. Loops unroll
/// `loop_bound` times and calls inline `depth()` levels; paths beyond either
/// bound are cut and falsify `unwinding_complete`. Out-of-bounds array
/// accesses falsify `assertion_ok` (reads yield 0, writes are dropped).
SsaProgram encode_ssa(const FunctionDef& fn, const Snapshot& snap, const UnrollConfig& cfg,
                      const EncodeOptions& opts = {});

/// Globals read or written by `fn` or anything it can call.
std::set<std::string> globals_in_closure(const FunctionDef& fn, const Snapshot& snap);

} // namespace cfv::equivalence
