#pragma once

#include <cfv/solver/cnf.hpp>
#include <cfv/solver/sat.hpp>
#include <cfv/solver/term.hpp>

#include <memory>
#include <stdexcept>
#include <string>

namespace cfv::solver {

struct SolveResult {
  enum class Kind : std::uint8_t { Sat, Unsat, Timeout };
  Kind kind = Kind::Unsat;
  Valuation model; // Sat only; every declared input has an entry
  SatStats stats;
  std::string detail; // why a Timeout happened, for external backends

  bool sat() const { return kind == Kind::Sat; }
  bool unsat() const { return kind == Kind::Unsat; }
  bool timeout() const { return kind == Kind::Timeout; }
};

const char* to_string(SolveResult::Kind k);

class DomainTooLarge : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

inline constexpr unsigned kExhaustiveBitCap = 20;

/// Solves a CNF and decodes the model of its input bits.
SolveResult sat_solve(const CnfFormula& cnf, double timeout_s,
                      SatAlgorithm algorithm = SatAlgorithm::Cdcl);

/// Enumerates input valuations in lexicographic order (inputs in declaration
/// order, each most significant bit first) and returns the first that makes
/// the root true. Throws DomainTooLarge above kExhaustiveBitCap input bits.
SolveResult exhaustive_solve(const BitvecFormula& f);

/// Deterministic QF_BV script: one declaration per input (Bool inputs are
/// 1-bit vectors), one assert, check-sat, get-model.
std::string emit_smtlib(const BitvecFormula& f);

struct SolveLimits {
  std::optional<Clock::time_point> deadline;
  const std::atomic<bool>* cancel = nullptr;
};

/// A decision procedure for BitvecFormula. Instances are stateless and may be
/// shared across threads.
class Backend {
public:
  virtual ~Backend() = default;
  virtual SolveResult solve(const BitvecFormula& f, const SolveLimits& limits) const = 0;
  virtual std::string name() const = 0;
};

/// bitblast + the built-in SAT solver.
class InternalBackend : public Backend {
public:
  explicit InternalBackend(SatAlgorithm algorithm = SatAlgorithm::Cdcl) : algorithm_(algorithm) {}
  SolveResult solve(const BitvecFormula& f, const SolveLimits& limits) const override;
  std::string name() const override;

private:
  SatAlgorithm algorithm_;
};

class ExhaustiveBackend : public Backend {
public:
  SolveResult solve(const BitvecFormula& f, const SolveLimits& limits) const override;
  std::string name() const override { return "exhaustive"; }
};

/// Runs `command` (with `{file}` replaced by the script path) through the
/// shell under coreutils `timeout`. The first output line must be `sat` or
/// `unsat`; a Sat answer's model is read from `define-fun` lines and checked
/// against the formula.
class ExternalBackend : public Backend {
public:
  explicit ExternalBackend(std::string command);
  SolveResult solve(const BitvecFormula& f, const SolveLimits& limits) const override;
  std::string name() const override { return "external:" + command_; }

private:
  std::string command_;
};

/// "internal", "internal:dpll", "internal:cdcl", "exhaustive", or
/// "external:CMD {file}". Throws std::invalid_argument otherwise.
std::shared_ptr<const Backend> make_backend(const std::string& spec);

/// Parses `(define-fun |name| () (_ BitVec N) #b..)` style model text.
Valuation parse_smt_model(const std::string& text);

} // namespace cfv::solver
