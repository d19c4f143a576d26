#pragma once

#include <cfv/solver/cnf.hpp>

#include <atomic>
#include <chrono>
#include <cstdint>
#include <optional>

namespace cfv::solver {

enum class SatAlgorithm : std::uint8_t {
  /// Chronological backtracking, no learning.
  Dpll,
  /// Conflict-driven learning with non-chronological backjumping.
  Cdcl,
};

const char* to_string(SatAlgorithm a);

using Clock = std::chrono::steady_clock;

struct SatConfig {
  SatAlgorithm algorithm = SatAlgorithm::Cdcl;
  std::optional<Clock::time_point> deadline;
  const std::atomic<bool>* cancel = nullptr;
};

struct SatStats {
  std::uint64_t decisions = 0;
  std::uint64_t conflicts = 0;
  std::uint64_t propagations = 0;
  std::uint64_t learned = 0;
};

enum class SatStatus : std::uint8_t { Sat, Unsat, Timeout };

const char* to_string(SatStatus s);

struct SatOutcome {
  SatStatus status = SatStatus::Unsat;
  std::vector<bool> assignment; // index = variable; Sat only
  SatStats stats;
};

/// A Sat answer is the lexicographically least model over the input bits
/// (most significant first, inputs in declaration order), or over all
/// variables when `cnf.inputs` is empty. DPLL gets there by deciding the lowest
/// unassigned variable false first; CDCL searches freely, then tightens the
/// model one key bit at a time. Should the deadline fire during that
/// tightening, the best model so far is returned.
SatOutcome solve_cnf(const CnfFormula& cnf, const SatConfig& cfg = {});

} // namespace cfv::solver
