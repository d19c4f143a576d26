#include <cfv/solver/sat.hpp>

#include <algorithm>

namespace cfv::solver {

const char* to_string(SatAlgorithm a) { return a == SatAlgorithm::Dpll ? "dpll" : "cdcl"; }

const char* to_string(SatStatus s) {
  switch (s) {
  case SatStatus::Sat: return "sat";
  case SatStatus::Unsat: return "unsat";
  case SatStatus::Timeout: return "timeout";
  }
  return "?";
}

namespace {

// Literal codes: 2*v for +v, 2*v+1 for -v.
inline std::uint32_t code(Lit l) { return l > 0 ? 2u * l : 2u * -l + 1; }
inline std::uint32_t neg(std::uint32_t c) { return c ^ 1u; }
inline std::uint32_t var_of(std::uint32_t c) { return c >> 1; }

enum : std::int8_t { kUnassigned = 0, kTrueVal = 1, kFalseVal = -1 };
constexpr std::uint32_t kNoReason = UINT32_MAX;
constexpr std::uint32_t kNotInHeap = UINT32_MAX;
constexpr std::uint64_t kRestartUnit = 100;
constexpr double kVarDecay = 0.95;

struct Clause {
  std::uint32_t start;
  std::uint32_t size;
  std::uint32_t lbd = 0;
  bool learnt = false;
  bool deleted = false;
};

struct Watcher {
  std::uint32_t cref;
  std::uint32_t blocker;
};

class Solver {
public:
  Solver(const CnfFormula& cnf, const SatConfig& cfg)
      : cfg_(cfg), nvars_(static_cast<std::uint32_t>(cnf.num_vars)),
        value_(nvars_ + 1, kUnassigned), level_(nvars_ + 1, 0), reason_(nvars_ + 1, kNoReason),
        seen_(nvars_ + 1, 0), watches_(2 * (nvars_ + 1)), activity_(nvars_ + 1, 0.0),
        heap_index_(nvars_ + 1, kNotInHeap) {
    for (std::uint32_t v = 1; v <= nvars_; ++v) heap_insert(v);
    for (const auto& c : cnf.clauses) {
      if (!add_input_clause(c)) {
        unsat_ = true;
        return;
      }
    }
    max_learnts_ = std::max<std::size_t>(clauses_.size() / 3, 2000);
  }

  // Unsat under `assumptions` (literal codes) leaves the solver reusable;
  // learned clauses never depend on assumptions.
  SatStatus solve(const std::vector<std::uint32_t>& assumptions) {
    if (unsat_) return SatStatus::Unsat;
    backtrack_to(0);
    if (propagate() != kNoReason) {
      unsat_ = true;
      return SatStatus::Unsat;
    }
    std::uint64_t restart_budget = luby(restarts_) * kRestartUnit;
    std::uint64_t conflicts_here = 0;
    for (;;) {
      std::uint32_t conflict = propagate();
      if (conflict != kNoReason) {
        ++stats_.conflicts;
        ++conflicts_here;
        if (decision_level() == 0) {
          unsat_ = true;
          return SatStatus::Unsat;
        }
        if (cfg_.algorithm == SatAlgorithm::Cdcl) {
          if (!learn_and_backjump(conflict)) return SatStatus::Unsat;
        } else if (!backtrack_chronological()) {
          return SatStatus::Unsat;
        }
        if ((stats_.conflicts & 255) == 0 && expired()) return SatStatus::Timeout;
        if (cfg_.algorithm == SatAlgorithm::Cdcl && conflicts_here >= restart_budget) {
          backtrack_to(0);
          conflicts_here = 0;
          restart_budget = luby(++restarts_) * kRestartUnit;
        }
        continue;
      }
      std::uint32_t decision = kNoReason;
      while (decision_level() < assumptions.size()) {
        std::uint32_t a = assumptions[decision_level()];
        std::int8_t val = lit_value(a);
        if (val == kFalseVal) return SatStatus::Unsat;
        if (val == kUnassigned) {
          decision = a;
          break;
        }
        new_level(); // already true: an empty level keeps levels aligned with assumptions
      }
      if (decision == kNoReason) {
        std::uint32_t v = next_decision_var();
        if (v == 0) {
          model_.assign(nvars_ + 1, false);
          for (std::uint32_t i = 1; i <= nvars_; ++i) model_[i] = value_[i] == kTrueVal;
          return SatStatus::Sat;
        }
        decision = polarity_of(v);
      }
      ++stats_.decisions;
      if ((stats_.decisions & 1023) == 0 && expired()) return SatStatus::Timeout;
      new_level();
      assign(decision, kNoReason);
    }
  }

  const std::vector<bool>& model() const { return model_; }
  const SatStats& stats() const { return stats_; }
  bool expired() const {
    if (cfg_.cancel && cfg_.cancel->load(std::memory_order_relaxed)) return true;
    return cfg_.deadline && Clock::now() >= *cfg_.deadline;
  }

private:
  bool add_input_clause(const std::vector<Lit>& in) {
    std::vector<std::uint32_t> lits;
    for (Lit l : in) lits.push_back(code(l));
    std::sort(lits.begin(), lits.end());
    lits.erase(std::unique(lits.begin(), lits.end()), lits.end());
    for (std::size_t i = 1; i < lits.size(); ++i)
      if (lits[i] == neg(lits[i - 1]) && (lits[i] & 1u)) return true; // tautology
    // Drop literals already false at level 0; satisfied clauses vanish.
    std::vector<std::uint32_t> kept;
    for (auto c : lits) {
      std::int8_t v = lit_value(c);
      if (v == kTrueVal) return true;
      if (v == kUnassigned) kept.push_back(c);
    }
    if (kept.empty()) return false;
    if (kept.size() == 1) {
      assign(kept[0], kNoReason);
      return true;
    }
    attach(kept, false, 0);
    return true;
  }

  std::uint32_t attach(const std::vector<std::uint32_t>& lits, bool learnt, std::uint32_t lbd) {
    std::uint32_t cref = static_cast<std::uint32_t>(clauses_.size());
    clauses_.push_back({static_cast<std::uint32_t>(arena_.size()),
                        static_cast<std::uint32_t>(lits.size()), lbd, learnt, false});
    arena_.insert(arena_.end(), lits.begin(), lits.end());
    watches_[neg(lits[0])].push_back({cref, lits[1]});
    watches_[neg(lits[1])].push_back({cref, lits[0]});
    if (learnt) ++num_learnts_;
    return cref;
  }

  std::int8_t lit_value(std::uint32_t c) const {
    std::int8_t v = value_[var_of(c)];
    return (c & 1u) ? static_cast<std::int8_t>(-v) : v;
  }

  void assign(std::uint32_t c, std::uint32_t reason) {
    std::uint32_t v = var_of(c);
    value_[v] = (c & 1u) ? kFalseVal : kTrueVal;
    level_[v] = decision_level();
    reason_[v] = reason;
    trail_.push_back(c);
  }

  std::uint32_t decision_level() const { return static_cast<std::uint32_t>(trail_lim_.size()); }

  // Returns a conflicting clause, or kNoReason.
  std::uint32_t propagate() {
    while (qhead_ < trail_.size()) {
      std::uint32_t p = trail_[qhead_++];
      ++stats_.propagations;
      // Clauses watching ¬p: p just became true, so ¬p is false.
      auto& ws = watches_[p];
      std::uint32_t false_lit = neg(p);
      std::size_t i = 0, j = 0;
      const std::size_t n = ws.size();
      while (i < n) {
        Watcher w = ws[i++];
        Clause& cl = clauses_[w.cref];
        if (cl.deleted) continue;
        if (lit_value(w.blocker) == kTrueVal) {
          ws[j++] = w;
          continue;
        }
        std::uint32_t* lits = &arena_[cl.start];
        if (lits[0] == false_lit) std::swap(lits[0], lits[1]);
        std::uint32_t first = lits[0];
        if (first != w.blocker && lit_value(first) == kTrueVal) {
          ws[j++] = {w.cref, first};
          continue;
        }
        bool moved = false;
        for (std::uint32_t k = 2; k < cl.size; ++k) {
          if (lit_value(lits[k]) != kFalseVal) {
            std::swap(lits[1], lits[k]);
            watches_[neg(lits[1])].push_back({w.cref, first});
            moved = true;
            break;
          }
        }
        if (moved) continue;
        ws[j++] = {w.cref, first};
        if (lit_value(first) == kFalseVal) {
          while (i < n) ws[j++] = ws[i++];
          ws.resize(j);
          qhead_ = trail_.size();
          return w.cref;
        }
        assign(first, w.cref);
      }
      ws.resize(j);
    }
    return kNoReason;
  }

  // DPLL scans variables in index order; CDCL takes the most active one,
  // lowest index on ties.
  std::uint32_t next_decision_var() {
    if (cfg_.algorithm == SatAlgorithm::Dpll) {
      while (next_var_ <= nvars_ && value_[next_var_] != kUnassigned) ++next_var_;
      return next_var_ <= nvars_ ? next_var_ : 0;
    }
    while (!heap_.empty()) {
      std::uint32_t v = heap_pop();
      if (value_[v] == kUnassigned) return v;
    }
    return 0;
  }

  std::uint32_t polarity_of(std::uint32_t v) const {
    bool positive = cfg_.algorithm == SatAlgorithm::Cdcl && !saved_true_.empty() && saved_true_[v];
    return code(positive ? static_cast<Lit>(v) : -static_cast<Lit>(v));
  }

  void new_level() {
    trail_lim_.push_back(static_cast<std::uint32_t>(trail_.size()));
    flipped_.push_back(false);
  }

  static std::uint64_t luby(std::uint64_t i) {
    // Finds the subsequence containing index i, then the position inside it.
    std::uint64_t size = 1, seq = 0;
    while (size < i + 1) {
      ++seq;
      size = 2 * size + 1;
    }
    while (size - 1 != i) {
      size = (size - 1) >> 1;
      --seq;
      i = i % size;
    }
    return std::uint64_t{1} << seq;
  }

  bool heap_less(std::uint32_t a, std::uint32_t b) const {
    if (activity_[a] != activity_[b]) return activity_[a] > activity_[b];
    return a < b;
  }

  void heap_up(std::size_t i) {
    std::uint32_t v = heap_[i];
    while (i > 0) {
      std::size_t parent = (i - 1) / 2;
      if (!heap_less(v, heap_[parent])) break;
      heap_[i] = heap_[parent];
      heap_index_[heap_[i]] = static_cast<std::uint32_t>(i);
      i = parent;
    }
    heap_[i] = v;
    heap_index_[v] = static_cast<std::uint32_t>(i);
  }

  void heap_down(std::size_t i) {
    std::uint32_t v = heap_[i];
    for (;;) {
      std::size_t child = 2 * i + 1;
      if (child >= heap_.size()) break;
      if (child + 1 < heap_.size() && heap_less(heap_[child + 1], heap_[child])) ++child;
      if (!heap_less(heap_[child], v)) break;
      heap_[i] = heap_[child];
      heap_index_[heap_[i]] = static_cast<std::uint32_t>(i);
      i = child;
    }
    heap_[i] = v;
    heap_index_[v] = static_cast<std::uint32_t>(i);
  }

  void heap_insert(std::uint32_t v) {
    if (heap_index_[v] != kNotInHeap) return;
    heap_.push_back(v);
    heap_up(heap_.size() - 1);
  }

  std::uint32_t heap_pop() {
    std::uint32_t top = heap_[0];
    heap_index_[top] = kNotInHeap;
    heap_[0] = heap_.back();
    heap_.pop_back();
    if (!heap_.empty()) {
      heap_index_[heap_[0]] = 0;
      heap_down(0);
    }
    return top;
  }

  void bump(std::uint32_t v) {
    if ((activity_[v] += var_inc_) > 1e100) {
      for (auto& a : activity_) a *= 1e-100;
      var_inc_ *= 1e-100;
    }
    if (heap_index_[v] != kNotInHeap) heap_up(heap_index_[v]);
  }

  void backtrack_to(std::uint32_t level) {
    if (decision_level() <= level) return;
    for (std::size_t i = trail_.size(); i-- > trail_lim_[level];) {
      std::uint32_t v = var_of(trail_[i]);
      if (saved_true_.empty()) saved_true_.assign(nvars_ + 1, false);
      saved_true_[v] = value_[v] == kTrueVal;
      value_[v] = kUnassigned;
      reason_[v] = kNoReason;
      if (v < next_var_) next_var_ = v;
      heap_insert(v);
    }
    trail_.resize(trail_lim_[level]);
    trail_lim_.resize(level);
    flipped_.resize(level);
    qhead_ = trail_.size();
  }

  // Undo to the most recent unflipped decision and assert its negation.
  bool backtrack_chronological() {
    while (!flipped_.empty() && flipped_.back()) backtrack_to(decision_level() - 1);
    if (flipped_.empty()) return false;
    std::uint32_t lvl = decision_level() - 1;
    std::uint32_t decision = trail_[trail_lim_[lvl]];
    backtrack_to(lvl);
    trail_lim_.push_back(static_cast<std::uint32_t>(trail_.size()));
    flipped_.push_back(true);
    assign(neg(decision), kNoReason);
    return true;
  }

  bool learn_and_backjump(std::uint32_t conflict) {
    std::vector<std::uint32_t> learnt{0};
    int pending = 0;
    std::uint32_t p = UINT32_MAX;
    std::size_t index = trail_.size();
    std::uint32_t cref = conflict;
    const std::uint32_t current = decision_level();
    do {
      const Clause& cl = clauses_[cref];
      for (std::uint32_t k = (p == UINT32_MAX ? 0 : 1); k < cl.size; ++k) {
        std::uint32_t q = arena_[cl.start + k];
        std::uint32_t v = var_of(q);
        if (seen_[v] || level_[v] == 0) continue;
        seen_[v] = 1;
        bump(v);
        if (level_[v] >= current) ++pending;
        else learnt.push_back(q);
      }
      while (!seen_[var_of(trail_[--index])]) {}
      p = trail_[index];
      seen_[var_of(p)] = 0;
      cref = reason_[var_of(p)];
      --pending;
      // Reason clauses keep the implied literal at position 0.
      if (pending > 0 && cref == kNoReason) return false;
    } while (pending > 0);
    learnt[0] = neg(p);

    minimize(learnt);
    for (std::size_t k = 1; k < learnt.size(); ++k) seen_[var_of(learnt[k])] = 0;

    std::uint32_t back = 0;
    if (learnt.size() > 1) {
      std::size_t best = 1;
      for (std::size_t k = 2; k < learnt.size(); ++k)
        if (level_[var_of(learnt[k])] > level_[var_of(learnt[best])]) best = k;
      std::swap(learnt[1], learnt[best]);
      back = level_[var_of(learnt[1])];
    }
    backtrack_to(back);
    if (learnt.size() == 1) {
      assign(learnt[0], kNoReason);
    } else {
      std::uint32_t lbd = compute_lbd(learnt);
      std::uint32_t c = attach(learnt, true, lbd);
      ++stats_.learned;
      assign(learnt[0], c);
    }
    var_inc_ /= kVarDecay;
    if (num_learnts_ > max_learnts_) reduce_learnts();
    return true;
  }

  // Drops literals implied by the rest of the clause through their reasons.
  void minimize(std::vector<std::uint32_t>& learnt) {
    std::size_t j = 1;
    for (std::size_t k = 1; k < learnt.size(); ++k) {
      std::uint32_t v = var_of(learnt[k]);
      std::uint32_t r = reason_[v];
      bool redundant = r != kNoReason;
      if (redundant) {
        const Clause& cl = clauses_[r];
        for (std::uint32_t m = 1; m < cl.size; ++m) {
          std::uint32_t u = var_of(arena_[cl.start + m]);
          if (!seen_[u] && level_[u] > 0) {
            redundant = false;
            break;
          }
        }
      }
      if (redundant) seen_[v] = 0;
      else learnt[j++] = learnt[k];
    }
    learnt.resize(j);
  }

  std::uint32_t compute_lbd(const std::vector<std::uint32_t>& lits) {
    std::vector<std::uint32_t> levels;
    for (auto c : lits) levels.push_back(level_[var_of(c)]);
    std::sort(levels.begin(), levels.end());
    return static_cast<std::uint32_t>(std::unique(levels.begin(), levels.end()) - levels.begin());
  }

  bool locked(std::uint32_t cref) const {
    const Clause& cl = clauses_[cref];
    std::uint32_t first = arena_[cl.start];
    return lit_value(first) == kTrueVal && reason_[var_of(first)] == cref;
  }

  void reduce_learnts() {
    std::vector<std::uint32_t> candidates;
    for (std::uint32_t i = 0; i < clauses_.size(); ++i)
      if (clauses_[i].learnt && !clauses_[i].deleted && clauses_[i].lbd > 2 && !locked(i))
        candidates.push_back(i);
    // Deterministic: worst LBD first, then longest, then oldest.
    std::sort(candidates.begin(), candidates.end(), [&](std::uint32_t a, std::uint32_t b) {
      const Clause& x = clauses_[a];
      const Clause& y = clauses_[b];
      if (x.lbd != y.lbd) return x.lbd > y.lbd;
      if (x.size != y.size) return x.size > y.size;
      return a < b;
    });
    for (std::size_t i = 0; i < candidates.size() / 2; ++i) {
      clauses_[candidates[i]].deleted = true;
      --num_learnts_;
    }
    max_learnts_ += max_learnts_ / 10;
    if (++reductions_ % 8 == 0) compact_watches();
  }

  void compact_watches() {
    for (auto& ws : watches_)
      ws.erase(std::remove_if(ws.begin(), ws.end(),
                              [&](const Watcher& w) { return clauses_[w.cref].deleted; }),
               ws.end());
  }

  const SatConfig& cfg_;
  std::uint32_t nvars_;
  std::vector<std::int8_t> value_;
  std::vector<std::uint32_t> level_;
  std::vector<std::uint32_t> reason_;
  std::vector<char> seen_;
  std::vector<std::vector<Watcher>> watches_;
  std::vector<Clause> clauses_;
  std::vector<std::uint32_t> arena_;
  std::vector<std::uint32_t> trail_;
  std::vector<std::uint32_t> trail_lim_;
  std::vector<bool> flipped_;
  std::size_t qhead_ = 0;
  std::uint32_t next_var_ = 1;
  std::size_t num_learnts_ = 0;
  std::size_t max_learnts_ = 0;
  std::size_t reductions_ = 0;
  bool unsat_ = false;
  SatStats stats_;
  std::vector<double> activity_;
  double var_inc_ = 1.0;
  std::vector<std::uint32_t> heap_;
  std::vector<std::uint32_t> heap_index_;
  std::vector<bool> saved_true_;
  std::uint64_t restarts_ = 0;
  std::vector<bool> model_;
};

} // namespace

SatOutcome solve_cnf(const CnfFormula& cnf, const SatConfig& cfg) {
  Solver s(cnf, cfg);
  SatOutcome out;
  out.status = s.solve({});
  if (out.status == SatStatus::Sat) {
    out.assignment = s.model();
    if (cfg.algorithm == SatAlgorithm::Cdcl) {
      // Walk the key bits from most to least significant, pinning each to 0
      // whenever some model extends the pinned prefix that way.
      std::vector<int> keys;
      for (const auto& in : cnf.inputs)
        for (std::size_t i = in.vars.size(); i-- > 0;) keys.push_back(in.vars[i]);
      if (cnf.inputs.empty())
        for (int v = 1; v <= cnf.num_vars; ++v) keys.push_back(v);
      std::vector<std::uint32_t> prefix;
      for (int v : keys) {
        if (out.assignment[v]) {
          prefix.push_back(code(-v));
          SatStatus st = s.solve(prefix);
          if (st == SatStatus::Timeout) break; // keep the best model found so far
          if (st == SatStatus::Sat) {
            out.assignment = s.model();
            continue;
          }
          prefix.back() = code(v);
        } else {
          prefix.push_back(code(-v));
        }
      }
    }
  }
  out.stats = s.stats();
  return out;
}

} // namespace cfv::solver
