#include <cfv/equivalence/check.hpp>
#include <cfv/equivalence/symbols.hpp>

#include <cfv/changes/changeset.hpp>
#include <cfv/verification/interpreter.hpp>

namespace cfv::equivalence {

using solver::BitvecFormula;
using solver::SolveResult;

const char* to_string(Equivalent::Mode m) {
  return m == Equivalent::Mode::Structural ? "structural" : "formal";
}

const char* to_string(NotEquivalent::Reason r) {
  return r == NotEquivalent::Reason::Behavior ? "behavior" : "signature_mismatch";
}

const char* to_string(Unknown::Reason r) {
  switch (r) {
  case Unknown::Reason::Timeout: return "timeout";
  case Unknown::Reason::UnwindingIncomplete: return "unwinding_incomplete";
  case Unknown::Reason::Unsupported: return "unsupported";
  }
  return "?";
}

const char* verdict_class(const EquivalenceVerdict& v) {
  if (v.equivalent()) return "equivalent";
  if (v.not_equivalent()) return "not_equivalent";
  return "unknown";
}

namespace {

std::vector<Term> param_terms(const SsaProgram& p) {
  std::vector<Term> out;
  for (const auto& in : p.inputs)
    if (in.kind == InputSlot::Kind::Param) out.push_back(p.store->input(in.symbol, in.width));
  return out;
}

// Final value of global `name` in `p`; untouched globals keep the shared
// initial symbols recorded by `other`.
const std::vector<Term>& final_value(const SsaProgram& p, const SsaProgram& other,
                                     const std::string& name) {
  auto it = p.globals_final.find(name);
  if (it != p.globals_final.end()) return it->second;
  return other.globals_initial.at(name);
}

} // namespace

BitvecFormula build_miter(const SsaProgram& old_ssa, const SsaProgram& new_ssa) {
  if (old_ssa.store != new_ssa.store) throw std::invalid_argument("build_miter: programs must share a store");
  TermStore& s = *old_ssa.store;
  std::vector<Term> po = param_terms(old_ssa);
  std::vector<Term> pn = param_terms(new_ssa);
  if (po != pn) throw SignatureMismatch("parameter lists differ");
  if (old_ssa.result.has_value() != new_ssa.result.has_value() ||
      (old_ssa.result && s.width(*old_ssa.result) != s.width(*new_ssa.result)))
    throw SignatureMismatch("return types differ");

  Term differ = s.bool_const(false);
  if (old_ssa.result) differ = s.mk_or(differ, s.mk_ne(*old_ssa.result, *new_ssa.result));
  differ = s.mk_or(differ, s.mk_xor(old_ssa.assertion_ok, new_ssa.assertion_ok));

  std::set<std::string> written = old_ssa.written_globals;
  written.insert(new_ssa.written_globals.begin(), new_ssa.written_globals.end());
  for (const auto& g : written) {
    const std::vector<Term>& vo = final_value(old_ssa, new_ssa, g);
    const std::vector<Term>& vn = final_value(new_ssa, old_ssa, g);
    if (vo.size() != vn.size()) throw SignatureMismatch("global '" + g + "' changed shape");
    for (std::size_t i = 0; i < vo.size(); ++i) {
      if (s.width(vo[i]) != s.width(vn[i])) throw SignatureMismatch("global '" + g + "' changed type");
      differ = s.mk_or(differ, s.mk_ne(vo[i], vn[i]));
    }
  }

  Term domain = s.mk_and(s.mk_and(old_ssa.assume_ok, new_ssa.assume_ok),
                         s.mk_and(old_ssa.unwinding_complete, new_ssa.unwinding_complete));
  return {old_ssa.store, s.mk_and(domain, differ)};
}

Observables observe(const FunctionDef& fn, const Snapshot& snap, const Witness& witness,
                    const UnrollConfig& cfg, const std::set<std::string>& globals) {
  verification::ExecInputs in;
  in.globals = GlobalInit::Symbolic;
  in.values = witness;
  verification::ExecLimits lim;
  lim.loop_bound = cfg.loop_bound;
  lim.inline_depth = cfg.depth();
  lim.stop_at_failure = false;
  lim.fuel = UINT64_MAX;
  verification::ExecResult r = verification::execute(fn, snap, in, lim);
  Observables obs;
  if (r.result) obs["return"] = *r.result;
  obs["assertion_ok"] = r.assertion_ok;
  for (const auto& g : globals) {
    const frontend::GlobalDecl* decl = snap.global(g);
    auto it = r.globals.find(g);
    std::size_t n = decl && decl->type.is_array() ? decl->type.length : 1;
    for (std::size_t i = 0; i < n; ++i) {
      std::string key = decl && decl->type.is_array() ? element_symbol(g, i) : global_symbol(g);
      std::int64_t v;
      if (it != r.globals.end()) v = it->second[i];
      else {
        auto w = witness.find(key);
        v = w == witness.end() ? 0 : w->second;
      }
      obs[key] = v;
    }
  }
  if (r.status != verification::ExecStatus::Completed) obs["status:" + std::string(to_string(r.status))] = 1;
  return obs;
}

namespace {

EquivalenceVerdict verdict(auto v, unsigned calls = 0) {
  EquivalenceVerdict out;
  out.value = std::move(v);
  out.solver_calls = calls;
  return out;
}

bool same_signature(const FunctionDef& a, const FunctionDef& b, std::string& why) {
  if (!(a.return_type == b.return_type)) {
    why = "return type " + a.return_type.to_string() + " became " + b.return_type.to_string();
    return false;
  }
  if (a.params.size() != b.params.size()) {
    why = "arity " + std::to_string(a.params.size()) + " became " + std::to_string(b.params.size());
    return false;
  }
  for (std::size_t i = 0; i < a.params.size(); ++i) {
    if (!(a.params[i].type == b.params[i].type)) {
      why = "parameter " + std::to_string(i + 1) + " type changed";
      return false;
    }
  }
  return true;
}

// Structural equality of `a` and `b` and of every callee pair they reach.
bool closure_structurally_equal(const FunctionDef& a, const FunctionDef& b, const Snapshot& sa,
                                const Snapshot& sb, const std::map<std::string, std::string>* renames) {
  std::set<std::string> seen;
  std::vector<std::pair<const FunctionDef*, const FunctionDef*>> work{{&a, &b}};
  while (!work.empty()) {
    auto [fa, fb] = work.back();
    work.pop_back();
    if (!seen.insert(fa->name).second) continue;
    if (!changes::structural_equiv(*fa, *fb, renames)) return false;
    for (const auto& c : fa->callees) {
      std::string target = c;
      if (renames) {
        auto it = renames->find(c);
        if (it != renames->end()) target = it->second;
      }
      // The top function recursing pairs with itself under either name.
      if (c == a.name) continue;
      const FunctionDef* ca = sa.function(c);
      const FunctionDef* cb = sb.function(target);
      if (!ca || !cb) return false;
      work.emplace_back(ca, cb);
    }
  }
  return true;
}

} // namespace

EquivalenceVerdict check_equivalence(const FunctionDef& old_fn, const FunctionDef& new_fn,
                                     const Snapshot& old_snap, const Snapshot& new_snap,
                                     const UnrollConfig& cfg, const CheckOptions& opts) {
  cfg.validate();
  std::string why;
  if (!same_signature(old_fn, new_fn, why)) {
    NotEquivalent ne;
    ne.reason = NotEquivalent::Reason::SignatureMismatch;
    ne.detail = why;
    return verdict(ne);
  }

  std::set<std::string> closure_old = globals_in_closure(old_fn, old_snap);
  std::set<std::string> closure_new = globals_in_closure(new_fn, new_snap);
  for (const auto& g : closure_old) {
    const auto* a = old_snap.global(g);
    const auto* b = new_snap.global(g);
    if (a && b && !(a->type == b->type)) {
      NotEquivalent ne;
      ne.reason = NotEquivalent::Reason::SignatureMismatch;
      ne.detail = "global '" + g + "' changed type";
      return verdict(ne);
    }
  }

  if (opts.changed_globals) {
    for (const auto* closure : {&closure_old, &closure_new}) {
      for (const auto& g : *closure) {
        if (!opts.changed_globals->count(g)) continue;
        Unknown u;
        u.reason = Unknown::Reason::Unsupported;
        u.detail = "depends on global '" + g + "' whose declaration changed";
        return verdict(u);
      }
    }
  }

  if (closure_structurally_equal(old_fn, new_fn, old_snap, new_snap, opts.renames)) {
    Equivalent eq;
    eq.mode = Equivalent::Mode::Structural;
    eq.bound = cfg.loop_bound;
    eq.complete = true;
    return verdict(eq);
  }

  auto deadline = solver::Clock::now() + std::chrono::duration_cast<solver::Clock::duration>(
                                              std::chrono::duration<double>(cfg.timeout_s));
  if (opts.deadline && *opts.deadline < deadline) deadline = *opts.deadline;
  solver::SolveLimits limits{deadline, opts.cancel};
  auto backend = opts.backend ? opts.backend : solver::make_backend("internal");

  auto store = std::make_shared<TermStore>();
  EncodeOptions eo{store, GlobalInit::Symbolic};
  SsaProgram so = encode_ssa(old_fn, old_snap, cfg, eo);
  SsaProgram sn = encode_ssa(new_fn, new_snap, cfg, eo);
  BitvecFormula miter;
  try {
    miter = build_miter(so, sn);
  } catch (const SignatureMismatch& e) {
    NotEquivalent ne;
    ne.reason = NotEquivalent::Reason::SignatureMismatch;
    ne.detail = e.what();
    return verdict(ne);
  }

  unsigned calls = 0;
  auto solve = [&](Term root) {
    ++calls;
    return backend->solve({store, root}, limits);
  };

  SolveResult r = solve(miter.root);
  if (r.timeout()) {
    Unknown u;
    u.reason = Unknown::Reason::Timeout;
    u.detail = r.detail.empty() ? "solver time limit reached" : r.detail;
    return verdict(u, calls);
  }
  if (r.sat()) {
    NotEquivalent ne;
    ne.reason = NotEquivalent::Reason::Behavior;
    for (Term in : store->inputs()) {
      const std::string& sym = store->input_name(in);
      unsigned w = store->width(in);
      ne.witness[sym] = w == 0 ? static_cast<std::int64_t>(r.model.at(sym))
                               : solver::to_signed(r.model.at(sym), w);
    }
    std::set<std::string> written = so.written_globals;
    written.insert(sn.written_globals.begin(), sn.written_globals.end());
    ne.old_observables = observe(old_fn, old_snap, ne.witness, cfg, written);
    ne.new_observables = observe(new_fn, new_snap, ne.witness, cfg, written);
    if (ne.old_observables == ne.new_observables)
      throw std::logic_error("check_equivalence: witness for '" + new_fn.name + "' does not replay");
    return verdict(ne, calls);
  }

  // Bounded equivalence holds; classify how much of the input space it covers.
  TermStore& s = *store;
  Term assumed = s.mk_and(so.assume_ok, sn.assume_ok);
  Term complete_both = s.mk_and(so.unwinding_complete, sn.unwinding_complete);
  Equivalent eq;
  eq.mode = Equivalent::Mode::Formal;
  eq.bound = cfg.loop_bound;
  SolveResult escape = solve(s.mk_and(assumed, s.mk_not(complete_both)));
  if (escape.unsat()) {
    eq.complete = true;
    return verdict(eq, calls);
  }
  eq.complete = false;
  if (escape.sat()) {
    SolveResult inside = solve(s.mk_and(assumed, complete_both));
    if (inside.unsat()) {
      Unknown u;
      u.reason = Unknown::Reason::UnwindingIncomplete;
      u.detail = "no input completes within loop bound " + std::to_string(cfg.loop_bound);
      return verdict(u, calls);
    }
  }
  return verdict(eq, calls);
}

} // namespace cfv::equivalence
