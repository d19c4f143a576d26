#include <cfv/verification/verify.hpp>

#include <cfv/equivalence/symbols.hpp>
#include <cfv/frontend/analysis.hpp>

#include <stdexcept>

namespace cfv::verification {

using equivalence::GlobalInit;
using equivalence::InputSlot;
using frontend::Expr;
using frontend::ExprKind;
using frontend::ExprPtr;
using frontend::Stmt;
using frontend::StmtPtr;

const char* to_string(Unknown::Reason r) {
  return r == Unknown::Reason::Timeout ? "timeout" : "unwinding_incomplete";
}

const char* verdict_class(const VerificationResult& r) {
  if (r.pass()) return "pass";
  if (r.fail()) return "fail";
  return "unknown";
}

const char* to_string(ConcreteOutcome o) {
  switch (o) {
  case ConcreteOutcome::Pass: return "pass";
  case ConcreteOutcome::AssertFail: return "assert_fail";
  case ConcreteOutcome::OutOfFuel: return "out_of_fuel";
  }
  return "?";
}

namespace {

VerificationResult result(auto v, unsigned calls) {
  VerificationResult out;
  out.value = std::move(v);
  out.solver_calls = calls;
  return out;
}

} // namespace

VerificationResult verify_test(const GeneralizedTest& gt, const Snapshot& snap,
                               const equivalence::UnrollConfig& cfg, const VerifyOptions& opts) {
  cfg.validate();
  auto store = std::make_shared<solver::TermStore>();
  equivalence::SsaProgram p = equivalence::encode_ssa(*gt.body, snap, cfg, {store, GlobalInit::Declared});

  auto deadline = solver::Clock::now() + std::chrono::duration_cast<solver::Clock::duration>(
                                              std::chrono::duration<double>(cfg.timeout_s));
  if (opts.deadline && *opts.deadline < deadline) deadline = *opts.deadline;
  solver::SolveLimits limits{deadline, opts.cancel};
  auto backend = opts.backend ? opts.backend : solver::make_backend("internal");
  unsigned calls = 0;
  auto solve = [&](solver::Term root) {
    ++calls;
    return backend->solve({store, root}, limits);
  };

  solver::SolveResult r = solve(store->mk_not(p.assertion_ok));
  if (r.timeout()) {
    Unknown u{Unknown::Reason::Timeout, r.detail.empty() ? "solver timed out" : r.detail};
    return result(u, calls);
  }
  if (r.sat()) {
    Counterexample cx;
    for (const auto& in : p.inputs) {
      if (in.kind != InputSlot::Kind::Nondet) continue;
      std::uint64_t raw = r.model.at(in.symbol);
      cx.valuation[in.symbol] = in.width == 0 ? static_cast<std::int64_t>(raw) : solver::to_signed(raw, in.width);
    }
    ExecLimits lim;
    lim.fuel = UINT64_MAX;
    lim.loop_bound = cfg.loop_bound;
    lim.inline_depth = cfg.depth();
    lim.record_trace = true;
    ExecResult replay = execute(*gt.body, snap, {GlobalInit::Declared, cx.valuation}, lim);
    if (replay.status != ExecStatus::AssertFail)
      throw std::logic_error("verify_test: counterexample for '" + gt.origin + "' does not replay (" +
                             to_string(replay.status) + ")");
    cx.failing_assert = replay.failing_span;
    cx.failing_function = replay.failing_function;
    cx.trace = std::move(replay.trace);
    return result(Fail{std::move(cx)}, calls);
  }

  Pass pass{cfg.loop_bound, false};
  solver::SolveResult escape = solve(store->mk_not(p.unwinding_complete));
  if (escape.unsat()) {
    pass.complete = true;
  } else if (escape.sat()) {
    solver::SolveResult inside = solve(p.unwinding_complete);
    if (inside.unsat()) {
      Unknown u{Unknown::Reason::UnwindingIncomplete,
                "every path exceeds loop bound " + std::to_string(cfg.loop_bound) + " or inline depth " +
                    std::to_string(cfg.depth())};
      return result(u, calls);
    }
  }
  return result(pass, calls);
}

ConcreteResult interpret_concrete(const TestCase& t, const Snapshot& snap, std::uint64_t fuel) {
  if (t.body->nondet_sites > 0)
    throw std::invalid_argument("interpret_concrete: test '" + t.name + "' reads nondet values");
  ExecLimits lim;
  lim.fuel = fuel;
  ExecResult r = execute(*t.body, snap, {GlobalInit::Declared, {}}, lim);
  switch (r.status) {
  case ExecStatus::AssertFail: return {ConcreteOutcome::AssertFail, r.failing_span};
  case ExecStatus::OutOfFuel: return {ConcreteOutcome::OutOfFuel, {}};
  default: return {ConcreteOutcome::Pass, {}};
  }
}

namespace {

ExprPtr typed_literal(const Expr& site, std::int64_t v) {
  Expr lit;
  lit.span = site.span;
  lit.type = site.type;
  if (site.kind == ExprKind::NondetBool) {
    lit.kind = ExprKind::BoolLit;
    lit.bool_value = v != 0;
    return std::make_shared<const Expr>(std::move(lit));
  }
  lit.kind = ExprKind::IntLit;
  lit.int_value = v < 0 ? -v : v;
  auto pos = std::make_shared<const Expr>(std::move(lit));
  if (v >= 0) return pos;
  Expr neg;
  neg.kind = ExprKind::Unary;
  neg.unary_op = frontend::UnaryOp::Neg;
  neg.span = site.span;
  neg.type = site.type;
  neg.operands.push_back(pos);
  return std::make_shared<const Expr>(std::move(neg));
}

class Concretizer {
public:
  explicit Concretizer(const Assignment& values) : values_(values) {}

  ExprPtr expr(const ExprPtr& e) {
    if (!e) return e;
    if (e->kind == ExprKind::NondetInt || e->kind == ExprKind::NondetBool) {
      auto it = values_.find(equivalence::nondet_symbol(frontend::kSelfPlaceholder, e->site));
      return typed_literal(*e, it == values_.end() ? 0 : it->second);
    }
    Expr copy = *e;
    bool changed = false;
    for (auto& op : copy.operands) {
      auto n = expr(op);
      changed |= n != op;
      op = std::move(n);
    }
    return changed ? std::make_shared<const Expr>(std::move(copy)) : e;
  }

  StmtPtr stmt(const StmtPtr& s) {
    if (!s) return s;
    Stmt copy = *s;
    bool changed = false;
    auto e = [&](ExprPtr& x) {
      auto n = expr(x);
      changed |= n != x;
      x = std::move(n);
    };
    auto st = [&](StmtPtr& x) {
      auto n = stmt(x);
      changed |= n != x;
      x = std::move(n);
    };
    e(copy.index);
    e(copy.expr);
    for (auto& x : copy.array_init) e(x);
    for (auto& x : copy.body) st(x);
    st(copy.then_branch);
    st(copy.else_branch);
    return changed ? std::make_shared<const Stmt>(std::move(copy)) : s;
  }

private:
  const Assignment& values_;
};

} // namespace

TestCase concretize(const GeneralizedTest& gt, const Counterexample& cx) {
  Concretizer c(cx.valuation);
  auto fn = std::make_shared<FunctionDef>(*gt.body);
  fn->name = gt.origin + "_cx";
  fn->body = c.stmt(gt.body->body);
  fn->nondet_sites = 0;
  TestCase t;
  t.name = fn->name;
  t.section = gt.section;
  t.body = std::move(fn);
  return t;
}

} // namespace cfv::verification
