#include <cfv/verification/interpreter.hpp>

#include <cfv/equivalence/symbols.hpp>
#include <cfv/frontend/analysis.hpp>
#include <cfv/solver/term.hpp>

#include <stdexcept>

namespace cfv::verification {

using frontend::BinaryOp;
using frontend::Expr;
using frontend::ExprKind;
using frontend::GlobalDecl;
using frontend::Stmt;
using frontend::StmtKind;
using frontend::UnaryOp;

const char* to_string(ExecStatus s) {
  switch (s) {
  case ExecStatus::Completed: return "completed";
  case ExecStatus::AssertFail: return "assert_fail";
  case ExecStatus::AssumeBlocked: return "assume_blocked";
  case ExecStatus::BoundExceeded: return "bound_exceeded";
  case ExecStatus::OutOfFuel: return "out_of_fuel";
  }
  return "?";
}

namespace {

using Value = std::vector<std::int64_t>;

struct Halt {
  ExecStatus status;
};

struct Frame {
  std::map<std::string, Value> locals;
  std::string function; // source name, for traces
  std::string owner;    // nondet owner
  unsigned depth = 0;
  bool returned = false;
  std::int64_t ret = 0;
};

class Interpreter {
public:
  Interpreter(const FunctionDef& top, const Snapshot& snap, const ExecInputs& in,
              const ExecLimits& limits, ExecResult& out)
      : top_(top), snap_(snap), in_(in), limits_(limits), out_(out), width_(snap.int_width()),
        fuel_(limits.fuel) {}

  void run() {
    Frame f;
    f.function = top_.name;
    f.owner = frontend::kSelfPlaceholder;
    for (std::size_t i = 0; i < top_.params.size(); ++i) {
      const auto& p = top_.params[i];
      f.locals[p.name] = {norm(input(equivalence::param_symbol(i)), p.type.is_bool())};
    }
    try {
      exec(*top_.body, f);
      out_.status = ExecStatus::Completed;
    } catch (const Halt& h) {
      out_.status = h.status;
    }
    if (!top_.return_type.is_void() && out_.status == ExecStatus::Completed) out_.result = f.ret;
    out_.globals = globals_;
  }

private:
  std::int64_t input(const std::string& sym) const {
    auto it = in_.values.find(sym);
    return it == in_.values.end() ? 0 : it->second;
  }

  std::int64_t norm(std::int64_t v, bool boolean = false) const {
    if (boolean) return v != 0;
    return solver::to_signed(static_cast<std::uint64_t>(v), width_);
  }

  void burn() {
    if (fuel_ == 0) throw Halt{ExecStatus::OutOfFuel};
    --fuel_;
  }

  Value& global(const std::string& name) {
    auto it = globals_.find(name);
    if (it != globals_.end()) return it->second;
    const GlobalDecl* g = snap_.global(name);
    if (!g) throw std::logic_error("interpret: unknown global " + name);
    const bool boolean = g->type.is_bool();
    Value v;
    const std::size_t n = g->type.is_array() ? g->type.length : 1;
    for (std::size_t i = 0; i < n; ++i) {
      if (in_.globals == equivalence::GlobalInit::Declared) v.push_back(norm(g->initial(i), boolean));
      else
        v.push_back(norm(input(g->type.is_array() ? equivalence::element_symbol(name, i)
                                                  : equivalence::global_symbol(name)),
                         boolean));
    }
    return globals_.emplace(name, std::move(v)).first->second;
  }

  Value& var(Frame& f, const std::string& name, bool is_global) {
    if (is_global) return global(name);
    auto it = f.locals.find(name);
    if (it == f.locals.end()) throw std::logic_error("interpret: unbound local " + name);
    return it->second;
  }

  void fail(const Span& span, const Frame& f) {
    if (out_.assertion_ok) {
      out_.assertion_ok = false;
      out_.failing_span = span;
      out_.failing_function = f.function;
    }
    if (limits_.stop_at_failure) {
      if (limits_.record_trace) out_.trace.push_back({span, f.function, "<assert>", 0});
      throw Halt{ExecStatus::AssertFail};
    }
  }

  void trace(const Span& span, const Frame& f, std::string variable, std::int64_t value) {
    if (limits_.record_trace) out_.trace.push_back({span, f.function, std::move(variable), value});
  }

  bool in_bounds(std::int64_t idx, std::size_t length) const {
    return idx >= 0 && static_cast<std::uint64_t>(idx) < length;
  }

  std::int64_t call(const Expr& e, Frame& f) {
    std::vector<std::int64_t> args;
    for (const auto& a : e.operands) args.push_back(eval(*a, f));
    const FunctionDef* callee = snap_.function(e.name);
    if (!callee) throw std::logic_error("interpret: unknown function " + e.name);
    const unsigned depth = f.depth + 1;
    if (limits_.inline_depth && depth > *limits_.inline_depth) throw Halt{ExecStatus::BoundExceeded};
    burn();
    Frame cf;
    cf.function = callee->name;
    cf.owner = callee->name == top_.name ? frontend::kSelfPlaceholder : callee->name;
    cf.depth = depth;
    for (std::size_t i = 0; i < callee->params.size(); ++i) {
      cf.locals[callee->params[i].name] = {args[i]};
      trace(callee->params[i].span, cf, callee->params[i].name, args[i]);
    }
    exec(*callee->body, cf);
    return cf.ret;
  }

  std::int64_t eval(const Expr& e, Frame& f) {
    switch (e.kind) {
    case ExprKind::IntLit: return norm(e.int_value);
    case ExprKind::BoolLit: return e.bool_value;
    case ExprKind::VarRef: return var(f, e.name, e.is_global)[0];
    case ExprKind::ArrayIndex: {
      std::int64_t idx = eval(*e.operands[0], f);
      const Value& arr = var(f, e.name, e.is_global);
      if (!in_bounds(idx, arr.size())) {
        fail(e.span, f);
        return 0;
      }
      return arr[idx];
    }
    case ExprKind::NondetInt:
      return norm(input(equivalence::nondet_symbol(f.owner, e.site)));
    case ExprKind::NondetBool:
      return norm(input(equivalence::nondet_symbol(f.owner, e.site)), true);
    case ExprKind::Unary: {
      std::int64_t x = eval(*e.operands[0], f);
      switch (e.unary_op) {
      case UnaryOp::Neg: return norm(static_cast<std::int64_t>(0ull - static_cast<std::uint64_t>(x)));
      case UnaryOp::BitNot: return norm(~x);
      case UnaryOp::Not: return !x;
      }
      break;
    }
    case ExprKind::Binary: {
      if (e.binary_op == BinaryOp::LogAnd) return eval(*e.operands[0], f) && eval(*e.operands[1], f);
      if (e.binary_op == BinaryOp::LogOr) return eval(*e.operands[0], f) || eval(*e.operands[1], f);
      std::int64_t a = eval(*e.operands[0], f);
      std::int64_t b = eval(*e.operands[1], f);
      const std::uint64_t ua = static_cast<std::uint64_t>(a);
      const std::uint64_t ub = static_cast<std::uint64_t>(b);
      const std::uint64_t mask = solver::width_mask(width_);
      switch (e.binary_op) {
      case BinaryOp::Add: return norm(static_cast<std::int64_t>(ua + ub));
      case BinaryOp::Sub: return norm(static_cast<std::int64_t>(ua - ub));
      case BinaryOp::Mul: return norm(static_cast<std::int64_t>(ua * ub));
      case BinaryOp::BitAnd: return a & b;
      case BinaryOp::BitOr: return a | b;
      case BinaryOp::BitXor: return a ^ b;
      case BinaryOp::Shl: return norm(static_cast<std::int64_t>((ua & mask) << ((ub & mask) % width_)));
      case BinaryOp::Shr: return a >> ((ub & mask) % width_);
      case BinaryOp::Lt: return a < b;
      case BinaryOp::Le: return a <= b;
      case BinaryOp::Gt: return a > b;
      case BinaryOp::Ge: return a >= b;
      case BinaryOp::Eq: return a == b;
      case BinaryOp::Ne: return a != b;
      default: break;
      }
      break;
    }
    case ExprKind::Call: return call(e, f);
    }
    throw std::logic_error("interpret: unsupported expression");
  }

  void exec(const Stmt& s, Frame& f) {
    if (f.returned) return;
    burn();
    switch (s.kind) {
    case StmtKind::Block:
      for (const auto& c : s.body) {
        exec(*c, f);
        if (f.returned) return;
      }
      return;
    case StmtKind::VarDecl: {
      Value v;
      if (s.decl_type.is_array()) {
        for (std::size_t i = 0; i < s.decl_type.length; ++i)
          v.push_back(i < s.array_init.size() ? eval(*s.array_init[i], f) : 0);
      } else {
        v.push_back(s.expr ? eval(*s.expr, f) : 0);
      }
      if (!s.decl_type.is_array()) trace(s.span, f, s.name, v[0]);
      f.locals[s.name] = std::move(v);
      return;
    }
    case StmtKind::Assign: {
      std::optional<std::int64_t> idx;
      if (s.index) idx = eval(*s.index, f);
      std::int64_t v = eval(*s.expr, f);
      Value& target = var(f, s.name, s.is_global);
      if (s.is_global) out_.written_globals.insert(s.name);
      if (!idx) {
        target[0] = v;
        trace(s.span, f, s.name, v);
        return;
      }
      if (!in_bounds(*idx, target.size())) {
        fail(s.index->span, f);
        return;
      }
      target[*idx] = v;
      trace(s.span, f, s.name + "[" + std::to_string(*idx) + "]", v);
      return;
    }
    case StmtKind::If:
      if (eval(*s.expr, f)) exec(*s.then_branch, f);
      else if (s.else_branch) exec(*s.else_branch, f);
      return;
    case StmtKind::While: {
      unsigned iterations = 0;
      while (eval(*s.expr, f)) {
        if (limits_.loop_bound && iterations == *limits_.loop_bound) throw Halt{ExecStatus::BoundExceeded};
        burn();
        exec(*s.then_branch, f);
        if (f.returned) return;
        ++iterations;
      }
      return;
    }
    case StmtKind::Return:
      if (s.expr) f.ret = eval(*s.expr, f);
      f.returned = true;
      return;
    case StmtKind::Assert:
      if (!eval(*s.expr, f)) fail(s.span, f);
      return;
    case StmtKind::Assume:
      if (!eval(*s.expr, f)) throw Halt{ExecStatus::AssumeBlocked};
      return;
    case StmtKind::ExprStmt: eval(*s.expr, f); return;
    }
  }

  const FunctionDef& top_;
  const Snapshot& snap_;
  const ExecInputs& in_;
  const ExecLimits& limits_;
  ExecResult& out_;
  unsigned width_;
  std::uint64_t fuel_;
  std::map<std::string, Value> globals_;
};

} // namespace

ExecResult execute(const FunctionDef& fn, const Snapshot& snap, const ExecInputs& inputs,
                   const ExecLimits& limits) {
  ExecResult out;
  Interpreter interp(fn, snap, inputs, limits, out);
  interp.run();
  return out;
}

} // namespace cfv::verification
