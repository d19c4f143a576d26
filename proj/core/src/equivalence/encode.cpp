#include <cfv/equivalence/encode.hpp>
#include <cfv/equivalence/symbols.hpp>

#include <cfv/frontend/analysis.hpp>

#include <stdexcept>

namespace cfv::equivalence {

using frontend::BinaryOp;
using frontend::Expr;
using frontend::ExprKind;
using frontend::GlobalDecl;
using frontend::Stmt;
using frontend::StmtKind;
using frontend::TypeRepr;
using frontend::UnaryOp;

void UnrollConfig::validate() const {
  if (loop_bound < 1) throw std::invalid_argument("loop bound must be at least 1");
  if (!(timeout_s > 0)) throw std::invalid_argument("timeout must be positive");
}

std::set<std::string> globals_in_closure(const FunctionDef& fn, const Snapshot& snap) {
  std::set<std::string> out;
  std::set<std::string> seen{fn.name};
  std::vector<const FunctionDef*> work{&fn};
  while (!work.empty()) {
    const FunctionDef* f = work.back();
    work.pop_back();
    out.insert(f->reads_globals.begin(), f->reads_globals.end());
    out.insert(f->writes_globals.begin(), f->writes_globals.end());
    for (const auto& c : f->callees) {
      if (!seen.insert(c).second) continue;
      if (const FunctionDef* g = snap.function(c)) work.push_back(g);
    }
  }
  return out;
}

namespace {

using Value = std::vector<Term>; // one term per element; scalars have one

class Encoder {
public:
  Encoder(const FunctionDef& top, const Snapshot& snap, const UnrollConfig& cfg,
          const EncodeOptions& opts, SsaProgram& out)
      : s_(*out.store), top_(top), snap_(snap), cfg_(cfg), mode_(opts.globals),
        width_(snap.int_width()), out_(out) {
    fail_ = assume_viol_ = unwind_viol_ = s_.bool_const(false);
  }

  void run() {
    State st;
    st.region = st.live = s_.bool_const(true);
    st.returned = s_.bool_const(false);
    st.ret = zero(top_.return_type);
    st.owner = frontend::kSelfPlaceholder;
    for (std::size_t i = 0; i < top_.params.size(); ++i) {
      const auto& p = top_.params[i];
      unsigned w = p.type.is_bool() ? 0 : width_;
      std::string sym = param_symbol(i);
      st.locals[p.name] = {s_.input(sym, w)};
      out_.inputs.push_back({InputSlot::Kind::Param, sym, w});
    }
    if (mode_ == GlobalInit::Symbolic) {
      for (const auto& g : globals_in_closure(top_, snap_)) initial(g);
    }
    exec(*top_.body, st);
    if (!top_.return_type.is_void()) out_.result = st.ret;
    for (const auto& [name, v] : st.globals) out_.globals_final[name] = v;
    out_.globals_initial = initial_;
    out_.written_globals = written_;
    out_.assertion_ok = s_.mk_not(fail_);
    out_.assume_ok = s_.mk_not(assume_viol_);
    out_.unwinding_complete = s_.mk_not(unwind_viol_);
  }

private:
  struct State {
    std::map<std::string, Value> locals;
    std::map<std::string, Value> globals;
    Term region = 0;   // path condition at the start of this region
    Term live = 0;     // relative to region
    Term returned = 0; // relative to region
    Term ret = 0;
    unsigned depth = 0;
    std::string owner;
  };

  Term zero(const TypeRepr& t) {
    return t.is_bool() || t.is_void() ? s_.bool_const(false) : s_.bv_const(0, width_);
  }

  Term abs(const State& st) { return s_.mk_and(st.region, st.live); }

  const Value& initial(const std::string& name) {
    auto it = initial_.find(name);
    if (it != initial_.end()) return it->second;
    const GlobalDecl* g = snap_.global(name);
    if (!g) throw std::logic_error("encode: unknown global " + name);
    Value v;
    const unsigned w = g->type.is_bool() ? 0 : width_;
    const std::size_t n = g->type.is_array() ? g->type.length : 1;
    for (std::size_t i = 0; i < n; ++i) {
      if (mode_ == GlobalInit::Declared) {
        v.push_back(w == 0 ? s_.bool_const(g->initial(i) != 0)
                           : s_.bv_const(static_cast<std::uint64_t>(g->initial(i)), w));
      } else {
        std::string sym = g->type.is_array() ? element_symbol(name, i) : global_symbol(name);
        v.push_back(s_.input(sym, w));
        out_.inputs.push_back({InputSlot::Kind::Global, sym, w});
      }
    }
    return initial_.emplace(name, std::move(v)).first->second;
  }

  Value& global(State& st, const std::string& name) {
    auto it = st.globals.find(name);
    if (it == st.globals.end()) it = st.globals.emplace(name, initial(name)).first;
    return it->second;
  }

  Value& var(State& st, const std::string& name, bool is_global) {
    if (is_global) return global(st, name);
    auto it = st.locals.find(name);
    if (it == st.locals.end()) throw std::logic_error("encode: unbound local " + name);
    return it->second;
  }

  // Guarded update: takes effect only on live paths of the region.
  Term guarded(const State& st, Term cond, Term v, Term old) {
    return s_.mk_ite(s_.mk_and(st.live, cond), v, old);
  }

  void flag(Term& acc, Term cond) { acc = s_.mk_or(acc, cond); }

  Term index_cond(Term idx, std::size_t k) { return s_.mk_eq(idx, s_.bv_const(k, width_)); }

  // Elements whose index is representable as a non-negative signed value.
  std::size_t addressable(std::size_t length) const {
    const std::uint64_t max_index = (std::uint64_t{1} << (width_ - 1)) - 1;
    return std::min<std::uint64_t>(length, max_index + 1);
  }

  Term out_of_bounds(Term idx, std::size_t length) {
    Term neg = s_.bv_slt(idx, s_.bv_const(0, width_));
    if (addressable(length) < length || length > (std::uint64_t{1} << (width_ - 1)) - 1) return neg;
    return s_.mk_or(neg, s_.bv_sle(s_.bv_const(length, width_), idx));
  }

  Term read_element(State& st, const Value& arr, Term idx) {
    flag(fail_, s_.mk_and(abs(st), out_of_bounds(idx, arr.size())));
    Term result = s_.bv_const(0, width_);
    for (std::size_t k = addressable(arr.size()); k-- > 0;)
      result = s_.mk_ite(index_cond(idx, k), arr[k], result);
    return result;
  }

  Term call(const Expr& e, State& st) {
    std::vector<Term> args;
    for (const auto& a : e.operands) args.push_back(eval(*a, st));
    const FunctionDef* f = snap_.function(e.name);
    if (!f) throw std::logic_error("encode: unknown function " + e.name);
    if (st.depth + 1 > cfg_.depth()) {
      flag(unwind_viol_, abs(st));
      st.live = s_.bool_const(false);
      return zero(f->return_type);
    }
    State cs;
    for (std::size_t i = 0; i < f->params.size(); ++i) cs.locals[f->params[i].name] = {args[i]};
    cs.globals = st.globals;
    cs.region = abs(st);
    cs.live = s_.bool_const(true);
    cs.returned = s_.bool_const(false);
    cs.ret = zero(f->return_type);
    cs.depth = st.depth + 1;
    cs.owner = f->name == top_.name ? frontend::kSelfPlaceholder : f->name;
    exec(*f->body, cs);

    for (auto& [name, v] : cs.globals) {
      Value& mine = global(st, name);
      for (std::size_t k = 0; k < v.size(); ++k) mine[k] = s_.mk_ite(st.live, v[k], mine[k]);
    }
    st.live = s_.mk_and(st.live, s_.mk_or(cs.returned, cs.live));
    return cs.ret;
  }

  // Joins branch states `t` (taken when cond) and `e` into `st`.
  void merge(State& st, Term cond, const State& t, const State& e) {
    for (auto& [name, v] : st.locals) {
      const Value& tv = t.locals.at(name);
      const Value& ev = e.locals.at(name);
      for (std::size_t k = 0; k < v.size(); ++k) v[k] = s_.mk_ite(cond, tv[k], ev[k]);
    }
    std::set<std::string> names;
    for (const auto& [n, _] : t.globals) names.insert(n);
    for (const auto& [n, _] : e.globals) names.insert(n);
    for (const auto& n : names) {
      auto tv = t.globals.count(n) ? t.globals.at(n) : initial(n);
      auto ev = e.globals.count(n) ? e.globals.at(n) : initial(n);
      Value& mine = global(st, n);
      for (std::size_t k = 0; k < mine.size(); ++k)
        mine[k] = s_.mk_ite(st.live, s_.mk_ite(cond, tv[k], ev[k]), mine[k]);
    }
    st.ret = s_.mk_ite(st.live, s_.mk_ite(cond, t.ret, e.ret), st.ret);
    st.returned = s_.mk_ite(st.live, s_.mk_ite(cond, t.returned, e.returned), st.returned);
    st.live = s_.mk_and(st.live, s_.mk_ite(cond, t.live, e.live));
  }

  State branch(const State& st, Term cond) {
    State b = st;
    b.region = s_.mk_and(abs(st), cond);
    b.live = s_.bool_const(true);
    b.returned = s_.bool_const(false);
    return b;
  }

  // Evaluates `e` on the paths where `cond` holds and merges the effects.
  Term eval_guarded(const Expr& e, State& st, Term cond) {
    State sub = branch(st, cond);
    Term v = eval(e, sub);
    State rest = st;
    rest.live = s_.bool_const(true);
    rest.returned = s_.bool_const(false);
    sub.ret = st.ret;
    rest.ret = st.ret;
    Term returned_before = st.returned;
    merge(st, cond, sub, rest);
    st.returned = returned_before;
    return v;
  }

  Term eval(const Expr& e, State& st) {
    switch (e.kind) {
    case ExprKind::IntLit: return s_.bv_const(static_cast<std::uint64_t>(e.int_value), width_);
    case ExprKind::BoolLit: return s_.bool_const(e.bool_value);
    case ExprKind::VarRef: return var(st, e.name, e.is_global)[0];
    case ExprKind::ArrayIndex: {
      Term idx = eval(*e.operands[0], st);
      return read_element(st, var(st, e.name, e.is_global), idx);
    }
    case ExprKind::NondetInt:
    case ExprKind::NondetBool: {
      unsigned w = e.kind == ExprKind::NondetBool ? 0 : width_;
      std::string sym = nondet_symbol(st.owner, e.site);
      std::size_t before = s_.inputs().size();
      Term t = s_.input(sym, w);
      if (s_.inputs().size() != before || !nondet_seen_.count(sym)) {
        nondet_seen_.insert(sym);
        out_.inputs.push_back({InputSlot::Kind::Nondet, sym, w});
      }
      return t;
    }
    case ExprKind::Unary: {
      Term x = eval(*e.operands[0], st);
      switch (e.unary_op) {
      case UnaryOp::Neg: return s_.bv_neg(x);
      case UnaryOp::BitNot: return s_.bv_not(x);
      case UnaryOp::Not: return s_.mk_not(x);
      }
      break;
    }
    case ExprKind::Binary: {
      if (e.binary_op == BinaryOp::LogAnd || e.binary_op == BinaryOp::LogOr) {
        const bool is_and = e.binary_op == BinaryOp::LogAnd;
        Term a = eval(*e.operands[0], st);
        Term run_rhs = is_and ? a : s_.mk_not(a);
        if (s_.is_false(run_rhs)) return a;
        Term b = s_.is_true(run_rhs) ? eval(*e.operands[1], st)
                                     : eval_guarded(*e.operands[1], st, run_rhs);
        return is_and ? s_.mk_and(a, b) : s_.mk_or(a, b);
      }
      Term a = eval(*e.operands[0], st);
      Term b = eval(*e.operands[1], st);
      const bool boolean = s_.is_bool(a);
      switch (e.binary_op) {
      case BinaryOp::Add: return s_.bv_add(a, b);
      case BinaryOp::Sub: return s_.bv_sub(a, b);
      case BinaryOp::Mul: return s_.bv_mul(a, b);
      case BinaryOp::BitAnd: return boolean ? s_.mk_and(a, b) : s_.bv_and(a, b);
      case BinaryOp::BitOr: return boolean ? s_.mk_or(a, b) : s_.bv_or(a, b);
      case BinaryOp::BitXor: return boolean ? s_.mk_xor(a, b) : s_.bv_xor(a, b);
      case BinaryOp::Shl: return s_.bv_shl(a, b);
      case BinaryOp::Shr: return s_.bv_ashr(a, b);
      case BinaryOp::Lt: return s_.bv_slt(a, b);
      case BinaryOp::Le: return s_.bv_sle(a, b);
      case BinaryOp::Gt: return s_.bv_slt(b, a);
      case BinaryOp::Ge: return s_.bv_sle(b, a);
      case BinaryOp::Eq: return s_.mk_eq(a, b);
      case BinaryOp::Ne: return s_.mk_ne(a, b);
      default: break;
      }
      break;
    }
    case ExprKind::Call: return call(e, st);
    }
    throw std::logic_error("encode: unsupported expression");
  }

  void exec_while(const Stmt& s, State& st, unsigned remaining) {
    Term c = eval(*s.expr, st);
    if (s_.is_false(c) || s_.is_false(st.live)) return;
    if (remaining == 0) {
      flag(unwind_viol_, s_.mk_and(abs(st), c));
      st.live = s_.mk_and(st.live, s_.mk_not(c));
      return;
    }
    State body = branch(st, c);
    exec(*s.then_branch, body);
    exec_while(s, body, remaining - 1);
    State skip = branch(st, s_.mk_not(c));
    merge(st, c, body, skip);
  }

  void exec(const Stmt& s, State& st) {
    if (s_.is_false(st.live)) return;
    switch (s.kind) {
    case StmtKind::Block:
      for (const auto& c : s.body) {
        if (s_.is_false(st.live)) break;
        exec(*c, st);
      }
      return;
    case StmtKind::VarDecl: {
      Value v;
      if (s.decl_type.is_array()) {
        for (std::size_t i = 0; i < s.decl_type.length; ++i)
          v.push_back(i < s.array_init.size() ? eval(*s.array_init[i], st) : s_.bv_const(0, width_));
      } else {
        v.push_back(s.expr ? eval(*s.expr, st) : zero(s.decl_type));
      }
      st.locals[s.name] = std::move(v);
      return;
    }
    case StmtKind::Assign: {
      std::optional<Term> idx;
      if (s.index) idx = eval(*s.index, st);
      Term v = eval(*s.expr, st);
      Value& target = var(st, s.name, s.is_global);
      if (s.is_global) written_.insert(s.name);
      if (!idx) {
        target[0] = s.is_global ? guarded(st, s_.bool_const(true), v, target[0]) : v;
        return;
      }
      flag(fail_, s_.mk_and(abs(st), out_of_bounds(*idx, target.size())));
      for (std::size_t k = 0; k < addressable(target.size()); ++k) {
        Term hit = index_cond(*idx, k);
        target[k] = s.is_global ? guarded(st, hit, v, target[k]) : s_.mk_ite(hit, v, target[k]);
      }
      return;
    }
    case StmtKind::If: {
      Term c = eval(*s.expr, st);
      if (s_.is_false(st.live)) return;
      if (s_.is_true(c)) return exec_region(*s.then_branch, st);
      if (s_.is_false(c)) {
        if (s.else_branch) exec_region(*s.else_branch, st);
        return;
      }
      State t = branch(st, c);
      exec(*s.then_branch, t);
      State e = branch(st, s_.mk_not(c));
      if (s.else_branch) exec(*s.else_branch, e);
      merge(st, c, t, e);
      return;
    }
    case StmtKind::While: exec_while(s, st, cfg_.loop_bound); return;
    case StmtKind::Return: {
      Term v = s.expr ? eval(*s.expr, st) : st.ret;
      st.ret = guarded(st, s_.bool_const(true), v, st.ret);
      st.returned = s_.mk_or(st.returned, st.live);
      st.live = s_.bool_const(false);
      return;
    }
    case StmtKind::Assert: {
      Term c = eval(*s.expr, st);
      flag(fail_, s_.mk_and(abs(st), s_.mk_not(c)));
      return;
    }
    case StmtKind::Assume: {
      Term c = eval(*s.expr, st);
      flag(assume_viol_, s_.mk_and(abs(st), s_.mk_not(c)));
      st.live = s_.mk_and(st.live, c);
      return;
    }
    case StmtKind::ExprStmt: eval(*s.expr, st); return;
    }
  }

  // A branch whose condition folded to a constant runs inline.
  void exec_region(const Stmt& s, State& st) { exec(s, st); }

  TermStore& s_;
  const FunctionDef& top_;
  const Snapshot& snap_;
  const UnrollConfig& cfg_;
  GlobalInit mode_;
  unsigned width_;
  SsaProgram& out_;
  Term fail_, assume_viol_, unwind_viol_;
  std::map<std::string, Value> initial_;
  std::set<std::string> written_;
  std::set<std::string> nondet_seen_;
};

} // namespace

SsaProgram encode_ssa(const FunctionDef& fn, const Snapshot& snap, const UnrollConfig& cfg,
                      const EncodeOptions& opts) {
  cfg.validate();
  if (!fn.typed) throw std::invalid_argument("encode_ssa: function '" + fn.name + "' is not type-checked");
  SsaProgram out;
  out.store = opts.store ? opts.store : std::make_shared<TermStore>();
  Encoder enc(fn, snap, cfg, opts, out);
  enc.run();
  return out;
}

} // namespace cfv::equivalence
