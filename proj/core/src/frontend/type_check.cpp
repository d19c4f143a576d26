#include <cfv/frontend/type_check.hpp>

#include <optional>

namespace cfv::frontend {
namespace {

struct CheckFailure {
  Diagnostic diag;
};

struct FunctionSig {
  std::vector<TypeRepr> params;
  TypeRepr ret;
};

class FunctionChecker {
public:
  FunctionChecker(const std::map<std::string, TypeRepr>& globals,
                  const std::map<std::string, FunctionSig>& functions, unsigned width,
                  const std::string& path)
      : globals_(globals), functions_(functions), width_(width), path_(path) {}

  FunctionDef check(const FunctionDef& fn) {
    FunctionDef out = fn;
    ret_ = fn.return_type;
    scopes_.assign(1, {});
    for (const auto& p : fn.params) {
      if (!p.type.is_scalar()) fail(DiagKind::TypeError, p.span, "parameters must be int or bool");
      declare(p.name, p.type, p.span);
    }
    StmtPtr body = check_stmt(fn.body);
    if (!ret_.is_void() && !always_returns(*body))
      fail(DiagKind::TypeError, fn.span,
           "control may reach the end of non-void function '" + fn.name + "'");
    std::uint32_t sites = 0;
    out.body = number_nondet_sites(body, sites);
    out.nondet_sites = sites;
    out.reads_globals = std::move(reads_);
    out.writes_globals = std::move(writes_);
    out.callees = std::move(callees_);
    out.typed = true;
    return out;
  }

private:
  [[noreturn]] void fail(DiagKind kind, Span span, std::string message) const {
    throw CheckFailure{{kind, path_, span, std::move(message)}};
  }

  std::optional<TypeRepr> lookup_local(const std::string& name) const {
    for (auto it = scopes_.rbegin(); it != scopes_.rend(); ++it) {
      auto found = it->find(name);
      if (found != it->end()) return found->second;
    }
    return std::nullopt;
  }

  void declare(const std::string& name, TypeRepr type, Span span) {
    if (lookup_local(name))
      fail(DiagKind::TypeError, span, "redeclaration of '" + name + "'");
    if (globals_.count(name))
      fail(DiagKind::TypeError, span, "local '" + name + "' shadows a global");
    if (functions_.count(name))
      fail(DiagKind::TypeError, span, "local '" + name + "' shadows a function");
    scopes_.back().emplace(name, type);
  }

  // Resolves a variable; sets `is_global`.
  TypeRepr resolve(const std::string& name, Span span, bool& is_global) const {
    if (auto t = lookup_local(name)) {
      is_global = false;
      return *t;
    }
    auto g = globals_.find(name);
    if (g != globals_.end()) {
      is_global = true;
      return g->second;
    }
    fail(DiagKind::UndefinedSymbol, span, "use of undeclared identifier '" + name + "'");
  }

  void expect_type(const Expr& e, const TypeRepr& want, const char* context) const {
    if (!(e.type == want))
      fail(DiagKind::TypeError, e.span,
           std::string(context) + ": expected " + want.to_string() + ", found " +
               e.type.to_string());
  }

  ExprPtr check_expr(const ExprPtr& in, bool allow_void = false) {
    Expr e = *in;
    for (auto& op : e.operands) op = check_expr(op);
    const TypeRepr int_t = TypeRepr::int_type(width_);
    const TypeRepr bool_t = TypeRepr::bool_type();
    switch (e.kind) {
    case ExprKind::IntLit: e.type = int_t; break;
    case ExprKind::BoolLit: e.type = bool_t; break;
    case ExprKind::NondetInt: e.type = int_t; break;
    case ExprKind::NondetBool: e.type = bool_t; break;
    case ExprKind::VarRef: {
      e.type = resolve(e.name, e.span, e.is_global);
      if (e.type.is_array())
        fail(DiagKind::TypeError, e.span, "array '" + e.name + "' used as a value");
      if (e.is_global) reads_.insert(e.name);
      break;
    }
    case ExprKind::ArrayIndex: {
      TypeRepr arr = resolve(e.name, e.span, e.is_global);
      if (!arr.is_array()) fail(DiagKind::TypeError, e.span, "'" + e.name + "' is not an array");
      expect_type(*e.operands[0], int_t, "array index");
      e.type = TypeRepr::int_type(arr.width);
      if (e.is_global) reads_.insert(e.name);
      break;
    }
    case ExprKind::Unary: {
      const Expr& x = *e.operands[0];
      if (e.unary_op == UnaryOp::Not) {
        expect_type(x, bool_t, "operand of '!'");
        e.type = bool_t;
      } else {
        expect_type(x, int_t, spelling(e.unary_op));
        e.type = int_t;
      }
      break;
    }
    case ExprKind::Binary: {
      const Expr& l = *e.operands[0];
      const Expr& r = *e.operands[1];
      switch (e.binary_op) {
      case BinaryOp::Add: case BinaryOp::Sub: case BinaryOp::Mul:
      case BinaryOp::Shl: case BinaryOp::Shr:
        expect_type(l, int_t, "left operand");
        expect_type(r, int_t, "right operand");
        e.type = int_t;
        break;
      case BinaryOp::BitAnd: case BinaryOp::BitOr: case BinaryOp::BitXor:
        if (!l.type.is_scalar()) expect_type(l, int_t, "left operand");
        expect_type(r, l.type, "right operand");
        e.type = l.type;
        break;
      case BinaryOp::Lt: case BinaryOp::Le: case BinaryOp::Gt: case BinaryOp::Ge:
        expect_type(l, int_t, "left operand");
        expect_type(r, int_t, "right operand");
        e.type = bool_t;
        break;
      case BinaryOp::Eq: case BinaryOp::Ne:
        if (!l.type.is_scalar()) expect_type(l, int_t, "left operand");
        expect_type(r, l.type, "right operand");
        e.type = bool_t;
        break;
      case BinaryOp::LogAnd: case BinaryOp::LogOr:
        expect_type(l, bool_t, "left operand");
        expect_type(r, bool_t, "right operand");
        e.type = bool_t;
        break;
      }
      break;
    }
    case ExprKind::Call: {
      auto f = functions_.find(e.name);
      if (f == functions_.end()) {
        if (lookup_local(e.name) || globals_.count(e.name))
          fail(DiagKind::TypeError, e.span, "'" + e.name + "' is not a function");
        fail(DiagKind::UndefinedSymbol, e.span, "call to undeclared function '" + e.name + "'");
      }
      const FunctionSig& sig = f->second;
      if (sig.params.size() != e.operands.size())
        fail(DiagKind::TypeError, e.span,
             "'" + e.name + "' expects " + std::to_string(sig.params.size()) +
                 " argument(s), got " + std::to_string(e.operands.size()));
      for (std::size_t i = 0; i < sig.params.size(); ++i)
        expect_type(*e.operands[i], sig.params[i],
                    ("argument " + std::to_string(i + 1) + " of '" + e.name + "'").c_str());
      e.type = sig.ret;
      if (e.type.is_void() && !allow_void)
        fail(DiagKind::TypeError, e.span, "void function '" + e.name + "' used as a value");
      callees_.insert(e.name);
      break;
    }
    }
    return std::make_shared<const Expr>(std::move(e));
  }

  StmtPtr check_stmt(const StmtPtr& in) {
    Stmt s = *in;
    const TypeRepr int_t = TypeRepr::int_type(width_);
    const TypeRepr bool_t = TypeRepr::bool_type();
    switch (s.kind) {
    case StmtKind::Block: {
      scopes_.emplace_back();
      for (auto& c : s.body) c = check_stmt(c);
      scopes_.pop_back();
      break;
    }
    case StmtKind::VarDecl: {
      if (s.decl_type.is_int() || s.decl_type.is_array()) s.decl_type.width = static_cast<std::uint8_t>(width_);
      if (s.expr) {
        s.expr = check_expr(s.expr);
        expect_type(*s.expr, s.decl_type, ("initializer of '" + s.name + "'").c_str());
      }
      for (auto& e : s.array_init) {
        e = check_expr(e);
        expect_type(*e, int_t, "array initializer");
      }
      declare(s.name, s.decl_type, s.span);
      break;
    }
    case StmtKind::Assign: {
      TypeRepr target = resolve(s.name, s.span, s.is_global);
      if (s.index) {
        if (!target.is_array()) fail(DiagKind::TypeError, s.span, "'" + s.name + "' is not an array");
        s.index = check_expr(s.index);
        expect_type(*s.index, int_t, "array index");
        target = TypeRepr::int_type(target.width);
      } else if (target.is_array()) {
        fail(DiagKind::TypeError, s.span, "cannot assign to array '" + s.name + "'");
      }
      s.expr = check_expr(s.expr);
      expect_type(*s.expr, target, ("assignment to '" + s.name + "'").c_str());
      if (s.is_global) writes_.insert(s.name);
      break;
    }
    case StmtKind::If:
    case StmtKind::While:
      s.expr = check_expr(s.expr);
      expect_type(*s.expr, bool_t, s.kind == StmtKind::If ? "if condition" : "while condition");
      s.then_branch = check_stmt(s.then_branch);
      if (s.else_branch) s.else_branch = check_stmt(s.else_branch);
      break;
    case StmtKind::Return:
      if (s.expr) {
        if (ret_.is_void()) fail(DiagKind::TypeError, s.span, "void function returns a value");
        s.expr = check_expr(s.expr);
        expect_type(*s.expr, ret_, "return value");
      } else if (!ret_.is_void()) {
        fail(DiagKind::TypeError, s.span, "non-void function must return a value");
      }
      break;
    case StmtKind::Assert:
    case StmtKind::Assume:
      s.expr = check_expr(s.expr);
      expect_type(*s.expr, bool_t, s.kind == StmtKind::Assert ? "assert" : "assume");
      break;
    case StmtKind::ExprStmt: s.expr = check_expr(s.expr, /*allow_void=*/true); break;
    }
    return std::make_shared<const Stmt>(std::move(s));
  }

  const std::map<std::string, TypeRepr>& globals_;
  const std::map<std::string, FunctionSig>& functions_;
  unsigned width_;
  const std::string& path_;
  TypeRepr ret_;
  std::vector<std::map<std::string, TypeRepr>> scopes_;
  std::set<std::string> reads_;
  std::set<std::string> writes_;
  std::set<std::string> callees_;
};

ExprPtr number_expr(const ExprPtr& e, std::uint32_t& count) {
  if (e->kind == ExprKind::NondetInt || e->kind == ExprKind::NondetBool) {
    Expr copy = *e;
    copy.site = count++;
    return std::make_shared<const Expr>(std::move(copy));
  }
  bool changed = false;
  std::vector<ExprPtr> ops;
  ops.reserve(e->operands.size());
  for (const auto& op : e->operands) {
    ops.push_back(number_expr(op, count));
    changed |= ops.back() != op;
  }
  if (!changed) return e;
  Expr copy = *e;
  copy.operands = std::move(ops);
  return std::make_shared<const Expr>(std::move(copy));
}

} // namespace

StmtPtr number_nondet_sites(const StmtPtr& body, std::uint32_t& count) {
  if (!body) return body;
  Stmt s = *body;
  bool changed = false;
  auto expr = [&](ExprPtr& e) {
    if (!e) return;
    auto n = number_expr(e, count);
    changed |= n != e;
    e = n;
  };
  auto stmt = [&](StmtPtr& c) {
    if (!c) return;
    auto n = number_nondet_sites(c, count);
    changed |= n != c;
    c = n;
  };
  expr(s.index);
  expr(s.expr);
  for (auto& e : s.array_init) expr(e);
  for (auto& c : s.body) stmt(c);
  stmt(s.then_branch);
  stmt(s.else_branch);
  if (!changed) return body;
  return std::make_shared<const Stmt>(std::move(s));
}

bool always_returns(const Stmt& s) {
  switch (s.kind) {
  case StmtKind::Return: return true;
  case StmtKind::Block:
    for (const auto& c : s.body)
      if (always_returns(*c)) return true;
    return false;
  case StmtKind::If:
    return s.else_branch && always_returns(*s.then_branch) && always_returns(*s.else_branch);
  case StmtKind::While:
    // No `break` in the subset: `while (true)` never falls through.
    return s.expr->kind == ExprKind::BoolLit && s.expr->bool_value;
  default: return false;
  }
}

std::vector<SourceUnit> type_check(std::vector<SourceUnit> units, const Environment* outer) {
  std::vector<Diagnostic> diags;
  std::map<std::string, TypeRepr> globals;
  std::map<std::string, FunctionSig> functions;
  std::map<std::string, std::pair<std::string, Span>> defined_at;

  unsigned width = units.empty() ? kDefaultIntWidth : units.front().int_width;
  if (outer) {
    for (const auto& [name, g] : outer->globals) {
      globals[name] = g->type;
      defined_at[name] = {g->path, g->span};
    }
    for (const auto& [name, f] : outer->functions) {
      FunctionSig sig{{}, f->return_type};
      for (const auto& p : f->params) sig.params.push_back(p.type);
      functions[name] = sig;
      defined_at[name] = {f->path, f->span};
    }
  }

  auto define = [&](const std::string& name, const std::string& path, Span span) {
    auto [it, inserted] = defined_at.emplace(name, std::make_pair(path, span));
    if (!inserted) {
      diags.push_back({DiagKind::TypeError, path, span,
                       "redefinition of '" + name + "' (previously defined at " +
                           it->second.first + ":" + std::to_string(it->second.second.line) +
                           ")"});
      return false;
    }
    return true;
  };

  for (const auto& unit : units) {
    if (unit.int_width != width)
      diags.push_back({DiagKind::InputError, unit.path, {}, "mixed integer widths"});
    for (const auto& decl : unit.declarations) {
      if (const auto* g = std::get_if<GlobalDecl>(&decl)) {
        if (define(g->name, g->path, g->span)) globals[g->name] = g->type;
      } else {
        const auto& f = std::get<FunctionDef>(decl);
        if (define(f.name, f.path, f.span)) {
          FunctionSig sig{{}, f.return_type};
          for (const auto& p : f.params) sig.params.push_back(p.type);
          functions[f.name] = sig;
        }
      }
    }
  }

  for (auto& unit : units) {
    for (auto& decl : unit.declarations) {
      auto* f = std::get_if<FunctionDef>(&decl);
      if (!f) continue;
      try {
        FunctionChecker checker(globals, functions, width, f->path);
        *f = checker.check(*f);
      } catch (const CheckFailure& failure) {
        diags.push_back(failure.diag);
      }
    }
  }
  if (!diags.empty()) throw FrontendError(std::move(diags));
  return units;
}

SourceUnit type_check(SourceUnit unit, const Environment* outer) {
  std::vector<SourceUnit> units;
  units.push_back(std::move(unit));
  return std::move(type_check(std::move(units), outer).front());
}

} // namespace cfv::frontend
