#include <cfv/frontend/ast.hpp>

#include <sstream>

namespace cfv::frontend {

const char* to_string(DiagKind kind) {
  switch (kind) {
  case DiagKind::SyntaxError: return "SyntaxError";
  case DiagKind::UnsupportedConstruct: return "UnsupportedConstruct";
  case DiagKind::TypeError: return "TypeError";
  case DiagKind::UndefinedSymbol: return "UndefinedSymbol";
  case DiagKind::InputError: return "InputError";
  }
  return "?";
}

std::string Diagnostic::format() const {
  std::ostringstream out;
  out << (path.empty() ? "<input>" : path) << ':' << span.line << ':' << span.column
      << ": error: " << message;
  return out.str();
}

namespace {
std::string join_messages(const std::vector<Diagnostic>& diags) {
  std::string text;
  for (const auto& d : diags) {
    if (!text.empty()) text += '\n';
    text += d.format();
  }
  return text;
}
} // namespace

FrontendError::FrontendError(std::vector<Diagnostic> diagnostics)
    : std::runtime_error(join_messages(diagnostics)), diagnostics_(std::move(diagnostics)) {
  if (diagnostics_.empty())
    diagnostics_.push_back({DiagKind::InputError, "", {}, "unknown frontend error"});
}

bool is_supported_width(unsigned width) {
  return width == 4 || width == 8 || width == 16 || width == 32;
}

std::string TypeRepr::to_string() const {
  switch (kind) {
  case Kind::Void: return "void";
  case Kind::Bool: return "bool";
  case Kind::Int: return "int" + std::to_string(width);
  case Kind::Array:
    return "int" + std::to_string(width) + "[" + std::to_string(length) + "]";
  }
  return "?";
}

const char* spelling(UnaryOp op) {
  switch (op) {
  case UnaryOp::Neg: return "-";
  case UnaryOp::Not: return "!";
  case UnaryOp::BitNot: return "~";
  }
  return "?";
}

const char* spelling(BinaryOp op) {
  switch (op) {
  case BinaryOp::Add: return "+";
  case BinaryOp::Sub: return "-";
  case BinaryOp::Mul: return "*";
  case BinaryOp::BitAnd: return "&";
  case BinaryOp::BitOr: return "|";
  case BinaryOp::BitXor: return "^";
  case BinaryOp::Shl: return "<<";
  case BinaryOp::Shr: return ">>";
  case BinaryOp::Lt: return "<";
  case BinaryOp::Le: return "<=";
  case BinaryOp::Gt: return ">";
  case BinaryOp::Ge: return ">=";
  case BinaryOp::Eq: return "==";
  case BinaryOp::Ne: return "!=";
  case BinaryOp::LogAnd: return "&&";
  case BinaryOp::LogOr: return "||";
  }
  return "?";
}

ExprPtr make_int(std::int64_t value, Span span) {
  Expr e;
  e.kind = ExprKind::IntLit;
  e.int_value = value;
  e.span = span;
  return std::make_shared<const Expr>(std::move(e));
}

ExprPtr make_int_literal(std::int64_t value, Span span) {
  if (value >= 0) return make_int(value, span);
  // -(INT64_MIN) is not representable; the magnitude is taken modulo 2^64.
  auto magnitude = static_cast<std::int64_t>(0ULL - static_cast<std::uint64_t>(value));
  return make_unary(UnaryOp::Neg, make_int(magnitude, span), span);
}

ExprPtr make_bool(bool value, Span span) {
  Expr e;
  e.kind = ExprKind::BoolLit;
  e.bool_value = value;
  e.span = span;
  return std::make_shared<const Expr>(std::move(e));
}

ExprPtr make_var(std::string name, Span span) {
  Expr e;
  e.kind = ExprKind::VarRef;
  e.name = std::move(name);
  e.span = span;
  return std::make_shared<const Expr>(std::move(e));
}

ExprPtr make_index(std::string array, ExprPtr index, Span span) {
  Expr e;
  e.kind = ExprKind::ArrayIndex;
  e.name = std::move(array);
  e.operands.push_back(std::move(index));
  e.span = span;
  return std::make_shared<const Expr>(std::move(e));
}

ExprPtr make_unary(UnaryOp op, ExprPtr operand, Span span) {
  Expr e;
  e.kind = ExprKind::Unary;
  e.unary_op = op;
  e.operands.push_back(std::move(operand));
  e.span = span;
  return std::make_shared<const Expr>(std::move(e));
}

ExprPtr make_binary(BinaryOp op, ExprPtr lhs, ExprPtr rhs, Span span) {
  Expr e;
  e.kind = ExprKind::Binary;
  e.binary_op = op;
  e.operands.push_back(std::move(lhs));
  e.operands.push_back(std::move(rhs));
  e.span = span;
  return std::make_shared<const Expr>(std::move(e));
}

ExprPtr make_call(std::string callee, std::vector<ExprPtr> args, Span span) {
  Expr e;
  e.kind = ExprKind::Call;
  e.name = std::move(callee);
  e.operands = std::move(args);
  e.span = span;
  return std::make_shared<const Expr>(std::move(e));
}

ExprPtr make_nondet(bool is_bool, Span span) {
  Expr e;
  e.kind = is_bool ? ExprKind::NondetBool : ExprKind::NondetInt;
  e.span = span;
  return std::make_shared<const Expr>(std::move(e));
}

StmtPtr make_block(std::vector<StmtPtr> body, Span span) {
  Stmt s;
  s.kind = StmtKind::Block;
  s.body = std::move(body);
  s.span = span;
  return std::make_shared<const Stmt>(std::move(s));
}

StmtPtr make_stmt(StmtKind kind, ExprPtr expr, Span span) {
  Stmt s;
  s.kind = kind;
  s.expr = std::move(expr);
  s.span = span;
  return std::make_shared<const Stmt>(std::move(s));
}

bool literal_value(const Expr& e, std::int64_t& value) {
  if (e.kind == ExprKind::IntLit) {
    value = e.int_value;
    return true;
  }
  if (e.kind == ExprKind::Unary && e.unary_op == UnaryOp::Neg &&
      e.operands[0]->kind == ExprKind::IntLit) {
    value = static_cast<std::int64_t>(0ULL - static_cast<std::uint64_t>(e.operands[0]->int_value));
    return true;
  }
  return false;
}

std::vector<std::int64_t> GlobalDecl::initial_values() const {
  std::size_t n = type.is_array() ? type.length : 1;
  std::vector<std::int64_t> values(n, 0);
  for (std::size_t i = 0; i < n && i < init.size(); ++i) values[i] = init[i];
  return values;
}

std::vector<const FunctionDef*> SourceUnit::functions() const {
  std::vector<const FunctionDef*> out;
  for (const auto& d : declarations)
    if (const auto* f = std::get_if<FunctionDef>(&d)) out.push_back(f);
  return out;
}

std::vector<const GlobalDecl*> SourceUnit::globals() const {
  std::vector<const GlobalDecl*> out;
  for (const auto& d : declarations)
    if (const auto* g = std::get_if<GlobalDecl>(&d)) out.push_back(g);
  return out;
}

bool equal(const ExprPtr& a, const ExprPtr& b) {
  if (!a || !b) return !a && !b;
  return a == b || equal(*a, *b);
}

bool equal(const StmtPtr& a, const StmtPtr& b) {
  if (!a || !b) return !a && !b;
  return a == b || equal(*a, *b);
}

bool equal(const Expr& a, const Expr& b) {
  if (a.kind != b.kind || a.operands.size() != b.operands.size()) return false;
  switch (a.kind) {
  case ExprKind::IntLit:
    if (a.int_value != b.int_value) return false;
    break;
  case ExprKind::BoolLit:
    if (a.bool_value != b.bool_value) return false;
    break;
  case ExprKind::VarRef:
  case ExprKind::ArrayIndex:
    if (a.name != b.name || a.is_global != b.is_global) return false;
    break;
  case ExprKind::Call:
    if (a.name != b.name) return false;
    break;
  case ExprKind::Unary:
    if (a.unary_op != b.unary_op) return false;
    break;
  case ExprKind::Binary:
    if (a.binary_op != b.binary_op) return false;
    break;
  case ExprKind::NondetInt:
  case ExprKind::NondetBool:
    break;
  }
  for (std::size_t i = 0; i < a.operands.size(); ++i)
    if (!equal(a.operands[i], b.operands[i])) return false;
  return true;
}

bool equal(const Stmt& a, const Stmt& b) {
  if (a.kind != b.kind || a.name != b.name || a.is_global != b.is_global) return false;
  if (a.kind == StmtKind::VarDecl && !(a.decl_type == b.decl_type)) return false;
  if (!equal(a.index, b.index) || !equal(a.expr, b.expr)) return false;
  if (a.array_init.size() != b.array_init.size() || a.body.size() != b.body.size())
    return false;
  for (std::size_t i = 0; i < a.array_init.size(); ++i)
    if (!equal(a.array_init[i], b.array_init[i])) return false;
  for (std::size_t i = 0; i < a.body.size(); ++i)
    if (!equal(a.body[i], b.body[i])) return false;
  return equal(a.then_branch, b.then_branch) && equal(a.else_branch, b.else_branch);
}

bool equal_function(const FunctionDef& a, const FunctionDef& b) {
  if (!(a.return_type == b.return_type) || a.params.size() != b.params.size()) return false;
  for (std::size_t i = 0; i < a.params.size(); ++i)
    if (!(a.params[i] == b.params[i])) return false;
  return equal(a.body, b.body);
}

bool equal_unit(const SourceUnit& a, const SourceUnit& b) {
  if (a.declarations.size() != b.declarations.size()) return false;
  for (std::size_t i = 0; i < a.declarations.size(); ++i) {
    const auto& da = a.declarations[i];
    const auto& db = b.declarations[i];
    if (da.index() != db.index()) return false;
    if (const auto* ga = std::get_if<GlobalDecl>(&da)) {
      if (!ga->same_definition(std::get<GlobalDecl>(db))) return false;
    } else {
      const auto& fa = std::get<FunctionDef>(da);
      const auto& fb = std::get<FunctionDef>(db);
      if (fa.name != fb.name || !equal_function(fa, fb)) return false;
    }
  }
  return true;
}

} // namespace cfv::frontend
