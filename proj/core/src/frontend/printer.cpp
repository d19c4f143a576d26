#include <cfv/frontend/printer.hpp>

#include <sstream>

namespace cfv::frontend {
namespace {

std::string type_prefix(const TypeRepr& t) {
  switch (t.kind) {
  case TypeRepr::Kind::Void: return "void";
  case TypeRepr::Kind::Bool: return "bool";
  case TypeRepr::Kind::Int:
  case TypeRepr::Kind::Array: return "int";
  }
  return "?";
}

std::string declarator(const TypeRepr& t, const std::string& name) {
  std::string out = type_prefix(t) + " " + name;
  if (t.is_array()) out += "[" + std::to_string(t.length) + "]";
  return out;
}

bool is_primary(const Expr& e) {
  return e.kind != ExprKind::Unary && e.kind != ExprKind::Binary;
}

void pad(std::ostringstream& out, int indent) {
  for (int i = 0; i < indent; ++i) out << "  ";
}

void print_block_body(std::ostringstream& out, const Stmt& block, int indent) {
  out << "{\n";
  for (const auto& s : block.body) out << print_stmt(*s, indent + 1);
  pad(out, indent);
  out << "}";
}

} // namespace

std::string print_expr(const Expr& e) {
  switch (e.kind) {
  case ExprKind::IntLit: return std::to_string(e.int_value);
  case ExprKind::BoolLit: return e.bool_value ? "true" : "false";
  case ExprKind::VarRef: return e.name;
  case ExprKind::ArrayIndex: return e.name + "[" + print_expr(*e.operands[0]) + "]";
  case ExprKind::NondetInt: return "nondet_int()";
  case ExprKind::NondetBool: return "nondet_bool()";
  case ExprKind::Unary: {
    const Expr& operand = *e.operands[0];
    std::string inner = print_expr(operand);
    if (!is_primary(operand) || (operand.kind == ExprKind::IntLit && operand.int_value < 0))
      inner = "(" + inner + ")";
    return spelling(e.unary_op) + inner;
  }
  case ExprKind::Binary:
    return "(" + print_expr(*e.operands[0]) + " " + spelling(e.binary_op) + " " +
           print_expr(*e.operands[1]) + ")";
  case ExprKind::Call: {
    std::string out = e.name + "(";
    for (std::size_t i = 0; i < e.operands.size(); ++i) {
      if (i) out += ", ";
      out += print_expr(*e.operands[i]);
    }
    return out + ")";
  }
  }
  return "?";
}

std::string print_stmt(const Stmt& s, int indent) {
  std::ostringstream out;
  pad(out, indent);
  switch (s.kind) {
  case StmtKind::Block:
    print_block_body(out, s, indent);
    out << "\n";
    break;
  case StmtKind::VarDecl:
    out << declarator(s.decl_type, s.name);
    if (s.expr) out << " = " << print_expr(*s.expr);
    if (!s.array_init.empty()) {
      out << " = {";
      for (std::size_t i = 0; i < s.array_init.size(); ++i)
        out << (i ? ", " : "") << print_expr(*s.array_init[i]);
      out << "}";
    }
    out << ";\n";
    break;
  case StmtKind::Assign:
    out << s.name;
    if (s.index) out << "[" << print_expr(*s.index) << "]";
    out << " = " << print_expr(*s.expr) << ";\n";
    break;
  case StmtKind::If:
    out << "if (" << print_expr(*s.expr) << ") ";
    print_block_body(out, *s.then_branch, indent);
    if (s.else_branch) {
      out << " else ";
      print_block_body(out, *s.else_branch, indent);
    }
    out << "\n";
    break;
  case StmtKind::While:
    out << "while (" << print_expr(*s.expr) << ") ";
    print_block_body(out, *s.then_branch, indent);
    out << "\n";
    break;
  case StmtKind::Return:
    out << "return";
    if (s.expr) out << " " << print_expr(*s.expr);
    out << ";\n";
    break;
  case StmtKind::Assert: out << "assert(" << print_expr(*s.expr) << ");\n"; break;
  case StmtKind::Assume: out << "assume(" << print_expr(*s.expr) << ");\n"; break;
  case StmtKind::ExprStmt: out << print_expr(*s.expr) << ";\n"; break;
  }
  return out.str();
}

std::string print_function(const FunctionDef& fn) {
  std::ostringstream out;
  if (!fn.leading_comment.empty()) {
    std::string c = fn.leading_comment;
    for (auto& ch : c)
      if (ch == '\n') ch = ' ';
    out << "// " << c << "\n";
  }
  out << type_prefix(fn.return_type) << " " << fn.name << "(";
  for (std::size_t i = 0; i < fn.params.size(); ++i)
    out << (i ? ", " : "") << declarator(fn.params[i].type, fn.params[i].name);
  out << ") ";
  print_block_body(out, *fn.body, 0);
  out << "\n";
  return out.str();
}

std::string print_global(const GlobalDecl& g) {
  std::ostringstream out;
  out << declarator(g.type, g.name);
  if (g.has_init) {
    auto value = [&](std::int64_t v) {
      return g.type.is_bool() ? std::string(v ? "true" : "false") : std::to_string(v);
    };
    if (g.type.is_array()) {
      out << " = {";
      for (std::size_t i = 0; i < g.init.size(); ++i) out << (i ? ", " : "") << value(g.init[i]);
      out << "}";
    } else {
      out << " = " << value(g.init.front());
    }
  }
  out << ";\n";
  return out.str();
}

std::string print_unit(const SourceUnit& unit) {
  std::string out;
  for (const auto& d : unit.declarations) {
    if (const auto* g = std::get_if<GlobalDecl>(&d)) out += print_global(*g);
    else out += "\n" + print_function(std::get<FunctionDef>(d));
  }
  return out;
}

} // namespace cfv::frontend
