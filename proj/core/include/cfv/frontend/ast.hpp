#pragma once

#include <cfv/frontend/diagnostics.hpp>

#include <cstdint>
#include <memory>
#include <set>
#include <string>
#include <variant>
#include <vector>

namespace cfv::frontend {

inline constexpr unsigned kDefaultIntWidth = 32;

bool is_supported_width(unsigned width);

struct TypeRepr {
  enum class Kind : std::uint8_t { Void, Bool, Int, Array };

  Kind kind = Kind::Void;
  std::uint8_t width = 0;   // Int, and the element width of Array
  std::uint32_t length = 0; // Array only

  static TypeRepr void_type() { return {}; }
  static TypeRepr bool_type() { return {Kind::Bool, 0, 0}; }
  static TypeRepr int_type(unsigned w) {
    return {Kind::Int, static_cast<std::uint8_t>(w), 0};
  }
  static TypeRepr array_type(unsigned w, std::uint32_t n) {
    return {Kind::Array, static_cast<std::uint8_t>(w), n};
  }

  bool is_void() const { return kind == Kind::Void; }
  bool is_bool() const { return kind == Kind::Bool; }
  bool is_int() const { return kind == Kind::Int; }
  bool is_array() const { return kind == Kind::Array; }
  bool is_scalar() const { return is_bool() || is_int(); }

  std::string to_string() const;
  bool operator==(const TypeRepr&) const = default;
};

enum class UnaryOp : std::uint8_t { Neg, Not, BitNot };

enum class BinaryOp : std::uint8_t {
  Add, Sub, Mul,
  BitAnd, BitOr, BitXor,
  Shl, Shr,
  Lt, Le, Gt, Ge, Eq, Ne,
  LogAnd, LogOr,
};

const char* spelling(UnaryOp op);
const char* spelling(BinaryOp op);

enum class ExprKind : std::uint8_t {
  IntLit, BoolLit, VarRef, ArrayIndex, Unary, Binary, Call, NondetInt, NondetBool,
};

struct Expr;
struct Stmt;
using ExprPtr = std::shared_ptr<const Expr>;
using StmtPtr = std::shared_ptr<const Stmt>;

struct Expr {
  ExprKind kind = ExprKind::IntLit;
  Span span;
  TypeRepr type; // set by type_check

  std::int64_t int_value = 0; // IntLit
  bool bool_value = false;    // BoolLit
  std::string name;           // VarRef, ArrayIndex (the array), Call (callee)
  bool is_global = false;     // VarRef / ArrayIndex resolved to a global
  UnaryOp unary_op = UnaryOp::Neg;
  BinaryOp binary_op = BinaryOp::Add;
  std::vector<ExprPtr> operands; // Unary: 1, Binary: 2, ArrayIndex: index, Call: args
  std::uint32_t site = 0;        // Nondet*: pre-order ordinal within the function
};

enum class StmtKind : std::uint8_t {
  Block, VarDecl, Assign, If, While, Return, Assert, Assume, ExprStmt,
};

struct Stmt {
  StmtKind kind = StmtKind::Block;
  Span span;

  std::string name;     // VarDecl, Assign target
  bool is_global = false; // Assign target resolved to a global
  TypeRepr decl_type;   // VarDecl
  ExprPtr index;        // Assign to an array element
  ExprPtr expr;         // initializer / value / condition / return value; may be null
  std::vector<ExprPtr> array_init; // VarDecl of an array with `{...}`
  std::vector<StmtPtr> body;       // Block
  StmtPtr then_branch;  // If, and the body of While (always a Block)
  StmtPtr else_branch;  // If, may be null (always a Block when present)
};

// Node constructors. Spans default to empty for synthesized nodes.
ExprPtr make_int(std::int64_t value, Span span = {});
/// Literal for a signed value: negative values become `-(lit)` so printing
/// and reparsing yields the same tree.
ExprPtr make_int_literal(std::int64_t value, Span span = {});
ExprPtr make_bool(bool value, Span span = {});
ExprPtr make_var(std::string name, Span span = {});
ExprPtr make_index(std::string array, ExprPtr index, Span span = {});
ExprPtr make_unary(UnaryOp op, ExprPtr operand, Span span = {});
ExprPtr make_binary(BinaryOp op, ExprPtr lhs, ExprPtr rhs, Span span = {});
ExprPtr make_call(std::string callee, std::vector<ExprPtr> args, Span span = {});
ExprPtr make_nondet(bool is_bool, Span span = {});

StmtPtr make_block(std::vector<StmtPtr> body, Span span = {});
StmtPtr make_stmt(StmtKind kind, ExprPtr expr, Span span = {});

/// Value of an integer literal expression, accepting `-(lit)`.
bool literal_value(const Expr& e, std::int64_t& value);

struct Param {
  std::string name;
  TypeRepr type;
  Span span;
  bool operator==(const Param& o) const { return name == o.name && type == o.type; }
};

struct FunctionDef {
  std::string name;
  std::vector<Param> params;
  TypeRepr return_type;
  StmtPtr body;
  Span span;
  std::string path;
  std::string body_text;       // exact source bytes of the body, comments included
  std::string leading_comment; // comment immediately before the definition

  // Computed by type_check.
  std::set<std::string> reads_globals;
  std::set<std::string> writes_globals;
  std::set<std::string> callees;
  std::uint32_t nondet_sites = 0;
  bool typed = false;
};

using FunctionPtr = std::shared_ptr<const FunctionDef>;

struct GlobalDecl {
  std::string name;
  TypeRepr type;
  bool has_init = false;
  std::vector<std::int64_t> init; // one entry for scalars, up to length for arrays
  Span span;
  std::string path;

  /// Initial value of element `i` (zero when not initialized).
  std::int64_t initial(std::size_t i = 0) const {
    return i < init.size() ? init[i] : 0;
  }
  bool same_definition(const GlobalDecl& o) const {
    return name == o.name && type == o.type && initial_values() == o.initial_values();
  }
  std::vector<std::int64_t> initial_values() const;
};

using Declaration = std::variant<GlobalDecl, FunctionDef>;

struct SourceUnit {
  std::string path;
  std::string text;
  unsigned int_width = kDefaultIntWidth;
  std::vector<Declaration> declarations;

  std::vector<const FunctionDef*> functions() const;
  std::vector<const GlobalDecl*> globals() const;
};

// Span-insensitive structural equality.
bool equal(const Expr& a, const Expr& b);
bool equal(const Stmt& a, const Stmt& b);
bool equal(const ExprPtr& a, const ExprPtr& b);
bool equal(const StmtPtr& a, const StmtPtr& b);
/// Signature and body; ignores name, spans, path and source text.
bool equal_function(const FunctionDef& a, const FunctionDef& b);
bool equal_unit(const SourceUnit& a, const SourceUnit& b);

/// Pre-order visitation of every expression in a statement tree.
template <typename F>
void for_each_expr(const Expr& e, F&& f);
template <typename F>
void for_each_expr(const Stmt& s, F&& f);
template <typename F>
void for_each_stmt(const Stmt& s, F&& f);

template <typename F>
void for_each_expr(const Expr& e, F&& f) {
  f(e);
  for (const auto& op : e.operands) for_each_expr(*op, f);
}

template <typename F>
void for_each_expr(const Stmt& s, F&& f) {
  if (s.index) for_each_expr(*s.index, f);
  if (s.expr) for_each_expr(*s.expr, f);
  for (const auto& e : s.array_init) for_each_expr(*e, f);
  for (const auto& c : s.body) for_each_expr(*c, f);
  if (s.then_branch) for_each_expr(*s.then_branch, f);
  if (s.else_branch) for_each_expr(*s.else_branch, f);
}

template <typename F>
void for_each_stmt(const Stmt& s, F&& f) {
  f(s);
  for (const auto& c : s.body) for_each_stmt(*c, f);
  if (s.then_branch) for_each_stmt(*s.then_branch, f);
  if (s.else_branch) for_each_stmt(*s.else_branch, f);
}

} // namespace cfv::frontend
