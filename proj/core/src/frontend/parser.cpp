#include <cfv/frontend/parser.hpp>

#include <cfv/frontend/lexer.hpp>

#include <algorithm>
#include <array>
#include <cctype>

namespace cfv::frontend {
namespace {

constexpr std::array<std::string_view, 21> kRejectedWords{
    "unsigned", "signed", "char", "short", "long", "float", "double", "struct", "union",
    "enum", "typedef", "goto", "switch", "case", "do", "break", "continue", "sizeof",
    "extern", "volatile", "_Bool"};

constexpr std::array<std::string_view, 4> kIgnoredQualifiers{"static", "const", "inline",
                                                             "register"};

Span cover(Span a, Span b) {
  Span s = a;
  s.end = std::max(a.end, b.end);
  s.begin = std::min(a.begin, b.begin);
  if (b.begin < a.begin) {
    s.line = b.line;
    s.column = b.column;
  }
  return s;
}

struct BinaryLevel {
  Tok tok;
  BinaryOp op;
};

// Lowest to highest precedence.
const std::vector<std::vector<BinaryLevel>> kLevels = {
    {{Tok::OrOr, BinaryOp::LogOr}},
    {{Tok::AndAnd, BinaryOp::LogAnd}},
    {{Tok::Pipe, BinaryOp::BitOr}},
    {{Tok::Caret, BinaryOp::BitXor}},
    {{Tok::Amp, BinaryOp::BitAnd}},
    {{Tok::EqEq, BinaryOp::Eq}, {Tok::Ne, BinaryOp::Ne}},
    {{Tok::Lt, BinaryOp::Lt}, {Tok::Le, BinaryOp::Le}, {Tok::Gt, BinaryOp::Gt},
     {Tok::Ge, BinaryOp::Ge}},
    {{Tok::Shl, BinaryOp::Shl}, {Tok::Shr, BinaryOp::Shr}},
    {{Tok::Plus, BinaryOp::Add}, {Tok::Minus, BinaryOp::Sub}},
    {{Tok::Star, BinaryOp::Mul}},
};

class Parser {
public:
  Parser(std::string_view src, std::string path, const ParseOptions& opts)
      : src_(src), path_(std::move(path)), opts_(opts) {
    if (!is_supported_width(opts_.int_width))
      throw FrontendError({{DiagKind::InputError, path_, {},
                            "unsupported integer width " + std::to_string(opts_.int_width)}});
    auto lexed = lex(src_, path_);
    toks_ = std::move(lexed.tokens);
    comments_ = std::move(lexed.comments);
  }

  SourceUnit run() {
    SourceUnit unit;
    unit.path = path_;
    unit.text = std::string(src_);
    unit.int_width = opts_.int_width;
    std::uint32_t prev_end = 0;
    while (!at(Tok::End)) {
      Span start = cur().span;
      skip_qualifiers();
      TypeRepr base = parse_base_type();
      Token name = expect_ident("declaration name");
      if (at(Tok::LParen)) {
        FunctionDef fn = parse_function(base, name, start);
        fn.leading_comment = leading_comment(prev_end, start.begin);
        prev_end = fn.span.end;
        unit.declarations.emplace_back(std::move(fn));
      } else {
        if (base.is_void())
          fail(DiagKind::TypeError, name.span, "variable declared void");
        while (true) {
          GlobalDecl g = parse_global(base, name);
          unit.declarations.emplace_back(std::move(g));
          if (!accept(Tok::Comma)) break;
          name = expect_ident("declaration name");
        }
        prev_end = expect(Tok::Semi, "';'").span.end;
      }
    }
    return unit;
  }

private:
  // ---- token helpers ----------------------------------------------------
  const Token& cur() const { return toks_[pos_]; }
  const Token& peek(std::size_t n = 1) const {
    return toks_[std::min(pos_ + n, toks_.size() - 1)];
  }
  bool at(Tok k) const { return cur().kind == k; }
  Token take() {
    check_supported(cur());
    Token t = cur();
    if (pos_ + 1 < toks_.size()) ++pos_;
    last_end_ = t.span;
    return t;
  }
  bool accept(Tok k) {
    if (!at(k)) return false;
    take();
    return true;
  }
  Token expect(Tok k, const char* what) {
    check_supported(cur());
    if (!at(k)) fail(DiagKind::SyntaxError, cur().span, std::string("expected ") + what);
    return take();
  }
  Token expect_ident(const char* what) {
    check_supported(cur());
    if (!at(Tok::Ident)) fail(DiagKind::SyntaxError, cur().span, std::string("expected ") + what);
    return take();
  }
  Span from(Span start) const { return cover(start, last_end_); }

  void check_supported(const Token& t) {
    if (t.kind == Tok::Unsupported) {
      std::string what;
      if (t.text == "/" || t.text == "/=") what = "division is not supported";
      else if (t.text == "%" || t.text == "%=") what = "modulo is not supported";
      else if (t.text == "->") what = "indirection is not supported";
      else if (t.text == "?") what = "the conditional operator is not supported";
      else what = "'" + std::string(t.text) + "' is not supported";
      fail(DiagKind::UnsupportedConstruct, t.span, what);
    }
    if (t.kind == Tok::Ident) {
      for (auto w : kRejectedWords)
        if (t.text == w)
          fail(DiagKind::UnsupportedConstruct, t.span,
               "'" + std::string(t.text) + "' is outside the supported subset");
    }
  }

  [[noreturn]] void fail(DiagKind kind, Span at, std::string message) const {
    throw FrontendError({{kind, path_, at, std::move(message)}});
  }

  std::string leading_comment(std::uint32_t after, std::uint32_t before) const {
    const Comment* found = nullptr;
    for (const auto& c : comments_)
      if (c.span.begin >= after && c.span.end <= before) found = &c;
    if (!found) return {};
    // Only a comment with nothing but whitespace between it and the definition.
    for (std::uint32_t i = found->span.end; i < before; ++i)
      if (!std::isspace(static_cast<unsigned char>(src_[i]))) return {};
    return found->text;
  }

  // ---- types and declarations ------------------------------------------
  void skip_qualifiers() {
    while (at(Tok::Ident) && std::find(kIgnoredQualifiers.begin(), kIgnoredQualifiers.end(),
                                       cur().text) != kIgnoredQualifiers.end())
      take();
  }

  bool at_type() const {
    if (at(Tok::KwInt) || at(Tok::KwBool) || at(Tok::KwVoid)) return true;
    if (at(Tok::Ident)) {
      for (auto w : kIgnoredQualifiers)
        if (cur().text == w) return true;
    }
    return false;
  }

  TypeRepr parse_base_type() {
    check_supported(cur());
    TypeRepr t;
    if (accept(Tok::KwInt)) t = TypeRepr::int_type(opts_.int_width);
    else if (accept(Tok::KwBool)) t = TypeRepr::bool_type();
    else if (accept(Tok::KwVoid)) t = TypeRepr::void_type();
    else fail(DiagKind::SyntaxError, cur().span, "expected a type");
    skip_qualifiers();
    if (at(Tok::Star)) fail(DiagKind::UnsupportedConstruct, cur().span, "pointers are not supported");
    return t;
  }

  std::uint32_t parse_array_length() {
    Token open = expect(Tok::LBracket, "'['");
    if (!at(Tok::Number)) fail(DiagKind::SyntaxError, cur().span, "expected array length");
    Token n = take();
    expect(Tok::RBracket, "']'");
    if (n.value < 1 || n.value > 4096)
      fail(DiagKind::TypeError, cover(open.span, n.span), "array length must be in [1, 4096]");
    if (at(Tok::LBracket))
      fail(DiagKind::UnsupportedConstruct, cur().span, "multi-dimensional arrays are not supported");
    return static_cast<std::uint32_t>(n.value);
  }

  std::int64_t parse_constant() {
    Span start = cur().span;
    bool negative = false;
    if (accept(Tok::Minus)) negative = true;
    if (accept(Tok::KwTrue)) return 1;
    if (accept(Tok::KwFalse)) return 0;
    if (!at(Tok::Number))
      fail(DiagKind::SyntaxError, start, "global initializers must be constants");
    auto v = static_cast<std::int64_t>(take().value);
    return negative ? -v : v;
  }

  GlobalDecl parse_global(TypeRepr base, const Token& name) {
    GlobalDecl g;
    g.name = std::string(name.text);
    g.path = path_;
    g.type = base;
    if (at(Tok::LBracket)) {
      if (!base.is_int()) fail(DiagKind::TypeError, cur().span, "only int arrays are supported");
      g.type = TypeRepr::array_type(base.width, parse_array_length());
    }
    if (accept(Tok::Assign)) {
      g.has_init = true;
      if (g.type.is_array()) {
        expect(Tok::LBrace, "'{'");
        if (!at(Tok::RBrace)) {
          do {
            g.init.push_back(parse_constant());
          } while (accept(Tok::Comma) && !at(Tok::RBrace));
        }
        expect(Tok::RBrace, "'}'");
        if (g.init.size() > g.type.length)
          fail(DiagKind::TypeError, from(name.span), "too many array initializers");
      } else {
        bool is_bool_literal = at(Tok::KwTrue) || at(Tok::KwFalse);
        if (g.type.is_bool() != is_bool_literal)
          fail(DiagKind::TypeError, cur().span, "initializer type does not match declaration");
        g.init.push_back(parse_constant());
      }
    }
    g.span = from(name.span);
    return g;
  }

  FunctionDef parse_function(TypeRepr ret, const Token& name, Span start) {
    FunctionDef fn;
    fn.name = std::string(name.text);
    fn.return_type = ret;
    fn.path = path_;
    expect(Tok::LParen, "'('");
    if (at(Tok::KwVoid) && peek().kind == Tok::RParen) {
      take();
    } else if (!at(Tok::RParen)) {
      do {
        skip_qualifiers();
        Span ps = cur().span;
        TypeRepr pt = parse_base_type();
        if (pt.is_void()) fail(DiagKind::TypeError, ps, "parameter declared void");
        Token pn = expect_ident("parameter name");
        if (at(Tok::LBracket))
          fail(DiagKind::UnsupportedConstruct, cur().span, "array parameters are not supported");
        fn.params.push_back({std::string(pn.text), pt, from(ps)});
      } while (accept(Tok::Comma));
    }
    expect(Tok::RParen, "')'");
    if (at(Tok::Semi))
      fail(DiagKind::UnsupportedConstruct, cur().span,
           "function prototypes are not supported; define the function instead");
    fn.body = parse_block();
    fn.body_text = std::string(src_.substr(fn.body->span.begin,
                                           fn.body->span.end - fn.body->span.begin));
    fn.span = from(start);
    return fn;
  }

  // ---- statements --------------------------------------------------------
  StmtPtr parse_block() {
    Token open = expect(Tok::LBrace, "'{'");
    std::vector<StmtPtr> body;
    while (!at(Tok::RBrace)) {
      if (at(Tok::End)) fail(DiagKind::SyntaxError, cur().span, "expected '}'");
      parse_statement_into(body);
    }
    take();
    return make_block(std::move(body), from(open.span));
  }

  // Branch and loop bodies are always blocks.
  StmtPtr parse_body() {
    if (at(Tok::LBrace)) return parse_block();
    Span start = cur().span;
    std::vector<StmtPtr> body;
    parse_statement_into(body);
    return make_block(std::move(body), from(start));
  }

  void parse_statement_into(std::vector<StmtPtr>& out) {
    check_supported(cur());
    if (at(Tok::Semi)) {
      take();
      return;
    }
    if (at_type()) {
      parse_local_decls(out);
      expect(Tok::Semi, "';'");
      return;
    }
    switch (cur().kind) {
    case Tok::LBrace: out.push_back(parse_block()); return;
    case Tok::KwIf: out.push_back(parse_if()); return;
    case Tok::KwWhile: out.push_back(parse_while()); return;
    case Tok::KwFor: out.push_back(parse_for()); return;
    case Tok::KwReturn: {
      Token kw = take();
      ExprPtr value;
      if (!at(Tok::Semi)) value = parse_expr();
      expect(Tok::Semi, "';'");
      out.push_back(make_stmt(StmtKind::Return, value, from(kw.span)));
      return;
    }
    case Tok::KwAssert:
    case Tok::KwAssume: {
      Token kw = take();
      expect(Tok::LParen, "'('");
      ExprPtr cond = parse_expr();
      expect(Tok::RParen, "')'");
      expect(Tok::Semi, "';'");
      out.push_back(make_stmt(kw.kind == Tok::KwAssert ? StmtKind::Assert : StmtKind::Assume,
                              cond, from(kw.span)));
      return;
    }
    case Tok::KwElse: fail(DiagKind::SyntaxError, cur().span, "'else' without 'if'");
    default: break;
    }
    out.push_back(parse_simple());
    expect(Tok::Semi, "';'");
  }

  void parse_local_decls(std::vector<StmtPtr>& out) {
    skip_qualifiers();
    Span start = cur().span;
    TypeRepr base = parse_base_type();
    if (base.is_void()) fail(DiagKind::TypeError, start, "variable declared void");
    do {
      Token name = expect_ident("variable name");
      Stmt s;
      s.kind = StmtKind::VarDecl;
      s.name = std::string(name.text);
      s.decl_type = base;
      if (at(Tok::LBracket)) {
        if (!base.is_int()) fail(DiagKind::TypeError, cur().span, "only int arrays are supported");
        s.decl_type = TypeRepr::array_type(base.width, parse_array_length());
      }
      if (accept(Tok::Assign)) {
        if (s.decl_type.is_array()) {
          expect(Tok::LBrace, "'{'");
          if (!at(Tok::RBrace)) {
            do {
              s.array_init.push_back(parse_expr());
            } while (accept(Tok::Comma) && !at(Tok::RBrace));
          }
          expect(Tok::RBrace, "'}'");
          if (s.array_init.size() > s.decl_type.length)
            fail(DiagKind::TypeError, from(name.span), "too many array initializers");
        } else {
          s.expr = parse_expr();
        }
      }
      s.span = from(start);
      out.push_back(std::make_shared<const Stmt>(std::move(s)));
    } while (accept(Tok::Comma));
  }

  StmtPtr parse_if() {
    Token kw = take();
    expect(Tok::LParen, "'('");
    ExprPtr cond = parse_expr();
    expect(Tok::RParen, "')'");
    Stmt s;
    s.kind = StmtKind::If;
    s.expr = cond;
    s.then_branch = parse_body();
    if (accept(Tok::KwElse)) s.else_branch = parse_body();
    s.span = from(kw.span);
    return std::make_shared<const Stmt>(std::move(s));
  }

  StmtPtr parse_while() {
    Token kw = take();
    expect(Tok::LParen, "'('");
    ExprPtr cond = parse_expr();
    expect(Tok::RParen, "')'");
    Stmt s;
    s.kind = StmtKind::While;
    s.expr = cond;
    s.then_branch = parse_body();
    s.span = from(kw.span);
    return std::make_shared<const Stmt>(std::move(s));
  }

  // for (init; cond; step) body  =>  { init; while (cond) { body...; step; } }
  StmtPtr parse_for() {
    Token kw = take();
    expect(Tok::LParen, "'('");
    std::vector<StmtPtr> outer;
    if (at_type()) parse_local_decls(outer);
    else if (!at(Tok::Semi)) outer.push_back(parse_simple());
    expect(Tok::Semi, "';'");
    ExprPtr cond;
    if (!at(Tok::Semi)) cond = parse_expr();
    Token semi = expect(Tok::Semi, "';'");
    StmtPtr step;
    if (!at(Tok::RParen)) step = parse_simple();
    expect(Tok::RParen, "')'");
    StmtPtr body = parse_body();
    if (!cond) cond = make_bool(true, semi.span);

    std::vector<StmtPtr> loop_body = body->body;
    Span loop_span = body->span;
    if (step) {
      loop_body.push_back(step);
      loop_span = cover(step->span, body->span);
    }
    Stmt loop;
    loop.kind = StmtKind::While;
    loop.expr = cond;
    loop.then_branch = make_block(std::move(loop_body), loop_span);
    loop.span = from(kw.span);
    StmtPtr loop_ptr = std::make_shared<const Stmt>(std::move(loop));
    if (outer.empty()) return loop_ptr;
    outer.push_back(loop_ptr);
    return make_block(std::move(outer), from(kw.span));
  }

  // Assignment, increment, or expression statement (no trailing ';').
  StmtPtr parse_simple() {
    Span start = cur().span;
    if (at(Tok::PlusPlus) || at(Tok::MinusMinus)) {
      Token op = take();
      ExprPtr target = parse_unary();
      return make_increment(target, op, from(start));
    }
    ExprPtr lhs = parse_expr();
    if (at(Tok::PlusPlus) || at(Tok::MinusMinus)) {
      Token op = take();
      return make_increment(lhs, op, from(start));
    }
    if (at(Tok::Assign)) {
      take();
      ExprPtr rhs = parse_expr();
      return make_assign(lhs, rhs, from(start));
    }
    static const std::array<std::pair<Tok, BinaryOp>, 7> compound{{
        {Tok::PlusAssign, BinaryOp::Add}, {Tok::MinusAssign, BinaryOp::Sub},
        {Tok::StarAssign, BinaryOp::Mul}, {Tok::AmpAssign, BinaryOp::BitAnd},
        {Tok::PipeAssign, BinaryOp::BitOr}, {Tok::CaretAssign, BinaryOp::BitXor},
        {Tok::ShlAssign, BinaryOp::Shl},
    }};
    for (const auto& [tok, op] : compound) {
      if (at(tok)) {
        take();
        ExprPtr rhs = parse_expr();
        Span s = from(start);
        check_repeatable(lhs);
        return make_assign(lhs, make_binary(op, lhs, rhs, s), s);
      }
    }
    if (at(Tok::ShrAssign)) {
      take();
      ExprPtr rhs = parse_expr();
      Span s = from(start);
      check_repeatable(lhs);
      return make_assign(lhs, make_binary(BinaryOp::Shr, lhs, rhs, s), s);
    }
    return make_stmt(StmtKind::ExprStmt, lhs, from(start));
  }

  // `a[i] op= e` evaluates the index twice after desugaring.
  void check_repeatable(const ExprPtr& target) {
    bool has_effects = false;
    for_each_expr(*target, [&](const Expr& e) {
      if (e.kind == ExprKind::Call || e.kind == ExprKind::NondetInt ||
          e.kind == ExprKind::NondetBool)
        has_effects = true;
    });
    if (has_effects)
      fail(DiagKind::UnsupportedConstruct, target->span,
           "compound assignment to an element whose index has side effects");
  }

  StmtPtr make_increment(const ExprPtr& target, const Token& op, Span span) {
    check_repeatable(target);
    auto one = make_int(1, op.span);
    auto value = make_binary(op.kind == Tok::PlusPlus ? BinaryOp::Add : BinaryOp::Sub, target,
                             one, span);
    return make_assign(target, value, span);
  }

  StmtPtr make_assign(const ExprPtr& lhs, const ExprPtr& rhs, Span span) {
    Stmt s;
    s.kind = StmtKind::Assign;
    s.expr = rhs;
    s.span = span;
    if (lhs->kind == ExprKind::VarRef) {
      s.name = lhs->name;
    } else if (lhs->kind == ExprKind::ArrayIndex) {
      s.name = lhs->name;
      s.index = lhs->operands[0];
    } else {
      fail(DiagKind::SyntaxError, lhs->span, "left side of assignment is not assignable");
    }
    return std::make_shared<const Stmt>(std::move(s));
  }

  // ---- expressions -------------------------------------------------------
  ExprPtr parse_expr() { return parse_level(0); }

  ExprPtr parse_level(std::size_t level) {
    if (level == kLevels.size()) return parse_unary();
    ExprPtr lhs = parse_level(level + 1);
    while (true) {
      check_supported(cur());
      const BinaryLevel* match = nullptr;
      for (const auto& candidate : kLevels[level])
        if (at(candidate.tok)) match = &candidate;
      if (!match) return lhs;
      take();
      ExprPtr rhs = parse_level(level + 1);
      lhs = make_binary(match->op, lhs, rhs, cover(lhs->span, rhs->span));
    }
  }

  ExprPtr parse_unary() {
    check_supported(cur());
    Span start = cur().span;
    switch (cur().kind) {
    case Tok::Minus:
    case Tok::Bang:
    case Tok::Tilde: {
      Token op = take();
      ExprPtr operand = parse_unary();
      UnaryOp u = op.kind == Tok::Minus ? UnaryOp::Neg
                : op.kind == Tok::Bang  ? UnaryOp::Not
                                        : UnaryOp::BitNot;
      return make_unary(u, operand, from(start));
    }
    case Tok::Plus: take(); return parse_unary();
    case Tok::Star:
      fail(DiagKind::UnsupportedConstruct, start, "indirection is not supported");
    case Tok::Amp:
      fail(DiagKind::UnsupportedConstruct, start, "taking addresses is not supported");
    case Tok::PlusPlus:
    case Tok::MinusMinus:
      fail(DiagKind::UnsupportedConstruct, start,
           "increments are only supported as statements");
    default: return parse_postfix();
    }
  }

  ExprPtr parse_postfix() {
    ExprPtr e = parse_primary();
    check_supported(cur());
    if (at(Tok::LBracket)) {
      if (e->kind != ExprKind::VarRef)
        fail(DiagKind::UnsupportedConstruct, cur().span, "only named arrays can be indexed");
      take();
      ExprPtr index = parse_expr();
      expect(Tok::RBracket, "']'");
      e = make_index(e->name, index, from(e->span));
      if (at(Tok::LBracket))
        fail(DiagKind::UnsupportedConstruct, cur().span,
             "multi-dimensional arrays are not supported");
    }
    return e;
  }

  ExprPtr parse_primary() {
    check_supported(cur());
    Span start = cur().span;
    switch (cur().kind) {
    case Tok::Number: return make_int(static_cast<std::int64_t>(take().value), start);
    case Tok::KwTrue: take(); return make_bool(true, start);
    case Tok::KwFalse: take(); return make_bool(false, start);
    case Tok::KwNondetInt:
    case Tok::KwNondetBool: {
      Token kw = take();
      expect(Tok::LParen, "'('");
      expect(Tok::RParen, "')'");
      return make_nondet(kw.kind == Tok::KwNondetBool, from(start));
    }
    case Tok::LParen: {
      take();
      if (at_type()) fail(DiagKind::UnsupportedConstruct, cur().span, "casts are not supported");
      ExprPtr inner = parse_expr();
      expect(Tok::RParen, "')'");
      return inner;
    }
    case Tok::Ident: {
      Token name = take();
      if (accept(Tok::LParen)) {
        std::vector<ExprPtr> args;
        if (!at(Tok::RParen)) {
          do {
            args.push_back(parse_expr());
          } while (accept(Tok::Comma));
        }
        expect(Tok::RParen, "')'");
        return make_call(std::string(name.text), std::move(args), from(start));
      }
      return make_var(std::string(name.text), start);
    }
    default:
      fail(DiagKind::SyntaxError, start,
           cur().kind == Tok::End ? "unexpected end of input" : "expected an expression");
    }
  }

  std::string_view src_;
  std::string path_;
  ParseOptions opts_;
  std::vector<Token> toks_;
  std::vector<Comment> comments_;
  std::size_t pos_ = 0;
  Span last_end_;
};

} // namespace

SourceUnit parse_unit(std::string_view source, std::string path, const ParseOptions& options) {
  return Parser(source, std::move(path), options).run();
}

} // namespace cfv::frontend
