#include <cfv/frontend/analysis.hpp>
#include <cfv/frontend/parser.hpp>
#include <cfv/frontend/printer.hpp>
#include <cfv/frontend/type_check.hpp>

#include <gtest/gtest.h>

using namespace cfv::frontend;

namespace {

SourceUnit checked(const std::string& src, unsigned width = 32) {
  return type_check(parse_unit(src, "t.c", {width}));
}

const FunctionDef& fn(const SourceUnit& u, const std::string& name) {
  for (const auto* f : u.functions())
    if (f->name == name) return *f;
  throw std::out_of_range(name);
}

DiagKind parse_error(const std::string& src) {
  try {
    checked(src);
  } catch (const FrontendError& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no diagnostic for: " << src;
  return DiagKind::InputError;
}

} // namespace

TEST(Parse, IdentityFunction) {
  SourceUnit u = parse_unit("int f(int x){return x;}", "a.c");
  ASSERT_EQ(u.functions().size(), 1u);
  EXPECT_EQ(u.functions()[0]->name, "f");
  EXPECT_EQ(u.functions()[0]->params.size(), 1u);
}

TEST(Parse, CommentsAreStripped) {
  SourceUnit a = parse_unit("int f(int x){return x;}", "a.c");
  SourceUnit b = parse_unit("int f(int x){/*c*/return x;}", "b.c");
  EXPECT_TRUE(equal_unit(a, b));
}

TEST(Parse, DivisionIsUnsupportedAtTheSlash) {
  try {
    parse_unit("int f(int x){return x / 2;}", "a.c");
    FAIL();
  } catch (const FrontendError& e) {
    EXPECT_EQ(e.kind(), DiagKind::UnsupportedConstruct);
    EXPECT_EQ(e.diagnostics()[0].span.column, 23u);
    EXPECT_EQ(e.diagnostics()[0].format().rfind("a.c:1:23: error:", 0), 0u);
  }
}

TEST(Parse, RejectsOutOfSubsetC) {
  EXPECT_EQ(parse_error("int f(int x){return x % 2;}"), DiagKind::UnsupportedConstruct);
  EXPECT_EQ(parse_error("#include <stdio.h>\nint f(){return 0;}"), DiagKind::UnsupportedConstruct);
  EXPECT_EQ(parse_error("int f(int x){return *x;}"), DiagKind::UnsupportedConstruct);
  EXPECT_EQ(parse_error("int f(int x){return &x;}"), DiagKind::UnsupportedConstruct);
  EXPECT_EQ(parse_error("int f(int x){return (x;}"), DiagKind::SyntaxError);
}

TEST(Parse, EverySpanNestsInItsParent) {
  SourceUnit u = parse_unit(
      "int g;\nint f(int a, int b) {\n  int s = 0;\n  for (int i = 0; i < a; i++) {\n"
      "    if (i > b && b != 3) { s += i; } else { s = s - 1; }\n  }\n  return s * 2;\n}\n",
      "a.c");
  const FunctionDef& f = *u.functions()[0];
  std::function<void(const Stmt&, const Span&)> check = [&](const Stmt& s, const Span& parent) {
    EXPECT_TRUE(parent.contains(s.span));
    auto check_expr = [&](const ExprPtr& e) {
      if (!e) return;
      for_each_expr(*e, [&](const Expr& x) { EXPECT_TRUE(s.span.contains(x.span)); });
    };
    check_expr(s.expr);
    check_expr(s.index);
    for (const auto& c : s.body) check(*c, s.span);
    if (s.then_branch) check(*s.then_branch, s.span);
    if (s.else_branch) check(*s.else_branch, s.span);
  };
  check(*f.body, f.span);
}

TEST(Parse, RoundTripThroughPrinter) {
  const char* src =
      "int data[4] = {1, -2, 3};\nbool flag = true;\n"
      "// adds\nint add(int a, int b) { return a + b * -a; }\n"
      "void g() { int t[3]; t[1] = ~add(1, 2) << 3; flag = !flag || t[1] >= 2; "
      "while (flag) { flag = false; } assume(t[0] == 0); assert(flag != true); }\n";
  SourceUnit a = parse_unit(src, "a.c");
  SourceUnit b = parse_unit(print_unit(a), "b.c");
  EXPECT_TRUE(equal_unit(a, b)) << print_unit(a);
  EXPECT_EQ(fn(a, "add").leading_comment, "adds");
}

TEST(TypeCheck, ArgumentTypeMismatch) {
  EXPECT_EQ(parse_error("int f(int x){return x;} int g(){return f(true);}"), DiagKind::TypeError);
}

TEST(TypeCheck, AssertTakesBoolOnly) {
  EXPECT_EQ(parse_error("void t(){int x = 1; assert(x);}"), DiagKind::TypeError);
}

TEST(TypeCheck, UndefinedSymbols) {
  EXPECT_EQ(parse_error("int f(){return y;}"), DiagKind::UndefinedSymbol);
  EXPECT_EQ(parse_error("int f(){return h(1);}"), DiagKind::UndefinedSymbol);
}

TEST(TypeCheck, MissingReturnAndShadowing) {
  EXPECT_EQ(parse_error("int f(int x){if (x > 0) { return 1; }}"), DiagKind::TypeError);
  EXPECT_EQ(parse_error("int g; int f(int x){int g = 1; return g;}"), DiagKind::TypeError);
  EXPECT_EQ(parse_error("int f(int x){int x = 1; return x;}"), DiagKind::TypeError);
  EXPECT_EQ(parse_error("int f(){return 1;} int f(){return 2;}"), DiagKind::TypeError);
  EXPECT_NO_THROW(checked("int f(){while (true) { } }"));
}

TEST(TypeCheck, AnnotatesAndComputesGlobalSets) {
  SourceUnit u = checked(
      "int a[4]; int n; bool ok;\n"
      "int h(int i){ return a[i]; }\n"
      "void w(int v){ a[n] = v; n = n + 1; ok = h(0) == v; }\n");
  const FunctionDef& h = fn(u, "h");
  EXPECT_TRUE(h.typed);
  EXPECT_EQ(h.reads_globals, (std::set<std::string>{"a"}));
  EXPECT_TRUE(h.writes_globals.empty());
  const FunctionDef& w = fn(u, "w");
  EXPECT_EQ(w.reads_globals, (std::set<std::string>{"n"}));
  EXPECT_EQ(w.writes_globals, (std::set<std::string>{"a", "n", "ok"}));
  EXPECT_EQ(w.callees, (std::set<std::string>{"h"}));
  const Expr& ret = *h.body->body[0]->expr;
  EXPECT_EQ(ret.type, TypeRepr::int_type(32));
}

TEST(TypeCheck, NumbersNondetSitesInPreOrder) {
  SourceUnit u = checked("void t(){ int x = nondet_int(); bool b = nondet_bool(); "
                         "if (b) { x = x + nondet_int(); } assert(x != 3); }");
  const FunctionDef& t = fn(u, "t");
  EXPECT_EQ(t.nondet_sites, 3u);
  std::vector<std::uint32_t> sites;
  for_each_expr(*t.body, [&](const Expr& e) {
    if (e.kind == ExprKind::NondetInt || e.kind == ExprKind::NondetBool) sites.push_back(e.site);
  });
  EXPECT_EQ(sites, (std::vector<std::uint32_t>{0, 1, 2}));
}

TEST(TypeCheck, WidthIsConfigurable) {
  SourceUnit u = checked("int f(int x){ return x + 1; }", 8);
  EXPECT_EQ(fn(u, "f").params[0].type.width, 8);
  EXPECT_THROW(parse_unit("int f(){return 0;}", "a.c", {12}), FrontendError);
}

TEST(NormalizeAlpha, CanonicalNames) {
  SourceUnit u = checked("int f(int a){int b=a; return b;}");
  SourceUnit expected = parse_unit("int f(int p0){int v0=p0; return v0;}", "e.c");
  FunctionDef n = normalize_alpha(fn(u, "f"));
  EXPECT_EQ(n.name, kSelfPlaceholder);
  FunctionDef e = normalize_alpha(*expected.functions()[0]);
  EXPECT_TRUE(equal_function(n, e));
  EXPECT_EQ(print_stmt(*n.body), "{\n  int v0 = p0;\n  return v0;\n}\n");
}

TEST(NormalizeAlpha, IdempotentAndAlphaInvariant) {
  SourceUnit u = checked(
      "int f(int a, int b){int s = 0; while (s < a) { int t = b; s = s + t; } return f(s, 1);}\n"
      "int g(int x, int y){int acc = 0; while (acc < x) { int k = y; acc = acc + k; } return g(acc, 1);}\n");
  FunctionDef nf = normalize_alpha(fn(u, "f"));
  EXPECT_TRUE(equal_function(normalize_alpha(nf), nf));
  EXPECT_TRUE(equal_function(nf, normalize_alpha(fn(u, "g"))));
}

TEST(NormalizeAlpha, ForAndWhileAgree) {
  SourceUnit u = checked(
      "int f(int n){int s = 0; for (int i = 0; i < n; i++) { s += i; } return s;}\n"
      "int g(int n){int s = 0; int i = 0; while (i < n) { s = s + i; i = i + 1; } return s;}\n");
  EXPECT_TRUE(equal_function(normalize_alpha(fn(u, "f")), normalize_alpha(fn(u, "g"))));
}

TEST(NormalizeAlpha, PreservesComplexityAndGlobalSets) {
  SourceUnit u = checked("int n; int f(int a){ if (a > 0 && n < 3) { n = a; } return n; }");
  const FunctionDef& f = fn(u, "f");
  FunctionDef nf = normalize_alpha(f);
  EXPECT_EQ(cyclomatic_complexity(nf), cyclomatic_complexity(f));
  EXPECT_EQ(nf.reads_globals, f.reads_globals);
  EXPECT_EQ(nf.writes_globals, f.writes_globals);
}

TEST(Complexity, DeclaredFormula) {
  SourceUnit u = checked(
      "int line(int a){ int b = a + 1; return b * 2; }\n"
      "int one_if(int a, int b){ if (a > 0 && b > 0) { return 1; } return 0; }\n"
      "int mixed(int a, int b){ int i = 0; if (a > 0 && b > 0) { a = 1; } "
      "while (i < 3) { i = i + 1; } return i; }\n"
      "int forloop(int n){ int s = 0; for (int i = 0; i < n || s > 9; i++) { s += 1; } return s; }\n");
  EXPECT_EQ(cyclomatic_complexity(fn(u, "line")), 1u);
  EXPECT_EQ(cyclomatic_complexity(fn(u, "one_if")), 3u);
  EXPECT_EQ(cyclomatic_complexity(fn(u, "mixed")), 4u);
  EXPECT_EQ(cyclomatic_complexity(fn(u, "forloop")), 3u);
}
