#include <cfv/changes/changeset.hpp>
#include <cfv/equivalence/symbols.hpp>
#include <cfv/frontend/analysis.hpp>
#include <cfv/frontend/printer.hpp>
#include <cfv/harness/generalize.hpp>
#include <cfv/verification/verify.hpp>

#include <gtest/gtest.h>

#include <random>

namespace {

using namespace cfv;
using changes::Snapshot;
using frontend::FrontendError;
using harness::TestCase;

const char* kLib =
    "int g(int x) { return x * 2; }\n"
    "int f(int x) { return g(x) + 1; }\n"
    "int k(bool b, int y) { if (b) { return y; } return 0; }\n"
    "int solo() { return 4; }\n";

Snapshot lib() { return Snapshot::from_sources("lib", {{"lib.c", kLib}}, 8); }

std::vector<TestCase> suite(const Snapshot& s, const std::string& src) {
  return harness::tests_from_sources({{"suite.c", src}}, s);
}

TEST(TestSuite, LoadsSortedWithSections) {
  auto s = lib();
  auto tests = suite(s, "// calls f once\nvoid test_z() { assert(f(1) == 3); }\nvoid test_a() { assert(solo() == 4); }\n");
  ASSERT_EQ(tests.size(), 2u);
  EXPECT_EQ(tests[0].name, "test_a");
  EXPECT_EQ(tests[0].section, "test_a");
  EXPECT_EQ(tests[1].section, "calls f once");
}

TEST(TestSuite, RejectsMalformedTests) {
  auto s = lib();
  EXPECT_THROW(suite(s, "void helper() { assert(true); }"), FrontendError);
  EXPECT_THROW(suite(s, "void test_n() { int x = 1; }"), FrontendError);
  EXPECT_THROW(suite(s, "int test_r() { assert(true); return 0; }"), FrontendError);
  EXPECT_THROW(suite(s, "int extra;\nvoid test_g() { assert(true); }"), FrontendError);
  EXPECT_THROW(suite(s, "void test_u() { assert(nope(1) == 1); }"), FrontendError);
}

TEST(CallGraph, ReachabilityIsReflexiveTransitive) {
  auto s = lib();
  auto tests = suite(s, "void test_f() { assert(f(1) == 3); }");
  auto cg = harness::build_call_graph(s, tests);
  EXPECT_EQ(cg.reachable("test_f"), (std::set<std::string>{"test_f", "f", "g"}));
  EXPECT_EQ(cg.reachable("solo"), (std::set<std::string>{"solo"}));
  auto empty = harness::build_call_graph(s, {});
  EXPECT_EQ(empty.edges().size(), s.functions().size());
}

TEST(Selection, FollowsNonEquivalentChanges) {
  auto old_snap = lib();
  auto new_snap = Snapshot::from_sources(
      "lib", {{"lib.c", std::string(kLib).replace(std::string(kLib).find("x * 2"), 5, "x + x")}}, 8);
  auto tests = suite(new_snap, "void test_f() { assert(f(1) == 3); }\nvoid test_s() { assert(solo() == 4); }\n"
                               "void test_g() { assert(g(2) == 4); }\n");
  auto cs = changes::compute_changeset(old_snap, new_snap);
  ASSERT_EQ(cs.modified.size(), 1u);
  auto cg = harness::build_call_graph(new_snap, tests);

  auto none = harness::select_tests(tests, cs, cg, {"g"});
  EXPECT_TRUE(none.empty());

  auto sel = harness::select_tests(tests, cs, cg, {});
  ASSERT_EQ(sel.size(), 2u);
  EXPECT_EQ(sel[0].test->name, "test_f");
  EXPECT_EQ(sel[1].test->name, "test_g");
  EXPECT_EQ(sel[0].triggered_by, std::vector<std::string>{"g"});
}

// Every test whose reachable set meets a changed function is selected, and
// nothing else; checked against a breadth-first search over random graphs.
TEST(SelectionProperty, ConservativeAgainstBruteForce) {
  std::mt19937 rng(5);
  for (int round = 0; round < 50; ++round) {
    harness::CallGraph cg;
    const int n = 12;
    std::vector<std::vector<int>> adj(n + 4);
    for (int i = 0; i < n + 4; ++i) {
      cg.add_node("n" + std::to_string(i));
      for (int j = 0; j < n; ++j)
        if (rng() % 6 == 0) {
          adj[i].push_back(j);
          cg.add_edge("n" + std::to_string(i), "n" + std::to_string(j));
        }
    }
    std::set<int> changed;
    for (int j = 0; j < n; ++j)
      if (rng() % 5 == 0) changed.insert(j);
    for (int t = n; t < n + 4; ++t) {
      std::vector<bool> seen(n + 4);
      std::vector<int> q{t};
      seen[t] = true;
      bool hit = false;
      while (!q.empty()) {
        int x = q.back();
        q.pop_back();
        hit |= changed.count(x) > 0;
        for (int y : adj[x])
          if (!seen[y]) seen[y] = true, q.push_back(y);
      }
      auto reach = cg.reachable("n" + std::to_string(t));
      bool meets = std::any_of(changed.begin(), changed.end(),
                               [&](int c) { return reach.count("n" + std::to_string(c)) > 0; });
      EXPECT_EQ(meets, hit);
    }
  }
}

TEST(Generalize, LiteralArgumentBecomesNondet) {
  auto s = lib();
  auto t = suite(s, "void test_f() {\n  int r = f(5);\n  assert(r == 11);\n}").front();
  auto g = harness::generalize(t, {"f"});
  EXPECT_EQ(g.kind, harness::Generalization::Automatic);
  ASSERT_EQ(g.substitutions.size(), 1u);
  EXPECT_EQ(g.substitutions[0].original, 5);
  EXPECT_EQ(g.substitutions[0].argument, 0u);
  EXPECT_EQ(g.substitutions[0].symbol, "nondet:<self>#0");
  EXPECT_EQ(frontend::print_stmt(*g.body->body), "{\n  int r = f(nondet_int());\n  assert((r == 11));\n}\n");
}

TEST(Generalize, NonTargetsAndExpressionsUntouched) {
  auto s = lib();
  auto t = suite(s, "void test_f() { int y = 2; assert(f(y) == 5); assert(solo() == 4); }").front();
  auto g = harness::generalize(t, {"f"});
  EXPECT_EQ(g.kind, harness::Generalization::None);
  EXPECT_TRUE(g.substitutions.empty());
  EXPECT_EQ(g.body, t.body);
}

TEST(Generalize, ExistingNondetMarksManualAndKeepsNumbering) {
  auto s = lib();
  auto t = suite(s, "void test_k() {\n  int y = nondet_int();\n  int r = k(true, -3);\n  int q = k(false, y);\n"
                    "  assert(r == -3 || q == 0);\n}")
               .front();
  auto g = harness::generalize(t, {"k"});
  EXPECT_EQ(g.kind, harness::Generalization::Manual);
  ASSERT_EQ(g.substitutions.size(), 3u);
  EXPECT_TRUE(g.substitutions[0].is_bool);
  EXPECT_EQ(g.substitutions[1].original, -3);
  EXPECT_EQ(g.substitutions[0].symbol, "nondet:<self>#1");
  EXPECT_EQ(g.substitutions[1].symbol, "nondet:<self>#2");
  EXPECT_EQ(g.substitutions[2].symbol, "nondet:<self>#3");
  EXPECT_EQ(g.body->nondet_sites, 4u);
}

// Putting the recorded literals back reproduces the original test, and the
// statement skeleton never changes.
TEST(GeneralizeProperty, SubstitutionRoundTrip) {
  auto s = lib();
  auto t = suite(s, "void test_r() {\n  int a = f(3) + g(-2);\n  int i = 0;\n  while (i < 2) {\n"
                    "    a = a + k(true, 7);\n    i = i + 1;\n  }\n  assert(a != f(1));\n}")
               .front();
  auto g = harness::generalize(t, {"f", "g", "k"});
  ASSERT_EQ(g.substitutions.size(), 4u); // the call inside assert stays verbatim
  verification::Counterexample cx;
  for (const auto& sub : g.substitutions) cx.valuation[sub.symbol] = sub.original;
  auto back = verification::concretize(g, cx);
  EXPECT_TRUE(frontend::equal_function(frontend::normalize_alpha(*back.body), frontend::normalize_alpha(*t.body)));

  std::vector<frontend::StmtKind> k1, k2;
  frontend::for_each_stmt(*t.body->body, [&](const frontend::Stmt& x) { k1.push_back(x.kind); });
  frontend::for_each_stmt(*g.body->body, [&](const frontend::Stmt& x) { k2.push_back(x.kind); });
  EXPECT_EQ(k1, k2);
}

TEST(GeneralizeProperty, OriginalFailureImpliesGeneralizedFailure) {
  auto s = lib();
  auto t = suite(s, "void test_w() { int r = f(3); assert(r == 8); }").front();
  ASSERT_EQ(verification::interpret_concrete(t, s).outcome, verification::ConcreteOutcome::AssertFail);
  auto g = harness::generalize(t, {"f"});
  EXPECT_TRUE(verification::verify_test(g, s, {4, 0, 60}).fail());
}

} // namespace
