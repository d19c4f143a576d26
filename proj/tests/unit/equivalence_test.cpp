#include <cfv/changes/changeset.hpp>
#include <cfv/equivalence/check.hpp>
#include <cfv/equivalence/symbols.hpp>

#include "oracles.hpp"
#include "random_program.hpp"

#include <gtest/gtest.h>

#include <chrono>

namespace {

using namespace cfv;
using changes::Snapshot;
using equivalence::check_equivalence;
using equivalence::EquivalenceVerdict;
using equivalence::UnrollConfig;

Snapshot snap(const std::string& src, unsigned width = 4, const std::string& label = "s") {
  return Snapshot::from_sources(label, {{label + ".c", src}}, width);
}

struct Pair {
  Snapshot old_snap;
  Snapshot new_snap;
};

EquivalenceVerdict check(const Pair& p, const std::string& fn, UnrollConfig cfg = {4, 0, 60}) {
  auto cs = changes::compute_changeset(p.old_snap, p.new_snap);
  auto renames = cs.rename_map();
  equivalence::CheckOptions opts;
  opts.renames = &renames;
  opts.changed_globals = &cs.changed_globals;
  return check_equivalence(*p.old_snap.function(fn), *p.new_snap.function(fn), p.old_snap, p.new_snap, cfg,
                           opts);
}

TEST(Equivalence, AlphaRenamedBodyIsStructural) {
  Pair p{snap("int f(int a) { int t = a + 1; return t * 2; }"),
         snap("// doubled successor\nint f(int b) {\n  int u = b + 1; // bump\n  return u * 2;\n}")};
  auto v = check(p, "f");
  ASSERT_TRUE(v.equivalent());
  EXPECT_EQ(v.as_equivalent().mode, equivalence::Equivalent::Mode::Structural);
  EXPECT_EQ(v.solver_calls, 0u);
}

TEST(Equivalence, RenamedCalleeIsStructural) {
  Pair p{snap("int inc(int x) { return x + 1; }\nint f(int a) { return inc(a); }"),
         snap("int succ(int x) { return x + 1; }\nint f(int a) { return succ(a); }")};
  auto cs = changes::compute_changeset(p.old_snap, p.new_snap);
  ASSERT_EQ(cs.renamed.size(), 1u);
  auto v = check(p, "f");
  ASSERT_TRUE(v.equivalent());
  EXPECT_EQ(v.solver_calls, 0u);
}

TEST(Equivalence, FormallyEquivalentRewrite) {
  Pair p{snap("int f(int a, int b) { return a * 2 + b; }"), snap("int f(int a, int b) { return b + (a << 1); }")};
  auto v = check(p, "f");
  ASSERT_TRUE(v.equivalent());
  EXPECT_EQ(v.as_equivalent().mode, equivalence::Equivalent::Mode::Formal);
  EXPECT_TRUE(v.as_equivalent().complete);
  EXPECT_GE(v.solver_calls, 1u);
}

TEST(Equivalence, DifferingReturnHasReplayableWitness) {
  Pair p{snap("int f(int a) { return a + 1; }"), snap("int f(int a) { if (a == 3) { return 0; } return a + 1; }")};
  auto v = check(p, "f");
  ASSERT_TRUE(v.not_equivalent());
  const auto& ne = v.as_not_equivalent();
  EXPECT_EQ(ne.reason, equivalence::NotEquivalent::Reason::Behavior);
  EXPECT_EQ(ne.witness.at("arg0"), 3);
  EXPECT_EQ(ne.old_observables.at("return"), 4);
  EXPECT_EQ(ne.new_observables.at("return"), 0);
}

TEST(Equivalence, GlobalWriteDifferenceIsObserved) {
  Pair p{snap("int g;\nint f(int a) { g = a; return 0; }"), snap("int g;\nint f(int a) { g = a + 0; if (a > 5) { g = 5; } return 0; }")};
  auto v = check(p, "f");
  ASSERT_TRUE(v.not_equivalent());
  EXPECT_GT(v.as_not_equivalent().witness.at("arg0"), 5);
}

TEST(Equivalence, WriteOnlyInNewVersionComparesAgainstInitialValue) {
  Pair p{snap("int g;\nint f(int a) { return a; }"), snap("int g;\nint f(int a) { g = g; return a; }")};
  auto v = check(p, "f");
  EXPECT_TRUE(v.equivalent());
  Pair q{snap("int g;\nint f(int a) { return a; }"), snap("int g;\nint f(int a) { g = 0; return a; }")};
  auto w = check(q, "f");
  ASSERT_TRUE(w.not_equivalent());
  EXPECT_NE(w.as_not_equivalent().witness.at("g.g"), 0);
}

TEST(Equivalence, AssertionOutcomeIsObservable) {
  Pair p{snap("int f(int a) { return a; }"), snap("int f(int a) { assert(a != 7); return a; }")};
  auto v = check(p, "f");
  ASSERT_TRUE(v.not_equivalent());
  EXPECT_EQ(v.as_not_equivalent().witness.at("arg0"), 7);
  EXPECT_EQ(v.as_not_equivalent().new_observables.at("assertion_ok"), 0);
}

TEST(Equivalence, AssumptionsRestrictTheDomain) {
  Pair p{snap("int f(int a) { assume(a > 0); return a; }"),
         snap("int f(int a) { assume(a > 0); if (a < 0) { return 0; } return a; }")};
  EXPECT_TRUE(check(p, "f").equivalent());
}

TEST(Equivalence, NegativeIndexSupportRemoved) {
  const char* old_src =
      "int data[4];\n"
      "int at(int i) {\n  if (i < 0) { i = i + 4; }\n  if (i < 0 || i >= 4) { return 0; }\n  return data[i];\n}\n";
  const char* new_src =
      "int data[4];\n"
      "int at(int i) {\n  if (i < 0 || i >= 4) { return 0; }\n  return data[i];\n}\n";
  Pair p{snap(old_src), snap(new_src)};
  auto v = check(p, "at");
  ASSERT_TRUE(v.not_equivalent());
  EXPECT_LT(v.as_not_equivalent().witness.at("arg0"), 0);
  auto oracle = cfv::testing::exhaustive_equivalence(*p.old_snap.function("at"), p.old_snap,
                                                *p.new_snap.function("at"), p.new_snap, 4, 4);
  EXPECT_FALSE(oracle.equivalent);
}

TEST(Equivalence, SignatureChangeNeedsNoSolver) {
  Pair p{snap("int f(int a) { return a; }"), snap("int f(int a, int b) { return a; }")};
  auto v = check(p, "f");
  ASSERT_TRUE(v.not_equivalent());
  EXPECT_EQ(v.as_not_equivalent().reason, equivalence::NotEquivalent::Reason::SignatureMismatch);
  EXPECT_EQ(v.solver_calls, 0u);
  Pair q{snap("int f(int a) { return a; }"), snap("bool f(int a) { return a > 0; }")};
  EXPECT_TRUE(check(q, "f").not_equivalent());
}

TEST(Equivalence, ChangedInitializerIsUnsupported) {
  Pair p{snap("int k = 1;\nint f(int a) { return a + k; }"), snap("int k = 2;\nint f(int a) { return a + k; }")};
  auto v = check(p, "f");
  ASSERT_TRUE(v.unknown());
  EXPECT_EQ(v.as_unknown().reason, equivalence::Unknown::Reason::Unsupported);
}

TEST(Equivalence, PartiallyUnwoundLoopIsIncompleteEquivalent) {
  Pair p{snap("int f(int x) { while (x != 5) { x = x + 1; } return x; }"), snap("int f(int x) { return 5; }")};
  auto v = check(p, "f", {2, 0, 60});
  ASSERT_TRUE(v.equivalent());
  EXPECT_FALSE(v.as_equivalent().complete);
}

TEST(Equivalence, NoInputWithinBoundIsUnknown) {
  Pair p{snap("int f(int x) { int i = 0; while (i < 6) { i = i + 1; } return i; }"),
         snap("int f(int x) { return 6; }")};
  auto v = check(p, "f", {4, 0, 60});
  ASSERT_TRUE(v.unknown());
  EXPECT_EQ(v.as_unknown().reason, equivalence::Unknown::Reason::UnwindingIncomplete);
  EXPECT_TRUE(check(p, "f", {7, 0, 60}).equivalent());
}

TEST(Equivalence, HardMultiplicationTimesOut) {
  Pair p{snap("int f(int a, int b, int c) { return (a * b) * c; }", 32),
         snap("int f(int a, int b, int c) { return a * (b * c); }", 32)};
  auto start = std::chrono::steady_clock::now();
  auto v = check(p, "f", {8, 0, 1.0});
  double took = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  ASSERT_TRUE(v.unknown());
  EXPECT_EQ(v.as_unknown().reason, equivalence::Unknown::Reason::Timeout);
  EXPECT_LT(took, 5.0);
}

TEST(Equivalence, NondetSitesPairPositionally) {
  Pair p{snap("int f() { int x = nondet_int(); return x + x; }"), snap("int f() { int y = nondet_int(); return y * 2; }")};
  EXPECT_TRUE(check(p, "f").equivalent());
  Pair q{snap("int f() { return nondet_int(); }"), snap("int f() { int z = nondet_int(); return nondet_int(); }")};
  EXPECT_TRUE(check(q, "f").not_equivalent());
}

TEST(Equivalence, CalleeChangesAreSeenThroughInlining) {
  Pair p{snap("int h(int x) { return x + 1; }\nint f(int a) { return h(a) * 2; }"),
         snap("int h(int x) { return x + 2; }\nint f(int a) { return h(a) * 2; }")};
  EXPECT_TRUE(check(p, "f").not_equivalent());
}

TEST(Equivalence, MiterRejectsSeparateStores) {
  auto s = snap("int f(int a) { return a; }");
  auto a = equivalence::encode_ssa(*s.function("f"), s, {});
  auto b = equivalence::encode_ssa(*s.function("f"), s, {});
  EXPECT_THROW(equivalence::build_miter(a, b), std::invalid_argument);
}

TEST(Equivalence, DpllAndCdclBackendsAgreeOnWitness) {
  Pair p{snap("int f(int a, int b) { if (a > b) { return a - b; } return b - a; }"),
         snap("int f(int a, int b) { if (a >= b) { return a - b; } return a - b; }")};
  auto cs = changes::compute_changeset(p.old_snap, p.new_snap);
  equivalence::CheckOptions o1, o2;
  o1.backend = solver::make_backend("internal:dpll");
  o2.backend = solver::make_backend("internal:cdcl");
  auto v1 = check_equivalence(*p.old_snap.function("f"), *p.new_snap.function("f"), p.old_snap, p.new_snap,
                              {4, 0, 60}, o1);
  auto v2 = check_equivalence(*p.old_snap.function("f"), *p.new_snap.function("f"), p.old_snap, p.new_snap,
                              {4, 0, 60}, o2);
  ASSERT_TRUE(v1.not_equivalent());
  ASSERT_TRUE(v2.not_equivalent());
  EXPECT_EQ(v1.as_not_equivalent().witness, v2.as_not_equivalent().witness);
}

// Verdicts against brute-force enumeration of the reference interpreter.
TEST(EquivalenceProperty, GeneratedPairsMatchExhaustiveOracle) {
  cfv::testing::ProgramGenerator gen(20260917);
  int equivalent = 0, differing = 0;
  for (int i = 0; i < 150; ++i) {
    auto pair = gen.next_pair();
    SCOPED_TRACE("pair " + std::to_string(i) + "\n--- old\n" + pair.old_source + "--- new\n" + pair.new_source);
    Pair p{snap(pair.old_source, 4, "old"), snap(pair.new_source, 4, "new")};
    auto v = check(p, "f", {4, 0, 120});
    auto oracle = cfv::testing::exhaustive_equivalence(*p.old_snap.function("f"), p.old_snap,
                                                  *p.new_snap.function("f"), p.new_snap, 4, 4);
    ASSERT_FALSE(v.unknown()) << equivalence::to_string(v.as_unknown().reason);
    ASSERT_EQ(v.equivalent(), oracle.equivalent);
    if (v.equivalent()) {
      ++equivalent;
      EXPECT_TRUE(v.as_equivalent().complete);
    } else {
      ++differing;
    }
  }
  EXPECT_GT(equivalent, 20);
  EXPECT_GT(differing, 20);
}

} // namespace
