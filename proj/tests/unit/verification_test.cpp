#include <cfv/frontend/printer.hpp>
#include <cfv/harness/generalize.hpp>
#include <cfv/solver/solve.hpp>
#include <cfv/verification/verify.hpp>

#include "random_program.hpp"

#include <gtest/gtest.h>

namespace {

using namespace cfv;
using changes::Snapshot;
using harness::TestCase;
using verification::ConcreteOutcome;

Snapshot snap(const std::string& src, unsigned width = 4) {
  return Snapshot::from_sources("lib", {{"lib.c", src}}, width);
}

TestCase one_test(const std::string& src, const Snapshot& s) {
  auto tests = harness::tests_from_sources({{"t.c", src}}, s);
  EXPECT_EQ(tests.size(), 1u);
  return tests.front();
}

verification::VerificationResult verify(const TestCase& t, const Snapshot& s, unsigned k = 4) {
  return verification::verify_test(harness::as_generalized(t), s, {k, 0, 60});
}

TEST(Interpreter, TwosComplementAtWidth) {
  auto s = snap("int f(int a) { return a + 1; }", 4);
  verification::ExecInputs in;
  in.globals = equivalence::GlobalInit::Symbolic;
  in.values["arg0"] = 7;
  auto r = verification::execute(*s.function("f"), s, in);
  EXPECT_EQ(*r.result, -8);
}

TEST(Interpreter, ShiftsWrapAndSignExtend) {
  auto s = snap("int l(int a, int b) { return a << b; }\nint r(int a, int b) { return a >> b; }", 8);
  verification::ExecInputs in{equivalence::GlobalInit::Symbolic, {{"arg0", -64}, {"arg1", 9}}};
  EXPECT_EQ(*verification::execute(*s.function("l"), s, in).result, -128); // 9 mod 8 = 1
  EXPECT_EQ(*verification::execute(*s.function("r"), s, in).result, -32);
}

TEST(Interpreter, OutOfBoundsIsAnAssertionFailure) {
  auto s = snap("int a[2];\nint f(int i) { a[i] = 3; return a[0]; }");
  verification::ExecInputs in{equivalence::GlobalInit::Declared, {{"arg0", 2}}};
  auto r = verification::execute(*s.function("f"), s, in);
  EXPECT_EQ(r.status, verification::ExecStatus::AssertFail);
  verification::ExecLimits observe;
  observe.stop_at_failure = false;
  auto r2 = verification::execute(*s.function("f"), s, in, observe);
  EXPECT_EQ(r2.status, verification::ExecStatus::Completed);
  EXPECT_FALSE(r2.assertion_ok);
  EXPECT_EQ(*r2.result, 0);
}

TEST(InterpretConcrete, Examples) {
  auto s = snap("int id(int x) { return x; }");
  EXPECT_EQ(verification::interpret_concrete(one_test("void test_a() { assert(1 + 1 == 2); }", s), s).outcome,
            ConcreteOutcome::Pass);
  auto failing = one_test("void test_b() {\n  int x = id(3);\n  assert(false);\n}", s);
  auto r = verification::interpret_concrete(failing, s);
  EXPECT_EQ(r.outcome, ConcreteOutcome::AssertFail);
  EXPECT_EQ(r.failing_assert.line, 3u);
  auto spin = one_test("void test_c() { while (true) { } assert(true); }", s);
  EXPECT_EQ(verification::interpret_concrete(spin, s, 1'000'000).outcome, ConcreteOutcome::OutOfFuel);
}

TEST(InterpretConcrete, RejectsNondet) {
  auto s = snap("int id(int x) { return x; }");
  auto t = one_test("void test_n() { assert(nondet_int() == 0); }", s);
  EXPECT_THROW(verification::interpret_concrete(t, s), std::invalid_argument);
}

TEST(VerifyTest, TrivialPass) {
  auto s = snap("int id(int x) { return x; }");
  auto r = verify(one_test("void test_t() { assert(true); }", s), s);
  ASSERT_TRUE(r.pass());
  EXPECT_TRUE(r.as_pass().complete);
}

TEST(VerifyTest, LexicographicallyLeastWitness) {
  auto s = snap("int id(int x) { return x; }");
  auto t = one_test("void test_x() {\n  int x = nondet_int();\n  assert(x == 0);\n}", s);
  auto r = verify(t, s);
  ASSERT_TRUE(r.fail());
  const auto& cx = r.as_fail().counterexample;
  EXPECT_EQ(cx.valuation.at("nondet:<self>#0"), 1);
  EXPECT_EQ(cx.failing_assert.line, 3u);
  ASSERT_FALSE(cx.trace.empty());
  EXPECT_EQ(cx.trace.front().variable, "x");
  EXPECT_EQ(cx.trace.front().value, 1);
  EXPECT_EQ(cx.trace.back().variable, "<assert>");
  EXPECT_EQ(cx.trace.back().span, cx.failing_assert);

  // Same answer from the enumeration oracle over the whole formula.
  auto store = std::make_shared<solver::TermStore>();
  auto p = equivalence::encode_ssa(*t.body, s, {4, 0, 60}, {store, equivalence::GlobalInit::Declared});
  auto ex = solver::exhaustive_solve({store, store->mk_not(p.assertion_ok)});
  ASSERT_TRUE(ex.sat());
  EXPECT_EQ(ex.model.at("nondet:<self>#0"), 1u);
}

TEST(VerifyTest, CounterexampleCoversCalleeSites) {
  auto s = snap("int pick() { return nondet_int(); }");
  auto t = one_test("void test_p() { int a = pick(); assert(a != 5); }", s);
  auto r = verify(t, s);
  ASSERT_TRUE(r.fail());
  EXPECT_EQ(r.as_fail().counterexample.valuation.at("nondet:pick#0"), 5);
}

TEST(VerifyTest, IncompleteUnwindingIsReported) {
  auto s = snap("int spin(int n) { int i = 0; while (i < n) { i = i + 1; } return i; }");
  auto t = one_test("void test_s() { int r = spin(nondet_int()); assert(r >= 0); }", s);
  auto r = verify(t, s, 3);
  ASSERT_TRUE(r.pass());
  EXPECT_FALSE(r.as_pass().complete);
  auto all_cut = one_test("void test_u() { int r = spin(6); assert(r == 6); }", s);
  auto u = verify(all_cut, s, 3);
  ASSERT_TRUE(u.unknown());
  EXPECT_EQ(u.as_unknown().reason, verification::Unknown::Reason::UnwindingIncomplete);
}

TEST(VerifyTest, AssertionBeforeBlockingAssumeStillFails) {
  auto s = snap("int id(int x) { return x; }");
  auto t = one_test("void test_o() { int x = nondet_int(); assert(x != 2); assume(x == 3); }", s);
  EXPECT_TRUE(verify(t, s).fail());
  auto q = one_test("void test_q() { int x = nondet_int(); assume(x == 3); assert(x != 2); }", s);
  EXPECT_TRUE(verify(q, s).pass());
}

TEST(VerifyTest, TimeoutIsUnknown) {
  auto s = snap("int m(int a, int b, int c) { return (a * b) * c; }\nint n(int a, int b, int c) { return a * (b * c); }",
                32);
  auto t = one_test("void test_m() {\n  int a = nondet_int();\n  int b = nondet_int();\n  int c = nondet_int();\n"
                    "  assert(m(a, b, c) == n(a, b, c));\n}",
                    s);
  auto r = verification::verify_test(harness::as_generalized(t), s, {4, 0, 0.5});
  ASSERT_TRUE(r.unknown());
  EXPECT_EQ(r.as_unknown().reason, verification::Unknown::Reason::Timeout);
}

TEST(Concretize, ReplacesNondetWithValuation) {
  auto s = snap("int id(int x) { return x; }");
  auto t = one_test("void test_c() {\n  int x = nondet_int();\n  bool b = nondet_bool();\n  assert(!b || x != -3);\n}", s);
  auto g = harness::as_generalized(t);
  verification::Counterexample cx;
  cx.valuation = {{"nondet:<self>#0", -3}, {"nondet:<self>#1", 1}};
  auto c = verification::concretize(g, cx);
  EXPECT_EQ(c.body->nondet_sites, 0u);
  EXPECT_EQ(frontend::print_stmt(*c.body->body),
            "{\n  int x = -3;\n  bool b = true;\n  assert((!b || (x != -3)));\n}\n");
  EXPECT_EQ(verification::interpret_concrete(c, s).outcome, ConcreteOutcome::AssertFail);
}

TEST(Concretize, FailuresReplay) {
  auto s = snap("int a[4];\nint put(int i, int v) { a[i + 1] = v; return v; }");
  auto t = one_test("void test_put() {\n  int r = put(1, 9);\n  assert(r == 9);\n}", s);
  EXPECT_EQ(verification::interpret_concrete(t, s).outcome, ConcreteOutcome::Pass);
  auto g = harness::generalize(t, {"put"});
  auto r = verification::verify_test(g, s, {4, 0, 60});
  ASSERT_TRUE(r.fail());
  auto c = verification::concretize(g, r.as_fail().counterexample);
  auto replay = verification::interpret_concrete(c, s);
  EXPECT_EQ(replay.outcome, ConcreteOutcome::AssertFail);
  EXPECT_EQ(replay.failing_assert, r.as_fail().counterexample.failing_assert);
}

// The encoder and the reference interpreter must agree on every
// nondet-free test that fits the bounds.
TEST(VerificationProperty, EncoderAgreesWithInterpreter) {
  cfv::testing::ProgramGenerator gen(77);
  int passes = 0, fails = 0;
  for (int i = 0; i < 120; ++i) {
    auto [lib, test] = gen.next_test();
    SCOPED_TRACE("case " + std::to_string(i) + "\n" + lib + test);
    auto s = snap(lib);
    auto t = one_test(test, s);
    auto concrete = verification::interpret_concrete(t, s);
    ASSERT_NE(concrete.outcome, ConcreteOutcome::OutOfFuel);
    auto r = verify(t, s);
    ASSERT_FALSE(r.unknown());
    ASSERT_EQ(r.fail(), concrete.outcome == ConcreteOutcome::AssertFail);
    if (r.fail()) {
      ++fails;
      EXPECT_EQ(r.as_fail().counterexample.failing_assert, concrete.failing_assert);
    } else {
      ++passes;
      EXPECT_TRUE(r.as_pass().complete);
    }
  }
  EXPECT_GT(passes, 10);
  EXPECT_GT(fails, 10);
}

} // namespace
