#include <cfv/changes/changeset.hpp>
#include <cfv/changes/patch.hpp>
#include <cfv/equivalence/check.hpp>

#include "random_program.hpp"

#include <gtest/gtest.h>

namespace {

using namespace cfv;
using changes::ChangeSet;
using changes::FileTree;
using changes::Snapshot;

Snapshot snap(const std::string& src, const std::string& label = "s", unsigned width = 8) {
  return Snapshot::from_sources(label, {{"lib.c", src}}, width);
}

std::set<std::string> names_of(const Snapshot& a, const Snapshot& b) {
  std::set<std::string> out;
  for (const auto& [n, _] : a.functions()) out.insert(n);
  for (const auto& [n, _] : b.functions()) out.insert(n);
  return out;
}

// Every name lands in exactly one category.
void expect_partition(const ChangeSet& cs, const std::set<std::string>& universe) {
  std::multiset<std::string> seen;
  seen.insert(cs.added.begin(), cs.added.end());
  seen.insert(cs.removed.begin(), cs.removed.end());
  seen.insert(cs.unchanged.begin(), cs.unchanged.end());
  for (const auto& m : cs.modified) seen.insert(m.name());
  for (const auto& [o, n] : cs.renamed) {
    seen.insert(o);
    seen.insert(n);
  }
  EXPECT_EQ(std::set<std::string>(seen.begin(), seen.end()), universe);
  EXPECT_EQ(seen.size(), universe.size());
}

TEST(ChangeSet, IdenticalSnapshotsAreUnchanged) {
  const char* src = "int g;\nint f(int a) { return a + g; }\nint h() { return f(1); }\n";
  auto cs = changes::compute_changeset(snap(src, "a"), snap(src, "b"));
  EXPECT_EQ(cs.unchanged, (std::set<std::string>{"f", "h"}));
  EXPECT_TRUE(cs.added.empty() && cs.removed.empty() && cs.modified.empty() && cs.renamed.empty());
  EXPECT_TRUE(cs.changed_globals.empty());
}

TEST(ChangeSet, AlphaEqualReplacementIsRename) {
  auto cs = changes::compute_changeset(snap("int f(int a) { int t = a; return t; }"),
                                       snap("int g(int b) { int u = b; return u; }"));
  ASSERT_EQ(cs.renamed.size(), 1u);
  EXPECT_EQ(cs.renamed[0], (std::pair<std::string, std::string>{"f", "g"}));
  EXPECT_EQ(cs.classify("f"), "renamed");
  EXPECT_TRUE(cs.added.empty() && cs.removed.empty());
}

TEST(ChangeSet, BodyEditIsModified) {
  auto cs = changes::compute_changeset(snap("int f() { return 0; }"), snap("int f() { return 1; }"));
  ASSERT_EQ(cs.modified.size(), 1u);
  EXPECT_EQ(cs.modified[0].name(), "f");
  EXPECT_FALSE(cs.modified[0].initializer_only);
}

TEST(ChangeSet, UnmatchedNamesAreAddedAndRemoved) {
  auto cs = changes::compute_changeset(snap("int f() { return 0; }"), snap("int g() { return 2; }"));
  EXPECT_EQ(cs.removed, std::set<std::string>{"f"});
  EXPECT_EQ(cs.added, std::set<std::string>{"g"});
}

TEST(ChangeSet, RenamePairingIsGreedyLexicographic) {
  auto cs = changes::compute_changeset(snap("int a() { return 1; }\nint b() { return 1; }\n"),
                                       snap("int y() { return 1; }\nint x() { return 1; }\n"));
  ASSERT_EQ(cs.renamed.size(), 2u);
  EXPECT_EQ(cs.renamed[0], (std::pair<std::string, std::string>{"a", "x"}));
  EXPECT_EQ(cs.renamed[1], (std::pair<std::string, std::string>{"b", "y"}));
}

TEST(ChangeSet, InitializerChangeMarksReaders) {
  auto cs = changes::compute_changeset(snap("int cap = 4;\nint f() { return cap; }\nint h() { return 0; }\n"),
                                       snap("int cap = 5;\nint f() { return cap; }\nint h() { return 0; }\n"));
  EXPECT_EQ(cs.changed_globals, std::set<std::string>{"cap"});
  ASSERT_EQ(cs.modified.size(), 1u);
  EXPECT_TRUE(cs.modified[0].initializer_only);
  EXPECT_EQ(cs.unchanged, std::set<std::string>{"h"});
}

TEST(ChangeSet, SignatureChangeIsModified) {
  auto cs = changes::compute_changeset(snap("int f(int a) { return a; }"), snap("int f(bool a) { return 0; }"));
  EXPECT_EQ(cs.modified.size(), 1u);
}

TEST(StructuralEquiv, Examples) {
  auto s = snap("int f(int a, int b) { return a + b; }\n"
                "int g(int a, int b) {\n  // sum\n  return a + b; // both\n}\n"
                "int h(int x, int y) { return x + y; }\n"
                "int k(int a, int b) { return b + a; }\n");
  EXPECT_TRUE(changes::structural_equiv(*s.function("f"), *s.function("g")));
  EXPECT_TRUE(changes::structural_equiv(*s.function("f"), *s.function("h")));
  EXPECT_FALSE(changes::structural_equiv(*s.function("f"), *s.function("k")));
}

// Reflexive, symmetric and transitive over generated triples.
TEST(StructuralEquivProperty, IsAnEquivalenceRelation) {
  cfv::testing::ProgramGenerator gen(4242);
  int related = 0;
  for (int i = 0; i < 120; ++i) {
    auto p = gen.next_pair();
    auto q = gen.next_pair();
    auto a = snap(p.old_source, "a");
    auto b = snap(p.new_source, "b");
    auto c = snap(i % 2 ? q.old_source : p.new_source, "c");
    const auto& fa = *a.function("f");
    const auto& fb = *b.function("f");
    const auto& fc = *c.function("f");
    EXPECT_TRUE(changes::structural_equiv(fa, fa));
    bool ab = changes::structural_equiv(fa, fb), bc = changes::structural_equiv(fb, fc);
    EXPECT_EQ(ab, changes::structural_equiv(fb, fa));
    EXPECT_EQ(bc, changes::structural_equiv(fc, fb));
    if (ab && bc) EXPECT_TRUE(changes::structural_equiv(fa, fc));
    related += ab;
  }
  EXPECT_GT(related, 10);
}

// Stage one never claims more than stage two can prove.
TEST(StructuralEquivProperty, ImpliesFormalEquivalence) {
  cfv::testing::ProgramGenerator gen(99);
  int checked = 0;
  for (int i = 0; i < 200 && checked < 25; ++i) {
    auto p = gen.next_pair();
    auto a = snap(p.old_source, "a", 4);
    auto b = snap(p.new_source, "b", 4);
    const auto& fa = *a.function("f");
    const auto& fb = *b.function("f");
    if (!changes::structural_equiv(fa, fb)) continue;
    ++checked;
    auto store = std::make_shared<solver::TermStore>();
    auto sa = equivalence::encode_ssa(fa, a, {3, 0, 60}, {store, equivalence::GlobalInit::Symbolic});
    auto sb = equivalence::encode_ssa(fb, b, {3, 0, 60}, {store, equivalence::GlobalInit::Symbolic});
    auto r = solver::make_backend("internal")->solve(equivalence::build_miter(sa, sb), {});
    EXPECT_TRUE(r.unsat()) << p.old_source << p.new_source;
  }
  EXPECT_GE(checked, 25);
}

TEST(ChangeSetProperty, CategoriesPartitionNames) {
  cfv::testing::ProgramGenerator gen(7);
  for (int i = 0; i < 60; ++i) {
    auto p = gen.next_pair();
    auto q = gen.next_pair();
    // Give the second program's function a distinct name so both sides can
    // have unmatched names.
    std::string extra = q.new_source.substr(q.new_source.find("int f("));
    extra.replace(4, 1, i % 3 ? "f2" : "f3");
    auto a = snap(p.old_source, "a");
    auto b = snap(p.new_source + (i % 2 ? extra : ""), "b");
    expect_partition(changes::compute_changeset(a, b), names_of(a, b));
    auto self = changes::compute_changeset(a, a);
    EXPECT_EQ(self.unchanged.size(), a.functions().size());
  }
}

const FileTree kBase = {{"vec.c", "int a;\nint f() {\n  return 1;\n}\nint g() {\n  return 2;\n}\n"}};

TEST(Patch, AppliesHunkWithPrefixes) {
  auto out = changes::apply_unified_diff(kBase, "--- a/vec.c\n+++ b/vec.c\n@@ -5,3 +5,3 @@\n int g() {\n"
                                                "-  return 2;\n+  return 3;\n }\n");
  EXPECT_EQ(out.at("vec.c"), "int a;\nint f() {\n  return 1;\n}\nint g() {\n  return 3;\n}\n");
}

TEST(Patch, HunkMayApplyAtAnOffset) {
  auto out = changes::apply_unified_diff(kBase, "--- vec.c\n+++ vec.c\n@@ -1,3 +1,3 @@\n }\n int g() {\n"
                                                "-  return 2;\n+  return 4;\n");
  EXPECT_NE(out.at("vec.c").find("return 4;"), std::string::npos);
}

TEST(Patch, CreatesAndDeletesFiles) {
  auto out = changes::apply_unified_diff(kBase, "--- /dev/null\n+++ b/new.c\n@@ -0,0 +1,1 @@\n+int h() { return 0; }\n"
                                                "--- a/vec.c\n+++ /dev/null\n@@ -1,1 +0,0 @@\n-int a;\n");
  EXPECT_EQ(out.size(), 1u);
  EXPECT_EQ(out.at("new.c"), "int h() { return 0; }\n");
}

TEST(Patch, RejectsMismatchedContext) {
  EXPECT_THROW(changes::apply_unified_diff(kBase, "--- vec.c\n+++ vec.c\n@@ -1,1 +1,1 @@\n-int b;\n+int c;\n"),
               changes::PatchError);
  EXPECT_THROW(changes::apply_unified_diff(kBase, "--- gone.c\n+++ gone.c\n@@ -1,1 +1,1 @@\n-x\n+y\n"),
               changes::PatchError);
}

TEST(Patch, CorpusDiffReproducesNewVersion) {
  auto old_tree = changes::read_tree(CFV_CORPUS_DIR "/minivec/old");
  auto new_tree = changes::read_tree(CFV_CORPUS_DIR "/minivec/new");
  // A hand-written hunk for the injected insert bug alone.
  std::string diff = "--- a/vec.c\n+++ b/vec.c\n@@ -81,1 +81,1 @@\n-  data[pos] = v;\n+  data[pos + 1] = v;\n";
  auto patched = changes::apply_unified_diff(old_tree, diff);
  EXPECT_NE(patched.at("vec.c"), old_tree.at("vec.c"));
  EXPECT_NE(patched.at("vec.c").find("data[pos + 1] = v;"), std::string::npos);
  auto a = Snapshot::from_sources("old", {old_tree.begin(), old_tree.end()}, 32);
  auto b = Snapshot::from_sources("patched", {patched.begin(), patched.end()}, 32);
  auto cs = changes::compute_changeset(a, b);
  ASSERT_EQ(cs.modified.size(), 1u);
  EXPECT_EQ(cs.modified[0].name(), "vec_insert");
  EXPECT_FALSE(new_tree.empty());
}

} // namespace
