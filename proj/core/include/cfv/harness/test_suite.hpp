#pragma once

#include <cfv/changes/changeset.hpp>
#include <cfv/changes/snapshot.hpp>

#include <map>
#include <set>
#include <string>
#include <vector>

namespace cfv::harness {

using changes::Snapshot;
using frontend::FunctionDef;
using frontend::FunctionPtr;

/// A `void test_*()` function holding at least one assert, type-checked
/// against the snapshot it exercises.
struct TestCase {
  std::string name;
  std::string section; // leading comment, else the name
  FunctionPtr body;
};

/// Parses `files` (path, text) as a test suite for `snap`. Every function
/// must be a test; suites declare no globals. Tests come back sorted by name.
/// Throws frontend::FrontendError.
std::vector<TestCase> tests_from_sources(const std::vector<std::pair<std::string, std::string>>& files,
                                         const Snapshot& snap);
std::vector<TestCase> load_tests(const std::string& dir, const Snapshot& snap);

/// Wraps an already type-checked function. Throws std::invalid_argument when
/// it is not a well-formed test.
TestCase make_test(FunctionPtr fn);

/// Direct-call edges over snapshot functions and test bodies.
class CallGraph {
public:
  const std::map<std::string, std::set<std::string>>& edges() const { return edges_; }
  void add_node(const std::string& name) { edges_[name]; }
  void add_edge(const std::string& from, const std::string& to) { edges_[from].insert(to); }

  /// Reflexive-transitive closure from `from`.
  std::set<std::string> reachable(const std::string& from) const;

private:
  std::map<std::string, std::set<std::string>> edges_;
};

CallGraph build_call_graph(const Snapshot& snap, const std::vector<TestCase>& tests);

struct SelectedTest {
  const TestCase* test = nullptr;
  /// Changed functions the test reaches, sorted.
  std::vector<std::string> triggered_by;
};

/// Tests reaching an added function or a modified one not in `equivalent`,
/// in input order.
std::vector<SelectedTest> select_tests(const std::vector<TestCase>& tests,
                                       const changes::ChangeSet& cs, const CallGraph& cg,
                                       const std::set<std::string>& equivalent);

} // namespace cfv::harness
