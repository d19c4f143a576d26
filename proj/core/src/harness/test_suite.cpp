#include <cfv/harness/test_suite.hpp>

#include <cfv/frontend/parser.hpp>
#include <cfv/frontend/type_check.hpp>

#include <algorithm>
#include <stdexcept>

namespace cfv::harness {

using frontend::Diagnostic;
using frontend::DiagKind;
using frontend::FrontendError;
using frontend::StmtKind;

namespace {

bool has_assert(const frontend::Stmt& body) {
  bool found = false;
  frontend::for_each_stmt(body, [&](const frontend::Stmt& s) { found |= s.kind == StmtKind::Assert; });
  return found;
}

// Empty when `fn` is a well-formed test, else the reason it is not.
std::string test_shape_error(const FunctionDef& fn) {
  if (fn.name.rfind("test_", 0) != 0) return "function '" + fn.name + "' in a test suite must be named test_*";
  if (!fn.return_type.is_void()) return "test '" + fn.name + "' must return void";
  if (!fn.params.empty()) return "test '" + fn.name + "' must take no parameters";
  if (!has_assert(*fn.body)) return "test '" + fn.name + "' contains no assert";
  return {};
}

} // namespace

TestCase make_test(FunctionPtr fn) {
  if (!fn || !fn->typed) throw std::invalid_argument("make_test: function is not type-checked");
  if (auto why = test_shape_error(*fn); !why.empty()) throw std::invalid_argument(why);
  TestCase t;
  t.name = fn->name;
  t.section = fn->leading_comment.empty() ? fn->name : fn->leading_comment;
  t.body = std::move(fn);
  return t;
}

std::vector<TestCase> tests_from_sources(const std::vector<std::pair<std::string, std::string>>& files,
                                         const Snapshot& snap) {
  std::vector<frontend::SourceUnit> units;
  std::vector<Diagnostic> diags;
  for (const auto& [path, text] : files) {
    try {
      units.push_back(frontend::parse_unit(text, path, {snap.int_width()}));
    } catch (const FrontendError& e) {
      diags.insert(diags.end(), e.diagnostics().begin(), e.diagnostics().end());
    }
  }
  if (!diags.empty()) throw FrontendError(std::move(diags));

  frontend::Environment env = snap.environment();
  units = frontend::type_check(std::move(units), &env);

  std::vector<TestCase> out;
  for (const auto& u : units) {
    for (const auto* g : u.globals())
      diags.push_back({DiagKind::InputError, u.path, g->span, "test suites may not declare globals"});
    for (const auto* fn : u.functions()) {
      std::string why = test_shape_error(*fn);
      if (why.empty() && snap.function(fn->name)) why = "test '" + fn->name + "' redefines a snapshot function";
      if (!why.empty()) {
        diags.push_back({DiagKind::InputError, u.path, fn->span, why});
        continue;
      }
      out.push_back(make_test(std::make_shared<const FunctionDef>(*fn)));
    }
  }
  if (!diags.empty()) throw FrontendError(std::move(diags));
  std::sort(out.begin(), out.end(), [](const TestCase& a, const TestCase& b) { return a.name < b.name; });
  return out;
}

std::vector<TestCase> load_tests(const std::string& dir, const Snapshot& snap) {
  return tests_from_sources(changes::read_sources(dir), snap);
}

std::set<std::string> CallGraph::reachable(const std::string& from) const {
  std::set<std::string> seen{from};
  std::vector<std::string> work{from};
  while (!work.empty()) {
    std::string n = std::move(work.back());
    work.pop_back();
    auto it = edges_.find(n);
    if (it == edges_.end()) continue;
    for (const auto& m : it->second)
      if (seen.insert(m).second) work.push_back(m);
  }
  return seen;
}

CallGraph build_call_graph(const Snapshot& snap, const std::vector<TestCase>& tests) {
  CallGraph cg;
  auto add = [&](const FunctionDef& fn) {
    cg.add_node(fn.name);
    for (const auto& c : fn.callees)
      if (snap.function(c)) cg.add_edge(fn.name, c);
  };
  for (const auto& [_, fn] : snap.functions()) add(*fn);
  for (const auto& t : tests) add(*t.body);
  return cg;
}

std::vector<SelectedTest> select_tests(const std::vector<TestCase>& tests,
                                       const changes::ChangeSet& cs, const CallGraph& cg,
                                       const std::set<std::string>& equivalent) {
  std::set<std::string> changed = cs.added;
  for (const auto& m : cs.modified)
    if (!equivalent.count(m.name())) changed.insert(m.name());
  std::vector<SelectedTest> out;
  for (const auto& t : tests) {
    SelectedTest sel{&t, {}};
    for (const auto& f : cg.reachable(t.name))
      if (changed.count(f)) sel.triggered_by.push_back(f);
    if (!sel.triggered_by.empty()) out.push_back(std::move(sel));
  }
  return out;
}

} // namespace cfv::harness
