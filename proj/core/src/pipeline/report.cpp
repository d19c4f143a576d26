#include <cfv/frontend/analysis.hpp>
#include <cfv/pipeline/pipeline.hpp>

#include <json.hpp>

#include <filesystem>

namespace cfv::pipeline {

namespace {

using json = nlohmann::ordered_json;

constexpr int kSchemaVersion = 1;

std::string base_name(const std::string& path) {
  return std::filesystem::path(path).filename().string();
}

json span_json(const std::string& path, const frontend::Span& s) {
  return json{{"file", base_name(path)}, {"line", s.line}, {"column", s.column}};
}

json map_json(const std::map<std::string, std::int64_t>& m) {
  json out = json::object();
  for (const auto& [k, v] : m) out[k] = v;
  return out;
}

json verdict_json(const equivalence::EquivalenceVerdict& v) {
  json out{{"class", equivalence::verdict_class(v)}};
  if (v.equivalent()) {
    const auto& e = v.as_equivalent();
    out["mode"] = equivalence::to_string(e.mode);
    if (e.mode == equivalence::Equivalent::Mode::Formal) {
      out["bound"] = e.bound;
      out["complete"] = e.complete;
    }
  } else if (v.not_equivalent()) {
    const auto& n = v.as_not_equivalent();
    out["reason"] = equivalence::to_string(n.reason);
    if (n.reason == equivalence::NotEquivalent::Reason::SignatureMismatch) {
      out["detail"] = n.detail;
    } else {
      out["witness"] = map_json(n.witness);
      out["old"] = map_json(n.old_observables);
      out["new"] = map_json(n.new_observables);
    }
  } else {
    const auto& u = v.as_unknown();
    out["reason"] = equivalence::to_string(u.reason);
    out["detail"] = u.detail;
  }
  out["solver_calls"] = v.solver_calls;
  return out;
}

// Resolves the file of a span by the function it belongs to.
std::string file_of(const std::string& function, const TestResult& t, const changes::Snapshot* snap) {
  if (function == t.test.origin) return t.test.body->path;
  if (snap) {
    if (const auto* fn = snap->function(function)) return fn->path;
  }
  return {};
}

json result_json(const TestResult& t, const changes::Snapshot* snap) {
  const auto& r = t.result;
  json out{{"class", verification::verdict_class(r)}};
  if (r.pass()) {
    out["bound"] = r.as_pass().bound;
    out["complete"] = r.as_pass().complete;
  } else if (r.fail()) {
    const auto& cx = r.as_fail().counterexample;
    json trace = json::array();
    for (const auto& e : cx.trace) {
      json entry{{"function", e.function}, {"variable", e.variable}, {"value", e.value}};
      entry["location"] = span_json(file_of(e.function, t, snap), e.span);
      trace.push_back(std::move(entry));
    }
    out["counterexample"] = json{
        {"valuation", map_json(cx.valuation)},
        {"failing_assert", span_json(file_of(cx.failing_function, t, snap), cx.failing_assert)},
        {"function", cx.failing_function},
        {"trace", std::move(trace)},
        {"replay", t.replay ? verification::to_string(*t.replay) : "not_run"},
    };
  } else {
    out["reason"] = verification::to_string(r.as_unknown().reason);
    out["detail"] = r.as_unknown().detail;
  }
  out["solver_calls"] = r.solver_calls;
  return out;
}

} // namespace

std::string render_report(const Report& r) {
  const changes::Snapshot* new_snap = &r.new_snapshot;
  json doc;
  doc["schema_version"] = kSchemaVersion;
  doc["tool"] = json{{"name", "cfv"}, {"version", CFV_VERSION}};
  doc["snapshots"] = json{{"old", r.old_label}, {"new", r.new_label}};
  const auto& c = r.config;
  doc["config"] = json{
      {"budget_s", c.budget_s},
      {"equivalence_share", c.equivalence_share},
      {"loop_bound", c.unroll.loop_bound},
      {"inline_depth", c.unroll.depth()},
      {"pair_timeout_s", c.unroll.timeout_s},
      {"int_width", c.int_width},
      {"parallelism", c.parallelism},
      {"backend", c.backend},
  };

  const auto& cs = r.changeset;
  json functions = json::array();
  for (const auto& name : r.all_functions) {
    json f{{"name", name}, {"class", cs.classify(name)}};
    if (new_snap) {
      if (const auto* fn = new_snap->function(name)) f["complexity"] = frontend::cyclomatic_complexity(*fn);
    }
    functions.push_back(std::move(f));
  }
  json renamed = json::array();
  for (const auto& [o, n] : cs.renamed) renamed.push_back(json{{"old", o}, {"new", n}});
  doc["changeset"] = json{
      {"counts",
       {{"added", cs.added.size()},
        {"removed", cs.removed.size()},
        {"modified", cs.modified.size()},
        {"renamed", cs.renamed.size()},
        {"unchanged", cs.unchanged.size()}}},
      {"functions", std::move(functions)},
      {"renamed", std::move(renamed)},
      {"changed_globals", cs.changed_globals},
  };

  json eq = json::array();
  for (const auto& p : r.equivalence) eq.push_back(json{{"function", p.function}, {"verdict", verdict_json(p.verdict)}});
  doc["equivalence"] = std::move(eq);

  json selected = json::array();
  json ver = json::array();
  for (const auto& t : r.verification) {
    selected.push_back(json{{"test", t.test.origin}, {"triggered_by", t.triggered_by}});
    json subs = json::array();
    for (const auto& s : t.test.substitutions)
      subs.push_back(json{{"callee", s.callee},
                          {"argument", s.argument},
                          {"original", s.is_bool ? json(s.original != 0) : json(s.original)},
                          {"symbol", s.symbol}});
    ver.push_back(json{{"test", t.test.origin},
                       {"section", t.test.section},
                       {"generalization", harness::to_string(t.test.kind)},
                       {"substitutions", std::move(subs)},
                       {"result", result_json(t, new_snap)}});
  }
  doc["selected_tests"] = std::move(selected);
  doc["verification"] = std::move(ver);

  doc["totals"] = json{{"equivalent", r.totals.equivalent},
                       {"not_equivalent", r.totals.not_equivalent},
                       {"unknown", r.totals.unknown},
                       {"pass", r.totals.pass},
                       {"fail", r.totals.fail}};
  doc["stats"] = json{{"solver_invocations", r.solver_invocations}};
  doc["budget_exceeded"] = r.budget_exceeded;
  doc["exit_code"] = r.exit_code();

  json pairs = json::object();
  for (const auto& p : r.equivalence) pairs[p.function] = p.seconds;
  json tests = json::object();
  for (const auto& t : r.verification) tests[t.test.origin] = t.seconds;
  doc["timings"] = json{{"total_s", r.total_seconds},
                        {"equivalence_s", r.equivalence_seconds},
                        {"verification_s", r.verification_seconds},
                        {"pairs", std::move(pairs)},
                        {"tests", std::move(tests)}};
  return doc.dump(2) + "\n";
}

} // namespace cfv::pipeline
