#include <cfv/changes/patch.hpp>
#include <cfv/frontend/analysis.hpp>
#include <cfv/harness/test_suite.hpp>
#include <cfv/pipeline/pipeline.hpp>
#include <cfv/solver/solve.hpp>

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace {

using namespace cfv;
using pipeline::ConfigError;
using pipeline::InputError;

struct SolverFlags {
  unsigned bound = 8;
  unsigned depth = 0;
  double timeout = 60;
  unsigned width = 32;
  std::string backend = "internal";

  void attach(CLI::App* app) {
    app->add_option("--bound", bound, "Loop unwinding bound")->capture_default_str()->check(CLI::PositiveNumber);
    app->add_option("--depth", depth, "Inlining depth (0: same as --bound)")->capture_default_str();
    app->add_option("--timeout", timeout, "Per-query solver timeout in seconds")->capture_default_str();
    app->add_option("--width", width, "Bit width of int (4, 8, 16 or 32)")->capture_default_str();
    app->add_option("--backend", backend, "internal, internal:dpll, internal:cdcl, exhaustive or external:\"CMD {file}\"")
        ->capture_default_str();
  }

  equivalence::UnrollConfig unroll() const { return {bound, depth, timeout}; }

  std::shared_ptr<const solver::Backend> make() const {
    if (!frontend::is_supported_width(width)) throw ConfigError("unsupported int width " + std::to_string(width));
    try {
      unroll().validate();
      return solver::make_backend(backend);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
  }
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

changes::Snapshot load_dir(const std::string& dir, unsigned width) {
  try {
    return changes::Snapshot::load(dir, width);
  } catch (const frontend::FrontendError&) {
    throw;
  } catch (const std::runtime_error& e) {
    throw ConfigError(e.what());
  }
}

changes::Snapshot load_file(const std::string& path, unsigned width) {
  auto name = std::filesystem::path(path).filename().string();
  return changes::Snapshot::from_sources(name, {{name, read_file(path)}}, width);
}

std::string show(const std::map<std::string, std::int64_t>& m) {
  std::string out;
  for (const auto& [k, v] : m) out += (out.empty() ? "" : ", ") + k + "=" + std::to_string(v);
  return out;
}

void print_verdict(const std::string& fn, const equivalence::EquivalenceVerdict& v) {
  std::cout << fn << ": " << equivalence::verdict_class(v);
  if (v.equivalent()) {
    const auto& e = v.as_equivalent();
    std::cout << " (" << equivalence::to_string(e.mode);
    if (e.mode == equivalence::Equivalent::Mode::Formal)
      std::cout << ", bound " << e.bound << (e.complete ? ", complete" : ", partial");
    std::cout << ")\n";
  } else if (v.not_equivalent()) {
    const auto& n = v.as_not_equivalent();
    if (n.reason == equivalence::NotEquivalent::Reason::SignatureMismatch) {
      std::cout << " (signature: " << n.detail << ")\n";
    } else {
      std::cout << "\n  witness: " << show(n.witness) << "\n  old: " << show(n.old_observables)
                << "\n  new: " << show(n.new_observables) << "\n";
    }
  } else {
    const auto& u = v.as_unknown();
    std::cout << " (" << equivalence::to_string(u.reason) << ": " << u.detail << ")\n";
  }
}

void print_result(const std::string& test, const verification::VerificationResult& r,
                  const std::optional<verification::ConcreteOutcome>& replay = std::nullopt) {
  std::cout << test << ": " << verification::verdict_class(r);
  if (r.pass()) {
    std::cout << (r.as_pass().complete ? "" : " (bounded)") << "\n";
  } else if (r.fail()) {
    const auto& cx = r.as_fail().counterexample;
    std::cout << " at " << cx.failing_function << ":" << cx.failing_assert.line << ":" << cx.failing_assert.column
              << "\n  inputs: " << show(cx.valuation) << "\n";
    if (replay) std::cout << "  replay: " << verification::to_string(*replay) << "\n";
  } else {
    std::cout << " (" << verification::to_string(r.as_unknown().reason) << ": " << r.as_unknown().detail << ")\n";
  }
}

int cmd_analyze(pipeline::RunConfig cfg, const std::string& patch, bool quiet) {
  pipeline::Report report;
  if (patch.empty()) {
    report = pipeline::run_pipeline(cfg);
  } else {
    // The new version is the old tree with the patch applied.
    cfg.validate();
    auto base = changes::read_tree(cfg.old_dir);
    changes::FileTree patched;
    try {
      patched = changes::apply_unified_diff(base, read_file(patch));
    } catch (const changes::PatchError& e) {
      throw InputError(e.what());
    }
    auto old_snap = load_dir(cfg.old_dir, cfg.int_width);
    auto new_snap = changes::Snapshot::from_sources("patched", {patched.begin(), patched.end()}, cfg.int_width);
    auto tests = harness::load_tests(cfg.tests_dir, new_snap);
    report = pipeline::run_pipeline(cfg, old_snap, new_snap, tests);
  }
  pipeline::write_atomically(cfg.output, pipeline::render_report(report));
  if (!quiet) {
    for (const auto& p : report.equivalence) print_verdict(p.function, p.verdict);
    for (const auto& t : report.verification) print_result(t.test.origin, t.result, t.replay);
    const auto& s = report.totals;
    std::cout << "equivalent " << s.equivalent << ", not equivalent " << s.not_equivalent << ", pass " << s.pass
              << ", fail " << s.fail << ", unknown " << s.unknown << (report.budget_exceeded ? " (budget exceeded)" : "")
              << "\n";
  }
  return report.exit_code();
}

int cmd_diff(const std::string& old_dir, const std::string& new_dir, unsigned width) {
  auto old_snap = load_dir(old_dir, width);
  auto new_snap = load_dir(new_dir, width);
  auto cs = changes::compute_changeset(old_snap, new_snap);
  std::set<std::string> names;
  for (const auto& [n, _] : old_snap.functions()) names.insert(n);
  for (const auto& [n, _] : new_snap.functions()) names.insert(n);
  for (const auto& n : names) std::cout << cs.classify(n) << " " << n << "\n";
  for (const auto& [o, n] : cs.renamed) std::cout << "rename " << o << " -> " << n << "\n";
  for (const auto& g : cs.changed_globals) std::cout << "global " << g << "\n";
  return 0;
}

int cmd_equiv(const std::string& old_file, const std::string& new_file, const std::string& fn, const SolverFlags& flags,
              const std::string& smt_out) {
  auto backend = flags.make();
  auto old_snap = load_file(old_file, flags.width);
  auto new_snap = load_file(new_file, flags.width);
  const auto* a = old_snap.function(fn);
  const auto* b = new_snap.function(fn);
  if (!a || !b) throw ConfigError("function '" + fn + "' missing from " + (a ? new_file : old_file));
  if (!smt_out.empty()) {
    auto store = std::make_shared<solver::TermStore>();
    auto pa = equivalence::encode_ssa(*a, old_snap, flags.unroll(), {store, equivalence::GlobalInit::Symbolic});
    auto pb = equivalence::encode_ssa(*b, new_snap, flags.unroll(), {store, equivalence::GlobalInit::Symbolic});
    pipeline::write_atomically(smt_out, solver::emit_smtlib(equivalence::build_miter(pa, pb)));
  }
  auto cs = changes::compute_changeset(old_snap, new_snap);
  auto renames = cs.rename_map();
  equivalence::CheckOptions opts;
  opts.backend = backend;
  opts.renames = &renames;
  opts.changed_globals = &cs.changed_globals;
  auto v = equivalence::check_equivalence(*a, *b, old_snap, new_snap, flags.unroll(), opts);
  print_verdict(fn, v);
  return v.equivalent() ? pipeline::kExitOk : v.not_equivalent() ? pipeline::kExitFail : pipeline::kExitUnknown;
}

int cmd_complexity(const std::string& dir, unsigned width) {
  auto snap = load_dir(dir, width);
  for (const auto& [name, fn] : snap.functions())
    std::cout << name << " " << frontend::cyclomatic_complexity(*fn) << "\n";
  return 0;
}

int cmd_verify(const std::string& tests_dir, const std::string& src_dir, const SolverFlags& flags, bool generalize) {
  auto backend = flags.make();
  auto snap = load_dir(src_dir, flags.width);
  auto tests = harness::load_tests(tests_dir, snap);
  std::set<std::string> targets;
  for (const auto& [n, _] : snap.functions()) targets.insert(n);
  int fails = 0, unknowns = 0;
  for (const auto& t : tests) {
    auto gt = generalize ? harness::generalize(t, targets) : harness::as_generalized(t);
    verification::VerifyOptions opts;
    opts.backend = backend;
    auto r = verification::verify_test(gt, snap, flags.unroll(), opts);
    std::optional<verification::ConcreteOutcome> replay;
    if (r.fail()) {
      ++fails;
      replay = verification::interpret_concrete(verification::concretize(gt, r.as_fail().counterexample), snap,
                                                10'000'000)
                   .outcome;
    }
    if (r.unknown()) ++unknowns;
    print_result(t.name, r, replay);
  }
  return fails ? pipeline::kExitFail : unknowns ? pipeline::kExitUnknown : pipeline::kExitOk;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Change-driven equivalence checking and bounded verification of regression tests"};
  app.require_subcommand(1);
  app.set_version_flag("--version", CFV_VERSION);

  pipeline::RunConfig run;
  std::string patch;
  bool quiet = false;
  auto* analyze = app.add_subcommand("analyze", "Run the whole pipeline and write a JSON report");
  analyze->add_option("--old", run.old_dir, "Directory of the previous version")->required();
  auto* new_opt = analyze->add_option("--new", run.new_dir, "Directory of the current version");
  analyze->add_option("--patch", patch, "Unified diff producing the current version from --old")->excludes(new_opt);
  analyze->add_option("--tests", run.tests_dir, "Directory of the regression suite")->required();
  analyze->add_option("--budget", run.budget_s, "Time budget in seconds")->capture_default_str();
  analyze->add_option("--equivalence-share", run.equivalence_share, "Budget fraction for equivalence checks")
      ->capture_default_str();
  analyze->add_option("--bound", run.unroll.loop_bound, "Loop unwinding bound")->capture_default_str();
  analyze->add_option("--depth", run.unroll.inline_depth, "Inlining depth (0: same as --bound)")->capture_default_str();
  analyze->add_option("--timeout", run.unroll.timeout_s, "Per-pair solver timeout in seconds")->capture_default_str();
  analyze->add_option("--width", run.int_width, "Bit width of int (4, 8, 16 or 32)")->capture_default_str();
  analyze->add_option("--jobs", run.parallelism, "Worker threads")->capture_default_str();
  analyze->add_option("--backend", run.backend, "internal, internal:dpll, internal:cdcl, exhaustive or external:\"CMD {file}\"")
      ->capture_default_str();
  analyze->add_option("--out", run.output, "Report path")->required();
  analyze->add_flag("-q,--quiet", quiet, "Only write the report");

  std::string old_dir, new_dir;
  unsigned width = 32;
  auto* diff = app.add_subcommand("diff", "Classify functions between two versions");
  diff->add_option("old", old_dir)->required();
  diff->add_option("new", new_dir)->required();
  diff->add_option("--width", width)->capture_default_str();

  std::string old_file, new_file, fn, smt_out;
  SolverFlags equiv_flags;
  auto* equiv = app.add_subcommand("equiv", "Check one function across two files");
  equiv->add_option("old", old_file)->required()->check(CLI::ExistingFile);
  equiv->add_option("new", new_file)->required()->check(CLI::ExistingFile);
  equiv->add_option("function", fn)->required();
  equiv->add_option("--emit-smt", smt_out, "Write the miter as SMT-LIB");
  equiv_flags.attach(equiv);

  std::string dir;
  auto* complexity = app.add_subcommand("complexity", "Cyclomatic complexity per function");
  complexity->add_option("dir", dir)->required();
  complexity->add_option("--width", width)->capture_default_str();

  std::string tests_dir, src_dir;
  SolverFlags verify_flags;
  bool generalize = false;
  auto* verify = app.add_subcommand("verify", "Model-check a test suite against one version");
  verify->add_option("--tests", tests_dir)->required();
  verify->add_option("--src", src_dir)->required();
  verify->add_flag("--generalize", generalize, "Replace literal call arguments by nondeterministic values");
  verify_flags.attach(verify);

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return pipeline::kExitError;
  }

  try {
    if (*analyze) {
      if (run.new_dir.empty() && patch.empty()) throw ConfigError("one of --new or --patch is required");
      return cmd_analyze(run, patch, quiet);
    }
    if (*diff) return cmd_diff(old_dir, new_dir, width);
    if (*equiv) return cmd_equiv(old_file, new_file, fn, equiv_flags, smt_out);
    if (*complexity) return cmd_complexity(dir, width);
    if (*verify) return cmd_verify(tests_dir, src_dir, verify_flags, generalize);
  } catch (const frontend::FrontendError& e) {
    for (const auto& d : e.diagnostics()) std::cerr << d.format() << "\n";
    return pipeline::kExitError;
  } catch (const InputError& e) {
    std::cerr << e.what() << "\n";
    return pipeline::kExitError;
  } catch (const ConfigError& e) {
    std::cerr << "cfv: " << e.what() << "\n";
    return pipeline::kExitError;
  } catch (const std::runtime_error& e) {
    // Unreadable inputs and malformed patches.
    std::cerr << "cfv: " << e.what() << "\n";
    return pipeline::kExitError;
  }
  return pipeline::kExitError;
}
