#include <cfv/pipeline/pipeline.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <exception>
#include <filesystem>
#include <mutex>
#include <thread>

namespace cfv::pipeline {

namespace fs = std::filesystem;
using Clock = solver::Clock;

namespace {

// Work is only issued while at least this much budget remains.
constexpr auto kMinSlice = std::chrono::milliseconds(10);
constexpr double kMinTestTimeout = 5.0;

double seconds_since(Clock::time_point t) {
  return std::chrono::duration<double>(Clock::now() - t).count();
}

Clock::duration to_duration(double s) {
  return std::chrono::duration_cast<Clock::duration>(std::chrono::duration<double>(s));
}

// Runs fn(i) for i in [0, n) on up to `workers` threads; the first exception
// is rethrown after every worker has stopped.
template <typename F>
void parallel_for(std::size_t n, unsigned workers, F&& fn) {
  workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(n)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

std::string format_diagnostics(const frontend::FrontendError& e) {
  std::string out;
  for (const auto& d : e.diagnostics()) {
    if (!out.empty()) out += '\n';
    out += d.format();
  }
  return out;
}

} // namespace

void RunConfig::validate() const {
  if (!(budget_s > 0)) throw ConfigError("budget must be positive");
  if (!(equivalence_share > 0 && equivalence_share <= 1)) throw ConfigError("equivalence share must be in (0, 1]");
  if (!frontend::is_supported_width(int_width))
    throw ConfigError("unsupported int width " + std::to_string(int_width) + " (use 4, 8, 16 or 32)");
  if (parallelism < 1) throw ConfigError("parallelism must be at least 1");
  try {
    unroll.validate();
    solver::make_backend(backend);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

int Report::exit_code() const {
  if (totals.fail > 0) return kExitFail;
  if (totals.unknown > 0) return kExitUnknown;
  return kExitOk;
}

Report run_pipeline(const RunConfig& cfg) {
  const auto start = Clock::now();
  cfg.validate();
  for (const auto* dir : {&cfg.old_dir, &cfg.new_dir, &cfg.tests_dir}) {
    std::error_code ec;
    if (!fs::is_directory(*dir, ec)) throw ConfigError("not a directory: '" + *dir + "'");
  }
  changes::Snapshot old_snap, new_snap;
  std::vector<harness::TestCase> tests;
  try {
    old_snap = changes::Snapshot::load(cfg.old_dir, cfg.int_width);
    new_snap = changes::Snapshot::load(cfg.new_dir, cfg.int_width);
    tests = harness::load_tests(cfg.tests_dir, new_snap);
  } catch (const frontend::FrontendError& e) {
    throw InputError(format_diagnostics(e));
  } catch (const std::runtime_error& e) {
    throw ConfigError(e.what());
  }
  Report r = run_pipeline(cfg, old_snap, new_snap, tests);
  r.total_seconds = seconds_since(start);
  return r;
}

Report run_pipeline(const RunConfig& cfg, const changes::Snapshot& old_snap, const changes::Snapshot& new_snap,
                    const std::vector<harness::TestCase>& tests) {
  const auto start = Clock::now();
  cfg.validate();
  const auto deadline = start + to_duration(cfg.budget_s);
  const auto eq_deadline = start + to_duration(cfg.budget_s * cfg.equivalence_share);
  std::shared_ptr<const solver::Backend> backend = solver::make_backend(cfg.backend);

  Report r;
  r.old_label = old_snap.label();
  r.new_label = new_snap.label();
  r.config = cfg;
  r.new_snapshot = new_snap;
  r.changeset = changes::compute_changeset(old_snap, new_snap);
  {
    std::set<std::string> names;
    for (const auto& [n, _] : old_snap.functions()) names.insert(n);
    for (const auto& [n, _] : new_snap.functions()) names.insert(n);
    r.all_functions.assign(names.begin(), names.end());
  }
  const auto renames = r.changeset.rename_map();
  std::atomic<bool> exceeded{false};

  // Equivalence of every modified pair.
  const auto& modified = r.changeset.modified;
  r.equivalence.resize(modified.size());
  const auto eq_start = Clock::now();
  parallel_for(modified.size(), cfg.parallelism, [&](std::size_t i) {
    const auto& m = modified[i];
    PairResult& out = r.equivalence[i];
    out.function = m.name();
    const auto t0 = Clock::now();
    if (eq_deadline - t0 < kMinSlice) {
      exceeded = true;
      out.verdict.value = equivalence::Unknown{equivalence::Unknown::Reason::Timeout, "budget exhausted"};
      return;
    }
    equivalence::CheckOptions opts;
    opts.backend = backend;
    opts.renames = &renames;
    opts.changed_globals = &r.changeset.changed_globals;
    opts.deadline = eq_deadline;
    out.verdict = equivalence::check_equivalence(*m.old_fn, *m.new_fn, old_snap, new_snap, cfg.unroll, opts);
    if (out.verdict.unknown() && out.verdict.as_unknown().reason == equivalence::Unknown::Reason::Timeout &&
        Clock::now() >= eq_deadline)
      exceeded = true;
    out.seconds = seconds_since(t0);
  });
  r.equivalence_seconds = seconds_since(eq_start);

  // Selection treats every verdict other than Equivalent as a change.
  std::set<std::string> equivalent;
  for (const auto& p : r.equivalence)
    if (p.verdict.equivalent()) equivalent.insert(p.function);
  const auto cg = harness::build_call_graph(new_snap, tests);
  const auto selected = harness::select_tests(tests, r.changeset, cg, equivalent);

  const auto ver_start = Clock::now();
  const double per_test =
      selected.empty() ? kMinTestTimeout : std::max(kMinTestTimeout, cfg.budget_s / static_cast<double>(selected.size()));
  r.verification.resize(selected.size());
  parallel_for(selected.size(), cfg.parallelism, [&](std::size_t i) {
    const auto& sel = selected[i];
    TestResult& out = r.verification[i];
    out.triggered_by = sel.triggered_by;
    out.test = harness::generalize(*sel.test, {sel.triggered_by.begin(), sel.triggered_by.end()});
    const auto t0 = Clock::now();
    if (deadline - t0 < kMinSlice) {
      exceeded = true;
      out.result.value = verification::Unknown{verification::Unknown::Reason::Timeout, "budget exhausted"};
      return;
    }
    equivalence::UnrollConfig ucfg = cfg.unroll;
    ucfg.timeout_s = per_test;
    verification::VerifyOptions opts;
    opts.backend = backend;
    opts.deadline = deadline;
    out.result = verification::verify_test(out.test, new_snap, ucfg, opts);
    if (out.result.unknown() && out.result.as_unknown().reason == verification::Unknown::Reason::Timeout &&
        Clock::now() >= deadline)
      exceeded = true;
    if (out.result.fail()) {
      auto concrete = verification::concretize(out.test, out.result.as_fail().counterexample);
      out.replay = verification::interpret_concrete(concrete, new_snap, 10'000'000).outcome;
    }
    out.seconds = seconds_since(t0);
  });
  r.verification_seconds = seconds_since(ver_start);
  std::sort(r.verification.begin(), r.verification.end(),
            [](const TestResult& a, const TestResult& b) { return a.test.origin < b.test.origin; });

  for (const auto& p : r.equivalence) {
    r.solver_invocations += p.verdict.solver_calls;
    if (p.verdict.equivalent()) ++r.totals.equivalent;
    else if (p.verdict.not_equivalent()) ++r.totals.not_equivalent;
    else ++r.totals.unknown;
  }
  for (const auto& t : r.verification) {
    r.solver_invocations += t.result.solver_calls;
    if (t.result.pass()) ++r.totals.pass;
    else if (t.result.fail()) ++r.totals.fail;
    else ++r.totals.unknown;
  }
  r.budget_exceeded = exceeded;
  r.total_seconds = seconds_since(start);
  return r;
}

void write_atomically(const std::string& path, const std::string& text) {
  fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::FILE* f = std::fopen(tmp.c_str(), "wb");
    if (!f) throw ConfigError("cannot write '" + tmp.string() + "'");
    const bool ok = std::fwrite(text.data(), 1, text.size(), f) == text.size();
    if (std::fclose(f) != 0 || !ok) {
      fs::remove(tmp);
      throw ConfigError("cannot write '" + tmp.string() + "'");
    }
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp);
    throw ConfigError("cannot replace '" + path + "': " + ec.message());
  }
}

} // namespace cfv::pipeline
