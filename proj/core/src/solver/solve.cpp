#include <cfv/solver/solve.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <regex>
#include <sstream>
#include <sys/wait.h>
#include <unistd.h>

namespace cfv::solver {

const char* to_string(SolveResult::Kind k) {
  switch (k) {
  case SolveResult::Kind::Sat: return "sat";
  case SolveResult::Kind::Unsat: return "unsat";
  case SolveResult::Kind::Timeout: return "timeout";
  }
  return "?";
}

namespace {

SolveResult from_outcome(const CnfFormula& cnf, const SatOutcome& out) {
  SolveResult r;
  r.stats = out.stats;
  switch (out.status) {
  case SatStatus::Sat:
    r.kind = SolveResult::Kind::Sat;
    r.model = decode_model(cnf, out.assignment);
    break;
  case SatStatus::Unsat: r.kind = SolveResult::Kind::Unsat; break;
  case SatStatus::Timeout: r.kind = SolveResult::Kind::Timeout; break;
  }
  return r;
}

} // namespace

SolveResult sat_solve(const CnfFormula& cnf, double timeout_s, SatAlgorithm algorithm) {
  SatConfig cfg;
  cfg.algorithm = algorithm;
  if (timeout_s > 0 && std::isfinite(timeout_s))
    cfg.deadline = Clock::now() + std::chrono::duration_cast<Clock::duration>(
                                      std::chrono::duration<double>(timeout_s));
  return from_outcome(cnf, solve_cnf(cnf, cfg));
}

SolveResult exhaustive_solve(const BitvecFormula& f) {
  const TermStore& store = *f.store;
  unsigned total = 0;
  std::vector<unsigned> widths;
  for (Term in : store.inputs()) {
    unsigned w = std::max(1u, store.width(in));
    widths.push_back(w);
    total += w;
  }
  if (total > kExhaustiveBitCap)
    throw DomainTooLarge("exhaustive_solve: " + std::to_string(total) + " input bits exceed the cap of " +
                         std::to_string(kExhaustiveBitCap));

  Evaluator ev(store);
  Valuation v;
  const std::uint64_t count = std::uint64_t{1} << total;
  for (std::uint64_t code = 0; code < count; ++code) {
    // The first input occupies the most significant bits of `code`.
    unsigned shift = total;
    for (std::size_t i = 0; i < widths.size(); ++i) {
      shift -= widths[i];
      v[store.input_name(store.inputs()[i])] = (code >> shift) & width_mask(widths[i]);
    }
    if (ev.eval(f.root, v)) {
      SolveResult r;
      r.kind = SolveResult::Kind::Sat;
      r.model = v;
      return r;
    }
  }
  return {};
}

namespace {

std::string quote(const std::string& name) { return "|" + name + "|"; }

std::string sort_of(unsigned width) {
  return width == 0 ? "Bool" : "(_ BitVec " + std::to_string(width) + ")";
}

std::string bits_literal(std::uint64_t v, unsigned width) {
  std::string s = "#b";
  for (unsigned i = width; i-- > 0;) s += ((v >> i) & 1) ? '1' : '0';
  return s;
}

} // namespace

std::string emit_smtlib(const BitvecFormula& f) {
  const TermStore& store = *f.store;
  std::ostringstream out;
  out << "(set-logic QF_BV)\n";
  for (Term in : store.inputs())
    out << "(declare-fun " << quote(store.input_name(in)) << " () "
        << sort_of(std::max(1u, store.width(in))) << ")\n";

  // Depth-layered lets keep nesting proportional to DAG depth.
  std::vector<char> needed(f.root + 1, 0);
  needed[f.root] = 1;
  auto arity = [](Op op) {
    switch (op) {
    case Op::BoolConst: case Op::BvConst: case Op::Input: return 0;
    case Op::Not: case Op::BvNot: case Op::BvNeg: return 1;
    case Op::Ite: return 3;
    default: return 2;
    }
  };
  for (Term t = f.root + 1; t-- > 0;) {
    if (!needed[t]) continue;
    const Node& n = store.node(t);
    int k = arity(n.op);
    if (k >= 1) needed[n.a] = 1;
    if (k >= 2) needed[n.b] = 1;
    if (k >= 3) needed[n.c] = 1;
  }

  std::vector<unsigned> depth(f.root + 1, 0);
  auto ref = [&](Term t) -> std::string {
    const Node& n = store.node(t);
    switch (n.op) {
    case Op::BoolConst: return n.value ? "true" : "false";
    case Op::BvConst: return bits_literal(n.value, n.width);
    case Op::Input:
      if (n.width == 0) return "(= " + quote(store.input_name(t)) + " #b1)";
      return quote(store.input_name(t));
    default: return "t" + std::to_string(t);
    }
  };
  std::vector<std::vector<std::pair<Term, std::string>>> layers;
  for (Term t = 0; t <= f.root; ++t) {
    if (!needed[t]) continue;
    const Node& n = store.node(t);
    int k = arity(n.op);
    if (k == 0) continue;
    unsigned d = 0;
    for (Term op : {n.a, n.b, n.c}) {
      if (k-- <= 0) break;
      d = std::max(d, depth[op] + 1);
    }
    depth[t] = d;
    std::string body;
    const unsigned w = store.width(n.a);
    auto shift_amount = [&](Term amount) {
      if (w && (w & (w - 1)) == 0) return "(bvand " + ref(amount) + " " + bits_literal(w - 1, w) + ")";
      return "(bvurem " + ref(amount) + " " + bits_literal(w, w) + ")";
    };
    switch (n.op) {
    case Op::Not: case Op::BvNot: case Op::BvNeg:
      body = std::string("(") + op_name(n.op) + " " + ref(n.a) + ")";
      break;
    case Op::Ite:
      body = "(ite " + ref(n.a) + " " + ref(n.b) + " " + ref(n.c) + ")";
      break;
    case Op::BvShl: case Op::BvAShr:
      body = std::string("(") + op_name(n.op) + " " + ref(n.a) + " " + shift_amount(n.b) + ")";
      break;
    default:
      body = std::string("(") + op_name(n.op) + " " + ref(n.a) + " " + ref(n.b) + ")";
      break;
    }
    if (layers.size() < d) layers.resize(d);
    layers[d - 1].emplace_back(t, std::move(body));
  }

  out << "(assert\n";
  for (const auto& layer : layers) {
    if (layer.empty()) continue;
    out << " (let (";
    for (std::size_t i = 0; i < layer.size(); ++i)
      out << (i ? " " : "") << "(t" << layer[i].first << " " << layer[i].second << ")";
    out << ")\n";
  }
  out << "  " << ref(f.root);
  for (const auto& layer : layers)
    if (!layer.empty()) out << ")";
  out << ")\n(check-sat)\n(get-model)\n";
  return out.str();
}

SolveResult InternalBackend::solve(const BitvecFormula& f, const SolveLimits& limits) const {
  CnfFormula cnf = bitblast(f);
  SatConfig cfg;
  cfg.algorithm = algorithm_;
  cfg.deadline = limits.deadline;
  cfg.cancel = limits.cancel;
  return from_outcome(cnf, solve_cnf(cnf, cfg));
}

std::string InternalBackend::name() const { return std::string("internal:") + to_string(algorithm_); }

SolveResult ExhaustiveBackend::solve(const BitvecFormula& f, const SolveLimits&) const {
  return exhaustive_solve(f);
}

ExternalBackend::ExternalBackend(std::string command) : command_(std::move(command)) {
  if (command_.find("{file}") == std::string::npos)
    throw std::invalid_argument("external backend command must contain {file}");
}

Valuation parse_smt_model(const std::string& text) {
  Valuation model;
  static const std::regex def(
      R"(\(define-fun\s+(\|[^|]*\||[^\s()]+)\s+\(\)\s+(?:\(_\s+BitVec\s+\d+\)|Bool)\s+(#b[01]+|#x[0-9a-fA-F]+|\(_\s+bv\d+\s+\d+\)|true|false)\s*\))");
  for (auto it = std::sregex_iterator(text.begin(), text.end(), def); it != std::sregex_iterator(); ++it) {
    std::string name = (*it)[1];
    if (name.size() >= 2 && name.front() == '|') name = name.substr(1, name.size() - 2);
    std::string value = (*it)[2];
    std::uint64_t v = 0;
    if (value == "true") v = 1;
    else if (value == "false") v = 0;
    else if (value.rfind("#b", 0) == 0) v = std::stoull(value.substr(2), nullptr, 2);
    else if (value.rfind("#x", 0) == 0) v = std::stoull(value.substr(2), nullptr, 16);
    else {
      std::smatch m;
      static const std::regex bv(R"(\(_\s+bv(\d+)\s+\d+\))");
      if (std::regex_match(value, m, bv)) v = std::stoull(m[1]);
    }
    model[name] = v;
  }
  return model;
}

SolveResult ExternalBackend::solve(const BitvecFormula& f, const SolveLimits& limits) const {
  SolveResult r;
  r.kind = SolveResult::Kind::Timeout;
  double seconds = 3600;
  if (limits.deadline) {
    seconds = std::chrono::duration<double>(*limits.deadline - Clock::now()).count();
    if (seconds <= 0) {
      r.detail = "deadline passed before launch";
      return r;
    }
  }

  std::string dir = std::filesystem::temp_directory_path().string();
  std::string path = dir + "/cfv-XXXXXX.smt2";
  std::vector<char> buf(path.begin(), path.end());
  buf.push_back('\0');
  int fd = mkstemps(buf.data(), 5);
  if (fd < 0) {
    r.detail = "cannot create temporary file";
    return r;
  }
  path.assign(buf.data());
  {
    std::string script = emit_smtlib(f);
    FILE* fp = fdopen(fd, "w");
    std::fwrite(script.data(), 1, script.size(), fp);
    std::fclose(fp);
  }

  std::string cmd = command_;
  for (std::size_t pos; (pos = cmd.find("{file}")) != std::string::npos;)
    cmd.replace(pos, 6, "'" + path + "'");
  std::ostringstream full;
  full << "timeout " << std::max(1, static_cast<int>(std::ceil(seconds))) << " " << cmd << " 2>&1";

  std::string output;
  int status = -1;
  if (FILE* pipe = popen(full.str().c_str(), "r")) {
    char chunk[4096];
    std::size_t n;
    while ((n = std::fread(chunk, 1, sizeof chunk, pipe)) > 0) output.append(chunk, n);
    status = pclose(pipe);
  }
  std::filesystem::remove(path);

  if (WIFEXITED(status) && WEXITSTATUS(status) == 124) {
    r.detail = "external solver timed out";
    return r;
  }
  std::istringstream lines(output);
  std::string first;
  std::getline(lines, first);
  while (!first.empty() && std::isspace(static_cast<unsigned char>(first.back()))) first.pop_back();
  if (first == "unsat") {
    r.kind = SolveResult::Kind::Unsat;
    return r;
  }
  if (first != "sat") {
    r.detail = "unexpected solver output: " + first;
    return r;
  }
  Valuation parsed = parse_smt_model(output);
  for (Term in : f.store->inputs()) {
    const std::string& name = f.store->input_name(in);
    auto it = parsed.find(name);
    r.model[name] = it == parsed.end() ? 0 : it->second & width_mask(f.store->width(in));
  }
  if (!evaluate(f, r.model)) {
    r.model.clear();
    r.detail = "external model does not satisfy the formula";
    return r;
  }
  r.kind = SolveResult::Kind::Sat;
  return r;
}

std::shared_ptr<const Backend> make_backend(const std::string& spec) {
  if (spec == "internal" || spec == "internal:cdcl")
    return std::make_shared<InternalBackend>(SatAlgorithm::Cdcl);
  if (spec == "internal:dpll") return std::make_shared<InternalBackend>(SatAlgorithm::Dpll);
  if (spec == "exhaustive") return std::make_shared<ExhaustiveBackend>();
  if (spec.rfind("external:", 0) == 0) return std::make_shared<ExternalBackend>(spec.substr(9));
  throw std::invalid_argument("unknown backend '" + spec + "'");
}

} // namespace cfv::solver
