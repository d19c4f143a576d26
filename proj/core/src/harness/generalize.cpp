#include <cfv/harness/generalize.hpp>

#include <cfv/equivalence/symbols.hpp>
#include <cfv/frontend/analysis.hpp>
#include <cfv/frontend/type_check.hpp>

#include <stdexcept>

namespace cfv::harness {

using frontend::Expr;
using frontend::ExprKind;
using frontend::ExprPtr;
using frontend::Stmt;
using frontend::StmtKind;
using frontend::StmtPtr;

const char* to_string(Generalization g) {
  switch (g) {
  case Generalization::Automatic: return "automatic";
  case Generalization::Manual: return "manual";
  case Generalization::None: return "none";
  }
  return "?";
}

namespace {

class Rewriter {
public:
  explicit Rewriter(const std::set<std::string>& targets) : targets_(targets) {}

  std::vector<Substitution> subs;
  std::set<const Expr*> fresh;

  ExprPtr expr(const ExprPtr& e) {
    if (!e) return e;
    Expr copy = *e;
    bool changed = false;
    const bool target = e->kind == ExprKind::Call && targets_.count(e->name);
    for (std::size_t i = 0; i < copy.operands.size(); ++i) {
      ExprPtr& op = copy.operands[i];
      ExprPtr next;
      if (target) next = literal_arg(*e, i, *op);
      if (!next) next = expr(op);
      changed |= next != op;
      op = std::move(next);
    }
    return changed ? std::make_shared<const Expr>(std::move(copy)) : e;
  }

  StmtPtr stmt(const StmtPtr& s) {
    if (!s || s->kind == StmtKind::Assert || s->kind == StmtKind::Assume) return s;
    Stmt copy = *s;
    bool changed = false;
    auto e = [&](ExprPtr& x) {
      auto n = expr(x);
      changed |= n != x;
      x = std::move(n);
    };
    auto st = [&](StmtPtr& x) {
      auto n = stmt(x);
      changed |= n != x;
      x = std::move(n);
    };
    e(copy.index);
    e(copy.expr);
    for (auto& x : copy.array_init) e(x);
    for (auto& x : copy.body) st(x);
    st(copy.then_branch);
    st(copy.else_branch);
    return changed ? std::make_shared<const Stmt>(std::move(copy)) : s;
  }

private:
  ExprPtr literal_arg(const Expr& call, std::size_t pos, const Expr& arg) {
    Substitution sub;
    sub.call_site = call.span;
    sub.callee = call.name;
    sub.argument = static_cast<unsigned>(pos);
    if (arg.kind == ExprKind::BoolLit) {
      sub.original = arg.bool_value;
      sub.is_bool = true;
    } else if (!frontend::literal_value(arg, sub.original)) {
      return nullptr;
    }
    Expr nd;
    nd.kind = sub.is_bool ? ExprKind::NondetBool : ExprKind::NondetInt;
    nd.span = arg.span;
    nd.type = arg.type;
    auto out = std::make_shared<const Expr>(std::move(nd));
    fresh.insert(out.get());
    subs.push_back(std::move(sub));
    return out;
  }

  const std::set<std::string>& targets_;
};

void collect_nondets(const Stmt& s, std::vector<const Expr*>& out) {
  frontend::for_each_expr(s, [&](const Expr& e) {
    if (e.kind == ExprKind::NondetInt || e.kind == ExprKind::NondetBool) out.push_back(&e);
  });
}

} // namespace

GeneralizedTest as_generalized(const TestCase& t) {
  GeneralizedTest g;
  g.origin = t.name;
  g.section = t.section;
  g.body = t.body;
  g.kind = t.body->nondet_sites > 0 ? Generalization::Manual : Generalization::None;
  return g;
}

GeneralizedTest generalize(const TestCase& t, const std::set<std::string>& targets) {
  if (!t.body || !t.body->typed) throw std::invalid_argument("generalize: test is not type-checked");
  GeneralizedTest g = as_generalized(t);
  Rewriter rw(targets);
  StmtPtr body = rw.stmt(t.body->body);
  if (rw.subs.empty()) return g;

  // Renumbering rebuilds nodes; pre-order positions identify the fresh ones.
  std::vector<const Expr*> before;
  collect_nondets(*body, before);
  std::uint32_t sites = 0;
  StmtPtr numbered = frontend::number_nondet_sites(body, sites);
  std::vector<const Expr*> after;
  collect_nondets(*numbered, after);
  std::size_t next = 0;
  for (std::size_t i = 0; i < before.size(); ++i) {
    if (!rw.fresh.count(before[i])) continue;
    rw.subs[next++].symbol = equivalence::nondet_symbol(frontend::kSelfPlaceholder, after[i]->site);
  }

  auto fn = std::make_shared<FunctionDef>(*t.body);
  fn->body = numbered;
  fn->nondet_sites = sites;
  g.body = std::move(fn);
  g.substitutions = std::move(rw.subs);
  if (g.kind == Generalization::None) g.kind = Generalization::Automatic;
  return g;
}

} // namespace cfv::harness
