#include <cfv/frontend/analysis.hpp>

namespace cfv::frontend {
namespace {

class Renamer {
public:
  Renamer(const FunctionDef& fn, const std::map<std::string, std::string>* callee_renames)
      : self_(fn.name), callee_renames_(callee_renames) {
    for (std::size_t i = 0; i < fn.params.size(); ++i)
      names_[fn.params[i].name] = "p" + std::to_string(i);
  }

  ExprPtr expr(const ExprPtr& in) {
    Expr e = *in;
    e.span = {};
    for (auto& op : e.operands) op = expr(op);
    if (e.kind == ExprKind::VarRef || e.kind == ExprKind::ArrayIndex) {
      e.name = local(e.name);
    } else if (e.kind == ExprKind::Call) {
      if (e.name == self_) e.name = kSelfPlaceholder;
      else if (callee_renames_) {
        auto it = callee_renames_->find(e.name);
        if (it != callee_renames_->end()) e.name = it->second;
      }
    }
    return std::make_shared<const Expr>(std::move(e));
  }

  // Appends the renamed statement to `out`; plain blocks are spliced.
  void stmt(const StmtPtr& in, std::vector<StmtPtr>& out) {
    if (in->kind == StmtKind::Block) {
      for (const auto& c : in->body) stmt(c, out);
      return;
    }
    Stmt s = *in;
    s.span = {};
    if (s.index) s.index = expr(s.index);
    if (s.expr) s.expr = expr(s.expr);
    for (auto& e : s.array_init) e = expr(e);
    if (s.kind == StmtKind::VarDecl) {
      std::string fresh = "v" + std::to_string(next_local_++);
      names_[s.name] = fresh;
      s.name = fresh;
    } else if (s.kind == StmtKind::Assign) {
      s.name = local(s.name);
    }
    if (s.then_branch) s.then_branch = block(s.then_branch);
    if (s.else_branch) s.else_branch = block(s.else_branch);
    out.push_back(std::make_shared<const Stmt>(std::move(s)));
  }

  StmtPtr block(const StmtPtr& in) {
    std::vector<StmtPtr> body;
    stmt(in, body);
    return make_block(std::move(body));
  }

private:
  std::string local(const std::string& name) const {
    auto it = names_.find(name);
    return it == names_.end() ? name : it->second;
  }

  std::string self_;
  const std::map<std::string, std::string>* callee_renames_;
  std::map<std::string, std::string> names_;
  unsigned next_local_ = 0;
};

} // namespace

FunctionDef normalize_alpha(const FunctionDef& fn,
                            const std::map<std::string, std::string>* callee_renames) {
  Renamer r(fn, callee_renames);
  FunctionDef out = fn;
  out.name = kSelfPlaceholder;
  for (std::size_t i = 0; i < out.params.size(); ++i) {
    out.params[i].name = "p" + std::to_string(i);
    out.params[i].span = {};
  }
  out.body = r.block(fn.body);
  out.span = {};
  out.path.clear();
  out.body_text.clear();
  out.leading_comment.clear();
  if (out.callees.erase(fn.name)) out.callees.insert(kSelfPlaceholder);
  if (callee_renames) {
    std::set<std::string> callees;
    for (const auto& c : out.callees) {
      auto it = callee_renames->find(c);
      callees.insert(it == callee_renames->end() ? c : it->second);
    }
    out.callees = std::move(callees);
  }
  return out;
}

unsigned cyclomatic_complexity(const FunctionDef& fn) {
  unsigned count = 1;
  for_each_stmt(*fn.body, [&](const Stmt& s) {
    if (s.kind == StmtKind::If || s.kind == StmtKind::While) ++count;
  });
  for_each_expr(*fn.body, [&](const Expr& e) {
    if (e.kind == ExprKind::Binary &&
        (e.binary_op == BinaryOp::LogAnd || e.binary_op == BinaryOp::LogOr))
      ++count;
  });
  return count;
}

} // namespace cfv::frontend
