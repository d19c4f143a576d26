#include <cfv/solver/term.hpp>

#include <stdexcept>
#include <utility>

namespace cfv::solver {

const char* op_name(Op op) {
  switch (op) {
  case Op::BoolConst: return "bool";
  case Op::BvConst: return "bv";
  case Op::Input: return "input";
  case Op::Not: return "not";
  case Op::And: return "and";
  case Op::Or: return "or";
  case Op::Xor: return "xor";
  case Op::Ite: return "ite";
  case Op::Eq: return "=";
  case Op::BvNot: return "bvnot";
  case Op::BvNeg: return "bvneg";
  case Op::BvAdd: return "bvadd";
  case Op::BvSub: return "bvsub";
  case Op::BvMul: return "bvmul";
  case Op::BvAnd: return "bvand";
  case Op::BvOr: return "bvor";
  case Op::BvXor: return "bvxor";
  case Op::BvShl: return "bvshl";
  case Op::BvAShr: return "bvashr";
  case Op::BvSlt: return "bvslt";
  case Op::BvSle: return "bvsle";
  }
  return "?";
}

std::uint64_t width_mask(unsigned width) {
  if (width == 0) return 1;
  return width >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << width) - 1;
}

std::int64_t to_signed(std::uint64_t v, unsigned width) {
  if (width == 0 || width >= 64) return static_cast<std::int64_t>(v);
  v &= width_mask(width);
  if (v >> (width - 1)) v |= ~width_mask(width);
  return static_cast<std::int64_t>(v);
}

namespace {

bool commutative(Op op) {
  switch (op) {
  case Op::And: case Op::Or: case Op::Xor: case Op::Eq:
  case Op::BvAdd: case Op::BvMul: case Op::BvAnd: case Op::BvOr: case Op::BvXor:
    return true;
  default: return false;
  }
}

// Semantics shared by the evaluator and constant folding.
std::uint64_t apply(Op op, unsigned w, std::uint64_t a, std::uint64_t b, std::uint64_t c,
                    unsigned operand_width) {
  const std::uint64_t m = width_mask(w);
  const unsigned ow = operand_width;
  switch (op) {
  case Op::Not: return !a;
  case Op::And: return a && b;
  case Op::Or: return a || b;
  case Op::Xor: return (a != 0) != (b != 0);
  case Op::Ite: return a ? b : c;
  case Op::Eq: return a == b;
  case Op::BvNot: return ~a & m;
  case Op::BvNeg: return (~a + 1) & m;
  case Op::BvAdd: return (a + b) & m;
  case Op::BvSub: return (a - b) & m;
  case Op::BvMul: return (a * b) & m;
  case Op::BvAnd: return a & b;
  case Op::BvOr: return a | b;
  case Op::BvXor: return a ^ b;
  case Op::BvShl: return (a << (b % w)) & m;
  case Op::BvAShr: {
    std::int64_t s = to_signed(a, w);
    return static_cast<std::uint64_t>(s >> (b % w)) & m;
  }
  case Op::BvSlt: return to_signed(a, ow) < to_signed(b, ow);
  case Op::BvSle: return to_signed(a, ow) <= to_signed(b, ow);
  default: break;
  }
  throw std::logic_error("apply: not an operator");
}

} // namespace

std::size_t TermStore::KeyHash::operator()(const Node& n) const {
  std::size_t h = static_cast<std::size_t>(n.op) * 0x9e3779b97f4a7c15ull;
  auto mix = [&](std::uint64_t v) { h ^= v + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2); };
  mix(n.width);
  mix(n.a);
  mix(n.b);
  mix(n.c);
  mix(n.value);
  return h;
}

bool TermStore::KeyEq::operator()(const Node& x, const Node& y) const {
  return x.op == y.op && x.width == y.width && x.a == y.a && x.b == y.b && x.c == y.c &&
         x.value == y.value;
}

TermStore::TermStore(bool fold) : fold_(fold) {
  bool_const(false);
  bool_const(true);
}

Term TermStore::intern(Node n) {
  auto [it, inserted] = index_.emplace(n, static_cast<Term>(nodes_.size()));
  if (inserted) nodes_.push_back(n);
  return it->second;
}

Term TermStore::bool_const(bool v) { return intern({Op::BoolConst, 0, 0, 0, 0, v ? 1u : 0u}); }

Term TermStore::bv_const(std::uint64_t v, unsigned width) {
  if (width == 0 || width > 64) throw std::invalid_argument("bv_const: bad width");
  return intern({Op::BvConst, static_cast<std::uint8_t>(width), 0, 0, 0, v & width_mask(width)});
}

Term TermStore::input(const std::string& name, unsigned width) {
  auto it = input_by_name_.find(name);
  if (it != input_by_name_.end()) {
    if (nodes_[it->second].width != width)
      throw std::invalid_argument("input '" + name + "' redeclared with a different width");
    return it->second;
  }
  Node n{Op::Input, static_cast<std::uint8_t>(width), 0, 0, 0, input_names_.size()};
  Term t = intern(n);
  input_names_.push_back(name);
  inputs_.push_back(t);
  input_by_name_.emplace(name, t);
  return t;
}

// Builds a node after generic constant folding and operand ordering.
Term TermStore::make(Op op, unsigned width, Term a, Term b, Term c) {
  if (commutative(op) && a > b) std::swap(a, b);
  if (fold_) {
    bool all_const = is_const(a) && (op == Op::Not || op == Op::BvNot || op == Op::BvNeg ||
                                     is_const(b)) &&
                     (op != Op::Ite || is_const(c));
    if (op == Op::Ite && is_const(a)) return const_value(a) ? b : c;
    if (all_const) {
      std::uint64_t v = apply(op, width, const_value(a), const_value(b), const_value(c),
                              nodes_[a].width);
      return width == 0 ? bool_const(v != 0) : bv_const(v, width);
    }
  }
  return intern({op, static_cast<std::uint8_t>(width), a, b, c, 0});
}

Term TermStore::mk_not(Term a) {
  if (fold_ && nodes_[a].op == Op::Not) return nodes_[a].a;
  return make(Op::Not, 0, a);
}

Term TermStore::mk_and(Term a, Term b) {
  if (fold_) {
    if (is_false(a) || is_false(b)) return bool_const(false);
    if (is_true(a)) return b;
    if (is_true(b)) return a;
    if (a == b) return a;
    if ((nodes_[a].op == Op::Not && nodes_[a].a == b) ||
        (nodes_[b].op == Op::Not && nodes_[b].a == a))
      return bool_const(false);
  }
  return make(Op::And, 0, a, b);
}

Term TermStore::mk_or(Term a, Term b) {
  if (fold_) {
    if (is_true(a) || is_true(b)) return bool_const(true);
    if (is_false(a)) return b;
    if (is_false(b)) return a;
    if (a == b) return a;
    if ((nodes_[a].op == Op::Not && nodes_[a].a == b) ||
        (nodes_[b].op == Op::Not && nodes_[b].a == a))
      return bool_const(true);
  }
  return make(Op::Or, 0, a, b);
}

Term TermStore::mk_xor(Term a, Term b) {
  if (fold_) {
    if (is_false(a)) return b;
    if (is_false(b)) return a;
    if (is_true(a)) return mk_not(b);
    if (is_true(b)) return mk_not(a);
    if (a == b) return bool_const(false);
  }
  return make(Op::Xor, 0, a, b);
}

Term TermStore::mk_ite(Term c, Term t, Term e) {
  if (!is_bool(c)) throw std::invalid_argument("ite: condition must be Bool");
  if (width(t) != width(e)) throw std::invalid_argument("ite: branch sorts differ");
  if (fold_) {
    if (t == e) return t;
    if (nodes_[c].op == Op::Not) return mk_ite(nodes_[c].a, e, t);
    if (is_bool(t)) {
      if (is_true(t)) return mk_or(c, e);
      if (is_false(t)) return mk_and(mk_not(c), e);
      if (is_true(e)) return mk_or(mk_not(c), t);
      if (is_false(e)) return mk_and(c, t);
    }
    // ite(c, ite(c, x, _), e) = ite(c, x, e), and symmetrically.
    if (nodes_[t].op == Op::Ite && nodes_[t].a == c) return mk_ite(c, nodes_[t].b, e);
    if (nodes_[e].op == Op::Ite && nodes_[e].a == c) return mk_ite(c, t, nodes_[e].c);
  }
  return make(Op::Ite, width(t), c, t, e);
}

Term TermStore::mk_eq(Term a, Term b) {
  if (width(a) != width(b)) throw std::invalid_argument("eq: sorts differ");
  if (fold_) {
    if (a == b) return bool_const(true);
    if (is_bool(a)) {
      if (is_true(a)) return b;
      if (is_true(b)) return a;
      if (is_false(a)) return mk_not(b);
      if (is_false(b)) return mk_not(a);
    }
  }
  return make(Op::Eq, 0, a, b);
}

Term TermStore::bv_not(Term a) {
  if (fold_ && nodes_[a].op == Op::BvNot) return nodes_[a].a;
  return make(Op::BvNot, width(a), a);
}

Term TermStore::bv_neg(Term a) {
  if (fold_ && nodes_[a].op == Op::BvNeg) return nodes_[a].a;
  return make(Op::BvNeg, width(a), a);
}

Term TermStore::bv_add(Term a, Term b) {
  if (width(a) != width(b) || is_bool(a)) throw std::invalid_argument("bvadd: sorts differ");
  if (fold_) {
    if (is_const(a) && const_value(a) == 0) return b;
    if (is_const(b) && const_value(b) == 0) return a;
  }
  return make(Op::BvAdd, width(a), a, b);
}

Term TermStore::bv_sub(Term a, Term b) {
  if (width(a) != width(b) || is_bool(a)) throw std::invalid_argument("bvsub: sorts differ");
  if (fold_) {
    if (is_const(b) && const_value(b) == 0) return a;
    if (a == b) return bv_const(0, width(a));
  }
  return make(Op::BvSub, width(a), a, b);
}

Term TermStore::bv_mul(Term a, Term b) {
  if (width(a) != width(b) || is_bool(a)) throw std::invalid_argument("bvmul: sorts differ");
  if (fold_) {
    for (auto [x, y] : {std::pair{a, b}, std::pair{b, a}}) {
      if (is_const(x) && const_value(x) == 0) return x;
      if (is_const(x) && const_value(x) == 1) return y;
    }
  }
  return make(Op::BvMul, width(a), a, b);
}

Term TermStore::bv_and(Term a, Term b) {
  if (width(a) != width(b) || is_bool(a)) throw std::invalid_argument("bvand: sorts differ");
  if (fold_) {
    const std::uint64_t ones = width_mask(width(a));
    for (auto [x, y] : {std::pair{a, b}, std::pair{b, a}}) {
      if (is_const(x) && const_value(x) == 0) return x;
      if (is_const(x) && const_value(x) == ones) return y;
    }
    if (a == b) return a;
  }
  return make(Op::BvAnd, width(a), a, b);
}

Term TermStore::bv_or(Term a, Term b) {
  if (width(a) != width(b) || is_bool(a)) throw std::invalid_argument("bvor: sorts differ");
  if (fold_) {
    const std::uint64_t ones = width_mask(width(a));
    for (auto [x, y] : {std::pair{a, b}, std::pair{b, a}}) {
      if (is_const(x) && const_value(x) == 0) return y;
      if (is_const(x) && const_value(x) == ones) return x;
    }
    if (a == b) return a;
  }
  return make(Op::BvOr, width(a), a, b);
}

Term TermStore::bv_xor(Term a, Term b) {
  if (width(a) != width(b) || is_bool(a)) throw std::invalid_argument("bvxor: sorts differ");
  if (fold_) {
    if (is_const(a) && const_value(a) == 0) return b;
    if (is_const(b) && const_value(b) == 0) return a;
    if (a == b) return bv_const(0, width(a));
  }
  return make(Op::BvXor, width(a), a, b);
}

Term TermStore::bv_shl(Term a, Term b) {
  if (width(a) != width(b) || is_bool(a)) throw std::invalid_argument("bvshl: sorts differ");
  if (fold_ && is_const(b) && const_value(b) % width(a) == 0) return a;
  return make(Op::BvShl, width(a), a, b);
}

Term TermStore::bv_ashr(Term a, Term b) {
  if (width(a) != width(b) || is_bool(a)) throw std::invalid_argument("bvashr: sorts differ");
  if (fold_ && is_const(b) && const_value(b) % width(a) == 0) return a;
  return make(Op::BvAShr, width(a), a, b);
}

Term TermStore::bv_slt(Term a, Term b) {
  if (width(a) != width(b) || is_bool(a)) throw std::invalid_argument("bvslt: sorts differ");
  if (fold_ && a == b) return bool_const(false);
  return make(Op::BvSlt, 0, a, b);
}

Term TermStore::bv_sle(Term a, Term b) {
  if (width(a) != width(b) || is_bool(a)) throw std::invalid_argument("bvsle: sorts differ");
  if (fold_ && a == b) return bool_const(true);
  return make(Op::BvSle, 0, a, b);
}

std::uint64_t Evaluator::eval(Term root, const Valuation& inputs) {
  if (cache_.size() < store_.size()) {
    cache_.resize(store_.size());
    stamp_.resize(store_.size(), 0);
  }
  ++epoch_;
  const auto& ins = store_.inputs();
  input_values_.assign(ins.size(), 0);
  for (std::size_t i = 0; i < ins.size(); ++i) {
    auto it = inputs.find(store_.input_name(ins[i]));
    if (it != inputs.end()) input_values_[i] = it->second & width_mask(store_.width(ins[i]));
  }

  // Iterative post-order: deep ite chains from loop unrolling overflow recursion.
  std::vector<Term> stack{root};
  while (!stack.empty()) {
    Term t = stack.back();
    if (stamp_[t] == epoch_) {
      stack.pop_back();
      continue;
    }
    const Node& n = store_.node(t);
    if (n.op == Op::BoolConst || n.op == Op::BvConst) {
      cache_[t] = n.value;
    } else if (n.op == Op::Input) {
      cache_[t] = input_values_[n.value];
    } else {
      const bool unary = n.op == Op::Not || n.op == Op::BvNot || n.op == Op::BvNeg;
      Term ops[3] = {n.a, n.b, n.c};
      const int arity = unary ? 1 : (n.op == Op::Ite ? 3 : 2);
      bool ready = true;
      for (int i = 0; i < arity; ++i) {
        if (stamp_[ops[i]] != epoch_) {
          stack.push_back(ops[i]);
          ready = false;
        }
      }
      if (!ready) continue;
      cache_[t] = apply(n.op, n.width, cache_[n.a], arity > 1 ? cache_[n.b] : 0,
                        arity > 2 ? cache_[n.c] : 0, store_.width(n.a));
    }
    stamp_[t] = epoch_;
    stack.pop_back();
  }
  return cache_[root];
}

std::uint64_t evaluate(const BitvecFormula& f, const Valuation& inputs) {
  Evaluator ev(*f.store);
  return ev.eval(f.root, inputs);
}

} // namespace cfv::solver
