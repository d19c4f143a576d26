#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <unordered_map>
#include <vector>

namespace cfv::solver {

/// Index into a TermStore. Terms are hash-consed: equal (op, sort, operands)
/// always yield the same index.
using Term = std::uint32_t;

enum class Op : std::uint8_t {
  BoolConst, BvConst, Input,
  Not, And, Or, Xor, Ite, Eq,
  BvNot, BvNeg, BvAdd, BvSub, BvMul, BvAnd, BvOr, BvXor, BvShl, BvAShr,
  BvSlt, BvSle,
};

const char* op_name(Op op);

struct Node {
  Op op = Op::BoolConst;
  std::uint8_t width = 0; // 0 = Bool
  Term a = 0, b = 0, c = 0;
  std::uint64_t value = 0; // constants; input ordinal for Input
};

/// Value of a term or input: a bit pattern masked to its width (0/1 for Bool).
using Valuation = std::map<std::string, std::uint64_t>;

std::uint64_t width_mask(unsigned width);
/// Sign-extends the low `width` bits of `v`.
std::int64_t to_signed(std::uint64_t v, unsigned width);

/// A DAG of bit-vector and Boolean terms with constant folding and local
/// simplification at construction time.
class TermStore {
public:
  explicit TermStore(bool fold = true);

  Term bool_const(bool v);
  Term bv_const(std::uint64_t v, unsigned width);
  /// Declares (or returns the existing) input symbol. Width 0 is Bool.
  Term input(const std::string& name, unsigned width);

  Term mk_not(Term a);
  Term mk_and(Term a, Term b);
  Term mk_or(Term a, Term b);
  Term mk_xor(Term a, Term b);
  Term mk_implies(Term a, Term b) { return mk_or(mk_not(a), b); }
  Term mk_ite(Term c, Term t, Term e);
  Term mk_eq(Term a, Term b);
  Term mk_ne(Term a, Term b) { return mk_not(mk_eq(a, b)); }

  Term bv_not(Term a);
  Term bv_neg(Term a);
  Term bv_add(Term a, Term b);
  Term bv_sub(Term a, Term b);
  Term bv_mul(Term a, Term b);
  Term bv_and(Term a, Term b);
  Term bv_or(Term a, Term b);
  Term bv_xor(Term a, Term b);
  /// Shift amount is taken modulo the width.
  Term bv_shl(Term a, Term b);
  Term bv_ashr(Term a, Term b);
  Term bv_slt(Term a, Term b);
  Term bv_sle(Term a, Term b);

  const Node& node(Term t) const { return nodes_[t]; }
  unsigned width(Term t) const { return nodes_[t].width; }
  bool is_bool(Term t) const { return nodes_[t].width == 0; }
  bool is_const(Term t) const {
    return nodes_[t].op == Op::BoolConst || nodes_[t].op == Op::BvConst;
  }
  bool is_true(Term t) const { return nodes_[t].op == Op::BoolConst && nodes_[t].value; }
  bool is_false(Term t) const { return nodes_[t].op == Op::BoolConst && !nodes_[t].value; }
  std::size_t size() const { return nodes_.size(); }
  bool folding() const { return fold_; }

  const std::vector<Term>& inputs() const { return inputs_; }
  const std::string& input_name(Term t) const { return input_names_[nodes_[t].value]; }

private:
  Term intern(Node n);
  Term make(Op op, unsigned width, Term a = 0, Term b = 0, Term c = 0);
  std::uint64_t const_value(Term t) const { return nodes_[t].value; }

  struct KeyHash {
    std::size_t operator()(const Node& n) const;
  };
  struct KeyEq {
    bool operator()(const Node& x, const Node& y) const;
  };

  bool fold_;
  std::vector<Node> nodes_;
  std::unordered_map<Node, Term, KeyHash, KeyEq> index_;
  std::vector<Term> inputs_;
  std::vector<std::string> input_names_;
  std::unordered_map<std::string, Term> input_by_name_;
};

/// A Boolean root over a shared store. The inputs of the formula are all
/// inputs declared in the store, in declaration order.
struct BitvecFormula {
  std::shared_ptr<TermStore> store;
  Term root = 0;
};

/// Concrete semantics. Inputs missing from `inputs` evaluate to 0.
class Evaluator {
public:
  explicit Evaluator(const TermStore& store) : store_(store) {}
  std::uint64_t eval(Term t, const Valuation& inputs);

private:
  const TermStore& store_;
  std::vector<std::uint64_t> cache_;
  std::vector<std::uint32_t> stamp_;
  std::uint32_t epoch_ = 0;
  std::vector<std::uint64_t> input_values_;
};

std::uint64_t evaluate(const BitvecFormula& f, const Valuation& inputs);

} // namespace cfv::solver
