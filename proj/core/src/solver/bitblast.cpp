#include <cfv/solver/cnf.hpp>

#include <algorithm>
#include <climits>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

namespace cfv::solver {
namespace {

constexpr Lit kTrue = INT_MAX;
constexpr Lit kFalse = -INT_MAX;

using Bits = std::vector<Lit>; // LSB first

struct PairHash {
  std::size_t operator()(std::uint64_t k) const { return std::hash<std::uint64_t>()(k * 0x9e3779b97f4a7c15ull); }
};

class Blaster {
public:
  explicit Blaster(CnfFormula& cnf) : cnf_(cnf) {}

  Lit fresh() { return ++cnf_.num_vars; }
  static bool is_const(Lit a) { return a == kTrue || a == kFalse; }
  static Lit constant(bool v) { return v ? kTrue : kFalse; }

  void clause(std::initializer_list<Lit> lits) { cnf_.clauses.emplace_back(lits); }

  Lit g_and(Lit a, Lit b) {
    if (a == kFalse || b == kFalse) return kFalse;
    if (a == kTrue) return b;
    if (b == kTrue) return a;
    if (a == b) return a;
    if (a == -b) return kFalse;
    if (a > b) std::swap(a, b);
    auto key = pack(a, b);
    auto it = and_gates_.find(key);
    if (it != and_gates_.end()) return it->second;
    Lit g = fresh();
    clause({-g, a});
    clause({-g, b});
    clause({g, -a, -b});
    and_gates_.emplace(key, g);
    return g;
  }

  Lit g_or(Lit a, Lit b) { return -g_and(-a, -b); }

  Lit g_xor(Lit a, Lit b) {
    if (is_const(a)) return a == kTrue ? -b : b;
    if (is_const(b)) return b == kTrue ? -a : a;
    if (a == b) return kFalse;
    if (a == -b) return kTrue;
    bool negate = false;
    if (a < 0) { a = -a; negate = !negate; }
    if (b < 0) { b = -b; negate = !negate; }
    if (a > b) std::swap(a, b);
    auto key = pack(a, b);
    auto it = xor_gates_.find(key);
    Lit g;
    if (it != xor_gates_.end()) {
      g = it->second;
    } else {
      g = fresh();
      clause({-g, a, b});
      clause({-g, -a, -b});
      clause({g, -a, b});
      clause({g, a, -b});
      xor_gates_.emplace(key, g);
    }
    return negate ? -g : g;
  }

  Lit g_mux(Lit s, Lit t, Lit e) {
    if (is_const(s)) return s == kTrue ? t : e;
    if (t == e) return t;
    if (t == -e) return -g_xor(s, t);
    if (t == kTrue) return g_or(s, e);
    if (t == kFalse) return g_and(-s, e);
    if (e == kTrue) return g_or(-s, t);
    if (e == kFalse) return g_and(s, t);
    if (s < 0) { s = -s; std::swap(t, e); }
    std::uint64_t key = pack(s, t) ^ (static_cast<std::uint64_t>(static_cast<std::uint32_t>(e)) * 0xff51afd7ed558ccdull);
    auto range = mux_gates_.equal_range(key);
    for (auto it = range.first; it != range.second; ++it)
      if (it->second.s == s && it->second.t == t && it->second.e == e) return it->second.g;
    Lit g = fresh();
    clause({-g, -s, t});
    clause({-g, s, e});
    clause({g, -s, -t});
    clause({g, s, -e});
    // Redundant but strengthens propagation when both data inputs agree.
    clause({-g, t, e});
    clause({g, -t, -e});
    mux_gates_.emplace(key, Mux{s, t, e, g});
    return g;
  }

  // Returns (sum, carry).
  std::pair<Lit, Lit> full_add(Lit a, Lit b, Lit cin) {
    Lit ab = g_xor(a, b);
    Lit sum = g_xor(ab, cin);
    Lit carry = g_or(g_and(a, b), g_and(cin, ab));
    return {sum, carry};
  }

  Bits add(const Bits& a, const Bits& b, Lit cin = kFalse) {
    Bits out(a.size());
    Lit carry = cin;
    for (std::size_t i = 0; i < a.size(); ++i) {
      auto [s, c] = full_add(a[i], b[i], carry);
      out[i] = s;
      carry = c;
    }
    return out;
  }

  Bits invert(const Bits& a) {
    Bits out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = -a[i];
    return out;
  }

  Bits sub(const Bits& a, const Bits& b) { return add(a, invert(b), kTrue); }

  Bits mul(const Bits& a, const Bits& b) {
    const std::size_t w = a.size();
    Bits acc(w, kFalse);
    for (std::size_t i = 0; i < w; ++i) {
      if (b[i] == kFalse) continue;
      Bits partial(w, kFalse);
      for (std::size_t j = i; j < w; ++j) partial[j] = g_and(a[j - i], b[i]);
      // Bits below i are unaffected by this partial product.
      Lit carry = kFalse;
      for (std::size_t j = i; j < w; ++j) {
        auto [s, c] = full_add(acc[j], partial[j], carry);
        acc[j] = s;
        carry = c;
      }
    }
    return acc;
  }

  Bits shift(const Bits& a, const Bits& amount, bool left, bool arithmetic) {
    const std::size_t w = a.size();
    if (w & (w - 1)) throw std::invalid_argument("bitblast: shifts need a power-of-two width");
    Bits cur = a;
    for (std::size_t stage = 0, dist = 1; dist < w; ++stage, dist <<= 1) {
      Lit s = amount[stage];
      if (s == kFalse) continue;
      Bits next(w);
      for (std::size_t i = 0; i < w; ++i) {
        Lit moved;
        if (left) moved = i >= dist ? cur[i - dist] : kFalse;
        else moved = i + dist < w ? cur[i + dist] : (arithmetic ? cur[w - 1] : kFalse);
        next[i] = g_mux(s, moved, cur[i]);
      }
      cur = std::move(next);
    }
    return cur;
  }

  Lit equal(const Bits& a, const Bits& b) {
    std::vector<Lit> eqs;
    for (std::size_t i = 0; i < a.size(); ++i) eqs.push_back(-g_xor(a[i], b[i]));
    return conjunction(eqs);
  }

  Lit conjunction(std::vector<Lit> lits) {
    if (lits.empty()) return kTrue;
    while (lits.size() > 1) {
      std::vector<Lit> next;
      for (std::size_t i = 0; i + 1 < lits.size(); i += 2) next.push_back(g_and(lits[i], lits[i + 1]));
      if (lits.size() % 2) next.push_back(lits.back());
      lits = std::move(next);
    }
    return lits.front();
  }

  Lit slt(const Bits& a, const Bits& b) {
    const std::size_t msb = a.size() - 1;
    Bits diff = sub(a, b);
    // Signs differ: a < b iff a is negative. Otherwise the difference cannot
    // overflow and its sign decides.
    return g_mux(g_xor(a[msb], b[msb]), a[msb], diff[msb]);
  }

private:
  static std::uint64_t pack(Lit a, Lit b) {
    return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(a)) << 32) |
           static_cast<std::uint32_t>(b);
  }

  struct Mux { Lit s, t, e, g; };

  CnfFormula& cnf_;
  std::unordered_map<std::uint64_t, Lit, PairHash> and_gates_;
  std::unordered_map<std::uint64_t, Lit, PairHash> xor_gates_;
  std::unordered_multimap<std::uint64_t, Mux, PairHash> mux_gates_;
};

} // namespace

CnfFormula bitblast(const BitvecFormula& f) {
  const TermStore& store = *f.store;
  CnfFormula cnf;
  Blaster bb(cnf);

  std::vector<Bits> bits(store.size());
  for (Term in : store.inputs()) {
    unsigned w = store.width(in);
    unsigned n = w == 0 ? 1 : w;
    InputBits ib{store.input_name(in), w, std::vector<int>(n)};
    for (unsigned i = n; i-- > 0;) ib.vars[i] = bb.fresh();
    bits[in].assign(ib.vars.begin(), ib.vars.end());
    cnf.inputs.push_back(std::move(ib));
  }

  // Operands always have smaller indices than their users.
  std::vector<char> needed(store.size(), 0);
  needed[f.root] = 1;
  for (Term t = f.root + 1; t-- > 0;) {
    if (!needed[t]) continue;
    const Node& n = store.node(t);
    switch (n.op) {
    case Op::BoolConst: case Op::BvConst: case Op::Input: break;
    case Op::Not: case Op::BvNot: case Op::BvNeg: needed[n.a] = 1; break;
    case Op::Ite: needed[n.a] = needed[n.b] = needed[n.c] = 1; break;
    default: needed[n.a] = needed[n.b] = 1; break;
    }
  }

  for (Term t = 0; t <= f.root; ++t) {
    if (!needed[t]) continue;
    const Node& n = store.node(t);
    Bits& out = bits[t];
    switch (n.op) {
    case Op::BoolConst: out = {Blaster::constant(n.value != 0)}; break;
    case Op::BvConst:
      out.resize(n.width);
      for (unsigned i = 0; i < n.width; ++i) out[i] = Blaster::constant((n.value >> i) & 1);
      break;
    case Op::Input: break;
    case Op::Not: out = {-bits[n.a][0]}; break;
    case Op::And: out = {bb.g_and(bits[n.a][0], bits[n.b][0])}; break;
    case Op::Or: out = {bb.g_or(bits[n.a][0], bits[n.b][0])}; break;
    case Op::Xor: out = {bb.g_xor(bits[n.a][0], bits[n.b][0])}; break;
    case Op::Ite: {
      const Bits& tb = bits[n.b];
      const Bits& eb = bits[n.c];
      out.resize(tb.size());
      for (std::size_t i = 0; i < tb.size(); ++i) out[i] = bb.g_mux(bits[n.a][0], tb[i], eb[i]);
      break;
    }
    case Op::Eq: out = {bb.equal(bits[n.a], bits[n.b])}; break;
    case Op::BvNot: out = bb.invert(bits[n.a]); break;
    case Op::BvNeg: {
      Bits zero(bits[n.a].size(), Blaster::constant(false));
      out = bb.sub(zero, bits[n.a]);
      break;
    }
    case Op::BvAdd: out = bb.add(bits[n.a], bits[n.b]); break;
    case Op::BvSub: out = bb.sub(bits[n.a], bits[n.b]); break;
    case Op::BvMul: out = bb.mul(bits[n.a], bits[n.b]); break;
    case Op::BvAnd: case Op::BvOr: case Op::BvXor: {
      const Bits& a = bits[n.a];
      const Bits& b = bits[n.b];
      out.resize(a.size());
      for (std::size_t i = 0; i < a.size(); ++i)
        out[i] = n.op == Op::BvAnd ? bb.g_and(a[i], b[i])
               : n.op == Op::BvOr  ? bb.g_or(a[i], b[i])
                                   : bb.g_xor(a[i], b[i]);
      break;
    }
    case Op::BvShl: out = bb.shift(bits[n.a], bits[n.b], true, false); break;
    case Op::BvAShr: out = bb.shift(bits[n.a], bits[n.b], false, true); break;
    case Op::BvSlt: out = {bb.slt(bits[n.a], bits[n.b])}; break;
    case Op::BvSle: out = {-bb.slt(bits[n.b], bits[n.a])}; break;
    }
  }

  Lit root = bits[f.root][0];
  if (root == kTrue) cnf.clauses.push_back({bb.fresh()});
  else if (root == kFalse) cnf.clauses.emplace_back();
  else cnf.clauses.push_back({root});
  return cnf;
}

Valuation decode_model(const CnfFormula& cnf, const std::vector<bool>& assignment) {
  Valuation model;
  for (const auto& in : cnf.inputs) {
    std::uint64_t v = 0;
    for (std::size_t i = 0; i < in.vars.size(); ++i)
      if (assignment[in.vars[i]]) v |= std::uint64_t{1} << i;
    model[in.name] = v;
  }
  return model;
}

std::string to_dimacs(const CnfFormula& cnf) {
  std::ostringstream out;
  out << "p cnf " << cnf.num_vars << " " << cnf.clauses.size() << "\n";
  for (const auto& c : cnf.clauses) {
    for (Lit l : c) out << l << " ";
    out << "0\n";
  }
  return out.str();
}

} // namespace cfv::solver
