#pragma once

#include <cfv/solver/term.hpp>

#include <string>
#include <vector>

namespace cfv::solver {

/// DIMACS-style literal: +v or -v for variable v >= 1.
using Lit = int;

struct InputBits {
  std::string name;
  unsigned width = 0;     // 0 = Bool (one variable)
  std::vector<int> vars;  // vars[i] holds bit i (LSB first)
};

struct CnfFormula {
  int num_vars = 0;
  std::vector<std::vector<Lit>> clauses;
  /// In store declaration order. Input bits are numbered first, MSB first,
  /// so variable order equals lexicographic order of input valuations.
  std::vector<InputBits> inputs;
};

/// Tseitin translation. Structurally identical gates share one variable;
/// gates with constant inputs are folded away.
CnfFormula bitblast(const BitvecFormula& f);

/// Decodes a full assignment (index = variable) to input values.
Valuation decode_model(const CnfFormula& cnf, const std::vector<bool>& assignment);

std::string to_dimacs(const CnfFormula& cnf);

} // namespace cfv::solver
