#pragma once

#include <cfv/frontend/ast.hpp>

#include <string>

namespace cfv::frontend {

// Pretty-printing back to MiniC. Binary operators are fully parenthesized so
// the output reparses to a structurally equal tree.
std::string print_expr(const Expr& e);
std::string print_stmt(const Stmt& s, int indent = 0);
std::string print_function(const FunctionDef& fn);
std::string print_global(const GlobalDecl& g);
std::string print_unit(const SourceUnit& unit);

} // namespace cfv::frontend
