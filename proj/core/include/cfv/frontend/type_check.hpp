#pragma once

#include <cfv/frontend/ast.hpp>

#include <map>
#include <string>
#include <vector>

namespace cfv::frontend {

/// Declarations visible to the units being checked without belonging to them
/// (a test suite is checked against the snapshot it exercises).
struct Environment {
  std::map<std::string, const GlobalDecl*> globals;
  std::map<std::string, const FunctionDef*> functions;
};

/// Type-checks `units` together (calls may cross unit boundaries) and returns
/// them with every expression annotated, globals resolved, nondet sites
/// numbered and per-function read/write/callee sets populated.
///
/// MiniC rules beyond C: conditions, `assert` and `assume` take bool only; no
/// implicit int/bool conversion; a local may not reuse any visible name;
/// arrays are only indexed, never copied or passed.
///
/// Throws FrontendError with TypeError / UndefinedSymbol diagnostics.
std::vector<SourceUnit> type_check(std::vector<SourceUnit> units,
                                   const Environment* outer = nullptr);
SourceUnit type_check(SourceUnit unit, const Environment* outer = nullptr);

/// Renumbers NondetInt/NondetBool sites in pre-order and returns the new body.
StmtPtr number_nondet_sites(const StmtPtr& body, std::uint32_t& count);

/// True when control can never fall off the end of `s`.
bool always_returns(const Stmt& s);

} // namespace cfv::frontend
