#pragma once

#include <cfv/frontend/ast.hpp>

#include <map>
#include <string>

namespace cfv::frontend {

inline constexpr const char* kSelfPlaceholder = "<self>";

/// Canonical renaming: parameters become p0.., locals v0.. in declaration
/// order, the function's own name becomes kSelfPlaceholder. Spans, comments
/// and source text are cleared and plain nested blocks are flattened, so the
/// result compares equal for alpha-equivalent functions.
///
/// `callee_renames` maps callee names to the names they are compared under;
/// used when a renamed callee's call sites were updated.
FunctionDef normalize_alpha(const FunctionDef& fn,
                            const std::map<std::string, std::string>* callee_renames = nullptr);

/// 1 + ifs + whiles + `&&` + `||` in the body.
unsigned cyclomatic_complexity(const FunctionDef& fn);

} // namespace cfv::frontend
