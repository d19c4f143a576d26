#pragma once

#include <cfv/frontend/ast.hpp>

#include <string>
#include <string_view>

namespace cfv::frontend {

struct ParseOptions {
  /// Bit width of `int`; one of 4, 8, 16, 32.
  unsigned int_width = kDefaultIntWidth;
};

/// Parses a complete MiniC translation unit. Comments are discarded (the one
/// directly preceding a function is kept as its leading comment), `for` loops
/// are desugared to `while`, and `x++` / `x op= e` become plain assignments.
///
/// Throws FrontendError carrying SyntaxError or UnsupportedConstruct
/// diagnostics.
SourceUnit parse_unit(std::string_view source, std::string path,
                      const ParseOptions& options = {});

} // namespace cfv::frontend
