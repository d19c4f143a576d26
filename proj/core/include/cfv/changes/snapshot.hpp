#pragma once

#include <cfv/frontend/ast.hpp>
#include <cfv/frontend/type_check.hpp>

#include <map>
#include <string>
#include <vector>

namespace cfv::changes {

using frontend::FunctionDef;
using frontend::FunctionPtr;
using frontend::GlobalDecl;
using frontend::SourceUnit;

/// One type-checked version of a code base.
class Snapshot {
public:
  Snapshot() = default;

  /// Parses and type-checks `files` (path, text) jointly. Throws
  /// frontend::FrontendError.
  static Snapshot from_sources(std::string label,
                               const std::vector<std::pair<std::string, std::string>>& files,
                               unsigned int_width = frontend::kDefaultIntWidth);

  /// Every `*.c` file of `dir`, in path order. The label defaults to the
  /// directory's base name.
  static Snapshot load(const std::string& dir, unsigned int_width = frontend::kDefaultIntWidth,
                       std::string label = {});

  const std::string& label() const { return label_; }
  unsigned int_width() const { return int_width_; }
  const std::vector<SourceUnit>& units() const { return units_; }
  const std::map<std::string, FunctionPtr>& functions() const { return functions_; }
  const std::map<std::string, GlobalDecl>& globals() const { return globals_; }

  const FunctionDef* function(const std::string& name) const;
  const GlobalDecl* global(const std::string& name) const;

  /// Declarations for type-checking code (tests) against this snapshot.
  /// Valid while the snapshot is alive.
  frontend::Environment environment() const;

private:
  std::string label_;
  unsigned int_width_ = frontend::kDefaultIntWidth;
  std::vector<SourceUnit> units_;
  std::map<std::string, FunctionPtr> functions_;
  std::map<std::string, GlobalDecl> globals_;
};

/// `*.c` files of `dir` sorted by path as (path, text). Throws
/// std::runtime_error when `dir` is not a readable directory.
std::vector<std::pair<std::string, std::string>> read_sources(const std::string& dir);

} // namespace cfv::changes
