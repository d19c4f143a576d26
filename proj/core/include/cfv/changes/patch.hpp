#pragma once

#include <map>
#include <stdexcept>
#include <string>

namespace cfv::changes {

class PatchError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Relative path -> file text.
using FileTree = std::map<std::string, std::string>;

/// Applies a unified diff textually. Paths in `---`/`+++` headers lose one
/// leading component when it is `a/` or `b/`. Hunks must match their context
/// exactly; a hunk may apply at an offset from its stated line. `/dev/null`
/// creates or deletes files. Throws PatchError.
FileTree apply_unified_diff(const FileTree& base, const std::string& diff);

/// Reads every `*.c` file of `dir` keyed by file name.
FileTree read_tree(const std::string& dir);

} // namespace cfv::changes
