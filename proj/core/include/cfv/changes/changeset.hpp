#pragma once

#include <cfv/changes/snapshot.hpp>

#include <map>
#include <set>
#include <string>
#include <vector>

namespace cfv::changes {

struct ModifiedPair {
  FunctionPtr old_fn;
  FunctionPtr new_fn;
  /// Identical definitions whose behavior changed through a global
  /// initializer they read.
  bool initializer_only = false;

  const std::string& name() const { return new_fn->name; }
};

/// Function-level classification of two snapshots. The five categories
/// partition the union of both snapshots' function names (renamed pairs
/// contribute both their names).
struct ChangeSet {
  std::set<std::string> added;
  std::set<std::string> removed;
  std::vector<ModifiedPair> modified; // sorted by name
  std::vector<std::pair<std::string, std::string>> renamed; // (old, new), sorted by old
  std::set<std::string> unchanged;
  /// Globals whose type or initializer differs between the versions.
  std::set<std::string> changed_globals;

  std::map<std::string, std::string> rename_map() const;
  std::string classify(const std::string& name) const;
};

/// Alpha-normalized ASTs equal and signatures agree. `callee_renames` maps old
/// callee names to new ones before comparing `a` (the old function) to `b`.
bool structural_equiv(const FunctionDef& a, const FunctionDef& b,
                      const std::map<std::string, std::string>* callee_renames = nullptr);

ChangeSet compute_changeset(const Snapshot& old_snap, const Snapshot& new_snap);

} // namespace cfv::changes
