#include <cfv/changes/changeset.hpp>

#include <cfv/frontend/analysis.hpp>

#include <algorithm>

namespace cfv::changes {

std::map<std::string, std::string> ChangeSet::rename_map() const {
  return {renamed.begin(), renamed.end()};
}

std::string ChangeSet::classify(const std::string& name) const {
  if (added.count(name)) return "added";
  if (removed.count(name)) return "removed";
  if (unchanged.count(name)) return "unchanged";
  for (const auto& m : modified)
    if (m.name() == name) return "modified";
  for (const auto& [o, n] : renamed)
    if (o == name || n == name) return "renamed";
  return "unknown";
}

namespace {

bool same_signature(const FunctionDef& a, const FunctionDef& b) {
  if (!(a.return_type == b.return_type) || a.params.size() != b.params.size()) return false;
  for (std::size_t i = 0; i < a.params.size(); ++i)
    if (!(a.params[i].type == b.params[i].type)) return false;
  return true;
}

bool same_source(const FunctionDef& a, const FunctionDef& b) {
  return a.body_text == b.body_text && a.return_type == b.return_type && a.params == b.params;
}

} // namespace

bool structural_equiv(const FunctionDef& a, const FunctionDef& b,
                      const std::map<std::string, std::string>* callee_renames) {
  if (!same_signature(a, b)) return false;
  return frontend::equal_function(frontend::normalize_alpha(a, callee_renames),
                                  frontend::normalize_alpha(b));
}

ChangeSet compute_changeset(const Snapshot& old_snap, const Snapshot& new_snap) {
  ChangeSet cs;

  for (const auto& [name, g] : old_snap.globals()) {
    const GlobalDecl* n = new_snap.global(name);
    if (!n || !g.same_definition(*n)) cs.changed_globals.insert(name);
  }
  for (const auto& [name, g] : new_snap.globals())
    if (!old_snap.global(name)) cs.changed_globals.insert(name);

  std::vector<std::string> only_old, only_new;
  for (const auto& [name, f] : old_snap.functions()) {
    auto it = new_snap.functions().find(name);
    if (it == new_snap.functions().end()) {
      only_old.push_back(name);
      continue;
    }
    const FunctionPtr& nf = it->second;
    if (!same_source(*f, *nf)) {
      cs.modified.push_back({f, nf, false});
      continue;
    }
    bool reads_changed = std::any_of(nf->reads_globals.begin(), nf->reads_globals.end(),
                                     [&](const std::string& g) { return cs.changed_globals.count(g) > 0; });
    if (reads_changed) cs.modified.push_back({f, nf, true});
    else cs.unchanged.insert(name);
  }
  for (const auto& [name, f] : new_snap.functions())
    if (!old_snap.function(name)) only_new.push_back(name);

  // Greedy rename pairing: old names in lexicographic order, each taking the
  // lexicographically first structurally equivalent unpaired new name.
  std::vector<bool> taken(only_new.size(), false);
  for (const auto& o : only_old) {
    const FunctionDef& of = *old_snap.function(o);
    bool paired = false;
    for (std::size_t i = 0; i < only_new.size(); ++i) {
      if (taken[i] || !structural_equiv(of, *new_snap.function(only_new[i]))) continue;
      taken[i] = true;
      cs.renamed.emplace_back(o, only_new[i]);
      paired = true;
      break;
    }
    if (!paired) cs.removed.insert(o);
  }
  for (std::size_t i = 0; i < only_new.size(); ++i)
    if (!taken[i]) cs.added.insert(only_new[i]);
  return cs;
}

} // namespace cfv::changes
