#include <cfv/changes/patch.hpp>
#include <cfv/changes/snapshot.hpp>

#include <filesystem>
#include <regex>
#include <sstream>
#include <vector>

namespace cfv::changes {
namespace {

std::vector<std::string> split_lines(const std::string& text, bool& trailing_newline) {
  std::vector<std::string> lines;
  std::string cur;
  for (char c : text) {
    if (c == '\n') {
      lines.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  trailing_newline = cur.empty();
  if (!cur.empty()) lines.push_back(cur);
  return lines;
}

std::string header_path(const std::string& line) {
  std::string p = line.substr(4);
  auto tab = p.find('\t');
  if (tab != std::string::npos) p.erase(tab);
  while (!p.empty() && (p.back() == ' ' || p.back() == '\r')) p.pop_back();
  if (p.rfind("a/", 0) == 0 || p.rfind("b/", 0) == 0) p = p.substr(2);
  return p;
}

struct Hunk {
  long old_start = 0;
  std::vector<std::string> old_lines;
  std::vector<std::string> new_lines;
};

std::vector<std::string> apply_hunks(std::vector<std::string> lines, const std::vector<Hunk>& hunks,
                                     const std::string& path) {
  long shift = 0;
  for (const auto& h : hunks) {
    long want = std::max(0L, h.old_start - 1 + shift);
    if (h.old_lines.empty() && h.old_start == 0) want = 0;
    auto matches = [&](long at) {
      if (at < 0 || at + static_cast<long>(h.old_lines.size()) > static_cast<long>(lines.size()))
        return false;
      for (std::size_t i = 0; i < h.old_lines.size(); ++i)
        if (lines[at + i] != h.old_lines[i]) return false;
      return true;
    };
    long found = -1;
    for (long d = 0; d <= static_cast<long>(lines.size()); ++d) {
      if (matches(want - d)) { found = want - d; break; }
      if (matches(want + d)) { found = want + d; break; }
    }
    if (found < 0)
      throw PatchError("hunk at line " + std::to_string(h.old_start) + " does not apply to " + path);
    lines.erase(lines.begin() + found, lines.begin() + found + h.old_lines.size());
    lines.insert(lines.begin() + found, h.new_lines.begin(), h.new_lines.end());
    shift += static_cast<long>(h.new_lines.size()) - static_cast<long>(h.old_lines.size());
  }
  return lines;
}

} // namespace

FileTree apply_unified_diff(const FileTree& base, const std::string& diff) {
  FileTree out = base;
  bool dummy;
  std::vector<std::string> lines = split_lines(diff, dummy);
  static const std::regex hunk_re(R"(^@@ -(\d+)(?:,(\d+))? \+(\d+)(?:,(\d+))? @@.*$)");

  std::size_t i = 0;
  while (i < lines.size()) {
    if (lines[i].rfind("--- ", 0) != 0) {
      ++i;
      continue;
    }
    if (i + 1 >= lines.size() || lines[i + 1].rfind("+++ ", 0) != 0)
      throw PatchError("'---' header without '+++' at diff line " + std::to_string(i + 1));
    std::string old_path = header_path(lines[i]);
    std::string new_path = header_path(lines[i + 1]);
    i += 2;

    std::vector<Hunk> hunks;
    bool no_newline_at_end = false;
    while (i < lines.size() && lines[i].rfind("@@", 0) == 0) {
      std::smatch m;
      if (!std::regex_match(lines[i], m, hunk_re))
        throw PatchError("malformed hunk header: " + lines[i]);
      Hunk h;
      h.old_start = std::stol(m[1]);
      long old_count = m[2].matched ? std::stol(m[2]) : 1;
      long new_count = m[4].matched ? std::stol(m[4]) : 1;
      ++i;
      while (i < lines.size() && (old_count > 0 || new_count > 0)) {
        const std::string& l = lines[i];
        char tag = l.empty() ? ' ' : l[0];
        std::string body = l.empty() ? "" : l.substr(1);
        if (tag == ' ') {
          h.old_lines.push_back(body);
          h.new_lines.push_back(body);
          --old_count;
          --new_count;
        } else if (tag == '-') {
          h.old_lines.push_back(body);
          --old_count;
        } else if (tag == '+') {
          h.new_lines.push_back(body);
          --new_count;
        } else if (tag != '\\') {
          throw PatchError("unexpected line in hunk: " + l);
        }
        ++i;
      }
      if (old_count != 0 || new_count != 0) throw PatchError("truncated hunk in " + new_path);
      while (i < lines.size() && lines[i].rfind("\\", 0) == 0) {
        no_newline_at_end = true;
        ++i;
      }
      hunks.push_back(std::move(h));
    }

    if (new_path == "/dev/null") {
      if (!out.erase(old_path)) throw PatchError("patch deletes missing file " + old_path);
      continue;
    }
    std::vector<std::string> current;
    bool trailing = true;
    if (old_path != "/dev/null") {
      auto it = out.find(old_path);
      if (it == out.end()) throw PatchError("patch modifies missing file " + old_path);
      current = split_lines(it->second, trailing);
      if (old_path != new_path) out.erase(it);
    } else if (out.count(new_path)) {
      throw PatchError("patch creates existing file " + new_path);
    }
    std::vector<std::string> result = apply_hunks(std::move(current), hunks, new_path);
    std::string text;
    for (std::size_t k = 0; k < result.size(); ++k) {
      text += result[k];
      if (k + 1 < result.size() || (trailing && !no_newline_at_end)) text += '\n';
    }
    out[new_path] = text;
  }
  return out;
}

FileTree read_tree(const std::string& dir) {
  FileTree tree;
  for (auto& [path, text] : read_sources(dir))
    tree[std::filesystem::path(path).filename().string()] = std::move(text);
  return tree;
}

} // namespace cfv::changes
