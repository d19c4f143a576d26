#include <cfv/changes/snapshot.hpp>

#include <cfv/frontend/parser.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace fs = std::filesystem;

namespace cfv::changes {

std::vector<std::pair<std::string, std::string>> read_sources(const std::string& dir) {
  std::error_code ec;
  if (!fs::is_directory(dir, ec))
    throw std::runtime_error("not a directory: " + dir);
  std::vector<std::string> paths;
  for (const auto& entry : fs::directory_iterator(dir))
    if (entry.is_regular_file() && entry.path().extension() == ".c")
      paths.push_back(entry.path().string());
  std::sort(paths.begin(), paths.end());
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& p : paths) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + p);
    std::ostringstream text;
    text << in.rdbuf();
    out.emplace_back(p, text.str());
  }
  return out;
}

Snapshot Snapshot::from_sources(std::string label,
                                const std::vector<std::pair<std::string, std::string>>& files,
                                unsigned int_width) {
  Snapshot s;
  s.label_ = std::move(label);
  s.int_width_ = int_width;
  std::vector<SourceUnit> units;
  std::vector<frontend::Diagnostic> diags;
  for (const auto& [path, text] : files) {
    try {
      units.push_back(frontend::parse_unit(text, path, {int_width}));
    } catch (const frontend::FrontendError& e) {
      diags.insert(diags.end(), e.diagnostics().begin(), e.diagnostics().end());
    }
  }
  if (!diags.empty()) throw frontend::FrontendError(std::move(diags));
  s.units_ = frontend::type_check(std::move(units));
  for (const auto& u : s.units_) {
    for (const auto& d : u.declarations) {
      if (const auto* g = std::get_if<GlobalDecl>(&d)) s.globals_.emplace(g->name, *g);
      else {
        const auto& f = std::get<FunctionDef>(d);
        s.functions_.emplace(f.name, std::make_shared<const FunctionDef>(f));
      }
    }
  }
  return s;
}

Snapshot Snapshot::load(const std::string& dir, unsigned int_width, std::string label) {
  if (label.empty()) {
    fs::path p = fs::path(dir).lexically_normal();
    if (!p.has_filename()) p = p.parent_path();
    label = p.filename().string();
  }
  return from_sources(std::move(label), read_sources(dir), int_width);
}

const FunctionDef* Snapshot::function(const std::string& name) const {
  auto it = functions_.find(name);
  return it == functions_.end() ? nullptr : it->second.get();
}

const GlobalDecl* Snapshot::global(const std::string& name) const {
  auto it = globals_.find(name);
  return it == globals_.end() ? nullptr : &it->second;
}

frontend::Environment Snapshot::environment() const {
  frontend::Environment env;
  for (const auto& [name, g] : globals_) env.globals[name] = &g;
  for (const auto& [name, f] : functions_) env.functions[name] = f.get();
  return env;
}

} // namespace cfv::changes
