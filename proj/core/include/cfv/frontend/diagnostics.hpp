#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace cfv::frontend {

/// Source location. Lines and columns are 1-based; byte offsets are a
/// half-open range into the original text.
struct Span {
  std::uint32_t line = 0;
  std::uint32_t column = 0;
  std::uint32_t begin = 0;
  std::uint32_t end = 0;

  bool contains(const Span& inner) const {
    return begin <= inner.begin && inner.end <= end;
  }
  bool operator==(const Span&) const = default;
};

enum class DiagKind {
  SyntaxError,
  UnsupportedConstruct,
  TypeError,
  UndefinedSymbol,
  InputError,
};

const char* to_string(DiagKind kind);

struct Diagnostic {
  DiagKind kind = DiagKind::SyntaxError;
  std::string path;
  Span span;
  std::string message;

  /// `path:line:col: error: message`
  std::string format() const;
};

/// Thrown by the parser and type checker; carries every diagnostic found.
class FrontendError : public std::runtime_error {
public:
  explicit FrontendError(std::vector<Diagnostic> diagnostics);

  const std::vector<Diagnostic>& diagnostics() const { return diagnostics_; }
  DiagKind kind() const { return diagnostics_.front().kind; }

private:
  std::vector<Diagnostic> diagnostics_;
};

} // namespace cfv::frontend
