#include <cfv/frontend/lexer.hpp>

#include <array>
#include <cctype>
#include <utility>

namespace cfv::frontend {
namespace {

constexpr std::array<std::pair<std::string_view, Tok>, 14> kKeywords{{
    {"int", Tok::KwInt},
    {"bool", Tok::KwBool},
    {"void", Tok::KwVoid},
    {"if", Tok::KwIf},
    {"else", Tok::KwElse},
    {"while", Tok::KwWhile},
    {"for", Tok::KwFor},
    {"return", Tok::KwReturn},
    {"assert", Tok::KwAssert},
    {"assume", Tok::KwAssume},
    {"true", Tok::KwTrue},
    {"false", Tok::KwFalse},
    {"nondet_int", Tok::KwNondetInt},
    {"nondet_bool", Tok::KwNondetBool},
}};

// Longest match first.
constexpr std::array<std::pair<std::string_view, Tok>, 43> kPunct{{
    {"<<=", Tok::ShlAssign}, {">>=", Tok::ShrAssign},
    {"/=", Tok::Unsupported}, {"%=", Tok::Unsupported}, {"->", Tok::Unsupported},
    {"+=", Tok::PlusAssign}, {"-=", Tok::MinusAssign}, {"*=", Tok::StarAssign},
    {"&=", Tok::AmpAssign}, {"|=", Tok::PipeAssign}, {"^=", Tok::CaretAssign},
    {"++", Tok::PlusPlus}, {"--", Tok::MinusMinus},
    {"<<", Tok::Shl}, {">>", Tok::Shr}, {"<=", Tok::Le}, {">=", Tok::Ge},
    {"==", Tok::EqEq}, {"!=", Tok::Ne}, {"&&", Tok::AndAnd}, {"||", Tok::OrOr},
    {"(", Tok::LParen}, {")", Tok::RParen}, {"{", Tok::LBrace}, {"}", Tok::RBrace},
    {"[", Tok::LBracket}, {"]", Tok::RBracket}, {",", Tok::Comma}, {";", Tok::Semi},
    {"=", Tok::Assign}, {"+", Tok::Plus}, {"-", Tok::Minus}, {"*", Tok::Star},
    {"&", Tok::Amp}, {"|", Tok::Pipe}, {"^", Tok::Caret}, {"~", Tok::Tilde},
    {"!", Tok::Bang}, {"<", Tok::Lt}, {">", Tok::Gt},
    {"/", Tok::Unsupported}, {"%", Tok::Unsupported}, {"?", Tok::Unsupported},
}};

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

class Lexer {
public:
  Lexer(std::string_view src, const std::string& path) : src_(src), path_(path) {}

  LexResult run() {
    LexResult out;
    bool line_start = true;
    while (true) {
      skip_space(line_start);
      if (pos_ >= src_.size()) break;
      Span start = here();
      char c = src_[pos_];
      if (c == '/' && peek(1) == '/') {
        std::size_t b = pos_ + 2;
        while (pos_ < src_.size() && src_[pos_] != '\n') advance();
        out.comments.push_back({close(start), trim(src_.substr(b, pos_ - b))});
        continue;
      }
      if (c == '/' && peek(1) == '*') {
        std::size_t b = pos_ + 2;
        advance();
        advance();
        while (pos_ < src_.size() && !(src_[pos_] == '*' && peek(1) == '/')) advance();
        if (pos_ >= src_.size()) fail(DiagKind::SyntaxError, start, "unterminated comment");
        std::size_t e = pos_;
        advance();
        advance();
        out.comments.push_back({close(start), trim(src_.substr(b, e - b))});
        continue;
      }
      if (c == '#' && line_start)
        fail(DiagKind::UnsupportedConstruct, start,
             "preprocessor directives are not supported");
      line_start = false;
      if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
        while (pos_ < src_.size() &&
               (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
          advance();
        Token t{Tok::Ident, src_.substr(start.begin, pos_ - start.begin), close(start), 0};
        for (const auto& [kw, kind] : kKeywords)
          if (kw == t.text) t.kind = kind;
        out.tokens.push_back(t);
        continue;
      }
      if (std::isdigit(static_cast<unsigned char>(c))) {
        out.tokens.push_back(number(start));
        continue;
      }
      if (c == '"' || c == '\'') {
        fail(DiagKind::UnsupportedConstruct, start, "string and character literals are not supported");
      }
      bool matched = false;
      for (const auto& [text, kind] : kPunct) {
        if (src_.substr(pos_, text.size()) == text) {
          for (std::size_t i = 0; i < text.size(); ++i) advance();
          out.tokens.push_back({kind, text, close(start), 0});
          matched = true;
          break;
        }
      }
      if (!matched) {
        if (c == '.' || c == ':')
          fail(DiagKind::UnsupportedConstruct, start,
               std::string("'") + c + "' is outside the supported subset");
        fail(DiagKind::SyntaxError, start, std::string("unexpected character '") + c + "'");
      }
    }
    Span end = here();
    out.tokens.push_back({Tok::End, {}, close(end), 0});
    return out;
  }

private:
  char peek(std::size_t ahead) const {
    return pos_ + ahead < src_.size() ? src_[pos_ + ahead] : '\0';
  }

  void advance() {
    if (src_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  void skip_space(bool& line_start) {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) {
      if (src_[pos_] == '\n') line_start = true;
      advance();
    }
  }

  Span here() const {
    return {line_, col_, static_cast<std::uint32_t>(pos_), static_cast<std::uint32_t>(pos_)};
  }
  Span close(Span s) const {
    s.end = static_cast<std::uint32_t>(pos_);
    return s;
  }

  Token number(Span start) {
    std::uint64_t value = 0;
    bool overflow = false;
    auto accumulate = [&](unsigned base, unsigned digit) {
      if (value > (UINT64_MAX - digit) / base) overflow = true;
      value = value * base + digit;
    };
    if (src_[pos_] == '0' && (peek(1) == 'x' || peek(1) == 'X')) {
      advance();
      advance();
      if (!std::isxdigit(static_cast<unsigned char>(peek(0))))
        fail(DiagKind::SyntaxError, start, "malformed hexadecimal literal");
      while (pos_ < src_.size() && std::isxdigit(static_cast<unsigned char>(src_[pos_]))) {
        char d = static_cast<char>(std::tolower(static_cast<unsigned char>(src_[pos_])));
        accumulate(16, std::isdigit(static_cast<unsigned char>(d)) ? d - '0' : d - 'a' + 10);
        advance();
      }
    } else {
      while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
        accumulate(10, static_cast<unsigned>(src_[pos_] - '0'));
        advance();
      }
    }
    // Integer suffixes (u, l) are tolerated; the value is still taken modulo 2^W.
    while (pos_ < src_.size() && (src_[pos_] == 'u' || src_[pos_] == 'U' ||
                                  src_[pos_] == 'l' || src_[pos_] == 'L'))
      advance();
    if (pos_ < src_.size() &&
        (std::isalpha(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '.'))
      fail(src_[pos_] == '.' ? DiagKind::UnsupportedConstruct : DiagKind::SyntaxError, here(),
           src_[pos_] == '.' ? "floating point literals are not supported"
                             : "malformed number");
    if (overflow || value > static_cast<std::uint64_t>(INT64_MAX))
      fail(DiagKind::SyntaxError, start, "integer literal too large");
    return {Tok::Number, src_.substr(start.begin, pos_ - start.begin), close(start), value};
  }

  [[noreturn]] void fail(DiagKind kind, Span at, std::string message) {
    at.end = std::max<std::uint32_t>(at.begin + 1, at.end);
    throw FrontendError({{kind, path_, at, std::move(message)}});
  }

  std::string_view src_;
  const std::string& path_;
  std::size_t pos_ = 0;
  std::uint32_t line_ = 1;
  std::uint32_t col_ = 1;
};

} // namespace

LexResult lex(std::string_view source, const std::string& path) {
  return Lexer(source, path).run();
}

} // namespace cfv::frontend
