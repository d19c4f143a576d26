#pragma once

#include <cfv/frontend/diagnostics.hpp>

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace cfv::frontend {

enum class Tok : std::uint8_t {
  End,
  Ident,
  Number,
  // keywords
  KwInt, KwBool, KwVoid, KwIf, KwElse, KwWhile, KwFor, KwReturn, KwAssert, KwAssume,
  KwTrue, KwFalse, KwNondetInt, KwNondetBool,
  // punctuation
  LParen, RParen, LBrace, RBrace, LBracket, RBracket, Comma, Semi,
  Assign, PlusAssign, MinusAssign, StarAssign, AmpAssign, PipeAssign, CaretAssign,
  ShlAssign, ShrAssign, PlusPlus, MinusMinus,
  Plus, Minus, Star, Amp, Pipe, Caret, Tilde, Bang,
  Shl, Shr, Lt, Le, Gt, Ge, EqEq, Ne, AndAnd, OrOr,
  // lexed only so they can be rejected with a precise diagnostic
  Unsupported,
};

struct Token {
  Tok kind = Tok::End;
  std::string_view text;
  Span span;
  std::uint64_t value = 0; // Number
};

struct Comment {
  Span span;
  std::string text; // without the comment markers, trimmed
};

struct LexResult {
  std::vector<Token> tokens; // always terminated by Tok::End
  std::vector<Comment> comments;
};

/// Splits `source` into tokens; comments are dropped from the token stream and
/// returned separately. Throws FrontendError on malformed input.
LexResult lex(std::string_view source, const std::string& path);

} // namespace cfv::frontend
