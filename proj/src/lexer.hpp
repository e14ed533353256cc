#pragma once

// Tokenizer shared by the Turtle-star and SPARQL-subset parsers.

#include <cstddef>
#include <string>
#include <string_view>

#include "nckg/turtle.hpp"

namespace nckg::detail {

enum class Tok {
  IriRef,       // <...>, text = IRI body
  PName,        // prefix:local, text = whole name
  Var,          // ?x or $x, text = name
  String,       // "...", text = unescaped value
  AtWord,       // @prefix / @en, text without '@'
  DoubleCaret,  // ^^
  QOpen,        // <<
  QClose,       // >>
  LBrace,
  RBrace,
  Dot,
  Semicolon,
  Comma,
  Star,
  Anon,  // [] (only meaningful in query patterns)
  Word,  // bare keyword: PREFIX, SELECT, a, true ...
  End,
};

struct Token {
  Tok kind = Tok::End;
  std::string text;
  std::size_t line = 1;
  std::size_t column = 1;
};

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  Token next();
  const Token& peek();

  std::string line_text(std::size_t line) const;

  [[noreturn]] void fail(std::size_t line, std::size_t column, std::string message) const;
  [[noreturn]] void fail(const Token& at, std::string message) const { fail(at.line, at.column, std::move(message)); }

 private:
  char cur() const { return pos_ < src_.size() ? src_[pos_] : '\0'; }
  char ahead(std::size_t n) const { return pos_ + n < src_.size() ? src_[pos_ + n] : '\0'; }
  void advance();
  void skip_space();
  Token scan();
  std::string read_string(std::size_t line, std::size_t column);

  std::string_view src_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  std::size_t column_ = 1;
  bool has_peek_ = false;
  Token peeked_;
};

bool is_name_start(char c);
bool is_name_char(char c);

/// Expands `prefix:local`; throws UnknownPrefix at the token.
Iri resolve_pname(const Lexer& lex, const Token& tok, const PrefixMap& prefixes);

}  // namespace nckg::detail
