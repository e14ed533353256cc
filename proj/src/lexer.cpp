#include "lexer.hpp"

#include <cctype>

namespace nckg::detail {

bool is_name_start(char c) {
  const auto u = static_cast<unsigned char>(c);
  return std::isalpha(u) != 0 || c == '_' || u >= 0x80;
}

bool is_name_char(char c) {
  const auto u = static_cast<unsigned char>(c);
  return std::isalnum(u) != 0 || c == '_' || c == '-' || c == '.' || u >= 0x80;
}

void Lexer::advance() {
  if (pos_ >= src_.size()) return;
  const auto c = static_cast<unsigned char>(src_[pos_]);
  ++pos_;
  if (c == '\n') {
    ++line_;
    column_ = 1;
  } else if ((c & 0xC0) != 0x80) {
    ++column_;  // columns count code points, so continuation bytes are skipped
  }
}

std::string Lexer::line_text(std::size_t line) const {
  std::size_t l = 1;
  std::size_t start = 0;
  for (std::size_t i = 0; i < src_.size() && l < line; ++i) {
    if (src_[i] == '\n') {
      ++l;
      start = i + 1;
    }
  }
  auto end = src_.find('\n', start);
  if (end == std::string_view::npos) end = src_.size();
  auto text = std::string(src_.substr(start, end - start));
  if (!text.empty() && text.back() == '\r') text.pop_back();
  return text;
}

void Lexer::fail(std::size_t line, std::size_t column, std::string message) const {
  throw ParseError(line, column, std::move(message), line_text(line));
}

void Lexer::skip_space() {
  for (;;) {
    const char c = cur();
    if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
      advance();
    } else if (c == '#') {
      while (pos_ < src_.size() && cur() != '\n') advance();
    } else {
      return;
    }
  }
}

const Token& Lexer::peek() {
  if (!has_peek_) {
    peeked_ = scan();
    has_peek_ = true;
  }
  return peeked_;
}

Token Lexer::next() {
  if (has_peek_) {
    has_peek_ = false;
    return std::move(peeked_);
  }
  return scan();
}

std::string Lexer::read_string(std::size_t line, std::size_t column) {
  advance();  // opening quote
  if (cur() == '"' && ahead(1) == '"') fail(line, column, "long string literals are not supported");
  std::string out;
  for (;;) {
    if (pos_ >= src_.size() || cur() == '\n') fail(line, column, "unterminated string literal");
    const char c = cur();
    if (c == '"') {
      advance();
      return out;
    }
    if (c == '\\') {
      const auto el = line_;
      const auto ec = column_;
      advance();
      switch (cur()) {
        case '"':
          out += '"';
          break;
        case '\\':
          out += '\\';
          break;
        case 'n':
          out += '\n';
          break;
        case 't':
          out += '\t';
          break;
        default:
          fail(el, ec, "unsupported escape sequence");
      }
      advance();
      continue;
    }
    out += c;
    advance();
  }
}

Token Lexer::scan() {
  skip_space();
  Token t;
  t.line = line_;
  t.column = column_;
  if (pos_ >= src_.size()) {
    t.kind = Tok::End;
    return t;
  }
  const char c = cur();
  auto single = [&](Tok kind) {
    advance();
    t.kind = kind;
    return t;
  };
  switch (c) {
    case '{':
      return single(Tok::LBrace);
    case '}':
      return single(Tok::RBrace);
    case ';':
      return single(Tok::Semicolon);
    case ',':
      return single(Tok::Comma);
    case '*':
      return single(Tok::Star);
    case '.':
      if (std::isdigit(static_cast<unsigned char>(ahead(1))) != 0) {
        fail(t, "numeric literals are not supported; quote the value as a string");
      }
      return single(Tok::Dot);
    case '[': {
      std::size_t i = pos_ + 1;
      while (i < src_.size() && (src_[i] == ' ' || src_[i] == '\t')) ++i;
      if (i < src_.size() && src_[i] == ']') {
        while (pos_ <= i) advance();
        t.kind = Tok::Anon;
        return t;
      }
      fail(t, "blank nodes are not supported");
    }
    case ']':
      fail(t, "blank nodes are not supported");
    case '(':
    case ')':
      fail(t, "collections are not supported");
    case '"':
      t.kind = Tok::String;
      t.text = read_string(t.line, t.column);
      return t;
    case '\'':
      fail(t, "single-quoted strings are not supported");
    case '^':
      if (ahead(1) != '^') fail(t, "expected '^^'");
      advance();
      return single(Tok::DoubleCaret);
    case '>':
      if (ahead(1) != '>') fail(t, "unexpected '>'");
      advance();
      return single(Tok::QClose);
    case '<': {
      if (ahead(1) == '<') {
        advance();
        return single(Tok::QOpen);
      }
      advance();
      std::string body;
      for (;;) {
        const char d = cur();
        if (pos_ >= src_.size() || d == '\n') fail(t, "unterminated IRI");
        if (d == '>') break;
        if (d == ' ' || d == '\t' || d == '<' || d == '"' || d == '{' || d == '}') {
          fail(line_, column_, "invalid character in IRI");
        }
        body += d;
        advance();
      }
      advance();
      if (body.empty()) fail(t, "empty IRI");
      t.kind = Tok::IriRef;
      t.text = std::move(body);
      return t;
    }
    case '@': {
      advance();
      std::string word;
      while (std::isalnum(static_cast<unsigned char>(cur())) != 0 || cur() == '-') {
        word += cur();
        advance();
      }
      if (word.empty()) fail(t, "expected a word after '@'");
      t.kind = Tok::AtWord;
      t.text = std::move(word);
      return t;
    }
    case '?':
    case '$': {
      advance();
      std::string name;
      while (std::isalnum(static_cast<unsigned char>(cur())) != 0 || cur() == '_') {
        name += cur();
        advance();
      }
      if (name.empty()) fail(t, "expected a variable name");
      t.kind = Tok::Var;
      t.text = std::move(name);
      return t;
    }
    case '_':
      if (ahead(1) == ':') fail(t, "blank nodes are not supported");
      break;
    default:
      break;
  }
  if (c == '+' || c == '-' || std::isdigit(static_cast<unsigned char>(c)) != 0) {
    fail(t, "numeric literals are not supported; quote the value as a string");
  }
  if (c != ':' && !is_name_start(c)) fail(t, std::string("unexpected character '") + c + "'");

  // Prefixed name or bare word. Trailing dots belong to the statement, not the name.
  std::string text;
  bool seen_colon = false;
  while (pos_ < src_.size()) {
    const char d = cur();
    if (d == ':' && !seen_colon) {
      seen_colon = true;
    } else if (!is_name_char(d) && !(seen_colon && d == ':')) {
      break;
    }
    text += d;
    advance();
  }
  std::size_t dots = 0;
  while (!text.empty() && text.back() == '.') {
    text.pop_back();
    ++dots;
  }
  if (dots > 0) {
    // give the dots back; they are single-byte so column arithmetic is exact
    pos_ -= dots;
    column_ -= dots;
  }
  t.kind = seen_colon ? Tok::PName : Tok::Word;
  t.text = std::move(text);
  return t;
}

Iri resolve_pname(const Lexer& lex, const Token& tok, const PrefixMap& prefixes) {
  const auto colon = tok.text.find(':');
  const auto prefix = tok.text.substr(0, colon);
  auto it = prefixes.find(prefix);
  if (it == prefixes.end()) {
    throw UnknownPrefix(tok.line, tok.column, "undeclared prefix '" + prefix + ":'",
                        lex.line_text(tok.line));
  }
  return Iri{it->second + tok.text.substr(colon + 1)};
}

}  // namespace nckg::detail
