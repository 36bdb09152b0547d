#pragma once

// RDF term model and the term-level lexer shared by the N-Triples and SPARQL
// readers.

#include <compare>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <variant>

#include "xqa/error.hpp"

namespace xqa {

namespace vocab {
inline constexpr std::string_view kRdfType =
    "http://www.w3.org/1999/02/22-rdf-syntax-ns#type";
inline constexpr std::string_view kRdfsLabel =
    "http://www.w3.org/2000/01/rdf-schema#label";
inline constexpr std::string_view kSkosAltLabel =
    "http://www.w3.org/2004/02/skos/core#altLabel";
inline constexpr std::string_view kXsdInteger =
    "http://www.w3.org/2001/XMLSchema#integer";
inline constexpr std::string_view kXsdDecimal =
    "http://www.w3.org/2001/XMLSchema#decimal";
inline constexpr std::string_view kXsdString =
    "http://www.w3.org/2001/XMLSchema#string";
}  // namespace vocab

struct Iri {
  std::string value;

  Iri() = default;
  explicit Iri(std::string v) : value(std::move(v)) {
    if (value.empty()) throw InvalidArgument("IRI must not be empty");
  }

  auto operator<=>(const Iri&) const = default;
};

struct Literal {
  std::string lexical_form;
  std::optional<Iri> datatype;
  std::optional<std::string> language;

  Literal() = default;
  explicit Literal(std::string lexical, std::optional<Iri> dt = std::nullopt,
                   std::optional<std::string> lang = std::nullopt)
      : lexical_form(std::move(lexical)),
        datatype(std::move(dt)),
        language(std::move(lang)) {
    if (datatype && language)
      throw InvalidArgument("literal cannot carry both datatype and language");
  }

  auto operator<=>(const Literal&) const = default;
};

using Term = std::variant<Iri, Literal>;

inline bool is_iri(const Term& t) { return std::holds_alternative<Iri>(t); }

struct Triple {
  Iri subject;
  Iri predicate;
  Term object;

  auto operator<=>(const Triple&) const = default;
};

namespace detail {

inline void append_utf8(std::string& out, std::uint32_t cp) {
  if (cp < 0x80) {
    out += static_cast<char>(cp);
  } else if (cp < 0x800) {
    out += static_cast<char>(0xC0 | (cp >> 6));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else if (cp < 0x10000) {
    out += static_cast<char>(0xE0 | (cp >> 12));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else {
    out += static_cast<char>(0xF0 | (cp >> 18));
    out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  }
}

inline bool iri_char_forbidden(unsigned char c) {
  return c <= 0x20 || c == '<' || c == '>' || c == '"' || c == '{' ||
         c == '}' || c == '|' || c == '^' || c == '`' || c == '\\';
}

/// Character cursor over one logical line (N-Triples) or a whole query
/// (SPARQL). Errors are reported against `line`.
class Cursor {
 public:
  Cursor(std::string_view text, std::size_t line) : text_(text), line_(line) {}

  bool done() const { return pos_ >= text_.size(); }
  char peek(std::size_t ahead = 0) const {
    return pos_ + ahead < text_.size() ? text_[pos_ + ahead] : '\0';
  }
  char get() { return text_[pos_++]; }
  std::size_t pos() const { return pos_; }
  void seek(std::size_t p) { pos_ = p; }
  std::string_view rest() const { return text_.substr(pos_); }
  std::size_t line() const { return line_; }

  void skip_ws() {
    while (!done() && (peek() == ' ' || peek() == '\t' || peek() == '\r' ||
                       peek() == '\n')) {
      if (peek() == '\n') ++line_;
      ++pos_;
    }
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw ParseError(line_, what + " at column " + std::to_string(pos_ + 1));
  }

  void expect(char c) {
    if (peek() != c) fail(std::string("expected '") + c + "'");
    ++pos_;
  }

  std::uint32_t read_hex(int digits) {
    std::uint32_t cp = 0;
    for (int i = 0; i < digits; ++i) {
      char c = peek();
      int v;
      if (c >= '0' && c <= '9')
        v = c - '0';
      else if (c >= 'a' && c <= 'f')
        v = c - 'a' + 10;
      else if (c >= 'A' && c <= 'F')
        v = c - 'A' + 10;
      else
        fail("invalid hex digit in escape");
      cp = cp * 16 + static_cast<std::uint32_t>(v);
      ++pos_;
    }
    return cp;
  }

  Iri read_iriref() {
    expect('<');
    std::string value;
    while (true) {
      if (done()) fail("unterminated IRI");
      char c = get();
      if (c == '>') break;
      if (c == '\\') {
        char e = done() ? '\0' : get();
        if (e == 'u')
          append_utf8(value, read_hex(4));
        else if (e == 'U')
          append_utf8(value, read_hex(8));
        else
          fail("invalid escape in IRI");
        continue;
      }
      if (iri_char_forbidden(static_cast<unsigned char>(c)))
        fail("character not allowed in IRI");
      value += c;
    }
    if (value.empty()) fail("empty IRI");
    return Iri(std::move(value));
  }

  Literal read_literal() {
    expect('"');
    std::string lexical;
    while (true) {
      if (done()) fail("unterminated string literal");
      char c = get();
      if (c == '"') break;
      if (c == '\n' || c == '\r') fail("newline in string literal");
      if (c == '\\') {
        if (done()) fail("unterminated escape");
        char e = get();
        switch (e) {
          case 't': lexical += '\t'; break;
          case 'b': lexical += '\b'; break;
          case 'n': lexical += '\n'; break;
          case 'r': lexical += '\r'; break;
          case 'f': lexical += '\f'; break;
          case '"': lexical += '"'; break;
          case '\'': lexical += '\''; break;
          case '\\': lexical += '\\'; break;
          case 'u': append_utf8(lexical, read_hex(4)); break;
          case 'U': append_utf8(lexical, read_hex(8)); break;
          default: fail("invalid escape in string literal");
        }
        continue;
      }
      lexical += c;
    }
    if (peek() == '@') {
      ++pos_;
      std::string lang;
      auto alpha = [](char ch) {
        return (ch >= 'a' && ch <= 'z') || (ch >= 'A' && ch <= 'Z');
      };
      while (alpha(peek())) lang += get();
      if (lang.empty()) fail("empty language tag");
      while (peek() == '-') {
        lang += get();
        std::size_t before = lang.size();
        while (alpha(peek()) || (peek() >= '0' && peek() <= '9')) lang += get();
        if (lang.size() == before) fail("malformed language tag");
      }
      return Literal(std::move(lexical), std::nullopt, std::move(lang));
    }
    if (peek() == '^' && peek(1) == '^') {
      pos_ += 2;
      return Literal(std::move(lexical), read_iriref());
    }
    return Literal(std::move(lexical));
  }

 private:
  std::string_view text_;
  std::size_t pos_ = 0;
  std::size_t line_;
};

}  // namespace detail

inline std::string to_ntriples(const Iri& iri) {
  std::string out = "<";
  for (unsigned char c : iri.value) {
    if (detail::iri_char_forbidden(c)) {
      static constexpr char hex[] = "0123456789ABCDEF";
      out += "\\u00";
      out += hex[c >> 4];
      out += hex[c & 0xF];
    } else {
      out += static_cast<char>(c);
    }
  }
  out += '>';
  return out;
}

inline std::string to_ntriples(const Literal& lit) {
  std::string out = "\"";
  for (char c : lit.lexical_form) {
    switch (c) {
      case '\\': out += "\\\\"; break;
      case '"': out += "\\\""; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      default: out += c;
    }
  }
  out += '"';
  if (lit.language) out += "@" + *lit.language;
  if (lit.datatype) out += "^^" + to_ntriples(*lit.datatype);
  return out;
}

inline std::string to_ntriples(const Term& term) {
  return std::visit([](const auto& t) { return to_ntriples(t); }, term);
}

inline std::string to_ntriples(const Triple& t) {
  return to_ntriples(t.subject) + " " + to_ntriples(t.predicate) + " " +
         to_ntriples(t.object) + " .";
}

}  // namespace xqa

template <>
struct std::hash<xqa::Iri> {
  std::size_t operator()(const xqa::Iri& iri) const noexcept {
    return std::hash<std::string>{}(iri.value);
  }
};

template <>
struct std::hash<xqa::Literal> {
  std::size_t operator()(const xqa::Literal& lit) const noexcept {
    std::size_t h = std::hash<std::string>{}(lit.lexical_form);
    if (lit.datatype) h = h * 31 + std::hash<xqa::Iri>{}(*lit.datatype);
    if (lit.language) h = h * 37 + std::hash<std::string>{}(*lit.language);
    return h;
  }
};

template <>
struct std::hash<xqa::Term> {
  std::size_t operator()(const xqa::Term& t) const noexcept {
    return std::visit(
        [](const auto& v) {
          return std::hash<std::decay_t<decltype(v)>>{}(v) ^ 0x9e3779b9u;
        },
        t);
  }
};
