#pragma once

// The SPARQL subset the query builder emits: ASK and SELECT over a single
// conjunctive basic graph pattern. Includes a reader (for gold queries), a
// writer and an evaluator.

#include <algorithm>
#include <cctype>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "xqa/graph.hpp"

namespace xqa {

struct Variable {
  std::string name;  // without the leading '?'

  auto operator<=>(const Variable&) const = default;
};

using PatternTerm = std::variant<Variable, Iri, Literal>;

struct TriplePattern {
  PatternTerm subject;
  PatternTerm predicate;
  PatternTerm object;

  bool operator==(const TriplePattern&) const = default;
};

enum class QueryForm { Ask, Select };

struct Query {
  QueryForm form = QueryForm::Select;
  std::vector<std::string> projection;
  std::vector<TriplePattern> patterns;

  bool operator==(const Query&) const = default;

  /// Distinct variable names in order of first appearance.
  std::vector<std::string> variables() const {
    std::vector<std::string> out;
    auto add = [&](const PatternTerm& t) {
      if (const auto* v = std::get_if<Variable>(&t))
        if (std::find(out.begin(), out.end(), v->name) == out.end()) out.push_back(v->name);
    };
    for (const auto& p : patterns) {
      add(p.subject);
      add(p.predicate);
      add(p.object);
    }
    return out;
  }

  void validate() const {
    if (patterns.empty()) throw InvalidArgument("query has no triple patterns");
    if (form == QueryForm::Ask && !projection.empty())
      throw InvalidArgument("ASK query cannot project variables");
    if (form == QueryForm::Select && projection.empty())
      throw InvalidArgument("SELECT query must project at least one variable");
    auto vars = variables();
    for (const auto& v : projection)
      if (std::find(vars.begin(), vars.end(), v) == vars.end())
        throw InvalidArgument("projected variable ?" + v + " does not occur in any pattern");
    for (const auto& p : patterns) {
      if (std::holds_alternative<Literal>(p.subject) || std::holds_alternative<Literal>(p.predicate))
        throw InvalidArgument("literal in subject or predicate position");
    }
  }
};

struct AnswerSet {
  QueryForm form = QueryForm::Select;
  bool boolean = false;
  std::vector<std::string> variables;
  std::set<std::vector<Term>> rows;

  /// A SELECT without rows. An ASK result is never empty: false is an answer.
  bool empty() const { return form == QueryForm::Select && rows.empty(); }

  bool operator==(const AnswerSet&) const = default;

  /// Answers as comparable strings: {"true"}/{"false"} for ASK, one
  /// tab-joined N-Triples row per binding for SELECT.
  std::set<std::string> keys() const {
    if (form == QueryForm::Ask) return {boolean ? "true" : "false"};
    std::set<std::string> out;
    for (const auto& row : rows) {
      std::string key;
      for (std::size_t i = 0; i < row.size(); ++i) {
        if (i) key += '\t';
        key += to_ntriples(row[i]);
      }
      out.insert(std::move(key));
    }
    return out;
  }
};

// ---------------------------------------------------------------------------
// Compact IRIs

struct PrefixTable {
  std::vector<std::pair<std::string, std::string>> entries;  // prefix -> namespace

  static PrefixTable defaults() {
    return {{{"dbr", "http://dbpedia.org/resource/"},
             {"dbo", "http://dbpedia.org/ontology/"},
             {"rdfs", "http://www.w3.org/2000/01/rdf-schema#"}}};
  }

  std::optional<std::string> lookup(std::string_view prefix) const {
    for (const auto& [p, ns] : entries)
      if (p == prefix) return ns;
    return std::nullopt;
  }
};

namespace detail {
inline bool pn_local_char(unsigned char c) {
  return std::isalnum(c) || c == '_' || c == '-' || c == '.' || c >= 0x80;
}
}  // namespace detail

/// `dbr:Nikola_Tesla` when a namespace matches and the local part is a plain
/// name, otherwise the full `<IRI>`.
inline std::string compact_iri(const Iri& iri, const PrefixTable& prefixes) {
  for (const auto& [prefix, ns] : prefixes.entries) {
    if (iri.value.size() <= ns.size() || iri.value.compare(0, ns.size(), ns) != 0) continue;
    std::string_view local(iri.value);
    local.remove_prefix(ns.size());
    bool ok = local.back() != '.' && local.front() != '.' && local.front() != '-';
    for (unsigned char c : local) ok = ok && detail::pn_local_char(c);
    if (ok) return prefix + ":" + std::string(local);
  }
  return to_ntriples(iri);
}

inline std::string compact_term(const Term& t, const PrefixTable& prefixes) {
  if (const auto* iri = std::get_if<Iri>(&t)) return compact_iri(*iri, prefixes);
  return to_ntriples(std::get<Literal>(t));
}

// ---------------------------------------------------------------------------
// Writer

inline std::string to_sparql(const PatternTerm& t, const PrefixTable* prefixes = nullptr) {
  if (const auto* v = std::get_if<Variable>(&t)) return "?" + v->name;
  if (const auto* iri = std::get_if<Iri>(&t))
    return prefixes ? compact_iri(*iri, *prefixes) : to_ntriples(*iri);
  return to_ntriples(std::get<Literal>(t));
}

/// `ASK { s p o . }` / `SELECT ?x WHERE { s p o . }`. With a prefix table IRIs
/// are compacted (display form, no PREFIX declarations emitted).
inline std::string to_sparql(const Query& q, const PrefixTable* prefixes = nullptr) {
  std::string out;
  if (q.form == QueryForm::Ask) {
    out = "ASK {";
  } else {
    out = "SELECT";
    for (const auto& v : q.projection) out += " ?" + v;
    out += " WHERE {";
  }
  for (const auto& p : q.patterns) {
    out += ' ';
    out += to_sparql(p.subject, prefixes) + ' ' + to_sparql(p.predicate, prefixes) + ' ' +
           to_sparql(p.object, prefixes) + " .";
  }
  out += " }";
  return out;
}

// ---------------------------------------------------------------------------
// Reader

namespace detail {

class SparqlReader {
 public:
  explicit SparqlReader(std::string_view text) : cur_(text, 1) {}

  Query parse() {
    PrefixTable prefixes;
    while (true) {
      cur_.skip_ws();
      auto kw = peek_keyword();
      if (kw == "PREFIX") {
        take_keyword();
        cur_.skip_ws();
        std::string name;
        while (!cur_.done() && cur_.peek() != ':' && !std::isspace(static_cast<unsigned char>(cur_.peek())))
          name += cur_.get();
        cur_.expect(':');
        cur_.skip_ws();
        prefixes.entries.emplace_back(name, cur_.read_iriref().value);
      } else if (kw == "BASE") {
        unsupported("BASE declarations");
      } else {
        break;
      }
    }
    prefixes_ = std::move(prefixes);

    Query q;
    auto form = take_keyword();
    if (form == "ASK") {
      q.form = QueryForm::Ask;
    } else if (form == "SELECT") {
      q.form = QueryForm::Select;
      cur_.skip_ws();
      if (peek_keyword() == "DISTINCT" || peek_keyword() == "REDUCED") take_keyword();
      cur_.skip_ws();
      bool star = false;
      while (true) {
        cur_.skip_ws();
        if (cur_.peek() == '?' || cur_.peek() == '$') {
          q.projection.push_back(read_variable().name);
        } else if (cur_.peek() == '*') {
          cur_.get();
          star = true;
        } else if (cur_.peek() == '(') {
          unsupported("projection expressions and aggregates");
        } else if (auto kw = peek_keyword(); kw == "COUNT" || kw == "SUM" || kw == "MIN" ||
                                             kw == "MAX" || kw == "AVG" || kw == "SAMPLE") {
          unsupported("aggregates");
        } else {
          break;
        }
      }
      if (star && !q.projection.empty()) cur_.fail("cannot mix '*' with variables");
      if (!star && q.projection.empty()) cur_.fail("SELECT needs a projection");
      star_ = star;
    } else if (form == "CONSTRUCT" || form == "DESCRIBE") {
      unsupported(form + " queries");
    } else {
      cur_.fail("expected SELECT or ASK");
    }
    cur_.skip_ws();
    if (peek_keyword() == "FROM") unsupported("FROM clauses");
    if (peek_keyword() == "WHERE") take_keyword();
    cur_.skip_ws();
    cur_.expect('{');
    read_block(q);
    cur_.skip_ws();
    if (!cur_.done()) {
      auto kw = peek_keyword();
      if (!kw.empty()) unsupported("solution modifier " + kw);
      cur_.fail("trailing content after query");
    }
    if (star_) q.projection = q.variables();
    if (q.patterns.empty()) cur_.fail("empty graph pattern");
    try {
      q.validate();
    } catch (const InvalidArgument& e) {
      throw ParseError(cur_.line(), e.what());
    }
    return q;
  }

 private:
  [[noreturn]] void unsupported(const std::string& what) const {
    throw UnsupportedFeature(cur_.line(), what + " are outside the supported SPARQL subset");
  }

  std::string peek_keyword() const {
    std::string out;
    for (std::size_t i = 0;; ++i) {
      char c = cur_.peek(i);
      if (!std::isalpha(static_cast<unsigned char>(c))) {
        if (c == ':' || c == '_' || std::isdigit(static_cast<unsigned char>(c))) return {};
        break;
      }
      out += static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    }
    return out;
  }

  std::string take_keyword() {
    cur_.skip_ws();
    auto kw = peek_keyword();
    cur_.seek(cur_.pos() + kw.size());
    return kw;
  }

  Variable read_variable() {
    cur_.get();  // ? or $
    std::string name;
    while (!cur_.done() && (std::isalnum(static_cast<unsigned char>(cur_.peek())) || cur_.peek() == '_'))
      name += cur_.get();
    if (name.empty()) cur_.fail("empty variable name");
    return {name};
  }

  PatternTerm read_term() {
    cur_.skip_ws();
    char c = cur_.peek();
    if (c == '?' || c == '$') return read_variable();
    if (c == '<') return cur_.read_iriref();
    if (c == '"') return cur_.read_literal();
    if (c == '\'') cur_.fail("single-quoted literals are not supported");
    if (c == '_' && cur_.peek(1) == ':') unsupported("blank nodes");
    if (c == '[' || c == '(') unsupported("blank node and collection syntax");
    if (c == '{') unsupported("nested group patterns");
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '-' || c == '+') {
      std::string num;
      if (c == '-' || c == '+') num += cur_.get();
      bool dot = false;
      while (std::isdigit(static_cast<unsigned char>(cur_.peek())) ||
             (cur_.peek() == '.' && !dot && std::isdigit(static_cast<unsigned char>(cur_.peek(1))))) {
        if (cur_.peek() == '.') dot = true;
        num += cur_.get();
      }
      if (cur_.peek() == 'e' || cur_.peek() == 'E') unsupported("double literals");
      return Literal(num, Iri(std::string(dot ? vocab::kXsdDecimal : vocab::kXsdInteger)));
    }
    auto kw = peek_keyword();
    if (kw == "A" && !std::isalnum(static_cast<unsigned char>(cur_.peek(1)))) {
      cur_.get();
      return Iri(std::string(vocab::kRdfType));
    }
    if (kw == "TRUE" || kw == "FALSE") {
      cur_.seek(cur_.pos() + kw.size());
      return Literal(kw == "TRUE" ? "true" : "false",
                     Iri("http://www.w3.org/2001/XMLSchema#boolean"));
    }
    if (kw == "FILTER" || kw == "OPTIONAL" || kw == "UNION" || kw == "MINUS" ||
        kw == "BIND" || kw == "VALUES" || kw == "GRAPH" || kw == "SERVICE")
      unsupported(kw + " clauses");
    return read_prefixed_name();
  }

  Iri read_prefixed_name() {
    std::string prefix;
    while (!cur_.done() && cur_.peek() != ':' &&
           (std::isalnum(static_cast<unsigned char>(cur_.peek())) || cur_.peek() == '_' || cur_.peek() == '-'))
      prefix += cur_.get();
    if (cur_.peek() != ':') cur_.fail("expected a term");
    cur_.get();
    std::string local;
    while (!cur_.done()) {
      char c = cur_.peek();
      if (c == '\\' && cur_.peek(1) != '\0') {
        cur_.get();
        local += cur_.get();
      } else if (pn_local_char(static_cast<unsigned char>(c)) || c == ':' || c == '%') {
        local += cur_.get();
      } else {
        break;
      }
    }
    while (!local.empty() && local.back() == '.') {
      local.pop_back();
      cur_.seek(cur_.pos() - 1);
    }
    auto ns = prefixes_.lookup(prefix);
    if (!ns) ns = PrefixTable::defaults().lookup(prefix);
    if (!ns && prefix == "rdf") ns = "http://www.w3.org/1999/02/22-rdf-syntax-ns#";
    if (!ns) cur_.fail("undeclared prefix '" + prefix + ":'");
    return Iri(*ns + local);
  }

  void read_block(Query& q) {
    while (true) {
      cur_.skip_ws();
      if (cur_.peek() == '}') {
        cur_.get();
        return;
      }
      if (cur_.done()) cur_.fail("unterminated graph pattern");
      PatternTerm s = read_term();
      while (true) {
        PatternTerm p = read_term();
        while (true) {
          PatternTerm o = read_term();
          q.patterns.push_back({s, p, o});
          cur_.skip_ws();
          if (cur_.peek() != ',') break;
          cur_.get();
        }
        cur_.skip_ws();
        if (cur_.peek() != ';') break;
        cur_.get();
        cur_.skip_ws();
        if (cur_.peek() == '.' || cur_.peek() == '}') break;
      }
      cur_.skip_ws();
      if (cur_.peek() == '.') {
        cur_.get();
      } else if (cur_.peek() != '}') {
        auto kw = peek_keyword();
        if (!kw.empty()) read_term();  // raises for FILTER & co.
        cur_.fail("expected '.' or '}'");
      }
    }
  }

  Cursor cur_;
  PrefixTable prefixes_;
  bool star_ = false;
};

}  // namespace detail

/// Parses a query in the supported subset. Throws ParseError on malformed
/// text and UnsupportedFeature for valid SPARQL outside the subset.
inline Query parse_sparql(std::string_view text) { return detail::SparqlReader(text).parse(); }

// ---------------------------------------------------------------------------
// Evaluator

namespace detail {

class BgpMatcher {
 public:
  BgpMatcher(const Graph& g, const Query& q) : graph_(g), vars_(q.variables()) {
    for (const auto& p : q.patterns) {
      Compiled c;
      for (int k = 0; k < 3; ++k) {
        const PatternTerm& t = k == 0 ? p.subject : k == 1 ? p.predicate : p.object;
        if (const auto* v = std::get_if<Variable>(&t)) {
          c.var[k] = static_cast<int>(
              std::find(vars_.begin(), vars_.end(), v->name) - vars_.begin());
        } else {
          Term term = std::holds_alternative<Iri>(t) ? Term{std::get<Iri>(t)} : Term{std::get<Literal>(t)};
          auto id = graph_.find(term);
          if (!id) impossible_ = true;
          c.constant[k] = id;
        }
      }
      patterns_.push_back(c);
    }
  }

  /// Calls `fn(bindings)` for every satisfying assignment. `fn` returns false
  /// to stop early.
  template <typename Fn>
  void run(Fn&& fn) {
    if (impossible_) return;
    std::vector<std::optional<Graph::Id>> binding(vars_.size());
    std::vector<bool> used(patterns_.size(), false);
    stop_ = false;
    solve(binding, used, patterns_.size(), fn);
  }

  const std::vector<std::string>& variables() const { return vars_; }

 private:
  struct Compiled {
    std::array<int, 3> var{-1, -1, -1};
    std::array<std::optional<Graph::Id>, 3> constant{};
  };

  template <typename Fn>
  void solve(std::vector<std::optional<Graph::Id>>& binding, std::vector<bool>& used,
             std::size_t remaining, Fn& fn) {
    if (stop_) return;
    if (remaining == 0) {
      if (!fn(binding)) stop_ = true;
      return;
    }
    // most-bound pattern first; ties by position
    std::size_t best = patterns_.size();
    int best_bound = -1;
    for (std::size_t i = 0; i < patterns_.size(); ++i) {
      if (used[i]) continue;
      int bound = 0;
      for (int k = 0; k < 3; ++k)
        bound += patterns_[i].var[k] < 0 || binding[patterns_[i].var[k]] ? 1 : 0;
      if (bound > best_bound) {
        best_bound = bound;
        best = i;
      }
    }
    const Compiled& c = patterns_[best];
    std::array<std::optional<Graph::Id>, 3> key;
    for (int k = 0; k < 3; ++k) key[k] = c.var[k] < 0 ? c.constant[k] : binding[c.var[k]];
    used[best] = true;
    graph_.match(key[0], key[1], key[2], [&](Graph::Id s, Graph::Id p, Graph::Id o) {
      if (stop_) return;
      const Graph::Id ids[3] = {s, p, o};
      auto next = binding;
      for (int k = 0; k < 3; ++k) {
        int v = c.var[k];
        if (v < 0) continue;
        if (next[v] && *next[v] != ids[k]) return;
        next[v] = ids[k];
      }
      solve(next, used, remaining - 1, fn);
    });
    used[best] = false;
  }

  const Graph& graph_;
  std::vector<std::string> vars_;
  std::vector<Compiled> patterns_;
  bool impossible_ = false;
  bool stop_ = false;
};

}  // namespace detail

inline AnswerSet evaluate(const Graph& graph, const Query& query) {
  query.validate();
  AnswerSet out;
  out.form = query.form;
  detail::BgpMatcher matcher(graph, query);
  if (query.form == QueryForm::Ask) {
    matcher.run([&](const auto&) {
      out.boolean = true;
      return false;
    });
    return out;
  }
  out.variables = query.projection;
  std::vector<std::size_t> columns;
  for (const auto& v : query.projection)
    columns.push_back(static_cast<std::size_t>(
        std::find(matcher.variables().begin(), matcher.variables().end(), v) -
        matcher.variables().begin()));
  matcher.run([&](const std::vector<std::optional<Graph::Id>>& b) {
    std::vector<Term> row;
    row.reserve(columns.size());
    for (auto c : columns) row.push_back(graph.term(*b[c]));
    out.rows.insert(std::move(row));
    return true;
  });
  return out;
}

}  // namespace xqa
