#pragma once

#include <algorithm>
#include <array>
#include <cctype>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "xqa/rdf.hpp"

namespace xqa {

/// Lower-case, collapse internal whitespace, strip surrounding punctuation.
/// Non-ASCII bytes pass through unchanged.
inline std::string normalize_surface_form(std::string_view text) {
  std::string collapsed;
  bool pending_space = false;
  for (char ch : text) {
    auto c = static_cast<unsigned char>(ch);
    if (std::isspace(c)) {
      pending_space = !collapsed.empty();
      continue;
    }
    if (pending_space) collapsed += ' ';
    pending_space = false;
    collapsed += c < 0x80 ? static_cast<char>(std::tolower(c)) : ch;
  }
  auto strip = [](unsigned char c) { return c < 0x80 && (std::ispunct(c) || std::isspace(c)); };
  std::size_t b = 0, e = collapsed.size();
  while (b < e && strip(static_cast<unsigned char>(collapsed[b]))) ++b;
  while (e > b && strip(static_cast<unsigned char>(collapsed[e - 1]))) --e;
  return collapsed.substr(b, e - b);
}

struct GraphOptions {
  Iri label_predicate{std::string(vocab::kRdfsLabel)};
  /// Extra predicates whose literal objects add alternate surface forms.
  std::vector<Iri> alt_label_predicates{Iri{std::string(vocab::kSkosAltLabel)}};

  bool is_label_predicate(const Iri& p) const {
    return p == label_predicate ||
           std::find(alt_label_predicates.begin(), alt_label_predicates.end(), p) !=
               alt_label_predicates.end();
  }

  bool operator==(const GraphOptions&) const = default;
};

/// In-memory triple store with spo/pos/osp indexes over interned term ids and a
/// normalized label index. Mutate only while building; share as const.
class Graph {
 public:
  using Id = std::uint32_t;
  using Key = std::array<Id, 3>;

  explicit Graph(GraphOptions options = {}) : options_(std::move(options)) {}

  const GraphOptions& options() const { return options_; }
  std::size_t size() const { return spo_.size(); }
  bool empty() const { return spo_.empty(); }

  bool insert(const Triple& t) {
    Id s = intern(t.subject), p = intern(t.predicate), o = intern(t.object);
    if (!spo_.insert({s, p, o}).second) return false;
    pos_.insert({p, o, s});
    osp_.insert({o, s, p});
    if (options_.is_label_predicate(t.predicate)) {
      if (const auto* lit = std::get_if<Literal>(&t.object)) {
        auto key = normalize_surface_form(lit->lexical_form);
        if (!key.empty()) labels_[key].insert(t.subject);
      }
    }
    return true;
  }

  bool erase(const Triple& t) {
    auto s = find(t.subject), p = find(t.predicate), o = find(t.object);
    if (!s || !p || !o || !spo_.erase({*s, *p, *o})) return false;
    pos_.erase({*p, *o, *s});
    osp_.erase({*o, *s, *p});
    if (options_.is_label_predicate(t.predicate)) {
      if (const auto* lit = std::get_if<Literal>(&t.object)) {
        auto key = normalize_surface_form(lit->lexical_form);
        if (!still_labelled(*s, key)) {
          auto it = labels_.find(key);
          if (it != labels_.end()) {
            it->second.erase(t.subject);
            if (it->second.empty()) labels_.erase(it);
          }
        }
      }
    }
    return true;
  }

  bool contains(const Triple& t) const {
    auto s = find(t.subject), p = find(t.predicate), o = find(t.object);
    return s && p && o && spo_.count({*s, *p, *o});
  }

  std::optional<Id> find(const Term& term) const {
    auto it = ids_.find(term);
    if (it == ids_.end()) return std::nullopt;
    return it->second;
  }
  std::optional<Id> find(const Iri& iri) const { return find(Term{iri}); }

  const Term& term(Id id) const { return terms_.at(id); }

  /// Calls `fn(s, p, o)` for every stored key matching the bound positions.
  template <typename Fn>
  void match(std::optional<Id> s, std::optional<Id> p, std::optional<Id> o,
             Fn&& fn) const {
    if (s && p && o) {
      if (spo_.count({*s, *p, *o})) fn(*s, *p, *o);
    } else if (s && o) {
      scan(osp_, *o, s, [&](const Key& k) { fn(k[1], k[2], k[0]); });
    } else if (s) {
      scan(spo_, *s, p, [&](const Key& k) { fn(k[0], k[1], k[2]); });
    } else if (p) {
      scan(pos_, *p, o, [&](const Key& k) { fn(k[2], k[0], k[1]); });
    } else if (o) {
      scan(osp_, *o, std::nullopt, [&](const Key& k) { fn(k[1], k[2], k[0]); });
    } else {
      for (const auto& k : spo_) fn(k[0], k[1], k[2]);
    }
  }

  /// Triples in canonical (term) order.
  std::vector<Triple> triples() const {
    std::vector<Triple> out;
    out.reserve(spo_.size());
    for (const auto& k : spo_)
      out.push_back({std::get<Iri>(terms_[k[0]]), std::get<Iri>(terms_[k[1]]),
                     terms_[k[2]]});
    std::sort(out.begin(), out.end());
    return out;
  }

  /// Distinct predicates in use.
  std::set<Iri> predicates() const {
    std::set<Iri> out;
    for (auto it = pos_.begin(); it != pos_.end();) {
      Id p = (*it)[0];
      out.insert(std::get<Iri>(terms_[p]));
      it = pos_.lower_bound({p + 1, 0, 0});
    }
    return out;
  }

  /// IRIs whose normalized label equals the normalized phrase.
  std::set<Iri> lookup_surface_form(std::string_view phrase) const {
    auto it = labels_.find(normalize_surface_form(phrase));
    return it == labels_.end() ? std::set<Iri>{} : it->second;
  }

  const std::map<std::string, std::set<Iri>>& label_index() const { return labels_; }

  /// Index self-check; used by tests.
  bool indexes_consistent() const {
    if (spo_.size() != pos_.size() || spo_.size() != osp_.size()) return false;
    for (const auto& k : spo_)
      if (!pos_.count({k[1], k[2], k[0]}) || !osp_.count({k[2], k[0], k[1]}))
        return false;
    return true;
  }

 private:
  Id intern(const Term& term) {
    auto [it, added] = ids_.try_emplace(term, static_cast<Id>(terms_.size()));
    if (added) terms_.push_back(term);
    return it->second;
  }

  template <typename Index, typename Fn>
  static void scan(const Index& index, Id first, std::optional<Id> second, Fn&& fn) {
    Key lo{first, second.value_or(0), 0};
    for (auto it = index.lower_bound(lo); it != index.end(); ++it) {
      if ((*it)[0] != first || (second && (*it)[1] != *second)) break;
      fn(*it);
    }
  }

  bool still_labelled(Id s, const std::string& key) const {
    bool found = false;
    scan(spo_, s, std::nullopt, [&](const Key& k) {
      const auto& pred = std::get<Iri>(terms_[k[1]]);
      if (!options_.is_label_predicate(pred)) return;
      if (const auto* lit = std::get_if<Literal>(&terms_[k[2]]))
        found = found || normalize_surface_form(lit->lexical_form) == key;
    });
    return found;
  }

  GraphOptions options_;
  std::vector<Term> terms_;
  std::unordered_map<Term, Id> ids_;
  std::set<Key> spo_, pos_, osp_;
  std::map<std::string, std::set<Iri>> labels_;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r'))
    s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    s.remove_suffix(1);
  return s;
}

inline Triple parse_ntriples_line(std::string_view line, std::size_t line_no) {
  Cursor cur(line, line_no);
  auto term_iri = [&](const char* position) {
    cur.skip_ws();
    if (cur.peek() == '_' && cur.peek(1) == ':')
      throw UnsupportedFeature(line_no, std::string("blank node in ") + position +
                                            " position is not supported");
    if (cur.peek() != '<') cur.fail(std::string("expected IRI as ") + position);
    return cur.read_iriref();
  };
  Iri s = term_iri("subject");
  Iri p = term_iri("predicate");
  cur.skip_ws();
  Term o;
  if (cur.peek() == '<') {
    o = cur.read_iriref();
  } else if (cur.peek() == '"') {
    o = cur.read_literal();
  } else if (cur.peek() == '_' && cur.peek(1) == ':') {
    throw UnsupportedFeature(line_no, "blank node in object position is not supported");
  } else {
    cur.fail("expected IRI or literal as object");
  }
  cur.skip_ws();
  cur.expect('.');
  cur.skip_ws();
  if (!cur.done() && cur.peek() != '#') cur.fail("trailing content after '.'");
  return {std::move(s), std::move(p), std::move(o)};
}

template <typename Fn>
void for_each_line(std::string_view text, Fn&& fn) {
  std::size_t line_no = 0;
  while (!text.empty()) {
    ++line_no;
    auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    fn(line, line_no);
  }
}

}  // namespace detail

/// Parses a line-oriented N-Triples document. Duplicate statements collapse.
inline Graph load_ntriples(std::string_view text, GraphOptions options = {}) {
  Graph g(std::move(options));
  detail::for_each_line(text, [&](std::string_view raw, std::size_t line_no) {
    auto line = detail::trim(raw);
    if (line.empty() || line.front() == '#') return;
    g.insert(detail::parse_ntriples_line(line, line_no));
  });
  return g;
}

/// One statement per line in canonical term order.
inline std::string serialize_ntriples(const Graph& g) {
  std::string out;
  for (const auto& t : g.triples()) {
    out += to_ntriples(t);
    out += '\n';
  }
  return out;
}

}  // namespace xqa
