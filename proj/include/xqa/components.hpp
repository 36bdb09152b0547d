#pragma once

// Deterministic stand-ins for the three pipeline tasks: entity linking (NED),
// relation linking (RL) and query building (QB).

#include <algorithm>
#include <array>
#include <cctype>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "xqa/question.hpp"
#include "xqa/sparql.hpp"
#include "xqa/store.hpp"
#include "xqa/task.hpp"

namespace xqa {

/// Token range [begin, end) of a question plus the covered text.
struct Span {
  std::size_t begin = 0;
  std::size_t end = 0;
  std::string text;

  bool operator==(const Span&) const = default;
};

struct EntityLink {
  Span span;
  Iri entity;
  std::size_t score = 0;  // match length in tokens

  bool operator==(const EntityLink&) const = default;
};

struct RelationLink {
  Span span;
  Iri predicate;

  bool operator==(const RelationLink&) const = default;
};

/// Typed output of one stage. For QB, `answers` holds the executed result once
/// the query has been run; an executed SELECT without rows counts as empty.
struct ComponentOutput {
  Task task = Task::NED;
  std::variant<std::vector<EntityLink>, std::vector<RelationLink>, std::optional<Query>> payload;
  std::optional<AnswerSet> answers;

  static ComponentOutput of_entities(std::vector<EntityLink> links) {
    return {Task::NED, std::move(links), std::nullopt};
  }
  static ComponentOutput of_relations(std::vector<RelationLink> links) {
    return {Task::RL, std::move(links), std::nullopt};
  }
  static ComponentOutput of_query(std::optional<Query> q) { return {Task::QB, std::move(q), std::nullopt}; }

  const std::vector<EntityLink>& entities() const { return std::get<std::vector<EntityLink>>(payload); }
  const std::vector<RelationLink>& relations() const { return std::get<std::vector<RelationLink>>(payload); }
  const std::optional<Query>& query() const { return std::get<std::optional<Query>>(payload); }

  /// Number of payload items: links for NED/RL, 0 or 1 query for QB.
  std::size_t arity() const {
    switch (task) {
      case Task::NED: return entities().size();
      case Task::RL: return relations().size();
      case Task::QB: return query() ? 1 : 0;
    }
    return 0;
  }

  bool empty() const {
    if (task == Task::QB && query() && answers) return answers->empty();
    return arity() == 0;
  }

  /// IRIs or answer keys the output contributes, for set-based scoring.
  std::set<std::string> item_keys() const {
    std::set<std::string> out;
    switch (task) {
      case Task::NED:
        for (const auto& e : entities()) out.insert(e.entity.value);
        break;
      case Task::RL:
        for (const auto& r : relations()) out.insert(r.predicate.value);
        break;
      case Task::QB:
        if (answers) out = answers->keys();
        break;
    }
    return out;
  }
};

// ---------------------------------------------------------------------------
// Relation lexicon

namespace detail {

/// "birthPlace" -> "birth place", "official_language" -> "official language".
inline std::string split_local_name(const Iri& iri) {
  std::string_view v = iri.value;
  auto cut = v.find_last_of("/#");
  if (cut != std::string_view::npos) v.remove_prefix(cut + 1);
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    auto c = static_cast<unsigned char>(v[i]);
    if (c == '_' || c == '-') {
      if (!out.empty() && out.back() != ' ') out += ' ';
      continue;
    }
    if (std::isupper(c) && i > 0 && std::islower(static_cast<unsigned char>(v[i - 1])) &&
        !out.empty() && out.back() != ' ')
      out += ' ';
    out += static_cast<char>(std::tolower(c));
  }
  return normalize_surface_form(out);
}

inline std::size_t word_count(std::string_view phrase) {
  return phrase.empty() ? 0 : 1 + static_cast<std::size_t>(std::count(phrase.begin(), phrase.end(), ' '));
}

inline std::string join_tokens(const std::vector<std::string>& tokens, std::size_t b, std::size_t e) {
  std::string out;
  for (std::size_t i = b; i < e; ++i) {
    if (i > b) out += ' ';
    out += tokens[i];
  }
  return out;
}

}  // namespace detail

/// Surface phrase -> predicates, built from predicate local names, labels of
/// predicates and the synonym table.
class RelationLexicon {
 public:
  RelationLexicon() = default;

  static RelationLexicon build(const Graph& graph, const std::vector<SynonymEntry>& synonyms) {
    RelationLexicon lex;
    auto preds = graph.predicates();
    for (const auto& p : preds) lex.add(detail::split_local_name(p), p);
    for (const auto& [label, iris] : graph.label_index())
      for (const auto& iri : iris)
        if (preds.count(iri)) lex.add(label, iri);
    for (const auto& s : synonyms) lex.add(s.surface, s.predicate);
    return lex;
  }

  void add(const std::string& phrase, const Iri& predicate) {
    auto key = normalize_surface_form(phrase);
    if (key.empty()) return;
    entries_[key].insert(predicate);
    max_words_ = std::max(max_words_, detail::word_count(key));
  }

  std::set<Iri> lookup(std::string_view phrase) const {
    auto it = entries_.find(normalize_surface_form(phrase));
    return it == entries_.end() ? std::set<Iri>{} : it->second;
  }

  bool contains_predicate(const Iri& p) const {
    for (const auto& [k, v] : entries_)
      if (v.count(p)) return true;
    return false;
  }

  std::size_t max_words() const { return max_words_; }
  const std::map<std::string, std::set<Iri>>& entries() const { return entries_; }

 private:
  std::map<std::string, std::set<Iri>> entries_;
  std::size_t max_words_ = 0;
};

// ---------------------------------------------------------------------------
// Linking

namespace detail {

/// Greedy left-to-right longest match over token n-grams inside [from, to).
/// N-grams may not start or end on a punctuation token. `lookup` returns the
/// candidate set; `emit` receives (begin, end, candidates).
template <typename Lookup, typename Emit>
void longest_match(const Question& q, std::size_t from, std::size_t to, std::size_t max_n,
                   Lookup&& lookup, Emit&& emit) {
  std::size_t i = from;
  while (i < to) {
    bool matched = false;
    if (q.tags[i] != PosTag::Punct) {
      for (std::size_t n = std::min(max_n, to - i); n >= 1; --n) {
        if (q.tags[i + n - 1] == PosTag::Punct) continue;
        auto found = lookup(join_tokens(q.tokens, i, i + n));
        if (!found.empty()) {
          emit(i, i + n, found);
          i += n;
          matched = true;
          break;
        }
      }
    }
    if (!matched) ++i;
  }
}

}  // namespace detail

/// Longest label length in words; bounds the n-gram scan.
inline std::size_t max_label_words(const Graph& graph) {
  std::size_t max_n = 0;
  for (const auto& [label, iris] : graph.label_index()) max_n = std::max(max_n, detail::word_count(label));
  return max_n;
}

/// Ambiguous surface forms resolve to the lexicographically smallest IRI.
inline ComponentOutput link_entities(const Question& q, const Graph& graph, std::size_t max_n) {
  std::vector<EntityLink> links;
  detail::longest_match(
      q, 0, q.tokens.size(), max_n, [&](const std::string& phrase) { return graph.lookup_surface_form(phrase); },
      [&](std::size_t b, std::size_t e, const std::set<Iri>& found) {
        links.push_back({{b, e, detail::join_tokens(q.tokens, b, e)}, *found.begin(), e - b});
      });
  return ComponentOutput::of_entities(std::move(links));
}

inline ComponentOutput link_entities(const Question& q, const Graph& graph) {
  return link_entities(q, graph, max_label_words(graph));
}

inline ComponentOutput link_relations(const Question& q, const RelationLexicon& lexicon,
                                      const ComponentOutput& entities) {
  std::vector<bool> covered(q.tokens.size(), false);
  for (const auto& e : entities.entities())
    for (std::size_t i = e.span.begin; i < e.span.end && i < covered.size(); ++i) covered[i] = true;
  std::vector<RelationLink> links;
  std::size_t i = 0;
  while (i < q.tokens.size()) {
    if (covered[i]) {
      ++i;
      continue;
    }
    std::size_t run_end = i;
    while (run_end < q.tokens.size() && !covered[run_end]) ++run_end;
    detail::longest_match(
        q, i, run_end, lexicon.max_words(), [&](const std::string& phrase) { return lexicon.lookup(phrase); },
        [&](std::size_t b, std::size_t e, const std::set<Iri>& found) {
          links.push_back({{b, e, detail::join_tokens(q.tokens, b, e)}, *found.begin()});
        });
    i = run_end;
  }
  return ComponentOutput::of_relations(std::move(links));
}

namespace detail {

inline std::vector<Query> query_candidates(AnswerType type, const std::vector<EntityLink>& entities,
                                           const std::vector<RelationLink>& relations) {
  std::vector<Query> out;
  const Variable x{"x"};
  auto single = [&](QueryForm form, PatternTerm s, const Iri& p, PatternTerm o) {
    Query q;
    q.form = form;
    if (form == QueryForm::Select) q.projection = {"x"};
    q.patterns.push_back({std::move(s), p, std::move(o)});
    out.push_back(std::move(q));
  };
  if (type == AnswerType::Boolean && entities.size() >= 2) {
    for (const auto& r : relations)
      for (std::size_t i = 0; i + 1 < entities.size(); ++i) {
        single(QueryForm::Ask, entities[i].entity, r.predicate, entities[i + 1].entity);
        single(QueryForm::Ask, entities[i + 1].entity, r.predicate, entities[i].entity);
      }
    return out;
  }
  auto form = type == AnswerType::Boolean ? QueryForm::Ask : QueryForm::Select;
  for (const auto& r : relations)
    for (const auto& e : entities) {
      single(form, e.entity, r.predicate, x);
      single(form, x, r.predicate, e.entity);
    }
  return out;
}

inline std::size_t satisfied_patterns(const Graph& graph, const Query& q) {
  std::size_t n = 0;
  for (const auto& p : q.patterns) {
    Query probe{QueryForm::Ask, {}, {p}};
    n += evaluate(graph, probe).boolean ? 1 : 0;
  }
  return n;
}

}  // namespace detail

/// Ranks candidate queries by the number of KG-satisfied patterns, ties broken
/// by enumeration order. Uses only the linker outputs and the answer type.
inline ComponentOutput build_query(AnswerType type, const ComponentOutput& entities,
                                   const ComponentOutput& relations, const Graph& graph) {
  if (entities.entities().empty() || relations.relations().empty()) return ComponentOutput::of_query(std::nullopt);
  auto candidates = detail::query_candidates(type, entities.entities(), relations.relations());
  if (candidates.empty()) return ComponentOutput::of_query(std::nullopt);
  std::size_t best = 0, best_score = 0;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    auto score = detail::satisfied_patterns(graph, candidates[i]);
    if (score > best_score) {
      best_score = score;
      best = i;
    }
  }
  return ComponentOutput::of_query(std::move(candidates[best]));
}

// ---------------------------------------------------------------------------
// Component interface

struct StageInput {
  const Question& question;
  AnswerType answer_type;
  const ComponentOutput* entities = nullptr;   // set for RL and QB
  const ComponentOutput* relations = nullptr;  // set for QB
};

/// One pipeline component implementing exactly one task.
class Component {
 public:
  virtual ~Component() = default;
  virtual Task task() const = 0;
  virtual std::string name() const = 0;
  virtual ComponentOutput run(const StageInput& in) const = 0;
};

class DictionaryEntityLinker final : public Component {
 public:
  explicit DictionaryEntityLinker(const Graph& graph) : graph_(graph), max_words_(max_label_words(graph)) {}
  Task task() const override { return Task::NED; }
  std::string name() const override { return "dictionary-entity-linker"; }
  ComponentOutput run(const StageInput& in) const override {
    return link_entities(in.question, graph_, max_words_);
  }

 private:
  const Graph& graph_;
  std::size_t max_words_;
};

class LexiconRelationLinker final : public Component {
 public:
  LexiconRelationLinker(const Graph& graph, const std::vector<SynonymEntry>& synonyms)
      : lexicon_(RelationLexicon::build(graph, synonyms)) {}
  Task task() const override { return Task::RL; }
  std::string name() const override { return "lexicon-relation-linker"; }
  ComponentOutput run(const StageInput& in) const override {
    static const ComponentOutput none = ComponentOutput::of_entities({});
    return link_relations(in.question, lexicon_, in.entities ? *in.entities : none);
  }
  const RelationLexicon& lexicon() const { return lexicon_; }

 private:
  RelationLexicon lexicon_;
};

class RankedQueryBuilder final : public Component {
 public:
  explicit RankedQueryBuilder(const Graph& graph) : graph_(graph) {}
  Task task() const override { return Task::QB; }
  std::string name() const override { return "ranked-query-builder"; }
  ComponentOutput run(const StageInput& in) const override {
    static const ComponentOutput no_entities = ComponentOutput::of_entities({});
    static const ComponentOutput no_relations = ComponentOutput::of_relations({});
    return build_query(in.answer_type, in.entities ? *in.entities : no_entities,
                       in.relations ? *in.relations : no_relations, graph_);
  }

 private:
  const Graph& graph_;
};

/// One component per task, in pipeline order.
struct ComponentSet {
  std::unique_ptr<Component> ned;
  std::unique_ptr<Component> rl;
  std::unique_ptr<Component> qb;

  static ComponentSet defaults(const Store& store) {
    return {std::make_unique<DictionaryEntityLinker>(store.graph),
            std::make_unique<LexiconRelationLinker>(store.graph, store.synonyms),
            std::make_unique<RankedQueryBuilder>(store.graph)};
  }

  const Component& at(Task t) const {
    const auto& c = t == Task::NED ? ned : t == Task::RL ? rl : qb;
    if (!c || c->task() != t) throw InvalidArgument("no component for task " + std::string(to_string(t)));
    return *c;
  }
};

struct StageOutputs {
  ComponentOutput ned;
  ComponentOutput rl;
  ComponentOutput qb;

  const ComponentOutput& at(Task t) const { return t == Task::NED ? ned : t == Task::RL ? rl : qb; }
};

/// Runs NED -> RL -> QB and executes the built query, if any.
inline StageOutputs run_stages(const Question& q, const ComponentSet& components, const Graph& graph) {
  auto type = answer_type(q);
  StageOutputs out{components.at(Task::NED).run({q, type}), {}, {}};
  out.rl = components.at(Task::RL).run({q, type, &out.ned});
  out.qb = components.at(Task::QB).run({q, type, &out.ned, &out.rl});
  if (out.qb.query()) out.qb.answers = evaluate(graph, *out.qb.query());
  return out;
}

}  // namespace xqa
