#pragma once

// Template repository, selection and rendering of stage explanations.
//
// Template file grammar (UTF-8, line oriented):
//   file     := (blank | comment | record)*
//   comment  := '#' ... (outside a record's text only)
//   record   := header+ text            -- records are separated by blank lines
//   header   := key ':' value           key in {id, task, class, arity, variant}
//   text     := 'text:' first-line? continuation*
// Continuation lines are trimmed and joined to the text with single spaces.
// task is NED/RL/QB, class is Success/NoAnswer/WrongAnswer, arity is a
// positive integer or '*', variant is a POS tag name (e.g. PROPN).

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "xqa/components.hpp"
#include "xqa/ml/data.hpp"
#include "xqa/outcome.hpp"

namespace xqa {

struct ExplanationTemplate {
  std::string id;
  Task task = Task::NED;
  OutcomeClass outcome = OutcomeClass::Success;
  std::optional<std::size_t> arity;  // nullopt = '*'
  std::optional<PosTag> variant;
  std::string pattern;

  bool operator==(const ExplanationTemplate&) const = default;
};

inline std::vector<std::string_view> allowed_placeholders(Task t) {
  switch (t) {
    case Task::NED: return {"stage", "surface", "entity", "count"};
    case Task::RL: return {"stage", "surface", "predicate", "count"};
    case Task::QB: return {"stage", "query", "answer"};
  }
  return {};
}

namespace detail {

inline bool placeholder_char(char c) { return (c >= 'a' && c <= 'z') || c == '_'; }

/// Splits a pattern into literal text and placeholder names. Returns the
/// placeholder names in order; throws on a stray or unterminated brace.
inline std::vector<std::string> placeholders_of(std::string_view pattern) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < pattern.size(); ++i) {
    if (pattern[i] == '}') throw TemplateError("unmatched '}' in template text");
    if (pattern[i] != '{') continue;
    auto close = pattern.find('}', i);
    if (close == std::string_view::npos) throw TemplateError("unterminated '{' in template text");
    auto name = pattern.substr(i + 1, close - i - 1);
    if (name.empty() || !std::all_of(name.begin(), name.end(), placeholder_char))
      throw TemplateError("malformed placeholder '{" + std::string(name) + "}'");
    out.emplace_back(name);
    i = close;
  }
  return out;
}

}  // namespace detail

/// True when `text` still contains something shaped like "{name}".
inline bool has_unresolved_placeholder(std::string_view text) {
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text[i] != '{') continue;
    std::size_t j = i + 1;
    while (j < text.size() && detail::placeholder_char(text[j])) ++j;
    if (j > i + 1 && j < text.size() && text[j] == '}') return true;
  }
  return false;
}

class TemplateRepository {
 public:
  TemplateRepository() = default;

  /// Validates ids, placeholders and coverage of every task x class pair.
  explicit TemplateRepository(std::vector<ExplanationTemplate> templates) : templates_(std::move(templates)) {
    std::sort(templates_.begin(), templates_.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
    for (std::size_t i = 0; i < templates_.size(); ++i) {
      const auto& t = templates_[i];
      if (t.id.empty()) throw TemplateError("template without id");
      if (i && templates_[i - 1].id == t.id) throw TemplateError("duplicate template id '" + t.id + "'");
      if (t.arity && *t.arity == 0) throw TemplateError("template '" + t.id + "': arity must be positive or '*'");
      auto allowed = allowed_placeholders(t.task);
      std::vector<std::string> names;
      try {
        names = detail::placeholders_of(t.pattern);
      } catch (const TemplateError& e) {
        throw TemplateError("template '" + t.id + "': " + e.what());
      }
      for (const auto& n : names)
        if (std::find(allowed.begin(), allowed.end(), n) == allowed.end())
          throw TemplateError("template '" + t.id + "': unknown placeholder '{" + n + "}' for task " +
                              std::string(to_string(t.task)));
    }
    std::string missing;
    for (auto task : kTasks)
      for (auto c : kOutcomes)
        if (for_pair(task, c).empty())
          missing += std::string(missing.empty() ? "" : ", ") + "(" + std::string(to_string(task)) + ", " +
                     std::string(to_string(c)) + ")";
    if (!missing.empty()) throw TemplateError("template repository does not cover " + missing);
  }

  const std::vector<ExplanationTemplate>& templates() const { return templates_; }
  std::size_t size() const { return templates_.size(); }

  std::vector<const ExplanationTemplate*> for_pair(Task task, OutcomeClass c) const {
    std::vector<const ExplanationTemplate*> out;
    for (const auto& t : templates_)
      if (t.task == task && t.outcome == c) out.push_back(&t);
    return out;
  }

  const ExplanationTemplate* find(std::string_view id) const {
    for (const auto& t : templates_)
      if (t.id == id) return &t;
    return nullptr;
  }

 private:
  std::vector<ExplanationTemplate> templates_;  // sorted by id
};

inline TemplateRepository parse_templates(std::string_view text) {
  std::vector<ExplanationTemplate> out;
  struct Pending {
    std::size_t line = 0;
    std::map<std::string, std::string> headers;
    std::optional<std::string> text;
  };
  std::optional<Pending> rec;

  auto finish = [&] {
    if (!rec) return;
    auto& r = *rec;
    auto need = [&](const char* key) -> const std::string& {
      auto it = r.headers.find(key);
      if (it == r.headers.end()) throw ParseError(r.line, std::string("template record lacks '") + key + ":'");
      return it->second;
    };
    ExplanationTemplate t;
    t.id = need("id");
    try {
      t.task = task_from_string(need("task"));
      t.outcome = outcome_from_string(need("class"));
      const auto& arity = need("arity");
      if (arity != "*") {
        if (arity.empty() || !std::all_of(arity.begin(), arity.end(), [](char c) { return c >= '0' && c <= '9'; }))
          throw InvalidArgument("arity must be a positive integer or '*'");
        t.arity = std::stoul(arity);
      }
      if (auto it = r.headers.find("variant"); it != r.headers.end()) {
        t.variant = pos_tag_from_string(it->second);
        if (!t.variant) throw InvalidArgument("unknown POS variant '" + it->second + "'");
      }
    } catch (const InvalidArgument& e) {
      throw ParseError(r.line, "template '" + t.id + "': " + e.what());
    }
    if (!r.text || r.text->empty()) throw ParseError(r.line, "template '" + t.id + "' has no text");
    t.pattern = *r.text;
    out.push_back(std::move(t));
    rec.reset();
  };

  detail::for_each_line(text, [&](std::string_view raw, std::size_t line_no) {
    auto line = detail::trim(raw);
    if (line.empty()) {
      finish();
      return;
    }
    if (rec && rec->text) {
      if (!rec->text->empty()) *rec->text += ' ';
      *rec->text += line;
      return;
    }
    if (line.front() == '#') return;
    auto colon = line.find(':');
    if (colon == std::string_view::npos) throw ParseError(line_no, "expected 'key: value'");
    std::string key(detail::trim(line.substr(0, colon)));
    std::string value(detail::trim(line.substr(colon + 1)));
    if (!rec) rec = Pending{line_no, {}, std::nullopt};
    if (key == "text") {
      rec->text = value;
      return;
    }
    static const std::string_view keys[] = {"id", "task", "class", "arity", "variant"};
    if (std::find(std::begin(keys), std::end(keys), key) == std::end(keys))
      throw ParseError(line_no, "unknown template header '" + key + "'");
    if (!rec->headers.emplace(key, value).second) throw ParseError(line_no, "repeated header '" + key + "'");
  });
  finish();
  return TemplateRepository(std::move(out));
}

inline TemplateRepository load_templates(const std::string& path) { return parse_templates(read_file(path)); }

// ---------------------------------------------------------------------------
// Selection

/// Most frequent tag over the tokens of the given spans (punctuation
/// ignored); ties go to the lower enumerator.
inline std::optional<PosTag> dominant_pos(const Question& q, const std::vector<Span>& spans) {
  std::array<std::size_t, 13> counts{};
  bool any = false;
  for (const auto& s : spans)
    for (std::size_t i = s.begin; i < s.end && i < q.tags.size(); ++i) {
      if (q.tags[i] == PosTag::Punct) continue;
      ++counts[static_cast<std::size_t>(q.tags[i])];
      any = true;
    }
  if (!any) return std::nullopt;
  return static_cast<PosTag>(std::max_element(counts.begin(), counts.end()) - counts.begin());
}

inline std::vector<Span> spans_of(const ComponentOutput& out) {
  std::vector<Span> spans;
  if (out.task == Task::NED)
    for (const auto& e : out.entities()) spans.push_back(e.span);
  if (out.task == Task::RL)
    for (const auto& r : out.relations()) spans.push_back(r.span);
  return spans;
}

/// Ranks candidates by (exact arity < wildcard < other arity), then
/// (matching variant < no variant < other variant), then id.
inline const ExplanationTemplate& select_template(const TemplateRepository& repo, Task task, OutcomeClass c,
                                                  std::size_t arity, std::optional<PosTag> variant) {
  const ExplanationTemplate* best = nullptr;
  std::tuple<int, int, std::string_view> best_key;
  for (const auto* t : repo.for_pair(task, c)) {
    int a = !t->arity ? 1 : *t->arity == arity ? 0 : 2;
    int v = !t->variant ? 1 : t->variant == variant ? 0 : 2;
    std::tuple<int, int, std::string_view> key{a, v, t->id};
    if (!best || key < best_key) {
      best = t;
      best_key = key;
    }
  }
  if (!best) throw TemplateError("no template for this task and class");
  return *best;
}

inline const ExplanationTemplate& select_template(const TemplateRepository& repo, Task task, OutcomeClass c,
                                                  const ComponentOutput& out, const Question& q) {
  return select_template(repo, task, c, out.arity(), dominant_pos(q, spans_of(out)));
}

// ---------------------------------------------------------------------------
// Rendering

struct Explanation {
  Task task = Task::NED;
  OutcomeClass outcome = OutcomeClass::Success;
  std::string template_id;
  std::string text;
  bool mismatch = false;  // predicted class disagreed with the output's emptiness

  bool operator==(const Explanation&) const = default;
};

/// "a", "a and b", "a, b and c".
inline std::string join_list(const std::vector<std::string>& items) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += i + 1 == items.size() ? " and " : ", ";
    out += items[i];
  }
  return out;
}

inline std::string render_answer(const AnswerSet& a, const PrefixTable& prefixes) {
  if (a.form == QueryForm::Ask) return a.boolean ? "true" : "false";
  std::vector<std::string> rows;
  for (const auto& row : a.rows) {
    std::string r;
    for (std::size_t i = 0; i < row.size(); ++i) r += (i ? " " : "") + compact_term(row[i], prefixes);
    rows.push_back(std::move(r));
  }
  return join_list(rows);
}

namespace detail {

inline std::optional<std::string> placeholder_value(std::string_view name, const ComponentOutput& out,
                                                    const PrefixTable& prefixes) {
  if (name == "stage") return std::string(stage_name(out.task));
  if (name == "count") return out.arity() ? std::optional(std::to_string(out.arity())) : std::nullopt;
  std::vector<std::string> items;
  if (name == "surface") {
    for (const auto& s : spans_of(out)) items.push_back(s.text);
  } else if (name == "entity" && out.task == Task::NED) {
    for (const auto& e : out.entities()) items.push_back(compact_iri(e.entity, prefixes));
  } else if (name == "predicate" && out.task == Task::RL) {
    for (const auto& r : out.relations()) items.push_back(compact_iri(r.predicate, prefixes));
  } else if (name == "query" && out.task == Task::QB) {
    if (out.query()) return to_sparql(*out.query(), &prefixes);
  } else if (name == "answer" && out.task == Task::QB) {
    if (out.answers && !out.answers->empty()) return render_answer(*out.answers, prefixes);
  }
  if (items.empty()) return std::nullopt;
  return join_list(items);
}

}  // namespace detail

inline Explanation render(const ExplanationTemplate& t, const ComponentOutput& out, const PrefixTable& prefixes) {
  if (t.task != out.task) throw RenderError("template '" + t.id + "' belongs to another task");
  Explanation e{t.task, t.outcome, t.id, {}, false};
  const std::string& p = t.pattern;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] != '{') {
      e.text += p[i];
      continue;
    }
    auto close = p.find('}', i);
    auto name = std::string_view(p).substr(i + 1, close - i - 1);
    auto value = detail::placeholder_value(name, out, prefixes);
    if (!value)
      throw RenderError("template '" + t.id + "': nothing to fill {" + std::string(name) +
                        "} with; the output is inconsistent with class " + std::string(to_string(t.outcome)));
    e.text += *value;
    i = close;
  }
  return e;
}

/// Class used for rendering: the prediction, unless it contradicts the
/// output's emptiness. An empty output is always NoAnswer; a non-empty one
/// predicted NoAnswer falls back to the likelier of Success and WrongAnswer.
inline std::pair<OutcomeClass, bool> effective_class(OutcomeClass predicted, const ml::Probabilities& p,
                                                     bool output_empty) {
  if (output_empty) return {OutcomeClass::NoAnswer, predicted != OutcomeClass::NoAnswer};
  if (predicted != OutcomeClass::NoAnswer) return {predicted, false};
  auto s = p[index_of(OutcomeClass::Success)], w = p[index_of(OutcomeClass::WrongAnswer)];
  return {s >= w ? OutcomeClass::Success : OutcomeClass::WrongAnswer, true};
}

/// Explanations for one stage. Success-class NED/RL outputs get one
/// explanation per linked item; everything else gets a single one.
inline std::vector<Explanation> explain(const TemplateRepository& repo, OutcomeClass cls, bool mismatch,
                                        const ComponentOutput& out, const Question& q,
                                        const PrefixTable& prefixes) {
  std::vector<Explanation> result;
  auto push = [&](const ComponentOutput& o) {
    auto e = render(select_template(repo, o.task, cls, o, q), o, prefixes);
    e.mismatch = mismatch;
    result.push_back(std::move(e));
  };
  if (cls == OutcomeClass::Success && out.task == Task::NED) {
    for (const auto& link : out.entities()) push(ComponentOutput::of_entities({link}));
  } else if (cls == OutcomeClass::Success && out.task == Task::RL) {
    for (const auto& link : out.relations()) push(ComponentOutput::of_relations({link}));
  } else {
    push(out);
  }
  return result;
}

}  // namespace xqa
