#pragma once

// Question tokenization, rule-based POS tagging and the binary question
// feature vector shared by every outcome classifier.

#include <algorithm>
#include <array>
#include <cctype>
#include <cstdint>
#include <iterator>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "xqa/error.hpp"

namespace xqa {

enum class PosTag : std::uint8_t {
  Noun, Propn, Verb, Adj, Adv, Pron, Det, Adp, Num, Aux, Wh, Punct, Other
};
inline constexpr std::size_t kPosTagCount = 13;

inline constexpr std::array<std::string_view, kPosTagCount> kPosTagNames = {
    "NOUN", "PROPN", "VERB", "ADJ", "ADV", "PRON", "DET", "ADP", "NUM", "AUX", "WH", "PUNCT", "OTHER"};

inline std::string_view to_string(PosTag t) { return kPosTagNames[static_cast<std::size_t>(t)]; }

inline std::optional<PosTag> pos_tag_from_string(std::string_view s) {
  for (std::size_t i = 0; i < kPosTagCount; ++i)
    if (kPosTagNames[i] == s) return static_cast<PosTag>(i);
  return std::nullopt;
}

enum class Headword : std::uint8_t { Who, What, Which, When, Where, How, BooleanAux, Other };
inline constexpr std::array<std::string_view, 8> kHeadwordNames = {
    "who", "what", "which", "when", "where", "how", "boolean-aux", "other"};
inline std::string_view to_string(Headword h) { return kHeadwordNames[static_cast<std::size_t>(h)]; }

enum class AnswerType : std::uint8_t { Boolean, Number, List, Other };
inline constexpr std::array<std::string_view, 4> kAnswerTypeNames = {"boolean", "number", "list", "other"};
inline std::string_view to_string(AnswerType a) { return kAnswerTypeNames[static_cast<std::size_t>(a)]; }

namespace detail {

inline std::string lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out)
    if (static_cast<unsigned char>(c) < 0x80) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

inline bool is_punct_char(char c) {
  auto u = static_cast<unsigned char>(c);
  return u < 0x80 && std::ispunct(u);
}

inline bool all_punct(std::string_view s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), is_punct_char);
}

template <typename List>
bool in_list(std::string_view word, const List& list) {
  return std::find(std::begin(list), std::end(list), word) != std::end(list);
}

inline constexpr std::string_view kWhWords[] = {
    "who", "whom", "whose", "what", "which", "when", "where", "why", "how"};
inline constexpr std::string_view kAuxiliaries[] = {
    "is", "are", "was", "were", "be", "been", "being", "am", "do", "does", "did", "has",
    "have", "had", "can", "could", "will", "would", "shall", "should", "may", "might", "must"};
inline constexpr std::string_view kBooleanAux[] = {
    "is", "are", "was", "were", "am", "do", "does", "did", "has", "have", "had", "can",
    "could", "will", "would"};
inline constexpr std::string_view kDeterminers[] = {
    "a", "an", "the", "this", "that", "these", "those", "all", "every", "each", "some",
    "any", "no", "another"};
inline constexpr std::string_view kAdpositions[] = {
    "in", "on", "at", "of", "by", "for", "with", "from", "to", "into", "about", "as",
    "under", "over", "through", "during", "after", "before", "between", "without",
    "within", "near", "since", "than", "across", "along", "via"};
inline constexpr std::string_view kPronouns[] = {
    "i", "you", "he", "she", "it", "we", "they", "me", "him", "her", "us", "them",
    "his", "its", "their", "our", "my", "your", "itself"};
// Common verbs in knowledge-graph questions that no suffix rule catches.
inline constexpr std::string_view kVerbs[] = {
    "win", "won", "wins", "play", "plays", "write", "wrote", "written", "direct",
    "found", "flow", "flows", "live", "lives", "die", "died", "marry", "born",
    "speak", "spoke", "spoken", "study", "studied", "receive", "received", "lead",
    "led", "make", "made", "give", "gave", "run", "runs", "build", "built", "own",
    "owns", "use", "uses", "belong", "belongs", "invent", "invented", "discover"};
inline constexpr std::string_view kAdjectives[] = {
    "many", "much", "big", "large", "small", "old", "new", "official", "high", "long",
    "famous", "total"};
inline constexpr std::string_view kImperatives[] = {"list", "give", "show", "name", "enumerate"};

inline bool ends_with(std::string_view s, std::string_view suffix) {
  return s.size() > suffix.size() && s.substr(s.size() - suffix.size()) == suffix;
}

inline bool is_number_token(std::string_view s) {
  if (s.empty() || !std::isdigit(static_cast<unsigned char>(s.front()))) return false;
  return std::all_of(s.begin(), s.end(), [](char c) {
    return std::isdigit(static_cast<unsigned char>(c)) || c == '.' || c == ',';
  });
}

}  // namespace detail

/// Splits on whitespace and detaches trailing punctuation, one token per
/// character. Casing is preserved.
inline std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    std::size_t start = i;
    while (i < text.size() && !std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    if (start == i) break;
    std::string_view word = text.substr(start, i - start);
    std::size_t core = word.size();
    while (core > 0 && detail::is_punct_char(word[core - 1])) --core;
    if (core == 0) core = 1;  // an all-punctuation word splits into characters
    tokens.emplace_back(word.substr(0, core));
    for (std::size_t k = core; k < word.size(); ++k) tokens.emplace_back(1, word[k]);
  }
  return tokens;
}

/// Lexicon-first deterministic tagger.
inline std::vector<PosTag> pos_tag(const std::vector<std::string>& tokens) {
  using namespace detail;
  std::vector<PosTag> tags;
  tags.reserve(tokens.size());
  bool seen_aux = false;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    const std::string& tok = tokens[i];
    std::string w = lower(tok);
    PosTag tag;
    if (all_punct(tok)) {
      tag = PosTag::Punct;
    } else if (in_list(w, kWhWords)) {
      tag = PosTag::Wh;
    } else if (in_list(w, kAuxiliaries)) {
      tag = PosTag::Aux;
    } else if (in_list(w, kDeterminers)) {
      tag = PosTag::Det;
    } else if (in_list(w, kAdpositions)) {
      tag = PosTag::Adp;
    } else if (in_list(w, kPronouns)) {
      tag = PosTag::Pron;
    } else if (is_number_token(tok)) {
      tag = PosTag::Num;
    } else if (w == "and" || w == "or" || w == "but" || w == "not") {
      tag = PosTag::Other;
    } else if (i > 0 && std::isupper(static_cast<unsigned char>(tok.front()))) {
      tag = PosTag::Propn;
    } else if (in_list(w, kVerbs) || (i == 0 && in_list(w, kImperatives))) {
      tag = PosTag::Verb;
    } else if (in_list(w, kAdjectives) || ends_with(w, "est") || ends_with(w, "ous") ||
               ends_with(w, "ful")) {
      tag = PosTag::Adj;
    } else if (ends_with(w, "ly")) {
      tag = PosTag::Adv;
    } else if (seen_aux && (ends_with(w, "ing") || ends_with(w, "ed"))) {
      tag = PosTag::Verb;
    } else {
      tag = PosTag::Noun;
    }
    seen_aux = seen_aux || tag == PosTag::Aux;
    tags.push_back(tag);
  }
  return tags;
}

/// A question with its deterministic token and tag sequences (q* = q).
struct Question {
  std::string id;
  std::string text;
  std::vector<std::string> tokens;
  std::vector<PosTag> tags;

  Question() = default;
  Question(std::string qid, std::string qtext) : id(std::move(qid)), text(std::move(qtext)) {
    if (text.find_first_not_of(" \t\r\n") == std::string::npos)
      throw InvalidArgument("question text must not be empty");
    tokens = tokenize(text);
    tags = pos_tag(tokens);
  }
};

/// Stable identifier derived from the text (FNV-1a, 64 bit).
inline std::string question_id_for(std::string_view text) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  static constexpr char hex[] = "0123456789abcdef";
  std::string out = "q-";
  for (int shift = 60; shift >= 0; shift -= 4) out += hex[(h >> shift) & 0xF];
  return out;
}

inline Question make_question(std::string text) {
  auto id = question_id_for(text);
  return Question(std::move(id), std::move(text));
}

inline Headword headword(const Question& q) {
  if (q.tokens.empty()) return Headword::Other;
  auto w = detail::lower(q.tokens.front());
  if (w == "who" || w == "whom" || w == "whose") return Headword::Who;
  if (w == "what") return Headword::What;
  if (w == "which") return Headword::Which;
  if (w == "when") return Headword::When;
  if (w == "where") return Headword::Where;
  if (w == "how") return Headword::How;
  if (detail::in_list(w, detail::kBooleanAux)) return Headword::BooleanAux;
  return Headword::Other;
}

/// Precedence boolean > number > list > other.
inline AnswerType answer_type(const Question& q) {
  auto head = headword(q);
  if (head == Headword::BooleanAux) return AnswerType::Boolean;
  auto word = [&](std::size_t i) { return i < q.tokens.size() ? detail::lower(q.tokens[i]) : std::string(); };
  if (head == Headword::How && (word(1) == "many" || word(1) == "much")) return AnswerType::Number;
  if (word(0) == "count") return AnswerType::Number;
  for (std::size_t i = 0; i + 1 < q.tokens.size(); ++i)
    if (word(i) == "total" && word(i + 1) == "number") return AnswerType::Number;
  if (detail::in_list(word(0), detail::kImperatives)) return AnswerType::List;
  if (head == Headword::Which || head == Headword::What) {
    // plural head noun right after the wh-word: "Which rivers ..."
    if (q.tokens.size() > 1 && q.tags[1] == PosTag::Noun) {
      auto n = word(1);
      if (n.size() > 3 && n.back() == 's' && !detail::ends_with(n, "ss") &&
          !detail::ends_with(n, "us") && !detail::ends_with(n, "is"))
        return AnswerType::List;
    }
  }
  return AnswerType::Other;
}

// ---------------------------------------------------------------------------
// Features

/// Ordered feature names plus a version tag. Models store the schema they were
/// trained with; predicting under another schema is an error.
struct FeatureSchema {
  std::string version;
  std::vector<std::string> names;

  std::size_t size() const { return names.size(); }
  bool operator==(const FeatureSchema&) const = default;
};

inline const FeatureSchema& question_feature_schema() {
  static const FeatureSchema schema = [] {
    FeatureSchema s{"xqa-question-features-1", {"length<=5", "length=6-8", "length>=9"}};
    for (auto h : kHeadwordNames) s.names.push_back("headword=" + std::string(h));
    for (auto a : kAnswerTypeNames) s.names.push_back("answer-type=" + std::string(a));
    for (auto p : kPosTagNames) s.names.push_back("pos=" + std::string(p));
    return s;
  }();
  return schema;
}

struct FeatureVector {
  FeatureSchema schema;
  std::vector<std::uint8_t> values;

  bool operator==(const FeatureVector&) const = default;
};

inline FeatureVector extract_features(const Question& q) {
  const auto& schema = question_feature_schema();
  FeatureVector fv{schema, std::vector<std::uint8_t>(schema.size(), 0)};
  std::size_t words = static_cast<std::size_t>(
      std::count_if(q.tags.begin(), q.tags.end(), [](PosTag t) { return t != PosTag::Punct; }));
  std::size_t off = 0;
  fv.values[off + (words <= 5 ? 0 : words <= 8 ? 1 : 2)] = 1;
  off += 3;
  fv.values[off + static_cast<std::size_t>(headword(q))] = 1;
  off += kHeadwordNames.size();
  fv.values[off + static_cast<std::size_t>(answer_type(q))] = 1;
  off += kAnswerTypeNames.size();
  for (auto t : q.tags) fv.values[off + static_cast<std::size_t>(t)] = 1;
  return fv;
}

}  // namespace xqa
