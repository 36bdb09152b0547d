#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <string_view>

#include "xqa/error.hpp"

namespace xqa {

/// Outcome of a component (or the whole pipeline) for one question. The
/// enumerator order doubles as the argmax tie-break order.
enum class OutcomeClass : std::uint8_t { Success, NoAnswer, WrongAnswer };
inline constexpr std::size_t kOutcomeCount = 3;
inline constexpr std::array<OutcomeClass, kOutcomeCount> kOutcomes = {
    OutcomeClass::Success, OutcomeClass::NoAnswer, OutcomeClass::WrongAnswer};

inline std::string_view to_string(OutcomeClass c) {
  switch (c) {
    case OutcomeClass::Success: return "Success";
    case OutcomeClass::NoAnswer: return "NoAnswer";
    case OutcomeClass::WrongAnswer: return "WrongAnswer";
  }
  return "?";
}

inline OutcomeClass outcome_from_string(std::string_view s) {
  for (auto c : kOutcomes)
    if (to_string(c) == s) return c;
  throw InvalidArgument("unknown outcome class '" + std::string(s) + "'");
}

inline std::size_t index_of(OutcomeClass c) { return static_cast<std::size_t>(c); }

struct PRF {
  double precision = 0;
  double recall = 0;
  double f = 0;

  bool operator==(const PRF&) const = default;
};

/// Per-question set precision/recall/F. Gold must be non-empty.
template <typename T>
PRF micro_f1(const std::set<T>& predicted, const std::set<T>& gold) {
  if (gold.empty()) throw InvalidArgument("micro_f1 needs a non-empty gold set");
  std::size_t hits = 0;
  for (const auto& p : predicted) hits += gold.count(p);
  PRF r;
  r.precision = predicted.empty() ? 0.0 : static_cast<double>(hits) / static_cast<double>(predicted.size());
  r.recall = static_cast<double>(hits) / static_cast<double>(gold.size());
  r.f = r.precision + r.recall == 0.0 ? 0.0 : 2 * r.precision * r.recall / (r.precision + r.recall);
  return r;
}

/// NoAnswer iff the output is empty; otherwise Success iff F is exactly 1.
inline OutcomeClass label_example(bool output_empty, double f) {
  if (!(f >= 0.0 && f <= 1.0)) throw InvalidArgument("F-score must lie in [0, 1]");
  if (output_empty) return OutcomeClass::NoAnswer;
  return f == 1.0 ? OutcomeClass::Success : OutcomeClass::WrongAnswer;
}

/// Same rule with the gold annotation made explicit: a question without gold
/// cannot be labelled.
inline OutcomeClass label_example(bool output_empty, const std::optional<std::set<std::string>>& gold,
                                  double f) {
  if (!gold) throw DatasetError("no gold annotation for this question and task");
  return label_example(output_empty, f);
}

}  // namespace xqa
