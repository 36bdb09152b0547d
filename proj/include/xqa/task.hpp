#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>

#include "xqa/error.hpp"

namespace xqa {

enum class Task : std::uint8_t { NED, RL, QB };
inline constexpr std::array<Task, 3> kTasks = {Task::NED, Task::RL, Task::QB};

inline std::string_view to_string(Task t) {
  switch (t) {
    case Task::NED: return "NED";
    case Task::RL: return "RL";
    case Task::QB: return "QB";
  }
  return "?";
}

inline Task task_from_string(std::string_view s) {
  std::string w(s);
  for (auto& c : w) c = static_cast<char>(c >= 'A' && c <= 'Z' ? c - 'A' + 'a' : c);
  if (w == "ned" || w == "el") return Task::NED;
  if (w == "rl") return Task::RL;
  if (w == "qb") return Task::QB;
  throw InvalidArgument("unknown task '" + std::string(s) + "'");
}

/// Human readable stage name used in explanations.
inline std::string_view stage_name(Task t) {
  switch (t) {
    case Task::NED: return "Entity Linking";
    case Task::RL: return "Relation Linking";
    case Task::QB: return "Query Building";
  }
  return "?";
}

}  // namespace xqa
