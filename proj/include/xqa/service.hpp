#pragma once

#include <fcntl.h>
#include <unistd.h>

#include <array>
#include <cerrno>
#include <chrono>
#include <cstring>
#include <ctime>
#include <fstream>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <httplib.h>
#include <json.hpp>

#include "xqa/pipeline.hpp"

namespace xqa {

// ---------------------------------------------------------------------------
// Survey feedback

enum class SurveyMode : std::uint8_t { WithExplanation, WithoutExplanation };
inline constexpr std::array<SurveyMode, 2> kSurveyModes = {SurveyMode::WithExplanation,
                                                           SurveyMode::WithoutExplanation};
inline constexpr std::array<std::string_view, 4> kDimensions = {"justification", "education", "involvement",
                                                                "acceptance"};

inline std::string_view to_string(SurveyMode m) {
  return m == SurveyMode::WithExplanation ? "with_explanation" : "without_explanation";
}

inline SurveyMode survey_mode_from_string(std::string_view s) {
  for (auto m : kSurveyModes)
    if (to_string(m) == s) return m;
  throw InvalidArgument("mode must be with_explanation or without_explanation");
}

struct FeedbackRecord {
  std::uint64_t id = 0;
  std::string timestamp;
  std::string session_id;
  std::string question_id;
  SurveyMode mode = SurveyMode::WithExplanation;
  std::array<int, 4> ratings{};  // in kDimensions order, each 1..5

  bool operator==(const FeedbackRecord&) const = default;
};

inline std::string utc_timestamp() {
  auto now = std::chrono::system_clock::now();
  std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

/// Validates a submitted record. `id` is ignored; a missing timestamp is
/// filled with the current UTC time.
inline FeedbackRecord feedback_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw InvalidArgument("feedback must be a JSON object");
  auto str = [&](const char* key, bool required) -> std::string {
    if (!j.contains(key)) {
      if (required) throw InvalidArgument(std::string("missing field '") + key + "'");
      return {};
    }
    if (!j[key].is_string()) throw InvalidArgument(std::string("field '") + key + "' must be a string");
    return j[key].get<std::string>();
  };
  FeedbackRecord r;
  r.session_id = str("session_id", true);
  r.question_id = str("question_id", true);
  r.mode = survey_mode_from_string(str("mode", true));
  r.timestamp = str("timestamp", false);
  if (r.timestamp.empty()) r.timestamp = utc_timestamp();
  if (!j.contains("ratings") || !j["ratings"].is_object()) throw InvalidArgument("missing 'ratings' object");
  const auto& ratings = j["ratings"];
  for (const auto& [key, _] : ratings.items())
    if (std::find(kDimensions.begin(), kDimensions.end(), key) == kDimensions.end())
      throw InvalidArgument("unknown rating dimension '" + key + "'");
  for (std::size_t d = 0; d < kDimensions.size(); ++d) {
    std::string key(kDimensions[d]);
    if (!ratings.contains(key)) throw InvalidArgument("missing rating for '" + key + "'");
    const auto& v = ratings[key];
    if (!v.is_number_integer()) throw InvalidArgument("rating for '" + key + "' must be an integer");
    auto x = v.get<long long>();
    if (x < 1 || x > 5) throw InvalidArgument("rating for '" + key + "' must lie in 1..5");
    r.ratings[d] = static_cast<int>(x);
  }
  return r;
}

inline nlohmann::json feedback_to_json(const FeedbackRecord& r) {
  nlohmann::json ratings = nlohmann::json::object();
  for (std::size_t d = 0; d < kDimensions.size(); ++d) ratings[std::string(kDimensions[d])] = r.ratings[d];
  return {{"id", r.id},
          {"timestamp", r.timestamp},
          {"session_id", r.session_id},
          {"question_id", r.question_id},
          {"mode", to_string(r.mode)},
          {"ratings", ratings}};
}

/// Append-only JSON-lines log. Each append is written, fsync'ed and only then
/// acknowledged; ids continue from the largest id already in the file.
class FeedbackLog {
 public:
  explicit FeedbackLog(std::string path) : path_(std::move(path)) {
    for (const auto& r : read_all()) next_id_ = std::max(next_id_, r.id + 1);
  }

  FeedbackLog(const FeedbackLog&) = delete;
  FeedbackLog& operator=(const FeedbackLog&) = delete;

  const std::string& path() const { return path_; }

  std::uint64_t append(FeedbackRecord r) {
    std::lock_guard lock(mu_);
    r.id = next_id_;
    std::string line = feedback_to_json(r).dump() + "\n";
    int fd = ::open(path_.c_str(), O_RDWR | O_APPEND | O_CREAT | O_CLOEXEC, 0644);
    if (fd < 0) throw Error("cannot open feedback log " + path_ + ": " + std::strerror(errno));
    // a torn previous write leaves no newline; start a fresh line so this record survives
    if (auto end = ::lseek(fd, 0, SEEK_END); end > 0) {
      char last = '\n';
      if (::pread(fd, &last, 1, end - 1) == 1 && last != '\n') line.insert(line.begin(), '\n');
    }
    std::size_t done = 0;
    while (done < line.size()) {
      auto n = ::write(fd, line.data() + done, line.size() - done);
      if (n < 0 && errno == EINTR) continue;
      if (n < 0) {
        int err = errno;
        ::close(fd);
        throw Error("cannot write feedback log " + path_ + ": " + std::strerror(err));
      }
      done += static_cast<std::size_t>(n);
    }
    int rc = ::fsync(fd);
    int err = errno;
    ::close(fd);
    if (rc != 0) throw Error("cannot sync feedback log " + path_ + ": " + std::strerror(err));
    return next_id_++;
  }

  /// Every complete record in the file. A trailing line without newline (an
  /// interrupted write) is ignored.
  std::vector<FeedbackRecord> read_all() const {
    std::vector<FeedbackRecord> out;
    std::ifstream in(path_, std::ios::binary);
    if (!in) return out;
    std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    std::size_t pos = 0;
    while (true) {
      auto nl = content.find('\n', pos);
      if (nl == std::string::npos) break;
      std::string_view line(content.data() + pos, nl - pos);
      pos = nl + 1;
      if (detail::trim(line).empty()) continue;
      auto j = nlohmann::json::parse(line, nullptr, false);
      if (j.is_discarded()) continue;
      auto r = feedback_from_json(j);
      r.id = j.value("id", std::uint64_t{0});
      out.push_back(std::move(r));
    }
    return out;
  }

 private:
  std::string path_;
  std::uint64_t next_id_ = 1;
  mutable std::mutex mu_;
};

struct DimensionSummary {
  std::array<std::size_t, 5> histogram{};  // ratings 1..5
  std::size_t count = 0;
  std::optional<double> mean;
};

/// [mode][dimension]
using SurveySummary = std::array<std::array<DimensionSummary, 4>, 2>;

inline SurveySummary summarize(const std::vector<FeedbackRecord>& records) {
  SurveySummary s{};
  std::array<std::array<long long, 4>, 2> sums{};
  for (const auto& r : records) {
    auto m = static_cast<std::size_t>(r.mode);
    for (std::size_t d = 0; d < kDimensions.size(); ++d) {
      ++s[m][d].histogram[static_cast<std::size_t>(r.ratings[d] - 1)];
      ++s[m][d].count;
      sums[m][d] += r.ratings[d];
    }
  }
  for (std::size_t m = 0; m < 2; ++m)
    for (std::size_t d = 0; d < 4; ++d)
      if (s[m][d].count)
        s[m][d].mean = static_cast<double>(sums[m][d]) / static_cast<double>(s[m][d].count);
  return s;
}

inline nlohmann::json summary_to_json(const SurveySummary& s) {
  nlohmann::json modes = nlohmann::json::object();
  for (auto mode : kSurveyModes) {
    nlohmann::json dims = nlohmann::json::object();
    for (std::size_t d = 0; d < kDimensions.size(); ++d) {
      const auto& ds = s[static_cast<std::size_t>(mode)][d];
      dims[std::string(kDimensions[d])] = {{"histogram", ds.histogram},
                                           {"count", ds.count},
                                           {"mean", ds.mean ? nlohmann::json(*ds.mean) : nlohmann::json(nullptr)}};
    }
    modes[std::string(to_string(mode))] = std::move(dims);
  }
  return {{"scale", {1, 2, 3, 4, 5}}, {"dimensions", kDimensions}, {"modes", modes}};
}

// ---------------------------------------------------------------------------
// HTTP API

inline constexpr std::size_t kMaxQuestionLength = 1000;

struct ApiResponse {
  int status = 200;
  nlohmann::json body;
};

inline ApiResponse api_error(int status, const std::string& message) { return {status, {{"error", message}}}; }

inline nlohmann::json templates_to_json(const TemplateRepository& repo) {
  nlohmann::json list = nlohmann::json::array();
  for (const auto& t : repo.templates())
    list.push_back({{"id", t.id},
                    {"task", to_string(t.task)},
                    {"class", to_string(t.outcome)},
                    {"arity", t.arity ? nlohmann::json(*t.arity) : nlohmann::json("*")},
                    {"variant", t.variant ? nlohmann::json(to_string(*t.variant)) : nlohmann::json(nullptr)},
                    {"text", t.pattern}});
  return {{"count", repo.size()}, {"templates", list}};
}

class Service {
 public:
  Service(std::shared_ptr<const PipelineConfig> config, std::shared_ptr<FeedbackLog> log,
          nlohmann::json survey_questions = nlohmann::json::array())
      : config_(std::move(config)), log_(std::move(log)), questions_(std::move(survey_questions)) {
    if (!questions_.is_array()) throw InvalidArgument("survey questions must be a JSON array");
  }

  void set_config(std::shared_ptr<const PipelineConfig> config) {
    std::lock_guard lock(config_mu_);
    config_ = std::move(config);
  }

  std::shared_ptr<const PipelineConfig> config() const {
    std::lock_guard lock(config_mu_);
    return config_;
  }

  ApiResponse ask(const std::string& body) const {
    auto j = nlohmann::json::parse(body, nullptr, false);
    if (j.is_discarded() || !j.is_object()) return api_error(400, "request body must be a JSON object");
    if (!j.contains("question") || !j["question"].is_string()) return api_error(400, "missing 'question' string");
    auto question = j["question"].get<std::string>();
    bool explain = true;
    if (j.contains("explain")) {
      if (!j["explain"].is_boolean()) return api_error(400, "'explain' must be a boolean");
      explain = j["explain"].get<bool>();
    }
    if (detail::trim(question).empty()) return api_error(400, "question is empty");
    if (question.size() > kMaxQuestionLength)
      return api_error(400, "question exceeds " + std::to_string(kMaxQuestionLength) + " characters");
    auto cfg = config();
    if (!cfg) return api_error(503, "no pipeline configuration loaded");
    auto trace = answer_question(question, *cfg);
    auto doc = trace_to_json(trace, cfg->prefixes, {explain, true});
    doc["explain"] = explain;
    return {200, std::move(doc)};
  }

  ApiResponse feedback(const std::string& body) const {
    if (!log_) return api_error(503, "no feedback log configured");
    auto j = nlohmann::json::parse(body, nullptr, false);
    if (j.is_discarded()) return api_error(400, "request body must be JSON");
    FeedbackRecord r;
    try {
      r = feedback_from_json(j);
    } catch (const InvalidArgument& e) {
      return api_error(400, e.what());
    }
    auto id = log_->append(r);
    return {200, {{"id", id}}};
  }

  ApiResponse summary() const {
    return {200, summary_to_json(summarize(log_ ? log_->read_all() : std::vector<FeedbackRecord>{}))};
  }

  ApiResponse templates() const {
    auto cfg = config();
    if (!cfg) return api_error(503, "no pipeline configuration loaded");
    return {200, templates_to_json(cfg->templates)};
  }

  ApiResponse questions() const { return {200, {{"count", questions_.size()}, {"questions", questions_}}}; }

  /// Registers the API routes, plus static files from `static_dir` at "/".
  void attach(httplib::Server& server, const std::string& static_dir = {}) const {
    auto send = [](httplib::Response& res, const ApiResponse& r) {
      res.status = r.status;
      res.set_content(r.body.dump(), "application/json");
    };
    auto guarded = [send](auto fn) {
      return [send, fn](const httplib::Request& req, httplib::Response& res) {
        try {
          send(res, fn(req));
        } catch (const std::exception& e) {
          send(res, api_error(500, e.what()));
        }
      };
    };
    server.Post("/api/ask", guarded([this](const httplib::Request& req) { return ask(req.body); }));
    server.Post("/api/feedback", guarded([this](const httplib::Request& req) { return feedback(req.body); }));
    server.Get("/api/survey/summary", guarded([this](const httplib::Request&) { return summary(); }));
    server.Get("/api/templates", guarded([this](const httplib::Request&) { return templates(); }));
    server.Get("/api/questions", guarded([this](const httplib::Request&) { return questions(); }));
    if (!static_dir.empty()) server.set_mount_point("/", static_dir);
  }

 private:
  std::shared_ptr<const PipelineConfig> config_;
  mutable std::mutex config_mu_;
  std::shared_ptr<FeedbackLog> log_;
  nlohmann::json questions_;
};

}  // namespace xqa
