#pragma once

#include <array>
#include <chrono>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "xqa/components.hpp"
#include "xqa/explanation.hpp"
#include "xqa/ml/model.hpp"

namespace xqa {

/// Trained models, one per task, indexed in pipeline order.
struct ModelSet {
  std::array<ml::ClassifierModel, 3> models;

  const ml::ClassifierModel& at(Task t) const { return models[static_cast<std::size_t>(t)]; }
  ml::ClassifierModel& at(Task t) { return models[static_cast<std::size_t>(t)]; }
};

inline std::string model_file_name(Task t) {
  std::string name(to_string(t));
  for (auto& c : name) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return name + ".json";
}

/// Reads ned.json, rl.json and qb.json from `dir`.
inline ModelSet load_models(const std::filesystem::path& dir) {
  ModelSet set;
  for (auto t : kTasks) {
    auto path = dir / model_file_name(t);
    set.at(t) = ml::parse_model(read_file(path.string()));
    if (set.at(t).task != t) throw SchemaMismatch(path.string() + " holds a model for another task");
  }
  return set;
}

inline void save_models(const ModelSet& set, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  for (auto t : kTasks) write_file((dir / model_file_name(t)).string(), ml::serialize_model(set.at(t)));
}

struct PipelineConfig {
  std::shared_ptr<const Store> store;
  ComponentSet components;
  ModelSet models;
  TemplateRepository templates;
  PrefixTable prefixes = PrefixTable::defaults();

  PipelineConfig(std::shared_ptr<const Store> s, ModelSet m, TemplateRepository t,
                 PrefixTable p = PrefixTable::defaults())
      : store(std::move(s)), models(std::move(m)), templates(std::move(t)), prefixes(std::move(p)) {
    if (!store) throw InvalidArgument("pipeline needs a store");
    components = ComponentSet::defaults(*store);
    for (auto task : kTasks) {
      if (models.at(task).task != task) throw SchemaMismatch("model slot holds a model for another task");
      if (!(models.at(task).schema == question_feature_schema()))
        throw SchemaMismatch("model for " + std::string(to_string(task)) + " uses another feature schema");
    }
  }
};

struct StageRecord {
  Task task = Task::NED;
  std::string component;
  ComponentOutput output;
  ml::Prediction prediction;
  OutcomeClass effective = OutcomeClass::Success;
  bool mismatch = false;
  std::vector<Explanation> explanations;
  double wall_time_ms = 0;
};

struct PipelineTrace {
  Question question;
  FeatureVector features;
  std::vector<StageRecord> stages;  // NED, RL, QB
  std::optional<AnswerSet> final_answer;

  const StageRecord& stage(Task t) const { return stages.at(static_cast<std::size_t>(t)); }
};

inline PipelineTrace answer_question(std::string_view text, const PipelineConfig& config) {
  auto q = make_question(std::string(text));
  auto features = extract_features(q);
  auto type = answer_type(q);
  const Graph& graph = config.store->graph;
  PipelineTrace trace{q, features, {}, std::nullopt};
  trace.stages.reserve(3);

  for (auto task : kTasks) {
    const auto& component = config.components.at(task);
    auto start = std::chrono::steady_clock::now();
    StageInput in{trace.question, type};
    if (task != Task::NED) in.entities = &trace.stages[0].output;
    if (task == Task::QB) in.relations = &trace.stages[1].output;
    StageRecord rec{task, component.name(), component.run(in), {}, {}, false, {}, 0};
    if (task == Task::QB && rec.output.query()) rec.output.answers = evaluate(graph, *rec.output.query());
    rec.prediction = ml::predict(config.models.at(task), features);
    std::tie(rec.effective, rec.mismatch) =
        effective_class(rec.prediction.outcome, rec.prediction.probabilities, rec.output.empty());
    rec.explanations = explain(config.templates, rec.effective, rec.mismatch, rec.output, trace.question,
                               config.prefixes);
    rec.wall_time_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    trace.stages.push_back(std::move(rec));
  }
  trace.final_answer = trace.stages[2].output.answers;
  return trace;
}

inline std::vector<Explanation> explanation_flow(const PipelineTrace& trace) {
  std::vector<Explanation> flow;
  for (const auto& s : trace.stages) flow.insert(flow.end(), s.explanations.begin(), s.explanations.end());
  return flow;
}

/// Plain-text answer: "true"/"false", the compacted bindings, or "no answer".
inline std::string answer_text(const PipelineTrace& trace, const PrefixTable& prefixes) {
  if (!trace.final_answer || trace.final_answer->empty()) return "no answer";
  return render_answer(*trace.final_answer, prefixes);
}

// ---------------------------------------------------------------------------
// Trace document

inline nlohmann::json probabilities_json(const ml::Probabilities& p) {
  nlohmann::json j = nlohmann::json::object();
  for (auto c : kOutcomes) j[std::string(to_string(c))] = p[index_of(c)];
  return j;
}

inline nlohmann::json output_json(const ComponentOutput& out, const PrefixTable& prefixes) {
  auto span_json = [](const Span& s) { return nlohmann::json{{"text", s.text}, {"begin", s.begin}, {"end", s.end}}; };
  nlohmann::json j;
  switch (out.task) {
    case Task::NED:
      j["entities"] = nlohmann::json::array();
      for (const auto& e : out.entities())
        j["entities"].push_back(
            {{"span", span_json(e.span)}, {"iri", e.entity.value}, {"compact", compact_iri(e.entity, prefixes)}});
      break;
    case Task::RL:
      j["relations"] = nlohmann::json::array();
      for (const auto& r : out.relations())
        j["relations"].push_back({{"span", span_json(r.span)},
                                  {"iri", r.predicate.value},
                                  {"compact", compact_iri(r.predicate, prefixes)}});
      break;
    case Task::QB:
      j["query"] = out.query() ? nlohmann::json(to_sparql(*out.query(), &prefixes)) : nlohmann::json(nullptr);
      break;
  }
  j["empty"] = out.empty();
  j["arity"] = out.arity();
  return j;
}

inline nlohmann::json answer_json(const AnswerSet& a, const PrefixTable& prefixes) {
  nlohmann::json j;
  j["form"] = a.form == QueryForm::Ask ? "ASK" : "SELECT";
  if (a.form == QueryForm::Ask) {
    j["boolean"] = a.boolean;
  } else {
    j["variables"] = a.variables;
    j["rows"] = nlohmann::json::array();
    for (const auto& row : a.rows) {
      nlohmann::json r = nlohmann::json::array();
      for (const auto& t : row) r.push_back(compact_term(t, prefixes));
      j["rows"].push_back(std::move(r));
    }
  }
  j["text"] = a.empty() ? "no answer" : render_answer(a, prefixes);
  return j;
}

inline nlohmann::json explanation_json(const Explanation& e) {
  return {{"task", to_string(e.task)},
          {"class", to_string(e.outcome)},
          {"template_id", e.template_id},
          {"text", e.text},
          {"mismatch", e.mismatch}};
}

struct TraceJsonOptions {
  bool explanations = true;  // false: answer-only view
  bool timings = true;
};

inline nlohmann::json trace_to_json(const PipelineTrace& t, const PrefixTable& prefixes,
                                    const TraceJsonOptions& opts = {}) {
  nlohmann::json tags = nlohmann::json::array();
  for (auto tag : t.question.tags) tags.push_back(to_string(tag));
  nlohmann::json active = nlohmann::json::array();
  for (std::size_t i = 0; i < t.features.values.size(); ++i)
    if (t.features.values[i]) active.push_back(t.features.schema.names[i]);

  nlohmann::json j;
  j["question"] = {{"id", t.question.id},
                   {"text", t.question.text},
                   {"tokens", t.question.tokens},
                   {"pos_tags", tags},
                   {"headword", to_string(headword(t.question))},
                   {"answer_type", to_string(answer_type(t.question))}};
  j["features"] = {{"schema", t.features.schema.version}, {"values", t.features.values}, {"active", active}};
  j["stages"] = nlohmann::json::array();
  for (const auto& s : t.stages) {
    nlohmann::json st{{"task", to_string(s.task)},
                      {"stage", stage_name(s.task)},
                      {"component", s.component},
                      {"output", output_json(s.output, prefixes)},
                      {"predicted_class", to_string(s.prediction.outcome)},
                      {"probabilities", probabilities_json(s.prediction.probabilities)},
                      {"effective_class", to_string(s.effective)},
                      {"mismatch", s.mismatch}};
    if (opts.explanations) {
      st["explanations"] = nlohmann::json::array();
      for (const auto& e : s.explanations) st["explanations"].push_back(explanation_json(e));
    }
    if (opts.timings) st["wall_time_ms"] = s.wall_time_ms;
    j["stages"].push_back(std::move(st));
  }
  j["final_answer"] = t.final_answer ? answer_json(*t.final_answer, prefixes) : nlohmann::json(nullptr);
  j["answer_text"] = answer_text(t, prefixes);
  return j;
}

}  // namespace xqa
