#pragma once

#include <cstdio>
#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "xqa/components.hpp"
#include "xqa/ml/cross_validation.hpp"
#include "xqa/pipeline.hpp"

namespace xqa {

struct DatasetRecord {
  std::string id;
  std::string question;
  std::string sparql;
  Query query;
  std::set<std::string> gold_entities;    // IRIs in subject/object position
  std::set<std::string> gold_predicates;  // IRIs in predicate position
  AnswerSet gold_answers;
};

struct DroppedRecord {
  std::string id;
  std::string reason;
};

struct Dataset {
  std::vector<DatasetRecord> records;
  std::size_t total = 0;
  std::size_t dropped_empty = 0;
  std::size_t dropped_unsupported = 0;
  std::vector<DroppedRecord> dropped;
};

inline void collect_gold_iris(const Query& q, std::set<std::string>& entities, std::set<std::string>& predicates) {
  for (const auto& p : q.patterns) {
    if (auto* s = std::get_if<Iri>(&p.subject)) entities.insert(s->value);
    if (auto* pr = std::get_if<Iri>(&p.predicate)) predicates.insert(pr->value);
    if (auto* o = std::get_if<Iri>(&p.object)) entities.insert(o->value);
  }
}

/// Parses a JSON array of {id, question, sparql} and computes gold answers on
/// `graph`. Records whose gold query falls outside the supported subset, or
/// names no entity or predicate, are dropped as unsupported; records whose
/// gold answer set is empty are dropped as empty.
inline Dataset parse_dataset(std::string_view text, const Graph& graph) {
  Dataset ds;
  if (detail::trim(text).empty()) return ds;
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw DatasetError(std::string("dataset is not valid JSON: ") + e.what());
  }
  if (!j.is_array()) throw DatasetError("dataset must be a JSON array");
  std::set<std::string> seen;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const auto& r = j[i];
    auto field = [&](const char* key) {
      if (!r.is_object() || !r.contains(key) || !r[key].is_string())
        throw DatasetError("record " + std::to_string(i) + " lacks string field '" + key + "'");
      return r[key].get<std::string>();
    };
    DatasetRecord rec{field("id"), field("question"), field("sparql"), {}, {}, {}, {}};
    if (!seen.insert(rec.id).second) throw DatasetError("duplicate record id '" + rec.id + "'");
    ++ds.total;
    try {
      rec.query = parse_sparql(rec.sparql);
    } catch (const Error& e) {
      ++ds.dropped_unsupported;
      ds.dropped.push_back({rec.id, std::string("unsupported: ") + e.what()});
      continue;
    }
    collect_gold_iris(rec.query, rec.gold_entities, rec.gold_predicates);
    if (rec.gold_entities.empty() || rec.gold_predicates.empty()) {
      ++ds.dropped_unsupported;
      ds.dropped.push_back({rec.id, "unsupported: gold query names no entity or no predicate"});
      continue;
    }
    rec.gold_answers = evaluate(graph, rec.query);
    if (rec.gold_answers.empty()) {
      ++ds.dropped_empty;
      ds.dropped.push_back({rec.id, "empty gold answer"});
      continue;
    }
    ds.records.push_back(std::move(rec));
  }
  return ds;
}

inline Dataset load_dataset(const std::string& path, const Graph& graph) {
  std::string text;
  try {
    text = read_file(path);
  } catch (const Error& e) {
    throw DatasetError(e.what());
  }
  return parse_dataset(text, graph);
}

inline std::set<std::string> gold_keys(const DatasetRecord& r, Task t) {
  switch (t) {
    case Task::NED: return r.gold_entities;
    case Task::RL: return r.gold_predicates;
    case Task::QB: return r.gold_answers.keys();
  }
  return {};
}

/// Component outputs for every record, in record order.
inline std::vector<StageOutputs> run_components(const std::vector<DatasetRecord>& records,
                                                const ComponentSet& components, const Graph& graph) {
  std::vector<StageOutputs> out;
  out.reserve(records.size());
  for (const auto& r : records) out.push_back(run_stages(make_question(r.question), components, graph));
  return out;
}

struct ComponentEvaluation {
  Task task = Task::NED;
  std::vector<PRF> per_question;
  PRF macro;
};

inline ComponentEvaluation evaluate_component(const std::vector<DatasetRecord>& records,
                                              const std::vector<StageOutputs>& outputs, Task task) {
  ComponentEvaluation ev{task, {}, {}};
  for (std::size_t i = 0; i < records.size(); ++i) {
    auto prf = micro_f1(outputs[i].at(task).item_keys(), gold_keys(records[i], task));
    ev.per_question.push_back(prf);
    ev.macro.precision += prf.precision;
    ev.macro.recall += prf.recall;
    ev.macro.f += prf.f;
  }
  if (!records.empty()) {
    auto n = static_cast<double>(records.size());
    ev.macro = {ev.macro.precision / n, ev.macro.recall / n, ev.macro.f / n};
  }
  return ev;
}

struct TrainingExample {
  std::string question_id;
  FeatureVector features;
  OutcomeClass label = OutcomeClass::Success;
  double f_score = 0;
};

inline std::vector<TrainingExample> build_training_set(const std::vector<DatasetRecord>& records,
                                                       const std::vector<StageOutputs>& outputs, Task task) {
  std::vector<TrainingExample> out;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& o = outputs[i].at(task);
    auto f = micro_f1(o.item_keys(), gold_keys(records[i], task)).f;
    auto q = make_question(records[i].question);
    out.push_back({records[i].id, extract_features(q), label_example(o.empty(), gold_keys(records[i], task), f), f});
  }
  return out;
}

inline ml::LabeledData to_labeled_data(const std::vector<TrainingExample>& examples) {
  ml::LabeledData d(question_feature_schema().size());
  for (const auto& e : examples) {
    if (!(e.features.schema == question_feature_schema()))
      throw SchemaMismatch("training example '" + e.question_id + "' uses another feature schema");
    d.add(ml::to_doubles(e.features), e.label);
  }
  return d;
}

// ---------------------------------------------------------------------------
// Report

struct ReportOptions {
  std::vector<ml::ClassifierKind> kinds{ml::kClassifierKinds.begin(), ml::kClassifierKinds.end()};
  std::size_t folds = 10;
  std::uint64_t seed = 42;
  ml::Hyperparameters base;
};

struct TaskReport {
  Task task = Task::NED;
  std::string component;
  ComponentEvaluation evaluation;
  std::array<std::size_t, kOutcomeCount> label_counts{};
  double majority_baseline = 0;
  std::vector<ml::CVReport> cells;  // one per kind, in option order
  std::vector<double> training_accuracy;
  std::size_t best = 0;  // index into cells
  ml::ClassifierModel best_model;
};

struct PipelineSummary {
  std::size_t questions = 0;
  std::size_t explanations = 0;
  std::size_t min_explanations_per_stage = 0;
  std::size_t unresolved_placeholders = 0;
  std::size_t mismatches = 0;
};

struct EvaluationReport {
  std::size_t total = 0;
  std::size_t retained = 0;
  std::size_t dropped_empty = 0;
  std::size_t dropped_unsupported = 0;
  std::size_t folds = 10;
  std::uint64_t seed = 42;
  std::vector<TaskReport> tasks;  // NED, RL, QB
  std::optional<PipelineSummary> pipeline;

  ModelSet best_models() const {
    ModelSet m;
    for (const auto& t : tasks) m.at(t.task) = t.best_model;
    return m;
  }
};

inline double training_accuracy(const ml::ClassifierModel& m, const ml::LabeledData& data) {
  std::size_t hit = 0;
  for (std::size_t i = 0; i < data.rows(); ++i)
    hit += ml::argmax(ml::class_probabilities(m.kind, m.params, data.row(i))) == data.y[i];
  return data.rows() ? static_cast<double>(hit) / static_cast<double>(data.rows()) : 0.0;
}

/// Runs every requested kind through CV for every component, keeps the kind
/// with the best mean accuracy per component (earlier kind on ties), and
/// summarises a pipeline pass when templates are given.
inline EvaluationReport build_report(const Dataset& ds, const std::shared_ptr<const Store>& store,
                                     const ReportOptions& opts, const TemplateRepository* templates = nullptr) {
  if (opts.kinds.empty()) throw InvalidArgument("no classifier kinds requested");
  EvaluationReport rep{ds.total, ds.records.size(), ds.dropped_empty, ds.dropped_unsupported,
                       opts.folds, opts.seed, {}, std::nullopt};
  auto components = ComponentSet::defaults(*store);
  auto outputs = run_components(ds.records, components, store->graph);
  for (auto task : kTasks) {
    TaskReport tr;
    tr.task = task;
    tr.component = components.at(task).name();
    tr.evaluation = evaluate_component(ds.records, outputs, task);
    auto data = to_labeled_data(build_training_set(ds.records, outputs, task));
    tr.label_counts = data.class_counts();
    tr.majority_baseline = data.rows() ? static_cast<double>(*std::max_element(tr.label_counts.begin(),
                                                                               tr.label_counts.end())) /
                                             static_cast<double>(data.rows())
                                       : 0.0;
    std::optional<ml::ClassifierModel> best;
    for (std::size_t k = 0; k < opts.kinds.size(); ++k) {
      auto kind = opts.kinds[k];
      auto cv = ml::cross_validate(kind, data, opts.folds, ml::default_grid(kind, opts.base), opts.seed);
      auto model = ml::fit_model(kind, task, question_feature_schema(), data, cv.chosen);
      tr.training_accuracy.push_back(training_accuracy(model, data));
      if (!best || cv.mean_accuracy > tr.cells[tr.best].mean_accuracy) {
        tr.best = k;
        best = std::move(model);
      }
      tr.cells.push_back(std::move(cv));
    }
    tr.best_model = std::move(*best);
    rep.tasks.push_back(std::move(tr));
  }
  if (templates) {
    PipelineConfig config(store, rep.best_models(), *templates);
    PipelineSummary ps;
    ps.min_explanations_per_stage = SIZE_MAX;
    for (const auto& r : ds.records) {
      auto trace = answer_question(r.question, config);
      ++ps.questions;
      for (const auto& s : trace.stages) {
        ps.min_explanations_per_stage = std::min(ps.min_explanations_per_stage, s.explanations.size());
        ps.mismatches += s.mismatch;
        for (const auto& e : s.explanations) {
          ++ps.explanations;
          ps.unresolved_placeholders += has_unresolved_placeholder(e.text);
        }
      }
    }
    if (ps.questions == 0) ps.min_explanations_per_stage = 0;
    rep.pipeline = ps;
  }
  return rep;
}

inline std::string describe_hyperparameters(ml::ClassifierKind kind, const ml::Hyperparameters& h) {
  auto depth = [](int d) { return d == 0 ? std::string("inf") : std::to_string(d); };
  char buf[64];
  switch (kind) {
    case ml::ClassifierKind::LogisticRegression:
    case ml::ClassifierKind::LinearSVM: std::snprintf(buf, sizeof buf, "lambda=%g", h.regularization); return buf;
    case ml::ClassifierKind::DecisionTree: return "depth=" + depth(h.max_depth);
    case ml::ClassifierKind::RandomForest: return "trees=" + std::to_string(h.n_trees) + ",depth=" + depth(h.max_depth);
    case ml::ClassifierKind::GaussianNB: std::snprintf(buf, sizeof buf, "smoothing=%g", h.var_smoothing); return buf;
  }
  return "?";
}

namespace detail {
inline std::string fixed4(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

inline std::string pad(std::string s, std::size_t w) {
  if (s.size() < w) s.append(w - s.size(), ' ');
  return s;
}

inline std::string lpad(std::string s, std::size_t w) {
  if (s.size() < w) s.insert(0, w - s.size(), ' ');
  return s;
}
}  // namespace detail

inline std::string report_text(const EvaluationReport& r) {
  using detail::fixed4;
  using detail::lpad;
  using detail::pad;
  std::string out = "xqa evaluation report\n\n";
  out += "dataset: " + std::to_string(r.total) + " records, " + std::to_string(r.retained) + " retained, " +
         std::to_string(r.dropped_empty) + " dropped (empty gold answer), " + std::to_string(r.dropped_unsupported) +
         " dropped (unsupported query)\n";
  out += "cross-validation: " + std::to_string(r.folds) + " folds, seed " + std::to_string(r.seed) + "\n\n";

  out += "Component performance (macro average over questions)\n";
  out += pad("stage", 18) + pad("component", 28) + lpad("precision", 10) + lpad("recall", 10) + lpad("f-score", 10) +
         "\n";
  for (const auto& t : r.tasks)
    out += pad(std::string(stage_name(t.task)), 18) + pad(t.component, 28) +
           lpad(fixed4(t.evaluation.macro.precision), 10) + lpad(fixed4(t.evaluation.macro.recall), 10) +
           lpad(fixed4(t.evaluation.macro.f), 10) + "\n";

  out += "\nOutcome labels\n";
  out += pad("stage", 18) + lpad("Success", 10) + lpad("NoAnswer", 10) + lpad("WrongAnswer", 12) +
         lpad("majority", 10) + "\n";
  for (const auto& t : r.tasks)
    out += pad(std::string(stage_name(t.task)), 18) + lpad(std::to_string(t.label_counts[0]), 10) +
           lpad(std::to_string(t.label_counts[1]), 10) + lpad(std::to_string(t.label_counts[2]), 12) +
           lpad(fixed4(t.majority_baseline), 10) + "\n";

  auto grid = [&](const char* title, auto value) {
    out += std::string("\n") + title + "\n" + pad("classifier", 20);
    for (const auto& t : r.tasks) out += lpad(std::string(to_string(t.task)), 10);
    out += "\n";
    if (r.tasks.empty()) return;
    for (std::size_t k = 0; k < r.tasks[0].cells.size(); ++k) {
      out += pad(std::string(to_string(r.tasks[0].cells[k].kind)), 20);
      for (const auto& t : r.tasks) out += lpad(value(t, k), 10);
      out += "\n";
    }
  };
  grid("Classifier accuracy (mean over folds)", [](const TaskReport& t, std::size_t k) {
    return fixed4(t.cells[k].mean_accuracy);
  });
  grid("Classifier accuracy (average of per-class recall)", [](const TaskReport& t, std::size_t k) {
    return fixed4(t.cells[k].macro_accuracy);
  });
  grid("Training accuracy (chosen hyperparameters)", [](const TaskReport& t, std::size_t k) {
    return fixed4(t.training_accuracy[k]);
  });

  out += "\nChosen hyperparameters\n";
  for (const auto& t : r.tasks)
    for (const auto& c : t.cells)
      out += pad(std::string(to_string(t.task)), 6) + pad(std::string(to_string(c.kind)), 20) +
             describe_hyperparameters(c.kind, c.chosen) + "\n";

  out += "\nPer-class precision / recall of the best classifier\n";
  for (const auto& t : r.tasks) {
    const auto& c = t.cells[t.best];
    out += std::string(to_string(t.task)) + " (" + std::string(to_string(c.kind)) + ")\n";
    for (auto cls : kOutcomes)
      out += "  " + pad(std::string(to_string(cls)), 12) + " precision " + fixed4(c.precision[index_of(cls)]) +
             "  recall " + fixed4(c.recall[index_of(cls)]) + "\n";
    out += "  confusion (rows = true, columns = predicted):";
    for (const auto& row : c.confusion)
      out += " [" + std::to_string(row[0]) + " " + std::to_string(row[1]) + " " + std::to_string(row[2]) + "]";
    out += "\n";
  }

  if (r.pipeline) {
    const auto& p = *r.pipeline;
    out += "\nPipeline run with the best classifiers\n";
    out += "questions " + std::to_string(p.questions) + ", explanations " + std::to_string(p.explanations) +
           ", fewest explanations in a stage " + std::to_string(p.min_explanations_per_stage) +
           ", unresolved placeholders " + std::to_string(p.unresolved_placeholders) + ", class/output mismatches " +
           std::to_string(p.mismatches) + "\n";
  }
  return out;
}

inline nlohmann::json report_json(const EvaluationReport& r) {
  nlohmann::json j;
  j["dataset"] = {{"total", r.total},
                  {"retained", r.retained},
                  {"dropped_empty", r.dropped_empty},
                  {"dropped_unsupported", r.dropped_unsupported}};
  j["folds"] = r.folds;
  j["seed"] = r.seed;
  j["averaging"] = "macro over questions";
  j["components"] = nlohmann::json::array();
  for (const auto& t : r.tasks) {
    nlohmann::json tj;
    tj["task"] = to_string(t.task);
    tj["component"] = t.component;
    tj["precision"] = t.evaluation.macro.precision;
    tj["recall"] = t.evaluation.macro.recall;
    tj["f"] = t.evaluation.macro.f;
    tj["labels"] = {{"Success", t.label_counts[0]}, {"NoAnswer", t.label_counts[1]}, {"WrongAnswer", t.label_counts[2]}};
    tj["majority_baseline"] = t.majority_baseline;
    tj["best_kind"] = to_string(t.cells[t.best].kind);
    tj["classifiers"] = nlohmann::json::array();
    for (std::size_t k = 0; k < t.cells.size(); ++k) {
      const auto& c = t.cells[k];
      nlohmann::json grid = nlohmann::json::array();
      for (const auto& g : c.grid)
        grid.push_back({{"hyperparameters", describe_hyperparameters(c.kind, g.hyper)}, {"mean_accuracy", g.mean_accuracy}});
      tj["classifiers"].push_back({{"kind", to_string(c.kind)},
                                   {"fold_accuracy", c.fold_accuracy},
                                   {"mean_accuracy", c.mean_accuracy},
                                   {"macro_accuracy", c.macro_accuracy},
                                   {"precision", c.precision},
                                   {"recall", c.recall},
                                   {"confusion", c.confusion},
                                   {"chosen", describe_hyperparameters(c.kind, c.chosen)},
                                   {"grid", grid},
                                   {"training_accuracy", t.training_accuracy[k]}});
    }
    j["components"].push_back(std::move(tj));
  }
  if (r.pipeline) {
    const auto& p = *r.pipeline;
    j["pipeline"] = {{"questions", p.questions},
                     {"explanations", p.explanations},
                     {"min_explanations_per_stage", p.min_explanations_per_stage},
                     {"unresolved_placeholders", p.unresolved_placeholders},
                     {"mismatches", p.mismatches}};
  } else {
    j["pipeline"] = nullptr;
  }
  return j;
}

/// Writes report.txt, report.json and models/{ned,rl,qb}.json under `dir`.
inline void write_report(const EvaluationReport& r, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  write_file((dir / "report.txt").string(), report_text(r));
  write_file((dir / "report.json").string(), report_json(r).dump(2) + "\n");
  save_models(r.best_models(), dir / "models");
}

}  // namespace xqa
