// Command-line front end: ingest, train, ask, evaluate, serve.

#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "xqa/xqa.hpp"

namespace {

struct KgOptions {
  std::string kg;
  std::string lexicon;

  void add(CLI::App* app) {
    app->add_option("--kg", kg, "knowledge graph: N-Triples file or store snapshot")->required();
    app->add_option("--lexicon", lexicon, "relation synonym file (surface<TAB>IRI)");
  }

  std::shared_ptr<const xqa::Store> load() const {
    return std::make_shared<const xqa::Store>(xqa::load_store(kg, lexicon));
  }
};

std::vector<xqa::Task> parse_components(const std::string& s) {
  if (s == "all") return {xqa::kTasks.begin(), xqa::kTasks.end()};
  return {xqa::task_from_string(s)};
}

std::vector<xqa::ml::ClassifierKind> parse_kinds(const std::vector<std::string>& names) {
  std::vector<xqa::ml::ClassifierKind> out;
  for (const auto& n : names) {
    if (n == "all") return {xqa::ml::kClassifierKinds.begin(), xqa::ml::kClassifierKinds.end()};
    out.push_back(xqa::ml::classifier_kind_from_string(n));
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Explainable question answering over a knowledge graph"};
  app.require_subcommand(1);

  // ingest
  auto* ingest = app.add_subcommand("ingest", "load N-Triples (and a relation lexicon) into a store snapshot");
  KgOptions ingest_kg;
  std::string ingest_out;
  ingest_kg.add(ingest);
  ingest->add_option("--out", ingest_out, "snapshot file to write")->required();

  // train
  auto* train = app.add_subcommand("train", "train outcome classifiers for one or all components");
  KgOptions train_kg;
  std::string train_dataset, train_component = "all", train_kind = "lr", train_out;
  std::size_t train_folds = 10;
  std::uint64_t train_seed = 42;
  bool train_balanced = false;
  train_kg.add(train);
  train->add_option("--dataset", train_dataset, "dataset JSON ({id, question, sparql} records)")->required();
  train->add_option("--component", train_component, "ned, rl, qb or all")->capture_default_str();
  train->add_option("--kind", train_kind, "lr, svm, rf, gnb or dt")->capture_default_str();
  train->add_option("--out", train_out, "model file (one component) or directory (all)")->required();
  train->add_option("--folds", train_folds, "cross-validation folds")->capture_default_str();
  train->add_option("--seed", train_seed, "random seed")->capture_default_str();
  train->add_flag("--balanced", train_balanced, "inverse-frequency class weights");

  // ask
  auto* ask = app.add_subcommand("ask", "answer one question and explain each stage");
  KgOptions ask_kg;
  std::string ask_models, ask_templates = "data/templates.txt", ask_question, ask_trace;
  bool ask_explain = false;
  ask_kg.add(ask);
  ask->add_option("--models", ask_models, "directory with ned.json, rl.json, qb.json")->required();
  ask->add_option("--templates", ask_templates, "template file")->capture_default_str();
  ask->add_option("question", ask_question, "question text")->required();
  ask->add_flag("--explain", ask_explain, "print the explanation flow");
  ask->add_option("--trace-out", ask_trace, "write the full trace as JSON");

  // evaluate
  auto* evaluate = app.add_subcommand("evaluate", "component scores, classifier cross-validation, report");
  KgOptions eval_kg;
  std::string eval_dataset, eval_templates = "data/templates.txt", eval_out;
  std::vector<std::string> eval_kinds{"all"};
  std::size_t eval_folds = 10;
  std::uint64_t eval_seed = 42;
  bool eval_balanced = false;
  eval_kg.add(evaluate);
  evaluate->add_option("--dataset", eval_dataset, "dataset JSON")->required();
  evaluate->add_option("--templates", eval_templates, "template file")->capture_default_str();
  evaluate->add_option("--kinds", eval_kinds, "classifier kinds (default all)")->delimiter(',');
  evaluate->add_option("--out", eval_out, "output directory")->required();
  evaluate->add_option("--folds", eval_folds, "cross-validation folds")->capture_default_str();
  evaluate->add_option("--seed", eval_seed, "random seed")->capture_default_str();
  evaluate->add_flag("--balanced", eval_balanced, "inverse-frequency class weights");

  // serve
  auto* serve = app.add_subcommand("serve", "HTTP API (and optional static web UI)");
  KgOptions serve_kg;
  std::string serve_models, serve_templates = "data/templates.txt", serve_questions, serve_log = "feedback.jsonl",
                            serve_host = "127.0.0.1", serve_static;
  int serve_port = 8080;
  serve_kg.add(serve);
  serve->add_option("--models", serve_models, "directory with ned.json, rl.json, qb.json")->required();
  serve->add_option("--templates", serve_templates, "template file")->capture_default_str();
  serve->add_option("--survey-questions", serve_questions, "survey question JSON array");
  serve->add_option("--feedback-log", serve_log, "append-only feedback log")->capture_default_str();
  serve->add_option("--host", serve_host, "bind address")->capture_default_str();
  serve->add_option("--port", serve_port, "port")->capture_default_str();
  serve->add_option("--static", serve_static, "directory served at /");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*ingest) {
      auto store = ingest_kg.load();
      xqa::write_file(ingest_out, xqa::serialize_store(*store));
      std::cout << "wrote " << ingest_out << ": " << store->graph.size() << " triples, " << store->synonyms.size()
                << " synonyms\n";
    } else if (*train) {
      auto store = train_kg.load();
      auto ds = xqa::load_dataset(train_dataset, store->graph);
      auto components = xqa::ComponentSet::defaults(*store);
      auto outputs = xqa::run_components(ds.records, components, store->graph);
      auto kind = xqa::ml::classifier_kind_from_string(train_kind);
      auto tasks = parse_components(train_component);
      xqa::ml::Hyperparameters base;
      base.seed = train_seed;
      base.balanced = train_balanced;
      for (auto task : tasks) {
        auto data = xqa::to_labeled_data(xqa::build_training_set(ds.records, outputs, task));
        auto result = xqa::ml::train(kind, task, xqa::question_feature_schema(), data,
                                     xqa::ml::default_grid(kind, base), train_folds, train_seed);
        std::string path = tasks.size() == 1 ? train_out : (std::filesystem::path(train_out) /
                                                            xqa::model_file_name(task)).string();
        if (tasks.size() > 1) std::filesystem::create_directories(train_out);
        xqa::write_file(path, xqa::ml::serialize_model(result.model));
        std::cout << xqa::to_string(task) << ": " << xqa::ml::to_string(kind) << " on " << data.rows()
                  << " examples";
        if (result.report)
          std::cout << ", mean CV accuracy " << result.report->mean_accuracy << " ("
                    << xqa::describe_hyperparameters(kind, result.report->chosen) << ")";
        std::cout << " -> " << path << "\n";
      }
    } else if (*ask) {
      auto store = ask_kg.load();
      xqa::PipelineConfig config(store, xqa::load_models(ask_models), xqa::load_templates(ask_templates));
      auto trace = xqa::answer_question(ask_question, config);
      std::cout << "answer: " << xqa::answer_text(trace, config.prefixes) << "\n";
      if (ask_explain)
        for (const auto& e : xqa::explanation_flow(trace))
          std::cout << "[" << xqa::to_string(e.task) << " " << xqa::to_string(e.outcome) << "] " << e.text << "\n";
      if (!ask_trace.empty()) xqa::write_file(ask_trace, xqa::trace_to_json(trace, config.prefixes).dump(2) + "\n");
    } else if (*evaluate) {
      auto store = eval_kg.load();
      auto ds = xqa::load_dataset(eval_dataset, store->graph);
      auto templates = xqa::load_templates(eval_templates);
      xqa::ReportOptions opts;
      opts.kinds = parse_kinds(eval_kinds);
      opts.folds = eval_folds;
      opts.seed = eval_seed;
      opts.base.seed = eval_seed;
      opts.base.balanced = eval_balanced;
      auto report = xqa::build_report(ds, store, opts, &templates);
      xqa::write_report(report, eval_out);
      std::cout << xqa::report_text(report);
    } else if (*serve) {
      auto store = serve_kg.load();
      auto config = std::make_shared<const xqa::PipelineConfig>(store, xqa::load_models(serve_models),
                                                                xqa::load_templates(serve_templates));
      nlohmann::json questions = nlohmann::json::array();
      if (!serve_questions.empty()) questions = nlohmann::json::parse(xqa::read_file(serve_questions));
      xqa::Service service(config, std::make_shared<xqa::FeedbackLog>(serve_log), questions);
      httplib::Server server;
      service.attach(server, serve_static);
      std::cout << "listening on http://" << serve_host << ":" << serve_port << "\n" << std::flush;
      if (!server.listen(serve_host, serve_port)) {
        std::cerr << "error: cannot listen on " << serve_host << ":" << serve_port << "\n";
        return 1;
      }
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
