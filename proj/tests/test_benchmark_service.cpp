#include <gtest/gtest.h>

#include <fstream>
#include <thread>

#include "oracles.hpp"
#include "support.hpp"

using namespace xqa;
using namespace xqa::testing;

namespace {

std::string record(const std::string& id, const std::string& question, const std::string& sparql) {
  return nlohmann::json{{"id", id}, {"question", question}, {"sparql", sparql}}.dump();
}

const std::string kCanadaCapital =
    "SELECT ?x WHERE { <http://dbpedia.org/resource/Canada> <http://dbpedia.org/ontology/capital> ?x }";

nlohmann::json feedback_body(const std::string& mode, std::array<int, 4> r, const std::string& q = "survey-01") {
  return {{"session_id", "s1"},
          {"question_id", q},
          {"mode", mode},
          {"ratings", {{"justification", r[0]}, {"education", r[1]}, {"involvement", r[2]}, {"acceptance", r[3]}}}};
}

}  // namespace

// ---------------------------------------------------------------------------
// Datasets

TEST(Dataset, FilterFixtureCounts) {
  auto ds = load_dataset(source_path("tests/fixtures/filter_dataset.json"), desk_store()->graph);
  EXPECT_EQ(ds.total, 10u);
  EXPECT_EQ(ds.records.size(), 7u);
  EXPECT_EQ(ds.dropped_empty, 3u);
  EXPECT_EQ(ds.dropped_unsupported, 0u);
  EXPECT_EQ(ds.dropped.size(), 3u);
}

TEST(Dataset, UnsupportedQueriesAreCountedSeparately) {
  const auto& g = desk_store()->graph;
  auto ds = parse_dataset(
      "[" + record("a", "q", kCanadaCapital) + "," +
          record("b", "q", "SELECT ?x WHERE { ?x <http://dbpedia.org/ontology/capital> ?y FILTER(?y != ?x) }") + "," +
          record("c", "q", "SELECT ?x WHERE { ?x ?p ?o }") + "," +
          record("d", "q", "SELECT ?x WHERE { <http://dbpedia.org/resource/Atlantis> "
                           "<http://dbpedia.org/ontology/capital> ?x }") +
          "]",
      g);
  EXPECT_EQ(ds.total, 4u);
  EXPECT_EQ(ds.records.size(), 1u);
  EXPECT_EQ(ds.dropped_unsupported, 2u);
  EXPECT_EQ(ds.dropped_empty, 1u);
  const auto& r = ds.records[0];
  EXPECT_EQ(gold_keys(r, Task::NED), std::set<std::string>{"http://dbpedia.org/resource/Canada"});
  EXPECT_EQ(gold_keys(r, Task::RL), std::set<std::string>{"http://dbpedia.org/ontology/capital"});
  EXPECT_EQ(gold_keys(r, Task::QB), std::set<std::string>{"<http://dbpedia.org/resource/Ottawa>"});
}

TEST(Dataset, MalformedInputIsADatasetError) {
  const auto& g = desk_store()->graph;
  EXPECT_EQ(parse_dataset("", g).total, 0u);
  EXPECT_THROW(parse_dataset("[", g), DatasetError);
  EXPECT_THROW(parse_dataset("{}", g), DatasetError);
  EXPECT_THROW(parse_dataset(R"([{"id": "a", "question": "q"}])", g), DatasetError);
  EXPECT_THROW(parse_dataset("[" + record("a", "q", kCanadaCapital) + "," + record("a", "q", kCanadaCapital) + "]", g),
               DatasetError);
  EXPECT_THROW(load_dataset("/nonexistent/dataset.json", g), DatasetError);
}

TEST(Evaluation, MacroScoresAverageQuestionScores) {
  auto store = desk_store();
  const auto& ds = desk_dataset();
  auto components = ComponentSet::defaults(*store);
  auto outputs = run_components(ds.records, components, store->graph);
  for (auto task : kTasks) {
    auto ev = evaluate_component(ds.records, outputs, task);
    ASSERT_EQ(ev.per_question.size(), ds.records.size());
    double f = 0;
    for (std::size_t i = 0; i < ds.records.size(); ++i) {
      // independent set arithmetic
      auto pred = outputs[i].at(task).item_keys();
      auto gold = gold_keys(ds.records[i], task);
      std::size_t tp = 0;
      for (const auto& k : pred) tp += gold.count(k);
      double p = pred.empty() ? 0 : double(tp) / pred.size(), r = double(tp) / gold.size();
      f += tp ? 2 * p * r / (p + r) : 0;
    }
    EXPECT_NEAR(ev.macro.f, f / ds.records.size(), 1e-12) << to_string(task);
  }
}

TEST(Evaluation, TrainingLabelsFollowTheLabellingRule) {
  auto store = desk_store();
  const auto& ds = desk_dataset();
  auto components = ComponentSet::defaults(*store);
  auto outputs = run_components(ds.records, components, store->graph);
  for (auto task : kTasks) {
    auto examples = build_training_set(ds.records, outputs, task);
    ASSERT_EQ(examples.size(), ds.records.size());
    std::array<std::size_t, 3> seen{};
    for (std::size_t i = 0; i < examples.size(); ++i) {
      const auto& out = outputs[i].at(task);
      bool exact = out.item_keys() == gold_keys(ds.records[i], task);
      OutcomeClass want = out.empty() ? OutcomeClass::NoAnswer : exact ? OutcomeClass::Success
                                                                       : OutcomeClass::WrongAnswer;
      EXPECT_EQ(examples[i].label, want) << ds.records[i].id;
      ++seen[index_of(examples[i].label)];
    }
    // the desk data is built to exercise every class for every component
    for (auto c : seen) EXPECT_GT(c, 0u) << to_string(task);
  }
}

TEST(Report, StructureAndBestKind) {
  ReportOptions opts;
  opts.kinds = {ml::ClassifierKind::DecisionTree, ml::ClassifierKind::LogisticRegression};
  opts.folds = 5;
  auto rep = build_report(desk_dataset(), desk_store(), opts, &desk_templates());
  ASSERT_EQ(rep.tasks.size(), 3u);
  for (const auto& t : rep.tasks) {
    ASSERT_EQ(t.cells.size(), 2u);
    std::size_t best = t.cells[1].mean_accuracy > t.cells[0].mean_accuracy ? 1 : 0;
    EXPECT_EQ(t.best, best);
    EXPECT_EQ(t.best_model.kind, opts.kinds[best]);
  }
  ASSERT_TRUE(rep.pipeline);
  EXPECT_EQ(rep.pipeline->questions, desk_dataset().records.size());
  EXPECT_EQ(rep.pipeline->unresolved_placeholders, 0u);
  EXPECT_GE(rep.pipeline->min_explanations_per_stage, 1u);

  auto j = report_json(rep);
  EXPECT_EQ(j["dataset"]["retained"], desk_dataset().records.size());
  EXPECT_EQ(j["components"].size(), 3u);
  auto text = report_text(rep);
  EXPECT_NE(text.find("DecisionTree"), std::string::npos);

  TempDir tmp;
  write_report(rep, tmp.path());
  for (const char* f : {"report.txt", "report.json", "models/ned.json", "models/rl.json", "models/qb.json"})
    EXPECT_TRUE(std::filesystem::exists(tmp.path() / f)) << f;
  EXPECT_EQ(read_file(tmp.file("report.txt")), text);
}

TEST(Report, HyperparameterDescriptions) {
  ml::Hyperparameters h;
  h.regularization = 0.01;
  EXPECT_EQ(describe_hyperparameters(ml::ClassifierKind::LogisticRegression, h), "lambda=0.01");
  h.max_depth = 0;
  EXPECT_EQ(describe_hyperparameters(ml::ClassifierKind::DecisionTree, h), "depth=inf");
  h.n_trees = 10;
  h.max_depth = 5;
  EXPECT_EQ(describe_hyperparameters(ml::ClassifierKind::RandomForest, h), "trees=10,depth=5");
  h.var_smoothing = 10;
  EXPECT_EQ(describe_hyperparameters(ml::ClassifierKind::GaussianNB, h), "smoothing=10");
}

// ---------------------------------------------------------------------------
// Feedback log and summary

TEST(Feedback, ValidationRejectsBadRecords) {
  auto good = feedback_body("with_explanation", {1, 2, 3, 4});
  EXPECT_NO_THROW(feedback_from_json(good));
  auto bad = [&](auto mutate) {
    auto j = good;
    mutate(j);
    EXPECT_THROW(feedback_from_json(j), InvalidArgument) << j.dump();
  };
  bad([](auto& j) { j.erase("session_id"); });
  bad([](auto& j) { j["mode"] = "sometimes"; });
  bad([](auto& j) { j["ratings"].erase("education"); });
  bad([](auto& j) { j["ratings"]["trust"] = 3; });
  bad([](auto& j) { j["ratings"]["acceptance"] = 6; });
  bad([](auto& j) { j["ratings"]["acceptance"] = 0; });
  bad([](auto& j) { j["ratings"]["acceptance"] = 2.5; });
  bad([](auto& j) { j["ratings"]["acceptance"] = "4"; });
  bad([](auto& j) { j = nlohmann::json::array(); });
}

TEST(Feedback, SummaryMatchesRawLogOracleProperty) {
  ml::Rng rng(61);
  for (int round = 0; round < 10; ++round) {
    TempDir tmp;
    FeedbackLog log(tmp.file("f.jsonl"));
    auto n = rng.uniform_index(40);
    for (std::size_t i = 0; i < n; ++i) {
      auto mode = rng.uniform_index(2) ? "with_explanation" : "without_explanation";
      std::array<int, 4> r{};
      for (auto& v : r) v = 1 + static_cast<int>(rng.uniform_index(5));
      log.append(feedback_from_json(feedback_body(mode, r)));
    }
    auto raw = std::filesystem::exists(log.path()) ? read_file(log.path()) : std::string();
    EXPECT_EQ(summary_to_json(summarize(log.read_all())), summary_oracle(raw));
  }
}

TEST(Feedback, EmptyLogHasNullMeans) {
  auto j = summary_to_json(summarize({}));
  EXPECT_TRUE(j["modes"]["with_explanation"]["acceptance"]["mean"].is_null());
  EXPECT_EQ(j["modes"]["without_explanation"]["education"]["count"], 0);
}

TEST(Feedback, IdsResumeAfterRestartAndTornLinesAreSkipped) {
  TempDir tmp;
  auto path = tmp.file("f.jsonl");
  {
    FeedbackLog log(path);
    EXPECT_EQ(log.append(feedback_from_json(feedback_body("with_explanation", {1, 1, 1, 1}))), 1u);
    EXPECT_EQ(log.append(feedback_from_json(feedback_body("with_explanation", {2, 2, 2, 2}))), 2u);
  }
  {
    std::ofstream torn(path, std::ios::app);
    torn << R"({"id": 3, "session_id": "s)";
  }
  FeedbackLog log(path);
  EXPECT_EQ(log.read_all().size(), 2u);
  // the next append starts on a fresh line after the torn fragment
  auto id = log.append(feedback_from_json(feedback_body("without_explanation", {5, 5, 5, 5})));
  EXPECT_EQ(id, 3u);
  auto all = log.read_all();
  ASSERT_EQ(all.size(), 3u) << read_file(path);
  EXPECT_EQ(all.back().ratings, (std::array<int, 4>{5, 5, 5, 5}));
}

TEST(Feedback, ConcurrentAppendsGetDistinctIds) {
  TempDir tmp;
  auto log = std::make_shared<FeedbackLog>(tmp.file("f.jsonl"));
  Service svc(nullptr, log);
  std::vector<std::thread> threads;
  std::vector<std::vector<std::uint64_t>> ids(8);
  for (int t = 0; t < 8; ++t)
    threads.emplace_back([&, t] {
      for (int i = 0; i < 25; ++i) {
        auto res = svc.feedback(feedback_body(t % 2 ? "with_explanation" : "without_explanation", {1, 2, 3, 4}).dump());
        ids[t].push_back(res.body.at("id").get<std::uint64_t>());
      }
    });
  for (auto& th : threads) th.join();
  std::set<std::uint64_t> all;
  for (const auto& v : ids) all.insert(v.begin(), v.end());
  EXPECT_EQ(all.size(), 200u);
  EXPECT_EQ(*all.begin(), 1u);
  EXPECT_EQ(*all.rbegin(), 200u);
  EXPECT_EQ(log->read_all().size(), 200u);
}

// ---------------------------------------------------------------------------
// Service handlers

TEST(Service, AskValidatesInput) {
  Service svc(desk_config(), nullptr);
  EXPECT_EQ(svc.ask("not json").status, 400);
  EXPECT_EQ(svc.ask("[]").status, 400);
  EXPECT_EQ(svc.ask(R"({"q": "x"})").status, 400);
  EXPECT_EQ(svc.ask(R"({"question": 5})").status, 400);
  EXPECT_EQ(svc.ask(R"({"question": "   "})").status, 400);
  EXPECT_EQ(svc.ask(R"({"question": "Who?", "explain": "yes"})").status, 400);
  EXPECT_EQ(svc.ask(nlohmann::json{{"question", std::string(kMaxQuestionLength + 1, 'a')}}.dump()).status, 400);
  EXPECT_EQ(svc.ask(nlohmann::json{{"question", std::string(kMaxQuestionLength, 'a')}}.dump()).status, 200);
}

TEST(Service, AskWithoutConfigIsUnavailable) {
  Service svc(nullptr, nullptr);
  EXPECT_EQ(svc.ask(R"({"question": "Who wrote Hamlet?"})").status, 503);
  EXPECT_EQ(svc.templates().status, 503);
  EXPECT_EQ(svc.feedback(feedback_body("with_explanation", {1, 1, 1, 1}).dump()).status, 503);
  svc.set_config(desk_config());
  EXPECT_EQ(svc.ask(R"({"question": "Who wrote Hamlet?"})").status, 200);
}

TEST(Service, AskReturnsTraceWithOrWithoutExplanations) {
  Service svc(desk_config(), nullptr);
  auto r = svc.ask(R"({"question": "Did Tesla win a nobel prize in physics?"})");
  ASSERT_EQ(r.status, 200);
  EXPECT_EQ(r.body["answer_text"], "true");
  EXPECT_EQ(r.body["explain"], true);
  std::size_t n = 0;
  for (const auto& s : r.body["stages"]) n += s["explanations"].size();
  EXPECT_EQ(n, 4u);
  auto bare = svc.ask(R"({"question": "Did Tesla win a nobel prize in physics?", "explain": false})");
  EXPECT_EQ(bare.body["explain"], false);
  EXPECT_FALSE(bare.body["stages"][0].contains("explanations"));
  EXPECT_EQ(bare.body["answer_text"], "true");
}

TEST(Service, FeedbackTemplatesAndQuestions) {
  TempDir tmp;
  auto questions = nlohmann::json::parse(read_file(source_path("data/survey_questions.json")));
  Service svc(desk_config(), std::make_shared<FeedbackLog>(tmp.file("f.jsonl")), questions);
  EXPECT_EQ(svc.feedback("{").status, 400);
  EXPECT_EQ(svc.feedback(R"({"mode": "with_explanation"})").status, 400);
  auto ok = svc.feedback(feedback_body("without_explanation", {4, 4, 4, 4}).dump());
  EXPECT_EQ(ok.status, 200);
  EXPECT_EQ(ok.body["id"], 1);
  auto s = svc.summary().body;
  EXPECT_EQ(s["modes"]["without_explanation"]["justification"]["histogram"], (std::vector<int>{0, 0, 0, 1, 0}));
  EXPECT_EQ(svc.templates().body["count"], desk_templates().size());
  EXPECT_EQ(svc.questions().body["count"], 10);
  EXPECT_THROW(Service(nullptr, nullptr, nlohmann::json::object()), InvalidArgument);
}

TEST(Http, EndToEndOverLoopback) {
  TempDir tmp;
  auto svc = std::make_shared<Service>(desk_config(), std::make_shared<FeedbackLog>(tmp.file("f.jsonl")),
                                       nlohmann::json::array({{{"id", "q1"}, {"question", "Who wrote Hamlet?"}}}));
  httplib::Server server;
  svc->attach(server);
  int port = server.bind_to_any_port("127.0.0.1");
  ASSERT_GT(port, 0);
  std::thread t([&] { server.listen_after_bind(); });
  server.wait_until_ready();
  httplib::Client client("127.0.0.1", port);

  auto ask = client.Post("/api/ask", R"({"question": "What is the population of Canada?"})", "application/json");
  ASSERT_TRUE(ask);
  EXPECT_EQ(ask->status, 200);
  EXPECT_EQ(ask->get_header_value("Content-Type"), "application/json");
  auto body = nlohmann::json::parse(ask->body);
  EXPECT_EQ(body["stages"].size(), 3u);

  auto bad = client.Post("/api/ask", "{", "application/json");
  ASSERT_TRUE(bad);
  EXPECT_EQ(bad->status, 400);
  EXPECT_TRUE(nlohmann::json::parse(bad->body).contains("error"));

  auto fb = client.Post("/api/feedback", feedback_body("with_explanation", {5, 4, 3, 2}).dump(), "application/json");
  ASSERT_TRUE(fb);
  EXPECT_EQ(fb->status, 200);

  auto summary = client.Get("/api/survey/summary");
  ASSERT_TRUE(summary);
  EXPECT_EQ(nlohmann::json::parse(summary->body), summary_oracle(read_file(tmp.file("f.jsonl"))));

  auto templates = client.Get("/api/templates");
  ASSERT_TRUE(templates);
  EXPECT_EQ(nlohmann::json::parse(templates->body)["count"], desk_templates().size());

  auto qs = client.Get("/api/questions");
  ASSERT_TRUE(qs);
  EXPECT_EQ(nlohmann::json::parse(qs->body)["questions"][0]["id"], "q1");

  auto missing = client.Get("/api/nothing");
  ASSERT_TRUE(missing);
  EXPECT_EQ(missing->status, 404);

  server.stop();
  t.join();
}
