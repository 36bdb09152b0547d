#include <gtest/gtest.h>

#include "oracles.hpp"
#include "support.hpp"

using namespace xqa;
using namespace xqa::testing;

namespace {

std::set<std::string> active_features(const FeatureVector& fv) {
  std::set<std::string> out;
  for (std::size_t i = 0; i < fv.values.size(); ++i)
    if (fv.values[i]) out.insert(fv.schema.names[i]);
  return out;
}

const std::string kLabel(vocab::kRdfsLabel);

Graph tiny_graph() {
  Graph g;
  auto add_label = [&](const std::string& iri, const std::string& text) {
    g.insert({Iri(iri), Iri(kLabel), Literal(text, std::nullopt, "en")});
  };
  add_label("http://x/New_York", "New York");
  add_label("http://x/New_York_City", "New York City");
  add_label("http://x/Paris_B", "Paris");
  add_label("http://x/Paris_A", "Paris");
  add_label("http://x/France", "France");
  g.insert({Iri("http://x/Paris_A"), Iri("http://x/country"), Iri("http://x/France")});
  g.insert({Iri("http://x/France"), Iri("http://x/capital"), Iri("http://x/Paris_A")});
  return g;
}

}  // namespace

// ---------------------------------------------------------------------------
// Tokens and tags

TEST(Tokenize, DetachesTrailingPunctuation) {
  EXPECT_EQ(tokenize("Who wrote Hamlet?"), (std::vector<std::string>{"Who", "wrote", "Hamlet", "?"}));
  EXPECT_EQ(tokenize("  U.S. state, ok?! "), (std::vector<std::string>{"U.S", ".", "state", ",", "ok", "?", "!"}));
  EXPECT_EQ(tokenize("..."), (std::vector<std::string>{".", ".", "."}));
  EXPECT_TRUE(tokenize("   ").empty());
}

TEST(PosTag, TagsTheWorkedExample) {
  auto q = make_question("Did Tesla win a nobel prize in physics?");
  using T = PosTag;
  EXPECT_EQ(q.tags, (std::vector<T>{T::Aux, T::Propn, T::Verb, T::Det, T::Noun, T::Noun, T::Adp, T::Noun, T::Punct}));
}

TEST(PosTag, NamesRoundTrip) {
  for (std::size_t i = 0; i < kPosTagCount; ++i) {
    auto t = static_cast<PosTag>(i);
    EXPECT_EQ(pos_tag_from_string(to_string(t)), t);
  }
  EXPECT_EQ(pos_tag_from_string("VERBS"), std::nullopt);
}

TEST(Question, RejectsBlankText) {
  EXPECT_THROW(make_question(" \t\n"), InvalidArgument);
  EXPECT_EQ(make_question("a").id, make_question("a").id);
  EXPECT_NE(make_question("a").id, make_question("b").id);
}

TEST(Question, HeadwordAndAnswerType) {
  struct Case {
    const char* text;
    Headword head;
    AnswerType type;
  };
  for (const auto& c : std::vector<Case>{
           {"Did Tesla win a nobel prize in physics?", Headword::BooleanAux, AnswerType::Boolean},
           {"Is Berlin the capital of Germany?", Headword::BooleanAux, AnswerType::Boolean},
           {"How many people live in Canada?", Headword::How, AnswerType::Number},
           {"What is the total number of awards of Einstein?", Headword::What, AnswerType::Number},
           {"Which rivers flow through Germany?", Headword::Which, AnswerType::List},
           {"List the awards of Marie Curie.", Headword::Other, AnswerType::List},
           {"Who wrote Hamlet?", Headword::Who, AnswerType::Other},
           {"Where was Tesla born?", Headword::Where, AnswerType::Other},
           {"What is the status of Canada?", Headword::What, AnswerType::Other},
       }) {
    auto q = make_question(c.text);
    EXPECT_EQ(headword(q), c.head) << c.text;
    EXPECT_EQ(answer_type(q), c.type) << c.text;
  }
}

// ---------------------------------------------------------------------------
// Features

TEST(Features, SchemaHasTwentyEightNamedBits) {
  const auto& s = question_feature_schema();
  EXPECT_EQ(s.size(), 28u);
  EXPECT_EQ(s.version, "xqa-question-features-1");
  EXPECT_EQ(std::set<std::string>(s.names.begin(), s.names.end()).size(), s.names.size());
}

TEST(Features, WorkedExampleVector) {
  auto fv = extract_features(make_question("Did Tesla win a nobel prize in physics?"));
  EXPECT_EQ(active_features(fv),
            (std::set<std::string>{"length=6-8", "headword=boolean-aux", "answer-type=boolean", "pos=AUX",
                                   "pos=PROPN", "pos=VERB", "pos=DET", "pos=NOUN", "pos=ADP", "pos=PUNCT"}));
}

TEST(Features, GroupInvariantsOverRandomQuestions) {
  // generator: random word salad from a mixed vocabulary
  const std::vector<std::string> words = {"who", "What", "is", "the", "capital", "of", "Canada", "did", "Tesla",
                                          "win", "3", "many", "how", "quickly", "largest", "and", "in", "?", ",",
                                          "rivers", "which", "List", "born", "her"};
  ml::Rng rng(5);
  const auto& names = question_feature_schema().names;
  auto group = [&](const std::string& prefix, const FeatureVector& fv) {
    std::size_t on = 0;
    for (std::size_t i = 0; i < names.size(); ++i) on += names[i].rfind(prefix, 0) == 0 && fv.values[i];
    return on;
  };
  for (int i = 0; i < 500; ++i) {
    std::string text;
    auto n = 1 + rng.uniform_index(14);
    for (std::size_t k = 0; k < n; ++k) text += words[rng.uniform_index(words.size())] + " ";
    if (text.find_first_not_of(" ?,") == std::string::npos) text = "x " + text;
    auto q = make_question(text);
    auto fv = extract_features(q);
    ASSERT_EQ(fv.values.size(), 28u);
    EXPECT_EQ(group("length", fv), 1u) << text;
    EXPECT_EQ(group("headword=", fv), 1u) << text;
    EXPECT_EQ(group("answer-type=", fv), 1u) << text;
    std::set<std::string> tags;
    for (auto t : q.tags) tags.insert("pos=" + std::string(to_string(t)));
    std::set<std::string> pos_on;
    for (const auto& a : active_features(fv))
      if (a.rfind("pos=", 0) == 0) pos_on.insert(a);
    EXPECT_EQ(pos_on, tags) << text;
    std::size_t words_only = 0;
    for (auto t : q.tags) words_only += t != PosTag::Punct;
    std::string bucket = words_only <= 5 ? "length<=5" : words_only <= 8 ? "length=6-8" : "length>=9";
    EXPECT_TRUE(active_features(fv).count(bucket)) << text;
    EXPECT_EQ(fv, extract_features(make_question(text)));
  }
}

// ---------------------------------------------------------------------------
// Scoring and labels

TEST(MicroF1, SetArithmetic) {
  using S = std::set<std::string>;
  EXPECT_EQ(micro_f1(S{"a", "b"}, S{"b", "c"}).f, 0.5);
  EXPECT_EQ(micro_f1(S{"a"}, S{"a"}).f, 1.0);
  EXPECT_EQ(micro_f1(S{}, S{"a"}).f, 0.0);
  EXPECT_EQ(micro_f1(S{"x"}, S{"a"}).f, 0.0);
  auto r = micro_f1(S{"a", "b", "c", "d"}, S{"a"});
  EXPECT_DOUBLE_EQ(r.precision, 0.25);
  EXPECT_DOUBLE_EQ(r.recall, 1.0);
  EXPECT_DOUBLE_EQ(r.f, 0.4);
  EXPECT_THROW(micro_f1(S{"a"}, S{}), InvalidArgument);
}

TEST(MicroF1, MatchesCountingOracleProperty) {
  ml::Rng rng(6);
  for (int i = 0; i < 1000; ++i) {
    std::set<int> pred, gold;
    for (int k = 0; k < 8; ++k) {
      if (rng.uniform_index(2)) pred.insert(k);
      if (rng.uniform_index(2)) gold.insert(k);
    }
    if (gold.empty()) gold.insert(0);
    int tp = 0;
    for (int k : pred) tp += gold.count(k);
    double p = pred.empty() ? 0 : double(tp) / pred.size(), r = double(tp) / gold.size();
    double f = tp == 0 ? 0 : 2 * p * r / (p + r);
    EXPECT_NEAR(micro_f1(pred, gold).f, f, 1e-15);
    EXPECT_EQ(micro_f1(pred, gold).f == 1.0, pred == gold);
  }
}

TEST(Labels, TrichotomyGrid) {
  EXPECT_EQ(label_example(true, 0.0), OutcomeClass::NoAnswer);
  EXPECT_EQ(label_example(true, 0.5), OutcomeClass::NoAnswer);
  EXPECT_EQ(label_example(true, 1.0), OutcomeClass::NoAnswer);
  EXPECT_EQ(label_example(false, 0.0), OutcomeClass::WrongAnswer);
  EXPECT_EQ(label_example(false, 0.5), OutcomeClass::WrongAnswer);
  EXPECT_EQ(label_example(false, 1.0), OutcomeClass::Success);
  EXPECT_THROW(label_example(false, 1.5), InvalidArgument);
  EXPECT_THROW(label_example(false, std::nullopt, 1.0), DatasetError);
}

// ---------------------------------------------------------------------------
// Components

TEST(EntityLinker, LongestMatchWins) {
  auto g = tiny_graph();
  auto out = link_entities(make_question("Is New York City bigger than Paris?"), g);
  ASSERT_EQ(out.entities().size(), 2u);
  EXPECT_EQ(out.entities()[0].entity.value, "http://x/New_York_City");
  EXPECT_EQ(out.entities()[0].span, (Span{1, 4, "New York City"}));
  EXPECT_EQ(out.entities()[0].score, 3u);
}

TEST(EntityLinker, AmbiguityResolvesToSmallestIri) {
  auto g = tiny_graph();
  auto out = link_entities(make_question("Where is Paris?"), g);
  ASSERT_EQ(out.arity(), 1u);
  EXPECT_EQ(out.entities()[0].entity.value, "http://x/Paris_A");
}

TEST(EntityLinker, NoLabelsNoLinks) {
  auto g = tiny_graph();
  auto out = link_entities(make_question("Describe the weather."), g);
  EXPECT_TRUE(out.empty());
  EXPECT_TRUE(out.item_keys().empty());
}

TEST(RelationLinker, SkipsEntityTokensAndUsesSynonyms) {
  auto g = tiny_graph();
  RelationLexicon lex = RelationLexicon::build(g, {{"located in", Iri("http://x/country")}});
  EXPECT_EQ(lex.lookup("capital"), std::set<Iri>{Iri("http://x/capital")});
  auto q = make_question("Is Paris located in France?");
  auto ents = link_entities(q, g);
  auto rels = link_relations(q, lex, ents);
  ASSERT_EQ(rels.relations().size(), 1u);
  EXPECT_EQ(rels.relations()[0].predicate.value, "http://x/country");
  EXPECT_EQ(rels.relations()[0].span.text, "located in");
}

TEST(QueryBuilder, PicksTheSatisfiedOrientation) {
  auto g = tiny_graph();
  RelationLexicon lex = RelationLexicon::build(g, {});
  auto q = make_question("Is Paris the capital of France?");
  auto ents = link_entities(q, g);
  auto rels = link_relations(q, lex, ents);
  auto out = build_query(answer_type(q), ents, rels, g);
  ASSERT_TRUE(out.query());
  EXPECT_EQ(to_sparql(*out.query()), "ASK { <http://x/France> <http://x/capital> <http://x/Paris_A> . }");
}

TEST(QueryBuilder, SelectWithVariableOnTheLinkedSide) {
  auto g = tiny_graph();
  RelationLexicon lex = RelationLexicon::build(g, {});
  auto q = make_question("What is the capital of France?");
  auto ents = link_entities(q, g);
  auto rels = link_relations(q, lex, ents);
  auto out = build_query(answer_type(q), ents, rels, g);
  ASSERT_TRUE(out.query());
  EXPECT_EQ(to_sparql(*out.query()), "SELECT ?x WHERE { <http://x/France> <http://x/capital> ?x . }");
  out.answers = evaluate(g, *out.query());
  EXPECT_EQ(out.item_keys(), std::set<std::string>{"<http://x/Paris_A>"});
}

TEST(QueryBuilder, NothingToBuildWithoutLinks) {
  auto g = tiny_graph();
  auto none = build_query(AnswerType::Other, ComponentOutput::of_entities({}), ComponentOutput::of_relations({}), g);
  EXPECT_FALSE(none.query());
  EXPECT_TRUE(none.empty());
  EXPECT_EQ(none.arity(), 0u);
}

TEST(QueryBuilder, ExecutedEmptySelectCountsAsEmpty) {
  auto out = ComponentOutput::of_query(parse_sparql("SELECT ?x WHERE { <http://x/a> <http://x/p> ?x }"));
  EXPECT_FALSE(out.empty());
  out.answers = evaluate(Graph{}, *out.query());
  EXPECT_TRUE(out.empty());
  EXPECT_EQ(out.arity(), 1u);
}

TEST(Stages, DeskWorkedExample) {
  auto store = desk_store();
  auto components = ComponentSet::defaults(*store);
  auto out = run_stages(make_question("Did Tesla win a nobel prize in physics?"), components, store->graph);
  EXPECT_EQ(out.ned.item_keys(), (std::set<std::string>{"http://dbpedia.org/resource/Nikola_Tesla",
                                                        "http://dbpedia.org/resource/Nobel_Prize_in_Physics"}));
  EXPECT_EQ(out.rl.item_keys(), std::set<std::string>{"http://dbpedia.org/ontology/award"});
  EXPECT_EQ(out.qb.item_keys(), std::set<std::string>{"true"});
}

TEST(Stages, ComponentSetRejectsWrongTask) {
  auto store = desk_store();
  auto components = ComponentSet::defaults(*store);
  std::swap(components.ned, components.rl);
  EXPECT_THROW(components.at(Task::NED), InvalidArgument);
}
