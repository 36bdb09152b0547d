#include <gtest/gtest.h>

#include <numeric>

#include "oracles.hpp"
#include "support.hpp"

using namespace xqa;
using namespace xqa::ml;
using namespace xqa::testing;

namespace {

constexpr auto S = OutcomeClass::Success;
constexpr auto N = OutcomeClass::NoAnswer;
constexpr auto W = OutcomeClass::WrongAnswer;

LabeledData xor_data() {
  LabeledData d(2);
  for (int rep = 0; rep < 5; ++rep) {
    d.add(std::vector<double>{0, 0}, S);
    d.add(std::vector<double>{1, 1}, S);
    d.add(std::vector<double>{0, 1}, W);
    d.add(std::vector<double>{1, 0}, W);
  }
  return d;
}

double accuracy(ClassifierKind kind, const ModelParameters& params, const LabeledData& d) {
  std::size_t hit = 0;
  for (std::size_t i = 0; i < d.rows(); ++i) hit += argmax(class_probabilities(kind, params, d.row(i))) == d.y[i];
  return static_cast<double>(hit) / static_cast<double>(d.rows());
}

int depth_of(const Tree& t, int node = 0) {
  const auto& n = t.nodes[node];
  if (n.feature < 0) return 0;
  return 1 + std::max(depth_of(t, n.left), depth_of(t, n.right));
}

double gini_oracle(double a, double b, double c) {
  double t = a + b + c;
  return t == 0 ? 0 : 1 - (a / t) * (a / t) - (b / t) * (b / t) - (c / t) * (c / t);
}

}  // namespace

// ---------------------------------------------------------------------------
// Basics

TEST(Rng, DeterministicAndInRange) {
  Rng a(9), b(9), c(10);
  bool differs = false;
  for (int i = 0; i < 1000; ++i) {
    auto x = a.uniform_index(7);
    ASSERT_EQ(x, b.uniform_index(7));
    ASSERT_LT(x, 7u);
    differs = differs || x != c.uniform_index(7);
    double u = a.uniform();
    b.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
  }
  EXPECT_TRUE(differs);
}

TEST(Argmax, TiesGoToEnumOrder) {
  EXPECT_EQ(argmax({0.4, 0.4, 0.2}), S);
  EXPECT_EQ(argmax({0.2, 0.4, 0.4}), N);
  EXPECT_EQ(argmax({0.0, 0.0, 1.0}), W);
}

TEST(SampleWeights, BalancedWeightsEqualiseClassMass) {
  LabeledData d(1);
  for (int i = 0; i < 6; ++i) d.add(std::vector<double>{0}, S);
  for (int i = 0; i < 2; ++i) d.add(std::vector<double>{0}, W);
  auto w = sample_weights(d, true);
  double s = 0, wr = 0;
  for (std::size_t i = 0; i < d.rows(); ++i) (d.y[i] == S ? s : wr) += w[i];
  EXPECT_DOUBLE_EQ(s, wr);
  EXPECT_DOUBLE_EQ(s + wr, 8.0);
  EXPECT_EQ(sample_weights(d, false), std::vector<double>(8, 1.0));
}

// ---------------------------------------------------------------------------
// Logistic regression

TEST(Logistic, AnalyticGradientMatchesFiniteDifferencesProperty) {
  Rng rng(21);
  for (int i = 0; i < 50; ++i) {
    auto c = random_gradient_case(rng);
    LinearParams grad;
    softmax_objective(c.data, c.sample_weight, c.params, c.lambda, &grad);
    EXPECT_LT(relative_error(flatten(grad), numeric_gradient(c.data, c.sample_weight, c.params, c.lambda)), 1e-5);
  }
}

TEST(Logistic, ObjectiveNeverIncreasesProperty) {
  Rng rng(22);
  for (int i = 0; i < 20; ++i) {
    auto c = random_gradient_case(rng);
    std::vector<double> losses;
    fit_logistic(c.data, c.sample_weight, c.lambda + 0.01, {1e-8, 300}, &losses);
    ASSERT_GE(losses.size(), 1u);
    for (std::size_t k = 1; k < losses.size(); ++k) EXPECT_LE(losses[k], losses[k - 1] + 1e-15);
  }
}

TEST(Logistic, ConvergesToAStationaryPoint) {
  auto d = separable_three_class(90, 3, 1);
  std::vector<double> sw(d.rows(), 1.0);
  auto m = fit_logistic(d, sw, 1.0, {1e-7, 20000});
  LinearParams grad;
  softmax_objective(d, sw, m, 1.0, &grad);
  double g = 0;
  for (double v : flatten(grad)) g += v * v;
  EXPECT_LT(std::sqrt(g), 1e-6);
}

TEST(Logistic, StrongerRegularisationShrinksWeights) {
  auto d = separable_three_class(90, 3, 2);
  std::vector<double> sw(d.rows(), 1.0);
  auto norm = [](const LinearParams& m) { return std::inner_product(m.w.begin(), m.w.end(), m.w.begin(), 0.0); };
  EXPECT_GT(norm(fit_logistic(d, sw, 0.1)), norm(fit_logistic(d, sw, 10.0)));
}

TEST(Logistic, SingleClassDataPredictsThatClass) {
  LabeledData d(2);
  d.add(std::vector<double>{1, 0}, N);
  d.add(std::vector<double>{0, 1}, N);
  auto params = fit_parameters(ClassifierKind::LogisticRegression, d, {});
  auto p = class_probabilities(ClassifierKind::LogisticRegression, params, std::vector<double>{5, 5});
  EXPECT_EQ(p, (Probabilities{0, 1, 0}));
}

TEST(Logistic, AbsentClassGetsNoMass) {
  auto d = xor_data();
  auto params = fit_parameters(ClassifierKind::LogisticRegression, d, {});
  for (auto x : {std::vector<double>{0, 0}, std::vector<double>{3, -2}})
    EXPECT_EQ(class_probabilities(ClassifierKind::LogisticRegression, params, x)[index_of(N)], 0.0);
}

TEST(Xor, TreeSeparatesLinearModelCannot) {
  auto d = xor_data();
  auto dt = fit_parameters(ClassifierKind::DecisionTree, d, {});
  EXPECT_EQ(accuracy(ClassifierKind::DecisionTree, dt, d), 1.0);
  Hyperparameters h;
  h.regularization = 0.01;
  auto lr = fit_parameters(ClassifierKind::LogisticRegression, d, h);
  EXPECT_LE(accuracy(ClassifierKind::LogisticRegression, lr, d), 0.75);
}

// ---------------------------------------------------------------------------
// SVM and naive Bayes

TEST(LinearSvm, SeparatesSeparableData) {
  auto d = separable_three_class(150, 3, 4);
  auto params = fit_parameters(ClassifierKind::LinearSVM, d, {});
  EXPECT_GE(accuracy(ClassifierKind::LinearSVM, params, d), 0.95);
  auto p = class_probabilities(ClassifierKind::LinearSVM, params, d.row(0));
  EXPECT_EQ(p[0] + p[1] + p[2], 1.0);
}

TEST(GaussianNB, MatchesDensityOracle) {
  LabeledData d(2);
  d.add(std::vector<double>{1.0, 2.0}, S);
  d.add(std::vector<double>{2.0, 2.5}, S);
  d.add(std::vector<double>{3.0, 1.0}, S);
  d.add(std::vector<double>{5.0, 0.0}, W);
  d.add(std::vector<double>{6.0, 1.0}, W);
  std::vector<double> sw(d.rows(), 1.0);
  const double smoothing = 1e-3;
  auto m = fit_gaussian_nb(d, sw, smoothing);

  // oracle: population variances per column, class statistics by hand
  double var0 = 0, var1 = 0;
  {
    double m0 = (1 + 2 + 3 + 5 + 6) / 5.0, m1 = (2 + 2.5 + 1 + 0 + 1) / 5.0;
    for (std::size_t i = 0; i < 5; ++i) {
      var0 += (d.row(i)[0] - m0) * (d.row(i)[0] - m0) / 5;
      var1 += (d.row(i)[1] - m1) * (d.row(i)[1] - m1) / 5;
    }
  }
  double eps = smoothing * std::max(var0, var1);
  double mu_s[2] = {2.0, 5.5 / 3}, mu_w[2] = {5.5, 0.5};
  double v_s[2] = {2.0 / 3 + eps, 0}, v_w[2] = {0.25 + eps, 0.25 + eps};
  for (double y : {2.0, 2.5, 1.0}) v_s[1] += (y - mu_s[1]) * (y - mu_s[1]) / 3;
  v_s[1] += eps;

  std::vector<double> x{4.0, 1.5};
  auto density = [&](const double* mu, const double* v) {
    double p = 1;
    for (int j = 0; j < 2; ++j)
      p *= std::exp(-(x[j] - mu[j]) * (x[j] - mu[j]) / (2 * v[j])) / std::sqrt(2 * M_PI * v[j]);
    return p;
  };
  double js = 0.6 * density(mu_s, v_s), jw = 0.4 * density(mu_w, v_w);
  auto p = gaussian_nb_probabilities(m, x);
  EXPECT_NEAR(p[index_of(S)], js / (js + jw), 1e-12);
  EXPECT_NEAR(p[index_of(W)], jw / (js + jw), 1e-12);
  EXPECT_EQ(p[index_of(N)], 0.0);
}

TEST(GaussianNB, ConstantFeaturesStayFinite) {
  LabeledData d(2);
  d.add(std::vector<double>{1, 0}, S);
  d.add(std::vector<double>{1, 0}, W);
  auto params = fit_parameters(ClassifierKind::GaussianNB, d, {});
  auto p = class_probabilities(ClassifierKind::GaussianNB, params, std::vector<double>{1, 0});
  EXPECT_TRUE(std::isfinite(p[0]) && std::isfinite(p[2]));
  EXPECT_NEAR(p[0] + p[1] + p[2], 1.0, 1e-12);
}

// ---------------------------------------------------------------------------
// Trees

TEST(DecisionTree, RootSplitAchievesTheBestGiniGain) {
  Rng rng(31);
  for (int round = 0; round < 30; ++round) {
    auto d = random_labeled_data(rng, 20 + rng.uniform_index(40), 1 + rng.uniform_index(4), round % 2 == 0);
    std::vector<double> sw(d.rows(), 1.0);
    auto tree = fit_decision_tree(d, sw, 1, 0);
    std::array<double, 3> all{};
    for (auto y : d.y) all[index_of(y)] += 1;
    double parent = gini_oracle(all[0], all[1], all[2]);

    double best_gain = 0;
    for (std::size_t j = 0; j < d.cols; ++j) {
      std::set<double> values;
      for (std::size_t i = 0; i < d.rows(); ++i) values.insert(d.row(i)[j]);
      for (auto it = values.begin(); std::next(it) != values.end(); ++it) {
        double thr = (*it + *std::next(it)) / 2;
        std::array<double, 3> l{}, r{};
        for (std::size_t i = 0; i < d.rows(); ++i) (d.row(i)[j] <= thr ? l : r)[index_of(d.y[i])] += 1;
        double nl = l[0] + l[1] + l[2], nr = r[0] + r[1] + r[2];
        double gain = parent - (nl * gini_oracle(l[0], l[1], l[2]) + nr * gini_oracle(r[0], r[1], r[2])) /
                                   static_cast<double>(d.rows());
        best_gain = std::max(best_gain, gain);
      }
    }
    const auto& root = tree.nodes[0];
    if (best_gain <= 1e-12) {
      EXPECT_EQ(root.feature, -1);
      continue;
    }
    ASSERT_GE(root.feature, 0);
    const auto& l = tree.nodes[root.left].counts;
    const auto& r = tree.nodes[root.right].counts;
    double nl = l[0] + l[1] + l[2], nr = r[0] + r[1] + r[2];
    double gain = parent - (nl * gini_oracle(l[0], l[1], l[2]) + nr * gini_oracle(r[0], r[1], r[2])) /
                               static_cast<double>(d.rows());
    EXPECT_NEAR(gain, best_gain, 1e-12);
  }
}

TEST(DecisionTree, DepthLimitHoldsProperty) {
  Rng rng(32);
  for (int depth : {1, 2, 3, 5}) {
    auto d = random_labeled_data(rng, 120, 5, false);
    std::vector<double> sw(d.rows(), 1.0);
    EXPECT_LE(depth_of(fit_decision_tree(d, sw, depth, 1)), depth);
  }
}

TEST(DecisionTree, LeafCountsSumToRowsReachingThem) {
  Rng rng(33);
  auto d = random_labeled_data(rng, 80, 4, true);
  std::vector<double> sw(d.rows(), 1.0);
  auto t = fit_decision_tree(d, sw, 0, 1);
  std::map<const TreeNode*, Probabilities> reached;
  for (std::size_t i = 0; i < d.rows(); ++i) reached[&t.leaf_for(d.row(i))][index_of(d.y[i])] += 1;
  for (const auto& [leaf, counts] : reached) EXPECT_EQ(leaf->counts, counts);
}

TEST(RandomForest, OneFullTreeWithoutBootstrapEqualsDecisionTreeProperty) {
  Rng rng(34);
  for (int round = 0; round < 10; ++round) {
    std::size_t cols = 1 + rng.uniform_index(8);
    auto d = random_labeled_data(rng, 30 + rng.uniform_index(60), cols, round % 2 == 0);
    Hyperparameters h;
    h.seed = rng.next();
    h.max_depth = static_cast<int>(rng.uniform_index(6));
    auto dt = std::get<Tree>(fit_parameters(ClassifierKind::DecisionTree, d, h));
    h.n_trees = 1;
    h.bootstrap = false;
    h.max_features = cols;
    auto rf = std::get<std::vector<Tree>>(fit_parameters(ClassifierKind::RandomForest, d, h));
    ASSERT_EQ(rf.size(), 1u);
    EXPECT_EQ(rf[0], dt);
  }
}

TEST(RandomForest, VotesAreProportions) {
  Rng rng(35);
  auto d = random_labeled_data(rng, 60, 5, true);
  Hyperparameters h;
  h.n_trees = 7;
  auto params = fit_parameters(ClassifierKind::RandomForest, d, h);
  auto p = class_probabilities(ClassifierKind::RandomForest, params, d.row(0));
  for (double v : p) EXPECT_DOUBLE_EQ(v * 7, std::round(v * 7));
  EXPECT_NEAR(p[0] + p[1] + p[2], 1.0, 1e-12);
  EXPECT_EQ(default_max_features(28), 6u);
  EXPECT_EQ(default_max_features(1), 1u);
}

// ---------------------------------------------------------------------------
// Cross-validation

TEST(Folds, ExactSizes) {
  std::vector<OutcomeClass> labels(100, S);
  for (const auto& f : make_folds(labels, 10, 1)) EXPECT_EQ(f.size(), 10u);
  labels.resize(103, W);
  std::vector<std::size_t> sizes;
  for (const auto& f : make_folds(labels, 10, 1)) sizes.push_back(f.size());
  std::sort(sizes.rbegin(), sizes.rend());
  EXPECT_EQ(sizes, (std::vector<std::size_t>{11, 11, 11, 10, 10, 10, 10, 10, 10, 10}));
}

TEST(Folds, PartitionBalanceAndStratificationProperty) {
  Rng rng(41);
  for (int i = 0; i < 300; ++i) {
    std::size_t k = 2 + rng.uniform_index(9);
    std::size_t n = k + rng.uniform_index(200);
    std::vector<OutcomeClass> labels(n);
    for (auto& l : labels) l = kOutcomes[rng.uniform_index(3)];
    auto seed = rng.next();
    auto folds = make_folds(labels, k, seed);
    ASSERT_EQ(folds, make_folds(labels, k, seed));
    std::vector<std::size_t> all;
    std::size_t lo = n, hi = 0;
    std::array<std::size_t, 3> cls_lo{n, n, n}, cls_hi{};
    for (const auto& f : folds) {
      all.insert(all.end(), f.begin(), f.end());
      lo = std::min(lo, f.size());
      hi = std::max(hi, f.size());
      std::array<std::size_t, 3> c{};
      for (auto r : f) ++c[index_of(labels[r])];
      for (int j = 0; j < 3; ++j) {
        cls_lo[j] = std::min(cls_lo[j], c[j]);
        cls_hi[j] = std::max(cls_hi[j], c[j]);
      }
    }
    std::sort(all.begin(), all.end());
    std::vector<std::size_t> expect(n);
    std::iota(expect.begin(), expect.end(), 0);
    ASSERT_EQ(all, expect);
    ASSERT_LE(hi - lo, 1u);
    for (int j = 0; j < 3; ++j) ASSERT_LE(cls_hi[j] - cls_lo[j], 1u);
  }
}

TEST(Folds, RejectsDegenerateRequests) {
  EXPECT_THROW(make_folds(std::vector<OutcomeClass>(5, S), 1, 0), InvalidArgument);
  EXPECT_THROW(make_folds(std::vector<OutcomeClass>(5, S), 6, 0), InvalidArgument);
}

TEST(CrossValidation, ReportIsInternallyConsistent) {
  auto d = separable_three_class(120, 3, 5);
  auto r = cross_validate(ClassifierKind::DecisionTree, d, 5, Hyperparameters{}, 3);
  std::size_t total = 0, diag = 0;
  for (std::size_t a = 0; a < 3; ++a)
    for (std::size_t b = 0; b < 3; ++b) {
      total += r.confusion[a][b];
      if (a == b) diag += r.confusion[a][b];
    }
  EXPECT_EQ(total, d.rows());
  ASSERT_EQ(r.fold_accuracy.size(), 5u);
  double mean = std::accumulate(r.fold_accuracy.begin(), r.fold_accuracy.end(), 0.0) / 5;
  EXPECT_DOUBLE_EQ(r.mean_accuracy, mean);
  // equal-size folds: pooled accuracy equals the fold mean
  EXPECT_NEAR(static_cast<double>(diag) / static_cast<double>(total), mean, 1e-12);
}

TEST(CrossValidation, SeparableDataReachesHighAccuracy) {
  auto d = separable_three_class(300, 4, 3);
  EXPECT_GE(cross_validate(ClassifierKind::LogisticRegression, d, 10, Hyperparameters{}, 42).mean_accuracy, 0.95);
}

TEST(CrossValidation, FirstGridEntryWinsTies) {
  auto d = separable_three_class(60, 3, 6);  // every depth separates this perfectly
  std::vector<Hyperparameters> grid(3);
  grid[0].max_depth = 8;
  grid[1].max_depth = 5;
  grid[2].max_depth = 3;
  auto r = cross_validate(ClassifierKind::DecisionTree, d, 5, grid, 1);
  ASSERT_EQ(r.grid.size(), 3u);
  EXPECT_EQ(r.grid[0].mean_accuracy, r.grid[2].mean_accuracy);
  EXPECT_EQ(r.chosen.max_depth, 8);
}

TEST(CrossValidation, DefaultGridSizes) {
  EXPECT_EQ(default_grid(ClassifierKind::LogisticRegression).size(), 4u);
  EXPECT_EQ(default_grid(ClassifierKind::LinearSVM).size(), 4u);
  EXPECT_EQ(default_grid(ClassifierKind::DecisionTree).size(), 4u);
  EXPECT_EQ(default_grid(ClassifierKind::RandomForest).size(), 8u);
  EXPECT_EQ(default_grid(ClassifierKind::GaussianNB).size(), 6u);
  EXPECT_EQ(default_grid(ClassifierKind::GaussianNB).front().var_smoothing, 1e-9);
}

TEST(Train, SingleEntryGridSkipsCrossValidation) {
  auto d = separable_three_class(30, 28, 7);
  auto r = train(ClassifierKind::LogisticRegression, Task::QB, question_feature_schema(), d, {Hyperparameters{}});
  EXPECT_FALSE(r.report);
  EXPECT_EQ(r.model.task, Task::QB);
  LabeledData narrow(3);
  narrow.add(std::vector<double>{0, 0, 0}, S);
  EXPECT_THROW(train(ClassifierKind::LogisticRegression, Task::QB, question_feature_schema(), narrow, {{}}),
               SchemaMismatch);
}

// ---------------------------------------------------------------------------
// Model files

TEST(ModelJson, RoundTripsEveryKind) {
  const auto& data = desk_training_data()[0];
  for (auto kind : kClassifierKinds) {
    Hyperparameters h;
    h.max_depth = 4;
    h.n_trees = 3;
    h.var_smoothing = 0.1;
    auto m = fit_model(kind, Task::NED, question_feature_schema(), data, h);
    auto text = serialize_model(m);
    auto back = parse_model(text);
    EXPECT_EQ(back, m) << to_string(kind);
    EXPECT_EQ(serialize_model(back), text);
    auto fv = extract_features(make_question("Who wrote Hamlet?"));
    EXPECT_EQ(predict(back, fv).probabilities, predict(m, fv).probabilities);
  }
}

TEST(ModelJson, RejectsDamagedFiles) {
  auto m = fit_model(ClassifierKind::DecisionTree, Task::RL, question_feature_schema(), desk_training_data()[1], {});
  auto j = model_to_json(m);
  EXPECT_THROW(parse_model("{"), Error);
  auto bad_kind = j;
  bad_kind["kind"] = "perceptron";
  EXPECT_THROW(model_from_json(bad_kind), Error);
  auto bad_format = j;
  bad_format["format"] = "other";
  EXPECT_THROW(model_from_json(bad_format), Error);
  auto bad_tree = j;
  bad_tree["parameters"]["nodes"][0]["left"] = 100000;
  EXPECT_THROW(model_from_json(bad_tree), Error);
}

TEST(Predict, SchemaMismatchIsAnError) {
  auto m = fit_model(ClassifierKind::LogisticRegression, Task::NED, question_feature_schema(), desk_training_data()[0],
                     {});
  auto fv = extract_features(make_question("Who wrote Hamlet?"));
  fv.schema.version = "xqa-question-features-0";
  EXPECT_THROW(predict(m, fv), SchemaMismatch);
}
