#pragma once

#include <algorithm>
#include <array>
#include <cctype>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <json.hpp>

#include "xqa/ml/linear.hpp"
#include "xqa/ml/naive_bayes.hpp"
#include "xqa/ml/tree.hpp"
#include "xqa/question.hpp"
#include "xqa/task.hpp"

namespace xqa::ml {

enum class ClassifierKind : std::uint8_t { LogisticRegression, LinearSVM, RandomForest, GaussianNB, DecisionTree };
inline constexpr std::array<ClassifierKind, 5> kClassifierKinds = {
    ClassifierKind::LogisticRegression, ClassifierKind::LinearSVM, ClassifierKind::RandomForest,
    ClassifierKind::GaussianNB, ClassifierKind::DecisionTree};

inline std::string_view to_string(ClassifierKind k) {
  switch (k) {
    case ClassifierKind::LogisticRegression: return "LogisticRegression";
    case ClassifierKind::LinearSVM: return "LinearSVM";
    case ClassifierKind::RandomForest: return "RandomForest";
    case ClassifierKind::GaussianNB: return "GaussianNB";
    case ClassifierKind::DecisionTree: return "DecisionTree";
  }
  return "?";
}

inline std::string_view short_name(ClassifierKind k) {
  switch (k) {
    case ClassifierKind::LogisticRegression: return "lr";
    case ClassifierKind::LinearSVM: return "svm";
    case ClassifierKind::RandomForest: return "rf";
    case ClassifierKind::GaussianNB: return "gnb";
    case ClassifierKind::DecisionTree: return "dt";
  }
  return "?";
}

/// Accepts the full name or the short alias, case-insensitively.
inline ClassifierKind classifier_kind_from_string(std::string_view s) {
  std::string lower(s);
  for (auto& c : lower) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  for (auto k : kClassifierKinds) {
    std::string full(to_string(k));
    for (auto& c : full) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    if (lower == full || lower == short_name(k)) return k;
  }
  if (lower == "nb") return ClassifierKind::GaussianNB;
  throw InvalidArgument("unknown classifier kind '" + std::string(s) + "'");
}

struct Hyperparameters {
  double regularization = 1.0;   // lambda (LR, SVM)
  double var_smoothing = 1e-9;   // GaussianNB, relative to the largest feature variance
  int max_depth = 0;             // trees; 0 = unbounded
  int n_trees = 10;              // forest
  std::size_t max_features = 0;  // forest; 0 = ceil(sqrt(r))
  bool bootstrap = true;         // forest
  std::uint64_t seed = 42;
  bool balanced = false;  // inverse-frequency sample weights

  bool operator==(const Hyperparameters&) const = default;
};

using ModelParameters = std::variant<LinearParams, Tree, std::vector<Tree>, GaussianNBParams>;

struct ClassifierModel {
  ClassifierKind kind = ClassifierKind::LogisticRegression;
  Task task = Task::NED;
  FeatureSchema schema;
  Hyperparameters hyper;
  ModelParameters params;

  bool operator==(const ClassifierModel&) const = default;
};

inline ModelParameters fit_parameters(ClassifierKind kind, const LabeledData& data, const Hyperparameters& h) {
  if (data.rows() == 0) throw InvalidArgument("cannot train on an empty training set");
  auto sw = sample_weights(data, h.balanced);
  switch (kind) {
    case ClassifierKind::LogisticRegression: return fit_logistic(data, sw, h.regularization);
    case ClassifierKind::LinearSVM: return fit_linear_svm(data, sw, h.regularization);
    case ClassifierKind::DecisionTree: return fit_decision_tree(data, sw, h.max_depth, h.seed);
    case ClassifierKind::RandomForest:
      return fit_random_forest(data, sw, {h.n_trees, h.max_depth, h.max_features, h.bootstrap, h.seed});
    case ClassifierKind::GaussianNB: return fit_gaussian_nb(data, sw, h.var_smoothing);
  }
  throw InvalidArgument("unknown classifier kind");
}

inline Probabilities class_probabilities(ClassifierKind kind, const ModelParameters& params,
                                         std::span<const double> x) {
  switch (kind) {
    case ClassifierKind::LogisticRegression: return softmax_probabilities(std::get<LinearParams>(params), x);
    case ClassifierKind::LinearSVM: return svm_probabilities(std::get<LinearParams>(params), x);
    case ClassifierKind::DecisionTree: return std::get<Tree>(params).distribution(x);
    case ClassifierKind::RandomForest: return forest_probabilities(std::get<std::vector<Tree>>(params), x);
    case ClassifierKind::GaussianNB: return gaussian_nb_probabilities(std::get<GaussianNBParams>(params), x);
  }
  throw InvalidArgument("unknown classifier kind");
}

inline ClassifierModel fit_model(ClassifierKind kind, Task task, const FeatureSchema& schema,
                                 const LabeledData& data, const Hyperparameters& h) {
  if (data.cols != schema.size()) throw SchemaMismatch("training data width differs from the feature schema");
  return {kind, task, schema, h, fit_parameters(kind, data, h)};
}

struct Prediction {
  OutcomeClass outcome = OutcomeClass::Success;
  Probabilities probabilities{};
};

inline std::vector<double> to_doubles(const FeatureVector& fv) { return {fv.values.begin(), fv.values.end()}; }

inline Prediction predict(const ClassifierModel& model, const FeatureVector& features) {
  if (!(features.schema == model.schema) || features.values.size() != model.schema.size())
    throw SchemaMismatch("feature schema '" + features.schema.version + "' does not match model schema '" +
                         model.schema.version + "'");
  auto x = to_doubles(features);
  auto p = class_probabilities(model.kind, model.params, x);
  return {argmax(p), p};
}

// ---------------------------------------------------------------------------
// Model file

inline constexpr std::string_view kModelFormat = "xqa-classifier";
inline constexpr int kModelFormatVersion = 1;

namespace detail {
using nlohmann::json;

inline json to_json(const Probabilities& p) { return json::array({p[0], p[1], p[2]}); }
inline Probabilities probabilities_from_json(const json& j) {
  if (!j.is_array() || j.size() != kOutcomeCount) throw SchemaMismatch("expected a 3-element array");
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}
inline json to_json(const std::array<bool, kOutcomeCount>& p) { return json::array({p[0], p[1], p[2]}); }
inline std::array<bool, kOutcomeCount> present_from_json(const json& j) {
  if (!j.is_array() || j.size() != kOutcomeCount) throw SchemaMismatch("expected a 3-element array");
  return {j[0].get<bool>(), j[1].get<bool>(), j[2].get<bool>()};
}

inline json tree_to_json(const Tree& t) {
  json nodes = json::array();
  for (const auto& n : t.nodes)
    nodes.push_back({{"feature", n.feature}, {"threshold", n.threshold}, {"left", n.left}, {"right", n.right},
                     {"counts", to_json(n.counts)}});
  return nodes;
}

inline Tree tree_from_json(const json& j, std::size_t cols) {
  Tree t;
  for (const auto& n : j) {
    TreeNode node{n.at("feature").get<int>(), n.at("threshold").get<double>(), n.at("left").get<int>(),
                  n.at("right").get<int>(), probabilities_from_json(n.at("counts"))};
    t.nodes.push_back(node);
  }
  auto size = static_cast<int>(t.nodes.size());
  if (size == 0) throw SchemaMismatch("tree without nodes");
  for (const auto& n : t.nodes) {
    if (n.feature < 0) continue;
    if (static_cast<std::size_t>(n.feature) >= cols || n.left <= 0 || n.right <= 0 || n.left >= size ||
        n.right >= size)
      throw SchemaMismatch("tree node refers outside the model");
  }
  return t;
}

inline json params_to_json(const ModelParameters& params) {
  return std::visit(
      [](const auto& p) -> json {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, LinearParams>) {
          return {{"weights", p.w}, {"bias", to_json(p.b)}, {"present", to_json(p.present)}};
        } else if constexpr (std::is_same_v<T, Tree>) {
          return {{"nodes", tree_to_json(p)}};
        } else if constexpr (std::is_same_v<T, std::vector<Tree>>) {
          json trees = json::array();
          for (const auto& t : p) trees.push_back(tree_to_json(t));
          return {{"trees", trees}};
        } else {
          return {{"mean", p.mean}, {"variance", p.variance}, {"prior", to_json(p.prior)},
                  {"present", to_json(p.present)}};
        }
      },
      params);
}

inline ModelParameters params_from_json(ClassifierKind kind, const json& j, std::size_t cols) {
  switch (kind) {
    case ClassifierKind::LogisticRegression:
    case ClassifierKind::LinearSVM: {
      LinearParams p(cols);
      p.w = j.at("weights").get<std::vector<double>>();
      if (p.w.size() != kOutcomeCount * cols) throw SchemaMismatch("weight matrix shape differs from schema");
      p.b = probabilities_from_json(j.at("bias"));
      p.present = present_from_json(j.at("present"));
      return p;
    }
    case ClassifierKind::DecisionTree: return tree_from_json(j.at("nodes"), cols);
    case ClassifierKind::RandomForest: {
      std::vector<Tree> trees;
      for (const auto& t : j.at("trees")) trees.push_back(tree_from_json(t, cols));
      if (trees.empty()) throw SchemaMismatch("forest without trees");
      return trees;
    }
    case ClassifierKind::GaussianNB: {
      GaussianNBParams p;
      p.cols = cols;
      p.mean = j.at("mean").get<std::vector<double>>();
      p.variance = j.at("variance").get<std::vector<double>>();
      if (p.mean.size() != kOutcomeCount * cols || p.variance.size() != kOutcomeCount * cols)
        throw SchemaMismatch("mean/variance shape differs from schema");
      p.prior = probabilities_from_json(j.at("prior"));
      p.present = present_from_json(j.at("present"));
      return p;
    }
  }
  throw SchemaMismatch("unknown classifier kind");
}
}  // namespace detail

inline nlohmann::json model_to_json(const ClassifierModel& m) {
  const auto& h = m.hyper;
  return {{"format", kModelFormat},
          {"version", kModelFormatVersion},
          {"kind", to_string(m.kind)},
          {"task", to_string(m.task)},
          {"schema", {{"version", m.schema.version}, {"names", m.schema.names}}},
          {"hyperparameters",
           {{"regularization", h.regularization},
            {"var_smoothing", h.var_smoothing},
            {"max_depth", h.max_depth},
            {"n_trees", h.n_trees},
            {"max_features", h.max_features},
            {"bootstrap", h.bootstrap},
            {"seed", h.seed},
            {"balanced", h.balanced}}},
          {"parameters", detail::params_to_json(m.params)}};
}

inline ClassifierModel model_from_json(const nlohmann::json& j) {
  try {
    if (j.at("format").get<std::string>() != kModelFormat) throw SchemaMismatch("not a classifier model file");
    if (j.at("version").get<int>() != kModelFormatVersion) throw SchemaMismatch("unsupported model file version");
    ClassifierModel m;
    m.kind = classifier_kind_from_string(j.at("kind").get<std::string>());
    m.task = task_from_string(j.at("task").get<std::string>());
    m.schema.version = j.at("schema").at("version").get<std::string>();
    m.schema.names = j.at("schema").at("names").get<std::vector<std::string>>();
    const auto& h = j.at("hyperparameters");
    m.hyper.regularization = h.at("regularization").get<double>();
    m.hyper.var_smoothing = h.at("var_smoothing").get<double>();
    m.hyper.max_depth = h.at("max_depth").get<int>();
    m.hyper.n_trees = h.at("n_trees").get<int>();
    m.hyper.max_features = h.at("max_features").get<std::size_t>();
    m.hyper.bootstrap = h.at("bootstrap").get<bool>();
    m.hyper.seed = h.at("seed").get<std::uint64_t>();
    m.hyper.balanced = h.at("balanced").get<bool>();
    m.params = detail::params_from_json(m.kind, j.at("parameters"), m.schema.size());
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw SchemaMismatch(std::string("malformed model file: ") + e.what());
  }
}

inline std::string serialize_model(const ClassifierModel& m) { return model_to_json(m).dump(2) + "\n"; }

inline ClassifierModel parse_model(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw SchemaMismatch(std::string("model file is not valid JSON: ") + e.what());
  }
  return model_from_json(j);
}

}  // namespace xqa::ml
