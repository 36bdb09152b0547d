#pragma once

#include <algorithm>
#include <numeric>
#include <optional>
#include <vector>

#include "xqa/ml/model.hpp"

namespace xqa::ml {

using Folds = std::vector<std::vector<std::size_t>>;

/// Seeded, label-stratified fold assignment. Rows are shuffled, stably grouped
/// by label, then dealt round-robin, so fold sizes differ by at most one and
/// every class is spread as evenly as its count allows. Each fold is sorted.
inline Folds make_folds(const std::vector<OutcomeClass>& labels, std::size_t k, std::uint64_t seed) {
  if (k < 2) throw InvalidArgument("cross-validation needs k >= 2");
  if (labels.size() < k)
    throw InvalidArgument("cross-validation needs at least k=" + std::to_string(k) + " examples, got " +
                          std::to_string(labels.size()));
  std::vector<std::size_t> order(labels.size());
  std::iota(order.begin(), order.end(), 0);
  Rng rng(seed);
  rng.shuffle(order);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return labels[a] < labels[b]; });
  Folds folds(k);
  for (std::size_t i = 0; i < order.size(); ++i) folds[i % k].push_back(order[i]);
  for (auto& f : folds) std::sort(f.begin(), f.end());
  return folds;
}

using ConfusionMatrix = std::array<std::array<std::size_t, kOutcomeCount>, kOutcomeCount>;  // [true][predicted]

struct GridScore {
  Hyperparameters hyper;
  double mean_accuracy = 0;
};

struct CVReport {
  ClassifierKind kind = ClassifierKind::LogisticRegression;
  std::size_t k = 10;
  std::vector<double> fold_accuracy;
  double mean_accuracy = 0;
  double macro_accuracy = 0;  // mean per-class recall over classes with support
  std::array<double, kOutcomeCount> precision{};
  std::array<double, kOutcomeCount> recall{};
  ConfusionMatrix confusion{};
  Hyperparameters chosen;
  std::vector<GridScore> grid;
};

/// Cross-validates one hyperparameter setting.
inline CVReport cross_validate(ClassifierKind kind, const LabeledData& data, std::size_t k,
                               const Hyperparameters& hyper, std::uint64_t seed) {
  auto folds = make_folds(data.y, k, seed);
  CVReport r;
  r.kind = kind;
  r.k = k;
  r.chosen = hyper;
  std::vector<bool> in_test(data.rows());
  for (const auto& test : folds) {
    std::fill(in_test.begin(), in_test.end(), false);
    for (auto i : test) in_test[i] = true;
    std::vector<std::size_t> train;
    for (std::size_t i = 0; i < data.rows(); ++i)
      if (!in_test[i]) train.push_back(i);
    auto params = fit_parameters(kind, data.subset(train), hyper);
    std::size_t correct = 0;
    for (auto i : test) {
      auto predicted = argmax(class_probabilities(kind, params, data.row(i)));
      correct += predicted == data.y[i];
      ++r.confusion[index_of(data.y[i])][index_of(predicted)];
    }
    r.fold_accuracy.push_back(static_cast<double>(correct) / static_cast<double>(test.size()));
  }
  r.mean_accuracy =
      std::accumulate(r.fold_accuracy.begin(), r.fold_accuracy.end(), 0.0) / static_cast<double>(k);
  std::size_t supported = 0;
  for (std::size_t c = 0; c < kOutcomeCount; ++c) {
    std::size_t row = 0, col = 0;
    for (std::size_t o = 0; o < kOutcomeCount; ++o) {
      row += r.confusion[c][o];
      col += r.confusion[o][c];
    }
    double hit = static_cast<double>(r.confusion[c][c]);
    r.precision[c] = col ? hit / static_cast<double>(col) : 0.0;
    r.recall[c] = row ? hit / static_cast<double>(row) : 0.0;
    if (row) {
      r.macro_accuracy += r.recall[c];
      ++supported;
    }
  }
  if (supported) r.macro_accuracy /= static_cast<double>(supported);
  r.grid = {{hyper, r.mean_accuracy}};
  return r;
}

/// Default search grid, simplest / least-regularized setting first.
inline std::vector<Hyperparameters> default_grid(ClassifierKind kind, const Hyperparameters& base = {}) {
  std::vector<Hyperparameters> grid;
  const int depths[] = {3, 5, 8, 0};
  switch (kind) {
    case ClassifierKind::LogisticRegression:
    case ClassifierKind::LinearSVM:
      for (double l : {0.01, 0.1, 1.0, 10.0}) {
        auto h = base;
        h.regularization = l;
        grid.push_back(h);
      }
      break;
    case ClassifierKind::DecisionTree:
      for (int d : depths) {
        auto h = base;
        h.max_depth = d;
        grid.push_back(h);
      }
      break;
    case ClassifierKind::RandomForest:
      for (int t : {10, 50})
        for (int d : depths) {
          auto h = base;
          h.n_trees = t;
          h.max_depth = d;
          grid.push_back(h);
        }
      break;
    case ClassifierKind::GaussianNB:
      for (double v : {1e-9, 1e-6, 1e-3, 1e-1, 1.0, 10.0}) {
        auto h = base;
        h.var_smoothing = v;
        grid.push_back(h);
      }
      break;
  }
  return grid;
}

/// Grid search by mean CV accuracy. The first grid entry wins ties.
inline CVReport cross_validate(ClassifierKind kind, const LabeledData& data, std::size_t k,
                               const std::vector<Hyperparameters>& grid, std::uint64_t seed) {
  if (grid.empty()) throw InvalidArgument("empty hyperparameter grid");
  std::optional<CVReport> best;
  std::vector<GridScore> scores;
  for (const auto& h : grid) {
    auto r = cross_validate(kind, data, k, h, seed);
    scores.push_back({h, r.mean_accuracy});
    if (!best || r.mean_accuracy > best->mean_accuracy) best = std::move(r);
  }
  best->grid = std::move(scores);
  return *best;
}

struct TrainResult {
  ClassifierModel model;
  std::optional<CVReport> report;  // absent when the grid has a single entry and no CV was run
};

/// Picks hyperparameters by k-fold CV (when the grid has a choice to make),
/// then fits on all the data.
inline TrainResult train(ClassifierKind kind, Task task, const FeatureSchema& schema, const LabeledData& data,
                         const std::vector<Hyperparameters>& grid, std::size_t k = 10, std::uint64_t seed = 42) {
  if (data.rows() == 0) throw InvalidArgument("cannot train on an empty training set");
  if (data.cols != schema.size()) throw SchemaMismatch("training data width differs from the feature schema");
  if (grid.empty()) throw InvalidArgument("empty hyperparameter grid");
  TrainResult out;
  Hyperparameters chosen = grid.front();
  if (grid.size() > 1) {
    out.report = cross_validate(kind, data, k, grid, seed);
    chosen = out.report->chosen;
  }
  out.model = fit_model(kind, task, schema, data, chosen);
  return out;
}

}  // namespace xqa::ml
