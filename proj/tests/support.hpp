#pragma once

// Shared fixtures for the unit and acceptance binaries.

#include <atomic>
#include <filesystem>
#include <memory>
#include <string>
#include <unistd.h>

#include "xqa/xqa.hpp"

#ifndef XQA_SOURCE_DIR
#error "XQA_SOURCE_DIR must point at the repository root"
#endif

namespace xqa::testing {

inline std::string source_path(const std::string& rel) { return std::string(XQA_SOURCE_DIR) + "/" + rel; }

inline std::shared_ptr<const Store> desk_store() {
  static auto store = std::make_shared<const Store>(
      load_store(source_path("data/desk.nt"), source_path("data/relation_synonyms.tsv")));
  return store;
}

inline const TemplateRepository& desk_templates() {
  static auto repo = load_templates(source_path("data/templates.txt"));
  return repo;
}

inline const Dataset& desk_dataset() {
  static auto ds = load_dataset(source_path("data/dataset.json"), desk_store()->graph);
  return ds;
}

/// Per-task training data on the desk dataset.
inline const std::array<ml::LabeledData, 3>& desk_training_data() {
  static auto data = [] {
    auto store = desk_store();
    auto components = ComponentSet::defaults(*store);
    auto outputs = run_components(desk_dataset().records, components, store->graph);
    std::array<ml::LabeledData, 3> d{ml::LabeledData(0), ml::LabeledData(0), ml::LabeledData(0)};
    for (auto t : kTasks)
      d[static_cast<std::size_t>(t)] = to_labeled_data(build_training_set(desk_dataset().records, outputs, t));
    return d;
  }();
  return data;
}

/// Logistic regression per task, lambda chosen by 10-fold CV, as `xqa train` does.
inline const ModelSet& desk_lr_models() {
  static auto models = [] {
    ModelSet m;
    for (auto t : kTasks) {
      const auto& data = desk_training_data()[static_cast<std::size_t>(t)];
      auto kind = ml::ClassifierKind::LogisticRegression;
      m.at(t) = ml::train(kind, t, question_feature_schema(), data, ml::default_grid(kind), 10, 42).model;
    }
    return m;
  }();
  return models;
}

inline std::shared_ptr<const PipelineConfig> desk_config(std::shared_ptr<const Store> store = desk_store()) {
  return std::make_shared<const PipelineConfig>(std::move(store), desk_lr_models(), desk_templates());
}

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("xqa-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::string file(const std::string& name) const { return (path_ / name).string(); }

 private:
  std::filesystem::path path_;
};

}  // namespace xqa::testing
