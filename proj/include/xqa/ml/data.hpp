#pragma once

#include <array>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "xqa/error.hpp"
#include "xqa/outcome.hpp"

namespace xqa::ml {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

/// Seeded generator with platform-independent helpers (std distributions are
/// implementation defined, so they are avoided wherever results are frozen).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(splitmix64(seed)) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform integer in [0, n).
  std::size_t uniform_index(std::size_t n) {
    const std::uint64_t bound = static_cast<std::uint64_t>(n);
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    std::uint64_t v;
    do v = engine_();
    while (v >= limit);
    return static_cast<std::size_t>(v % bound);
  }

  /// Uniform double in [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[uniform_index(i)]);
  }

 private:
  std::mt19937_64 engine_;
};

/// Dense row-major design matrix with three-class labels.
struct LabeledData {
  std::size_t cols = 0;
  std::vector<double> x;
  std::vector<OutcomeClass> y;

  LabeledData() = default;
  explicit LabeledData(std::size_t c) : cols(c) {}

  std::size_t rows() const { return y.size(); }

  std::span<const double> row(std::size_t i) const { return {x.data() + i * cols, cols}; }

  void add(std::span<const double> features, OutcomeClass label) {
    if (features.size() != cols) throw SchemaMismatch("row width differs from data width");
    x.insert(x.end(), features.begin(), features.end());
    y.push_back(label);
  }

  LabeledData subset(const std::vector<std::size_t>& idx) const {
    LabeledData out(cols);
    out.x.reserve(idx.size() * cols);
    for (auto i : idx) out.add(row(i), y[i]);
    return out;
  }

  std::array<std::size_t, kOutcomeCount> class_counts() const {
    std::array<std::size_t, kOutcomeCount> c{};
    for (auto l : y) ++c[index_of(l)];
    return c;
  }

  std::array<bool, kOutcomeCount> present() const {
    auto c = class_counts();
    return {c[0] > 0, c[1] > 0, c[2] > 0};
  }
};

/// Per-sample weights: all ones, or inverse class frequency ("balanced").
inline std::vector<double> sample_weights(const LabeledData& data, bool balanced) {
  std::vector<double> w(data.rows(), 1.0);
  if (!balanced) return w;
  auto counts = data.class_counts();
  std::size_t present = 0;
  for (auto c : counts) present += c > 0;
  for (std::size_t i = 0; i < data.rows(); ++i)
    w[i] = static_cast<double>(data.rows()) /
           (static_cast<double>(present) * static_cast<double>(counts[index_of(data.y[i])]));
  return w;
}

using Probabilities = std::array<double, kOutcomeCount>;

/// Argmax with ties resolved in enumerator order.
inline OutcomeClass argmax(const Probabilities& p) {
  std::size_t best = 0;
  for (std::size_t k = 1; k < kOutcomeCount; ++k)
    if (p[k] > p[best]) best = k;
  return static_cast<OutcomeClass>(best);
}

inline Probabilities one_hot(OutcomeClass c) {
  Probabilities p{};
  p[index_of(c)] = 1.0;
  return p;
}

}  // namespace xqa::ml
