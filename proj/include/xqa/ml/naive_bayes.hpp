#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <span>
#include <vector>

#include "xqa/ml/data.hpp"

namespace xqa::ml {

struct GaussianNBParams {
  std::size_t cols = 0;
  std::vector<double> mean;      // [3 x cols]
  std::vector<double> variance;  // [3 x cols], smoothing included
  Probabilities prior{};
  std::array<bool, kOutcomeCount> present{};

  bool operator==(const GaussianNBParams&) const = default;
};

/// Per-class feature means/variances; `smoothing` times the largest feature
/// variance is added to every variance.
inline GaussianNBParams fit_gaussian_nb(const LabeledData& data, std::span<const double> sample_weight,
                                        double smoothing = 1e-9) {
  const std::size_t r = data.cols;
  GaussianNBParams m{r, std::vector<double>(kOutcomeCount * r, 0.0), std::vector<double>(kOutcomeCount * r, 0.0),
                     {}, data.present()};
  double max_var = 0;
  for (std::size_t j = 0; j < r; ++j) {
    double mu = 0, sq = 0;
    for (std::size_t i = 0; i < data.rows(); ++i) mu += data.row(i)[j];
    mu /= static_cast<double>(data.rows());
    for (std::size_t i = 0; i < data.rows(); ++i) sq += (data.row(i)[j] - mu) * (data.row(i)[j] - mu);
    max_var = std::max(max_var, sq / static_cast<double>(data.rows()));
  }
  double eps = smoothing * (max_var > 0 ? max_var : 1.0);

  Probabilities weight{};
  for (std::size_t i = 0; i < data.rows(); ++i) {
    auto k = index_of(data.y[i]);
    weight[k] += sample_weight[i];
    for (std::size_t j = 0; j < r; ++j) m.mean[k * r + j] += sample_weight[i] * data.row(i)[j];
  }
  for (std::size_t k = 0; k < kOutcomeCount; ++k)
    if (weight[k] > 0)
      for (std::size_t j = 0; j < r; ++j) m.mean[k * r + j] /= weight[k];
  for (std::size_t i = 0; i < data.rows(); ++i) {
    auto k = index_of(data.y[i]);
    for (std::size_t j = 0; j < r; ++j) {
      double d = data.row(i)[j] - m.mean[k * r + j];
      m.variance[k * r + j] += sample_weight[i] * d * d;
    }
  }
  double total = weight[0] + weight[1] + weight[2];
  for (std::size_t k = 0; k < kOutcomeCount; ++k) {
    m.prior[k] = weight[k] / total;
    for (std::size_t j = 0; j < r; ++j) {
      if (weight[k] > 0) m.variance[k * r + j] /= weight[k];
      m.variance[k * r + j] += eps;
    }
  }
  return m;
}

inline Probabilities gaussian_nb_probabilities(const GaussianNBParams& m, std::span<const double> x) {
  std::array<double, kOutcomeCount> joint{};
  double top = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < kOutcomeCount; ++k) {
    if (!m.present[k]) continue;
    double ll = std::log(m.prior[k]);
    for (std::size_t j = 0; j < m.cols; ++j) {
      double v = m.variance[k * m.cols + j];
      double d = x[j] - m.mean[k * m.cols + j];
      ll -= 0.5 * std::log(2.0 * std::numbers::pi * v) + d * d / (2.0 * v);
    }
    joint[k] = ll;
    top = std::max(top, ll);
  }
  Probabilities p{};
  double sum = 0;
  for (std::size_t k = 0; k < kOutcomeCount; ++k) {
    if (!m.present[k]) continue;
    p[k] = std::exp(joint[k] - top);
    sum += p[k];
  }
  for (auto& v : p) v /= sum;
  return p;
}

}  // namespace xqa::ml
