#pragma once

// Linear three-class models: multinomial logistic regression (softmax with L2,
// full-batch gradient descent with backtracking) and a one-vs-rest linear SVM
// (hinge loss with L2, subgradient descent).

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <vector>

#include "xqa/ml/data.hpp"

namespace xqa::ml {

/// Weight matrix W[3 x cols] (row-major) plus bias. Rows of classes absent from
/// training stay zero and never receive probability mass.
struct LinearParams {
  std::size_t cols = 0;
  std::vector<double> w;
  std::array<double, kOutcomeCount> b{};
  std::array<bool, kOutcomeCount> present{true, true, true};

  LinearParams() = default;
  explicit LinearParams(std::size_t c) : cols(c), w(kOutcomeCount * c, 0.0) {}

  double score(std::size_t k, std::span<const double> x) const {
    double s = b[k];
    const double* wk = w.data() + k * cols;
    for (std::size_t j = 0; j < cols; ++j) s += wk[j] * x[j];
    return s;
  }

  bool operator==(const LinearParams&) const = default;
};

inline Probabilities softmax_probabilities(const LinearParams& m, std::span<const double> x) {
  Probabilities p{};
  double top = -std::numeric_limits<double>::infinity();
  std::array<double, kOutcomeCount> z{};
  for (std::size_t k = 0; k < kOutcomeCount; ++k) {
    if (!m.present[k]) continue;
    z[k] = m.score(k, x);
    top = std::max(top, z[k]);
  }
  double sum = 0;
  for (std::size_t k = 0; k < kOutcomeCount; ++k) {
    if (!m.present[k]) continue;
    p[k] = std::exp(z[k] - top);
    sum += p[k];
  }
  for (auto& v : p) v /= sum;
  return p;
}

/// Regularized mean negative log-likelihood
///   (1/n) sum_i s_i * -log p(y_i | x_i) + lambda / (2n) * ||W||^2
/// (bias unpenalized). Writes the gradient into `grad` when given.
inline double softmax_objective(const LabeledData& data, std::span<const double> sample_weight,
                                const LinearParams& m, double lambda, LinearParams* grad = nullptr) {
  const auto n = static_cast<double>(data.rows());
  if (grad) {
    *grad = LinearParams(m.cols);
    grad->present = m.present;
  }
  double loss = 0;
  for (std::size_t i = 0; i < data.rows(); ++i) {
    auto x = data.row(i);
    auto p = softmax_probabilities(m, x);
    auto yi = index_of(data.y[i]);
    loss -= sample_weight[i] * std::log(std::max(p[yi], 1e-300));
    if (!grad) continue;
    for (std::size_t k = 0; k < kOutcomeCount; ++k) {
      if (!m.present[k]) continue;
      double r = sample_weight[i] * (p[k] - (k == yi ? 1.0 : 0.0)) / n;
      double* gk = grad->w.data() + k * m.cols;
      for (std::size_t j = 0; j < m.cols; ++j) gk[j] += r * x[j];
      grad->b[k] += r;
    }
  }
  loss /= n;
  double sq = 0;
  for (std::size_t k = 0; k < kOutcomeCount; ++k) {
    if (!m.present[k]) continue;
    for (std::size_t j = 0; j < m.cols; ++j) {
      double wkj = m.w[k * m.cols + j];
      sq += wkj * wkj;
      if (grad) grad->w[k * m.cols + j] += lambda / n * wkj;
    }
  }
  return loss + lambda / (2 * n) * sq;
}

struct GradientDescentOptions {
  double tolerance = 1e-6;  // on the gradient 2-norm
  int max_iterations = 5000;
};

namespace detail {
inline double squared_norm(const LinearParams& g) {
  double s = 0;
  for (double v : g.w) s += v * v;
  for (double v : g.b) s += v * v;
  return s;
}

inline void axpy(LinearParams& m, double a, const LinearParams& d) {
  for (std::size_t i = 0; i < m.w.size(); ++i) m.w[i] += a * d.w[i];
  for (std::size_t k = 0; k < kOutcomeCount; ++k) m.b[k] += a * d.b[k];
}
}  // namespace detail

/// Armijo backtracking keeps the objective non-increasing. `losses`, when
/// given, receives the objective after every accepted step (index 0 = start).
inline LinearParams fit_logistic(const LabeledData& data, std::span<const double> sample_weight, double lambda,
                                 const GradientDescentOptions& opts = {}, std::vector<double>* losses = nullptr) {
  LinearParams m(data.cols);
  m.present = data.present();
  std::size_t n_present = std::count(m.present.begin(), m.present.end(), true);
  if (n_present <= 1) return m;

  LinearParams grad;
  double f = softmax_objective(data, sample_weight, m, lambda, &grad);
  if (losses) losses->push_back(f);
  double step = 1.0;
  for (int it = 0; it < opts.max_iterations; ++it) {
    double g2 = detail::squared_norm(grad);
    if (std::sqrt(g2) < opts.tolerance) break;
    step = std::min(step * 2.0, 1e6);
    LinearParams trial;
    double f_trial;
    while (true) {
      trial = m;
      detail::axpy(trial, -step, grad);
      f_trial = softmax_objective(data, sample_weight, trial, lambda);
      if (f_trial <= f - 1e-4 * step * g2) break;
      step *= 0.5;
      if (step < 1e-20) return m;
    }
    m = std::move(trial);
    f = softmax_objective(data, sample_weight, m, lambda, &grad);
    if (losses) losses->push_back(f);
  }
  return m;
}

// ---------------------------------------------------------------------------

struct SubgradientOptions {
  int iterations = 1000;
  double initial_step = 1.0;
};

/// One-vs-rest hinge objective for class k:
///   lambda / (2n) * ||w_k||^2 + (1/n) sum_i s_i * max(0, 1 - t_i (w_k . x_i + b_k))
inline double hinge_objective(const LabeledData& data, std::span<const double> sample_weight,
                              const LinearParams& m, std::size_t k, double lambda) {
  const auto n = static_cast<double>(data.rows());
  double loss = 0;
  for (std::size_t i = 0; i < data.rows(); ++i) {
    double t = index_of(data.y[i]) == k ? 1.0 : -1.0;
    loss += sample_weight[i] * std::max(0.0, 1.0 - t * m.score(k, data.row(i)));
  }
  double sq = 0;
  for (std::size_t j = 0; j < m.cols; ++j) sq += m.w[k * m.cols + j] * m.w[k * m.cols + j];
  return loss / n + lambda / (2 * n) * sq;
}

/// Keeps the best iterate seen for each class (subgradient steps are not
/// monotone).
inline LinearParams fit_linear_svm(const LabeledData& data, std::span<const double> sample_weight, double lambda,
                                   const SubgradientOptions& opts = {}) {
  LinearParams m(data.cols);
  m.present = data.present();
  std::size_t n_present = std::count(m.present.begin(), m.present.end(), true);
  if (n_present <= 1) return m;
  const auto n = static_cast<double>(data.rows());
  for (std::size_t k = 0; k < kOutcomeCount; ++k) {
    if (!m.present[k]) continue;
    LinearParams best = m;
    double best_obj = hinge_objective(data, sample_weight, m, k, lambda);
    std::vector<double> gw(m.cols);
    for (int it = 0; it < opts.iterations; ++it) {
      std::fill(gw.begin(), gw.end(), 0.0);
      double gb = 0;
      for (std::size_t j = 0; j < m.cols; ++j) gw[j] = lambda / n * m.w[k * m.cols + j];
      for (std::size_t i = 0; i < data.rows(); ++i) {
        auto x = data.row(i);
        double t = index_of(data.y[i]) == k ? 1.0 : -1.0;
        if (t * m.score(k, x) < 1.0) {
          for (std::size_t j = 0; j < m.cols; ++j) gw[j] -= sample_weight[i] * t * x[j] / n;
          gb -= sample_weight[i] * t / n;
        }
      }
      double eta = opts.initial_step / std::sqrt(static_cast<double>(it) + 1.0);
      for (std::size_t j = 0; j < m.cols; ++j) m.w[k * m.cols + j] -= eta * gw[j];
      m.b[k] -= eta * gb;
      double obj = hinge_objective(data, sample_weight, m, k, lambda);
      if (obj < best_obj) {
        best_obj = obj;
        best = m;
      }
    }
    m = best;
  }
  return m;
}

/// Degenerate probabilities: all mass on the highest-scoring present class.
inline Probabilities svm_probabilities(const LinearParams& m, std::span<const double> x) {
  std::size_t best = kOutcomeCount;
  double best_score = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < kOutcomeCount; ++k) {
    if (!m.present[k]) continue;
    double s = m.score(k, x);
    if (best == kOutcomeCount || s > best_score) {
      best = k;
      best_score = s;
    }
  }
  return one_hot(static_cast<OutcomeClass>(best));
}

}  // namespace xqa::ml
