#pragma once

#include "puorl/errors.hpp"
#include "puorl/nn/mlp.hpp"

namespace puorl::nn {

// Loss helpers return the scalar value (accumulated in double) and, when a
// grad output is supplied, the gradient w.r.t. the predictions. Templated on
// scalar so the finite-difference oracles can run the same code in double.

template <typename S>
double mse_loss(const MatT<S>& pred, const MatT<S>& target,
                MatT<S>* grad = nullptr) {
  if (pred.rows() != target.rows() || pred.cols() != target.cols()) {
    throw ShapeError("mse: prediction/target shape mismatch");
  }
  const auto n = static_cast<double>(pred.size());
  if (n == 0) throw DataError("mse: empty batch");
  const MatT<S> diff = pred - target;
  const double value = diff.template cast<double>().array().square().sum() / n;
  if (grad != nullptr) {
    *grad = diff * static_cast<S>(2.0 / n);
  }
  return value;
}

// Binary cross-entropy on probabilities with +/-1 labels, mean over rows.
// Probabilities are clamped away from {0,1} before the logs.
template <typename S>
double bce_on_probs(const VecT<S>& probs, const VecT<S>& labels,
                    VecT<S>* grad = nullptr) {
  if (probs.size() != labels.size()) {
    throw ShapeError("bce: probs/labels length mismatch");
  }
  const auto n = probs.size();
  if (n == 0) throw DataError("bce: empty batch");
  constexpr double kEps = 1e-7;
  double sum = 0.0;
  if (grad != nullptr) grad->resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    double p = static_cast<double>(probs[i]);
    p = std::min(1.0 - kEps, std::max(kEps, p));
    if (labels[i] > S(0)) {
      sum += -std::log(p);
      if (grad != nullptr) (*grad)[i] = static_cast<S>(-1.0 / (p * n));
    } else {
      sum += -std::log(1.0 - p);
      if (grad != nullptr) (*grad)[i] = static_cast<S>(1.0 / ((1.0 - p) * n));
    }
  }
  return sum / static_cast<double>(n);
}

// Asymmetric squared loss |tau - 1(u < 0)| * u^2, mean over entries.
template <typename S>
double expectile_loss(const VecT<S>& residuals, double tau,
                      VecT<S>* grad = nullptr) {
  const auto n = residuals.size();
  if (n == 0) throw DataError("expectile: empty batch");
  if (!(tau > 0.0 && tau < 1.0)) {
    throw ConfigError("expectile: tau must be in (0,1)");
  }
  double sum = 0.0;
  if (grad != nullptr) grad->resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double u = static_cast<double>(residuals[i]);
    const double w = (u < 0.0) ? (1.0 - tau) : tau;
    sum += w * u * u;
    if (grad != nullptr) {
      (*grad)[i] = static_cast<S>(2.0 * w * u / static_cast<double>(n));
    }
  }
  return sum / static_cast<double>(n);
}

// Row-wise softmax cross-entropy against integer class labels; mean over
// rows. grad, if supplied, is (softmax - onehot)/rows w.r.t. the logits.
template <typename S>
double softmax_ce(const MatT<S>& logits, const std::vector<int>& labels,
                  MatT<S>* grad = nullptr) {
  const auto rows = logits.rows();
  if (rows == 0) throw DataError("softmax_ce: empty batch");
  if (static_cast<std::size_t>(rows) != labels.size()) {
    throw ShapeError("softmax_ce: logits/labels row mismatch");
  }
  double sum = 0.0;
  if (grad != nullptr) grad->resize(rows, logits.cols());
  for (Eigen::Index i = 0; i < rows; ++i) {
    const double mx = static_cast<double>(logits.row(i).maxCoeff());
    double z = 0.0;
    for (Eigen::Index j = 0; j < logits.cols(); ++j) {
      z += std::exp(static_cast<double>(logits(i, j)) - mx);
    }
    const int y = labels[static_cast<std::size_t>(i)];
    if (y < 0 || y >= logits.cols()) {
      throw ShapeError("softmax_ce: label out of range");
    }
    const double logp =
        static_cast<double>(logits(i, y)) - mx - std::log(z);
    sum += -logp;
    if (grad != nullptr) {
      for (Eigen::Index j = 0; j < logits.cols(); ++j) {
        const double p =
            std::exp(static_cast<double>(logits(i, j)) - mx) / z;
        (*grad)(i, j) = static_cast<S>(
            (p - (j == y ? 1.0 : 0.0)) / static_cast<double>(rows));
      }
    }
  }
  return sum / static_cast<double>(rows);
}

}  // namespace puorl::nn
