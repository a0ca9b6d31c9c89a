#pragma once

#include <vector>

#include "mhfc/numerics.hpp"

namespace mhfc {

// C x N one-hot label matrix: each column has exactly one 1.
struct OneHotLabels {
  Matrix matrix;

  static OneHotLabels from_labels(const std::vector<int>& labels,
                                  int n_classes);
  int n_classes() const { return static_cast<int>(matrix.rows()); }
  int n_samples() const { return static_cast<int>(matrix.cols()); }
};

// Closed-form regularized linear-regression classifier.
struct RidgeClassifier {
  Matrix weights;  // C x dim
  double mu = 1.0;
  int n_classes = 0;
};

// W = Y X^T (X X^T + mu I)^-1, solved via Cholesky (never inverted).
RidgeClassifier ridge_fit(const Matrix& X, const OneHotLabels& Y, double mu);

// ||Y - W X||_F^2 + mu ||W||_F^2
double ridge_loss(const RidgeClassifier& clf, const Matrix& X,
                  const OneHotLabels& Y);

// Raw class scores W X (no normalization).
Matrix predict_scores(const RidgeClassifier& clf, const Matrix& X);

// Per column, the row index of the maximum score; ties -> lowest index.
std::vector<int> predict_labels(const Matrix& scores);

}  // namespace mhfc
