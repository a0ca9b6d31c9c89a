#include "mhfc/ridge.hpp"

#include <string>

namespace mhfc {

OneHotLabels OneHotLabels::from_labels(const std::vector<int>& labels,
                                       int n_classes) {
  if (n_classes < 1) throw InvalidConfig("one-hot: n_classes must be >= 1");
  OneHotLabels out;
  out.matrix = Matrix::Zero(n_classes, static_cast<Eigen::Index>(labels.size()));
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const int c = labels[i];
    if (c < 0 || c >= n_classes)
      throw InvalidConfig("one-hot: label " + std::to_string(c) +
                          " outside [0, " + std::to_string(n_classes) + ")");
    out.matrix(c, static_cast<Eigen::Index>(i)) = 1.0;
  }
  return out;
}

RidgeClassifier ridge_fit(const Matrix& X, const OneHotLabels& Y, double mu) {
  if (mu <= 0.0) throw NonPositiveMu("ridge_fit: mu must be > 0");
  if (X.cols() != Y.matrix.cols())
    throw DimensionMismatch("ridge_fit: X has " + std::to_string(X.cols()) +
                            " columns, Y has " +
                            std::to_string(Y.matrix.cols()));
  if (X.cols() < 1) throw DimensionMismatch("ridge_fit: no samples");
  const Eigen::Index dim = X.rows();
  Matrix G = X * X.transpose();
  G.diagonal().array() += mu;
  RidgeClassifier clf;
  clf.weights = solve_spd(G, Y.matrix * X.transpose());
  clf.mu = mu;
  clf.n_classes = static_cast<int>(Y.matrix.rows());
  (void)dim;
  return clf;
}

double ridge_loss(const RidgeClassifier& clf, const Matrix& X,
                  const OneHotLabels& Y) {
  if (X.rows() != clf.weights.cols())
    throw DimensionMismatch("ridge_loss: feature dim mismatch");
  if (X.cols() != Y.matrix.cols() || Y.matrix.rows() != clf.weights.rows())
    throw DimensionMismatch("ridge_loss: label shape mismatch");
  return (Y.matrix - clf.weights * X).squaredNorm() +
         clf.mu * clf.weights.squaredNorm();
}

Matrix predict_scores(const RidgeClassifier& clf, const Matrix& X) {
  if (X.rows() != clf.weights.cols())
    throw DimensionMismatch("predict_scores: feature dim mismatch");
  return clf.weights * X;
}

std::vector<int> predict_labels(const Matrix& scores) {
  std::vector<int> out(static_cast<std::size_t>(scores.cols()));
  for (Eigen::Index j = 0; j < scores.cols(); ++j) {
    Eigen::Index best = 0;
    double mx = scores(0, j);
    for (Eigen::Index c = 1; c < scores.rows(); ++c)
      if (scores(c, j) > mx) {  // strict: ties keep the lowest class index
        mx = scores(c, j);
        best = c;
      }
    out[static_cast<std::size_t>(j)] = static_cast<int>(best);
  }
  return out;
}

}  // namespace mhfc
