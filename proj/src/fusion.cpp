#include "mhfc/fusion.hpp"

#include <string>

namespace mhfc {

CollaborativeFeatures collaborate(const std::vector<Matrix>& P_heads,
                                  const SimplexVector& omega) {
  const int H = static_cast<int>(P_heads.size());
  if (H < 1 || omega.weights.size() != H)
    throw HeadCountMismatch("collaborate: " + std::to_string(H) +
                            " heads vs " + std::to_string(omega.weights.size()) +
                            " weights");
  const Eigen::Index dim2 = P_heads[0].rows();
  const Eigen::Index N = P_heads[0].cols();
  for (const Matrix& P : P_heads)
    if (P.rows() != dim2 || P.cols() != N)
      throw DimensionMismatch("collaborate: head shapes differ");
  CollaborativeFeatures out;
  out.head_weights = omega;
  out.matrix.resize(dim2 * H, N);
  for (int h = 0; h < H; ++h)
    out.matrix.middleRows(h * dim2, dim2) = omega.weights[h] * P_heads[h];
  return out;
}

RidgeClassifier fit_collaborative(const CollaborativeFeatures& Z_s,
                                  const OneHotLabels& Y_s, double mu) {
  return ridge_fit(Z_s.matrix, Y_s, mu);
}

std::pair<Matrix, std::vector<int>> classify(const RidgeClassifier& clf,
                                             const CollaborativeFeatures& Z) {
  Matrix scores = predict_scores(clf, Z.matrix);
  std::vector<int> labels = predict_labels(scores);
  return {std::move(scores), std::move(labels)};
}

}  // namespace mhfc
