#pragma once

#include <utility>
#include <vector>

#include "mhfc/ridge.hpp"

namespace mhfc {

// Weighted concatenation Z = vstack(Omega^h P^h): dim3 = H * dim2 rows.
struct CollaborativeFeatures {
  Matrix matrix;              // dim3 x N
  SimplexVector head_weights;  // the Omega used to build it
};

CollaborativeFeatures collaborate(const std::vector<Matrix>& P_heads,
                                  const SimplexVector& omega);

// Ridge fit on the collaborative support features (the final classifier).
RidgeClassifier fit_collaborative(const CollaborativeFeatures& Z_s,
                                  const OneHotLabels& Y_s, double mu);

// Scores and argmax labels for collaborative features.
std::pair<Matrix, std::vector<int>> classify(const RidgeClassifier& clf,
                                             const CollaborativeFeatures& Z);

}  // namespace mhfc
