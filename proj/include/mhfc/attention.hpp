#pragma once

#include <vector>

#include "mhfc/ridge.hpp"

namespace mhfc {

// Per-head ridge losses F^h plus the regularizer eta of the weight program
//   min_Omega  sum_h Omega^h F^h + eta ||Omega||_2^2   s.t. Omega on simplex.
struct HeadLossVector {
  std::vector<double> losses;
  double eta = 1.4;
};

// Fit a per-head ridge classifier on transformed support features and
// evaluate its loss: ridge_loss(ridge_fit(P_s, Y_s, mu), P_s, Y_s).
double head_loss(const Matrix& P_s, const OneHotLabels& Y_s, double mu);

// Exact minimizer of the weight program, computed as
// project_to_simplex(-F / (2 eta)). In the interior case this coincides
// with the closed form 1/H + (mean(F) - F^h) / (2 eta).
SimplexVector solve_weights(const HeadLossVector& hl);

}  // namespace mhfc
