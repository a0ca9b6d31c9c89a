#include "mhfc/attention.hpp"

namespace mhfc {

double head_loss(const Matrix& P_s, const OneHotLabels& Y_s, double mu) {
  const RidgeClassifier clf = ridge_fit(P_s, Y_s, mu);
  return ridge_loss(clf, P_s, Y_s);
}

SimplexVector solve_weights(const HeadLossVector& hl) {
  if (hl.losses.empty()) throw EmptyVector("solve_weights: no head losses");
  if (hl.eta <= 0.0) throw InvalidConfig("solve_weights: eta must be > 0");
  Vector v(static_cast<Eigen::Index>(hl.losses.size()));
  for (std::size_t h = 0; h < hl.losses.size(); ++h)
    v[static_cast<Eigen::Index>(h)] = -hl.losses[h] / (2.0 * hl.eta);
  return project_to_simplex(v);
}

}  // namespace mhfc
