#include "mhfc/subspace.hpp"

#include <algorithm>
#include <cmath>

namespace mhfc {

Method method_from_string(const std::string& s) {
  if (s == "none") return Method::None;
  if (s == "pca") return Method::PCA;
  if (s == "lle") return Method::LLE;
  if (s == "le") return Method::LE;
  throw InvalidConfig("unknown subspace method: " + s);
}

std::string method_to_string(Method m) {
  switch (m) {
    case Method::None: return "none";
    case Method::PCA: return "pca";
    case Method::LLE: return "lle";
    case Method::LE: return "le";
  }
  return "?";
}

Matrix expand_heads(const std::vector<HeadFeatures>& heads, int H) {
  if (static_cast<int>(heads.size()) != H || H < 1)
    throw HeadCountMismatch("expand_heads: got " +
                            std::to_string(heads.size()) + " heads, expected " +
                            std::to_string(H));
  const Eigen::Index dim1 = heads[0].matrix.rows();
  const Eigen::Index N = heads[0].matrix.cols();
  for (int h = 0; h < H; ++h) {
    if (heads[h].head_index != h + 1)
      throw HeadCountMismatch("expand_heads: heads must be ordered by index");
    if (heads[h].matrix.rows() != dim1 || heads[h].matrix.cols() != N)
      throw HeadDimMismatch("expand_heads: head " + std::to_string(h + 1) +
                            " shape differs");
  }
  Matrix out(dim1, N * H);
  for (int h = 0; h < H; ++h) out.middleCols(h * N, N) = heads[h].matrix;
  return out;
}

std::vector<Matrix> split_heads(const Matrix& X, int H, int N) {
  if (H < 1 || N < 0 || X.cols() != static_cast<Eigen::Index>(H) * N)
    throw DimensionMismatch("split_heads: expected " + std::to_string(H) +
                            "*" + std::to_string(N) + " columns, got " +
                            std::to_string(X.cols()));
  std::vector<Matrix> out;
  out.reserve(static_cast<std::size_t>(H));
  for (int h = 0; h < H; ++h) out.push_back(X.middleCols(h * N, N));
  return out;
}

namespace {

constexpr double kEigResidualTol = 1e-6;

std::pair<SubspaceModel, Matrix> fit_pca(const Matrix& X_exp, int dim2) {
  SubspaceModel model;
  model.method = Method::PCA;
  model.dim2 = dim2;
  model.mean = X_exp.rowwise().mean();
  const Matrix Xc = X_exp.colwise() - model.mean;
  const SvdTop svd = svd_top(Xc, dim2);
  model.components = svd.U;
  model.embedding = svd.U.transpose() * Xc;
  return {model, model.embedding};
}

std::pair<SubspaceModel, Matrix> fit_le(const Matrix& X_exp, int dim2,
                                        int k) {
  const Eigen::Index M = X_exp.cols();
  const Matrix A = knn_graph(X_exp.transpose(), k);
  const Vector deg = A.rowwise().sum();
  Matrix L = -A;
  L.diagonal() = deg;
  // dim2+1 smallest pairs of L v = lambda D v; the first is the trivial
  // constant eigenvector, dropped.
  auto [vals, vecs] = sym_eig_smallest(L, deg, dim2 + 1);
  SubspaceModel model;
  model.method = Method::LE;
  model.dim2 = dim2;
  model.k_neighbors = k;
  model.eigenvalues = vals.tail(dim2);
  model.embedding.resize(dim2, M);
  model.residuals.resize(dim2);
  for (int i = 0; i < dim2; ++i) {
    const Vector v = vecs.col(i + 1);
    const double lambda = vals[i + 1];
    const double res = (L * v - lambda * deg.cwiseProduct(v)).norm();
    if (res > kEigResidualTol)
      throw EigensolverFailure("LE: generalized eigenpair residual " +
                               std::to_string(res) + " exceeds tolerance");
    model.residuals[i] = res;
    model.embedding.row(i) = v.transpose();
  }
  return {model, model.embedding};
}

std::pair<SubspaceModel, Matrix> fit_lle(const Matrix& X_exp, int dim2,
                                         int k) {
  const int M = static_cast<int>(X_exp.cols());
  const auto nbrs = knn_indices(X_exp.transpose(), k);
  // Reconstruction weights per point from its k neighbors, with local-Gram
  // regularization 1e-3 * trace (1e-3 absolute when the trace vanishes).
  Matrix W = Matrix::Zero(M, M);
  for (int i = 0; i < M; ++i) {
    Matrix Z(static_cast<Eigen::Index>(X_exp.rows()), k);
    for (int t = 0; t < k; ++t)
      Z.col(t) = X_exp.col(nbrs[i][t]) - X_exp.col(i);
    Matrix G = Z.transpose() * Z;
    const double tr = G.trace();
    G.diagonal().array() += (tr > 0.0 ? 1e-3 * tr : 1e-3);
    Vector w = G.ldlt().solve(Vector::Ones(k));
    w /= w.sum();
    for (int t = 0; t < k; ++t) W(i, nbrs[i][t]) = w[t];
  }
  Matrix IW = Matrix::Identity(M, M) - W;
  Matrix Mmat = IW.transpose() * IW;
  Mmat = 0.5 * (Mmat + Mmat.transpose());  // enforce exact symmetry
  auto [vals, vecs] = sym_eig_smallest(Mmat, dim2 + 1);
  SubspaceModel model;
  model.method = Method::LLE;
  model.dim2 = dim2;
  model.k_neighbors = k;
  model.eigenvalues = vals.tail(dim2);
  model.embedding.resize(dim2, M);
  model.residuals.resize(dim2);
  for (int i = 0; i < dim2; ++i) {
    const Vector v = vecs.col(i + 1);
    const double res = (Mmat * v - vals[i + 1] * v).norm();
    if (res > kEigResidualTol)
      throw EigensolverFailure("LLE: eigenpair residual " +
                               std::to_string(res) + " exceeds tolerance");
    model.residuals[i] = res;
    model.embedding.row(i) = v.transpose();
  }
  return {model, model.embedding};
}

}  // namespace

std::pair<SubspaceModel, Matrix> fit_transform(const Matrix& X_exp,
                                               Method method, int dim2,
                                               int k_neighbors) {
  const Eigen::Index M = X_exp.cols();
  if (M < 1) throw DimensionMismatch("fit_transform: no columns");
  if (method == Method::None) {
    SubspaceModel model;
    model.method = Method::None;
    model.dim2 = static_cast<int>(X_exp.rows());
    model.embedding = X_exp;
    return {model, X_exp};
  }
  if (dim2 < 1 || dim2 >= X_exp.rows() || dim2 >= M)
    throw InvalidConfig("fit_transform: need 1 <= dim2 < dim1 and dim2 < "
                        "number of expanded samples");
  if (method == Method::PCA) return fit_pca(X_exp, dim2);
  int k = k_neighbors;
  if (k == 0) k = std::max<int>(2, static_cast<int>(M / 10));
  if (k >= M)
    throw TooFewPoints("fit_transform: k_neighbors = " + std::to_string(k) +
                       " but only " + std::to_string(M) + " expanded samples");
  if (method == Method::LE) return fit_le(X_exp, dim2, k);
  return fit_lle(X_exp, dim2, k);
}

}  // namespace mhfc
