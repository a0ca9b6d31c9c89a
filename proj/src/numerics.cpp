#include "mhfc/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace mhfc {

void fix_sign(Eigen::Ref<Vector> v) {
  Eigen::Index best = 0;
  double mx = std::abs(v[0]);
  for (Eigen::Index i = 1; i < v.size(); ++i) {
    const double a = std::abs(v[i]);
    if (a > mx) {  // strict: magnitude ties keep the lowest index
      mx = a;
      best = i;
    }
  }
  if (v[best] < 0.0) v = -v;
}

Matrix solve_spd(const Matrix& A, const Matrix& B) {
  if (A.rows() != A.cols())
    throw DimensionMismatch("solve_spd: A must be square");
  if (B.cols() != A.rows())
    throw DimensionMismatch("solve_spd: B has " + std::to_string(B.cols()) +
                            " cols, A is " + std::to_string(A.rows()) + "x" +
                            std::to_string(A.cols()));
  Eigen::LLT<Matrix> llt(A);
  if (llt.info() != Eigen::Success)
    throw NotPositiveDefinite("solve_spd: Cholesky factorization failed");
  // X * A = B  <=>  A * X^T = B^T for symmetric A.
  return llt.solve(B.transpose()).transpose();
}

namespace {

std::pair<Vector, Matrix> eig_smallest_standard(const Matrix& A, int m) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(A);
  if (es.info() != Eigen::Success)
    throw EigensolverFailure("sym_eig_smallest: eigensolver did not converge");
  Vector vals = es.eigenvalues().head(m);
  Matrix vecs = es.eigenvectors().leftCols(m);
  for (int i = 0; i < m; ++i) fix_sign(vecs.col(i));
  return {std::move(vals), std::move(vecs)};
}

}  // namespace

std::pair<Vector, Matrix> sym_eig_smallest(const Matrix& A, int m) {
  if (A.rows() != A.cols())
    throw DimensionMismatch("sym_eig_smallest: A must be square");
  if (m < 1 || m > A.rows())
    throw DimensionMismatch("sym_eig_smallest: m out of range");
  return eig_smallest_standard(A, m);
}

std::pair<Vector, Matrix> sym_eig_smallest(const Matrix& A, const Vector& D,
                                           int m) {
  if (A.rows() != A.cols())
    throw DimensionMismatch("sym_eig_smallest: A must be square");
  if (D.size() != A.rows())
    throw DimensionMismatch("sym_eig_smallest: D length mismatch");
  if (m < 1 || m > A.rows())
    throw DimensionMismatch("sym_eig_smallest: m out of range");
  if ((D.array() <= 0.0).any())
    throw SingularMassMatrix("sym_eig_smallest: D has a nonpositive entry");
  // Reduce A v = lambda D v with diagonal D to the symmetric problem
  // (D^-1/2 A D^-1/2) u = lambda u, v = D^-1/2 u.
  const Vector dis = D.array().rsqrt();
  const Matrix B = dis.asDiagonal() * A * dis.asDiagonal();
  auto [vals, U] = eig_smallest_standard(B, m);
  Matrix V = dis.asDiagonal() * U;
  for (int i = 0; i < m; ++i) fix_sign(V.col(i));
  return {std::move(vals), std::move(V)};
}

SvdTop svd_top(const Matrix& X, int m) {
  if (m < 1 || m > std::min(X.rows(), X.cols()))
    throw DimensionMismatch("svd_top: m out of range");
  Eigen::JacobiSVD<Matrix> svd(X, Eigen::ComputeThinU | Eigen::ComputeThinV);
  SvdTop out;
  out.singular_values = svd.singularValues().head(m);
  out.U = svd.matrixU().leftCols(m);
  out.V = svd.matrixV().leftCols(m);
  for (int i = 0; i < m; ++i) {
    Eigen::Index best = 0;
    double mx = std::abs(out.U(0, i));
    for (Eigen::Index r = 1; r < out.U.rows(); ++r) {
      const double a = std::abs(out.U(r, i));
      if (a > mx) {
        mx = a;
        best = r;
      }
    }
    if (out.U(best, i) < 0.0) {  // flip the pair together so U S V^T is kept
      out.U.col(i) = -out.U.col(i);
      out.V.col(i) = -out.V.col(i);
    }
  }
  return out;
}

std::vector<std::vector<int>> knn_indices(const Matrix& points, int k) {
  const int n = static_cast<int>(points.rows());
  if (k < 1) throw TooFewPoints("knn: k must be >= 1");
  if (k >= n)
    throw TooFewPoints("knn: k = " + std::to_string(k) + " but only " +
                       std::to_string(n) + " points");
  std::vector<std::vector<int>> out(n);
  std::vector<std::pair<double, int>> cand(n - 1);
  for (int i = 0; i < n; ++i) {
    int c = 0;
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      cand[c++] = {(points.row(j) - points.row(i)).squaredNorm(), j};
    }
    std::partial_sort(cand.begin(), cand.begin() + k, cand.end());
    out[i].resize(k);
    for (int t = 0; t < k; ++t) out[i][t] = cand[t].second;
  }
  return out;
}

Matrix knn_graph(const Matrix& points, int k) {
  const int n = static_cast<int>(points.rows());
  const auto nbrs = knn_indices(points, k);
  Matrix A = Matrix::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j : nbrs[i]) {
      A(i, j) = 1.0;
      A(j, i) = 1.0;  // union symmetrization
    }
  const double eps = 1e-8;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (i != j) A(i, j) += eps;
  return A;
}

SimplexVector project_to_simplex(const Vector& v) {
  const Eigen::Index n = v.size();
  if (n == 0) throw EmptyVector("project_to_simplex: empty input");
  std::vector<double> u(v.data(), v.data() + n);
  std::sort(u.begin(), u.end(), std::greater<double>());
  double cum = 0.0;
  double theta = 0.0;
  int rho = 0;
  for (int i = 0; i < n; ++i) {
    cum += u[i];
    const double t = (cum - 1.0) / (i + 1);
    if (u[i] - t > 0.0) {
      rho = i + 1;
      theta = t;
    }
  }
  SimplexVector out;
  out.weights = (v.array() - theta).cwiseMax(0.0);
  (void)rho;
  return out;
}

}  // namespace mhfc
