#pragma once

#include <Eigen/Dense>
#include <utility>
#include <vector>

#include "mhfc/errors.hpp"

namespace mhfc {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Per-head combination weights: nonnegative, summing to 1 within 1e-9.
struct SimplexVector {
  Vector weights;

  bool valid(double tol = 1e-9) const {
    if (weights.size() == 0) return false;
    if ((weights.array() < 0.0).any()) return false;
    return std::abs(weights.sum() - 1.0) <= tol;
  }
};

// Flips v so its largest-magnitude entry is positive; magnitude ties keep
// the lowest index. Shared determinism convention for all spectral output.
void fix_sign(Eigen::Ref<Vector> v);

// Solves X * A = B for X, with A symmetric positive definite (n x n) and
// B (m x n). Cholesky-based; never forms an inverse.
Matrix solve_spd(const Matrix& A, const Matrix& B);

// m smallest eigenpairs of the symmetric problem A v = lambda v, or the
// generalized problem A v = lambda D v when a diagonal D (as a vector of
// its diagonal entries, all > 0) is supplied. Eigenvalues ascending;
// eigenvectors are the columns, D-orthonormal, sign-fixed.
std::pair<Vector, Matrix> sym_eig_smallest(const Matrix& A, int m);
std::pair<Vector, Matrix> sym_eig_smallest(const Matrix& A, const Vector& D,
                                           int m);

// Top-m singular triplets of X: (singular values descending, left vectors
// as columns of U, right vectors as columns of V). Sign fixed on each left
// vector; the paired right vector flips with it.
struct SvdTop {
  Vector singular_values;
  Matrix U;
  Matrix V;
};
SvdTop svd_top(const Matrix& X, int m);

// Symmetric kNN adjacency over points given one per row. Binary weights,
// union symmetrization, distance ties broken by lower point index, self
// excluded; then eps = 1e-8 is added to every off-diagonal entry so the
// graph is connected.
Matrix knn_graph(const Matrix& points, int k);

// For each row, the indices of its k nearest other rows, nearest first,
// distance ties broken by lower index. Shared by knn_graph and LLE.
std::vector<std::vector<int>> knn_indices(const Matrix& points, int k);

// Euclidean projection onto the probability simplex (sort-and-threshold).
SimplexVector project_to_simplex(const Vector& v);

}  // namespace mhfc
