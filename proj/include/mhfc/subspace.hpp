#pragma once

#include <string>
#include <vector>

#include "mhfc/numerics.hpp"

namespace mhfc {

// One feature extractor's view of the samples. Columns are samples; all
// heads of a dataset/episode share dim and sample order.
struct HeadFeatures {
  int head_index = 1;  // 1-based
  Matrix matrix;       // dim1 x N
};

enum class Method { None, PCA, LLE, LE };

Method method_from_string(const std::string& s);  // InvalidConfig on unknown
std::string method_to_string(Method m);

// A fitted dimension-reduction transform over the head-expanded matrix.
// PCA keeps mean + components; LE/LLE are fit-transform only, so their
// metadata is the embedding itself plus the retained eigenpairs' values
// and residuals (for independent verification).
struct SubspaceModel {
  Method method = Method::LE;
  int dim2 = 0;
  int k_neighbors = 0;  // resolved value actually used (LE/LLE)
  Vector mean;          // PCA
  Matrix components;    // PCA, dim1 x dim2
  Matrix embedding;     // dim2 x M
  Vector eigenvalues;   // LE/LLE retained pairs
  Vector residuals;     // LE:  ||L v - lambda D v||_2 per retained pair
                        // LLE: ||M v - lambda v||_2
};

// Horizontal concatenation [X^1 | X^2 | ... | X^H]: H heads of the same
// sample treated as H samples. Column (h-1)*N + n is sample n of head h.
Matrix expand_heads(const std::vector<HeadFeatures>& heads, int H);

// Fits `method` on the columns of X_exp and returns the model plus the
// dim2 x M embedding. k_neighbors = 0 means auto: max(2, M/10).
std::pair<SubspaceModel, Matrix> fit_transform(const Matrix& X_exp,
                                               Method method, int dim2,
                                               int k_neighbors);

// Inverse of expand_heads' column layout.
std::vector<Matrix> split_heads(const Matrix& X, int H, int N);

}  // namespace mhfc
