#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cstring>

#include "mhfc/numerics.hpp"
#include "mhfc/random.hpp"
#include "oracles.hpp"

using mhfc::Matrix;
using mhfc::Vector;

namespace {

Matrix random_matrix(mhfc::RandomStream& rng, int r, int c) {
  Matrix m(r, c);
  for (int j = 0; j < c; ++j)
    for (int i = 0; i < r; ++i) m(i, j) = rng.gaussian();
  return m;
}

Matrix random_spd(mhfc::RandomStream& rng, int n) {
  Matrix B = random_matrix(rng, n, n);
  Matrix A = B * B.transpose();
  A.diagonal().array() += 0.5;
  return A;
}

}  // namespace

TEST_CASE("solve_spd solves X A = B") {
  SUBCASE("identity A returns B") {
    Matrix B(2, 3);
    B << 1, 2, 3, 4, 5, 6;
    Matrix X = mhfc::solve_spd(Matrix::Identity(3, 3), B);
    CHECK((X - B).norm() == doctest::Approx(0.0).epsilon(1e-14));
  }
  SUBCASE("diagonal A divides columns") {
    Matrix A = Vector::LinSpaced(3, 1.0, 3.0).asDiagonal();
    Matrix B = Matrix::Ones(1, 3);
    Matrix X = mhfc::solve_spd(A, B);
    CHECK(X(0, 0) == doctest::Approx(1.0));
    CHECK(X(0, 1) == doctest::Approx(0.5));
    CHECK(X(0, 2) == doctest::Approx(1.0 / 3.0));
  }
  SUBCASE("2x2 example") {
    Matrix A(2, 2);
    A << 4, 1, 1, 3;
    Matrix B(1, 2);
    B << 1, 2;
    // X = B A^-1, A^-1 = [[3,-1],[-1,4]]/11
    Matrix X = mhfc::solve_spd(A, B);
    CHECK(X(0, 0) == doctest::Approx(1.0 / 11.0).epsilon(1e-12));
    CHECK(X(0, 1) == doctest::Approx(7.0 / 11.0).epsilon(1e-12));
  }
  SUBCASE("random instances satisfy the normal equations") {
    mhfc::RandomStream rng(11);
    for (int t = 0; t < 50; ++t) {
      const int n = 2 + static_cast<int>(rng.below(8));
      const int m = 1 + static_cast<int>(rng.below(6));
      Matrix A = random_spd(rng, n);
      Matrix B = random_matrix(rng, m, n);
      Matrix X = mhfc::solve_spd(A, B);
      CHECK((X * A - B).norm() <= 1e-9 * (1.0 + B.norm()));
    }
  }
  SUBCASE("deterministic") {
    mhfc::RandomStream rng(5);
    Matrix A = random_spd(rng, 6);
    Matrix B = random_matrix(rng, 3, 6);
    Matrix X1 = mhfc::solve_spd(A, B);
    Matrix X2 = mhfc::solve_spd(A, B);
    CHECK(std::memcmp(X1.data(), X2.data(),
                      sizeof(double) * static_cast<std::size_t>(X1.size())) == 0);
  }
  SUBCASE("indefinite A throws") {
    Matrix A(2, 2);
    A << 1, 0, 0, -1;
    CHECK_THROWS_AS(mhfc::solve_spd(A, Matrix::Ones(1, 2)),
                    mhfc::NotPositiveDefinite);
  }
  SUBCASE("shape mismatch throws") {
    CHECK_THROWS_AS(mhfc::solve_spd(Matrix::Identity(3, 3), Matrix::Ones(2, 2)),
                    mhfc::DimensionMismatch);
    CHECK_THROWS_AS(mhfc::solve_spd(Matrix::Ones(2, 3), Matrix::Ones(2, 2)),
                    mhfc::DimensionMismatch);
  }
}

TEST_CASE("sym_eig_smallest: standard problem") {
  SUBCASE("diagonal matrix") {
    Matrix A = Matrix::Zero(3, 3);
    A.diagonal() << 3, 1, 2;
    auto [vals, vecs] = mhfc::sym_eig_smallest(A, 2);
    REQUIRE(vals.size() == 2);
    CHECK(vals(0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(vals(1) == doctest::Approx(2.0).epsilon(1e-12));
    // sign-fixed eigenvectors e2, e3
    CHECK(vecs(1, 0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(vecs(2, 1) == doctest::Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("2x2 graph Laplacian") {
    Matrix A(2, 2);
    A << 1, -1, -1, 1;
    auto [vals, vecs] = mhfc::sym_eig_smallest(A, 2);
    CHECK(vals(0) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(vals(1) == doctest::Approx(2.0).epsilon(1e-12));
    // constant vector first; second vector's tie is sign-fixed to index 0
    CHECK(vecs(0, 0) == doctest::Approx(vecs(1, 0)).epsilon(1e-12));
    CHECK(vecs(0, 1) > 0.0);
    CHECK(vecs(1, 1) == doctest::Approx(-vecs(0, 1)).epsilon(1e-12));
  }
  SUBCASE("eigen-residual property on random symmetric matrices") {
    mhfc::RandomStream rng(21);
    for (int t = 0; t < 20; ++t) {
      const int n = 3 + static_cast<int>(rng.below(8));
      Matrix B = random_matrix(rng, n, n);
      Matrix A = 0.5 * (B + B.transpose());
      const int m = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(n)));
      auto [vals, vecs] = mhfc::sym_eig_smallest(A, m);
      for (int i = 0; i < m; ++i) {
        CHECK((A * vecs.col(i) - vals(i) * vecs.col(i)).norm() <=
              1e-8 * (1.0 + A.norm()));
        if (i > 0) CHECK(vals(i) >= vals(i - 1));
      }
      CHECK((vecs.transpose() * vecs - Matrix::Identity(m, m)).norm() <= 1e-8);
    }
  }
}

TEST_CASE("sym_eig_smallest: generalized problem") {
  SUBCASE("two-node Laplacian with unit masses") {
    Matrix L(2, 2);
    L << 1, -1, -1, 1;
    Vector D = Vector::Ones(2);
    auto [vals, vecs] = mhfc::sym_eig_smallest(L, D, 2);
    CHECK(vals(0) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(vecs(0, 0) == doctest::Approx(vecs(1, 0)).epsilon(1e-12));
  }
  SUBCASE("D-orthonormal eigenvectors with ascending values") {
    mhfc::RandomStream rng(31);
    for (int t = 0; t < 20; ++t) {
      const int n = 3 + static_cast<int>(rng.below(8));
      Matrix B = random_matrix(rng, n, n);
      Matrix A = 0.5 * (B + B.transpose());
      Vector D(n);
      for (int i = 0; i < n; ++i) D(i) = 0.5 + rng.unit();
      auto [vals, vecs] = mhfc::sym_eig_smallest(A, D, n);
      Matrix gram = vecs.transpose() * D.asDiagonal() * vecs;
      CHECK((gram - Matrix::Identity(n, n)).norm() <= 1e-8);
      for (int i = 0; i < n; ++i) {
        CHECK((A * vecs.col(i) - vals(i) * D.cwiseProduct(vecs.col(i))).norm() <=
              1e-8 * (1.0 + A.norm()));
        if (i > 0) CHECK(vals(i) >= vals(i - 1));
      }
    }
  }
  SUBCASE("nonpositive mass throws") {
    Matrix A = Matrix::Identity(2, 2);
    Vector D(2);
    D << 1.0, 0.0;
    CHECK_THROWS_AS(mhfc::sym_eig_smallest(A, D, 1), mhfc::SingularMassMatrix);
    D << 1.0, -2.0;
    CHECK_THROWS_AS(mhfc::sym_eig_smallest(A, D, 1), mhfc::SingularMassMatrix);
  }
  SUBCASE("shape checks") {
    CHECK_THROWS_AS(mhfc::sym_eig_smallest(Matrix::Ones(2, 3), 1),
                    mhfc::DimensionMismatch);
    CHECK_THROWS_AS(
        mhfc::sym_eig_smallest(Matrix::Identity(3, 3), Vector::Ones(2), 1),
        mhfc::DimensionMismatch);
  }
}

TEST_CASE("fix_sign convention") {
  SUBCASE("largest magnitude becomes positive") {
    Vector v(3);
    v << 0.1, -0.9, 0.2;
    mhfc::fix_sign(v);
    CHECK(v(1) == doctest::Approx(0.9));
    CHECK(v(0) == doctest::Approx(-0.1));
  }
  SUBCASE("already positive is untouched") {
    Vector v(3);
    v << 0.1, 0.9, -0.2;
    Vector w = v;
    mhfc::fix_sign(v);
    CHECK((v - w).norm() == 0.0);
  }
  SUBCASE("magnitude tie resolved by lowest index") {
    Vector v(2);
    v << -0.5, 0.5;
    mhfc::fix_sign(v);
    CHECK(v(0) == doctest::Approx(0.5));
    CHECK(v(1) == doctest::Approx(-0.5));
  }
}

TEST_CASE("svd_top") {
  SUBCASE("diagonal matrix") {
    Matrix X = Matrix::Zero(2, 2);
    X.diagonal() << 5, 3;
    auto top = mhfc::svd_top(X, 1);
    CHECK(top.singular_values(0) == doctest::Approx(5.0).epsilon(1e-12));
    CHECK(top.U(0, 0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(top.U(1, 0)) <= 1e-12);
  }
  SUBCASE("rank-one matrix") {
    Vector a(3), b(2);
    a << 1, 2, 2;
    b << 3, 4;
    Matrix X = a * b.transpose();
    auto top = mhfc::svd_top(X, 2);
    CHECK(top.singular_values(0) == doctest::Approx(15.0).epsilon(1e-10));
    CHECK(top.singular_values(1) == doctest::Approx(0.0).epsilon(1e-10));
    // sign convention: largest-magnitude entry of u positive
    CHECK(top.U(1, 0) > 0.0);
  }
  SUBCASE("identity matrix") {
    auto top = mhfc::svd_top(Matrix::Identity(3, 3), 3);
    for (int i = 0; i < 3; ++i)
      CHECK(top.singular_values(i) == doctest::Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("truncation captures leading energy") {
    mhfc::RandomStream rng(41);
    Matrix X = random_matrix(rng, 6, 4);
    auto full = mhfc::svd_top(X, 4);
    Matrix recon = full.U * full.singular_values.asDiagonal() *
                   full.V.transpose();
    CHECK((X - recon).norm() <= 1e-9 * (1.0 + X.norm()));
    auto top2 = mhfc::svd_top(X, 2);
    Matrix recon2 = top2.U * top2.singular_values.asDiagonal() *
                    top2.V.transpose();
    const double tail = full.singular_values.tail(2).squaredNorm();
    CHECK((X - recon2).squaredNorm() == doctest::Approx(tail).epsilon(1e-8));
  }
  SUBCASE("U V pair flips together") {
    mhfc::RandomStream rng(43);
    Matrix X = random_matrix(rng, 5, 7);
    auto top = mhfc::svd_top(X, 3);
    for (int i = 0; i < 3; ++i) {
      CHECK((X * top.V.col(i) - top.singular_values(i) * top.U.col(i)).norm() <=
            1e-9 * (1.0 + X.norm()));
    }
  }
}

TEST_CASE("knn_graph") {
  constexpr double kEps = 1e-8;
  SUBCASE("three collinear points, k=1") {
    Matrix pts(3, 1);
    pts << 0.0, 1.0, 2.0;
    Matrix A = mhfc::knn_graph(pts, 1);
    CHECK(A(0, 1) == doctest::Approx(1.0 + kEps));
    CHECK(A(1, 2) == doctest::Approx(1.0 + kEps));  // union: 2 chose 1
    CHECK(A(0, 2) == doctest::Approx(kEps));
    CHECK(A(0, 0) == 0.0);
    CHECK((A - A.transpose()).norm() == 0.0);
  }
  SUBCASE("k = n-1 gives the complete graph") {
    mhfc::RandomStream rng(51);
    Matrix pts = random_matrix(rng, 5, 3);
    Matrix A = mhfc::knn_graph(pts, 4);
    for (int i = 0; i < 5; ++i)
      for (int j = 0; j < 5; ++j)
        CHECK(A(i, j) == doctest::Approx(i == j ? 0.0 : 1.0 + kEps));
  }
  SUBCASE("distance ties pick the lower index") {
    // point 0 sits exactly between points 1 and 2; both have a closer
    // partner of their own, so only 0's pick creates that edge.
    Matrix pts(5, 1);
    pts << 0.0, -10.0, 10.0, -10.5, 10.5;
    Matrix A = mhfc::knn_graph(pts, 1);
    CHECK(A(0, 1) == doctest::Approx(1.0 + kEps));  // tie 10 vs 10 -> index 1
    CHECK(A(0, 2) == doctest::Approx(kEps));
    CHECK(A(1, 3) == doctest::Approx(1.0 + kEps));
    CHECK(A(2, 4) == doctest::Approx(1.0 + kEps));
  }
  SUBCASE("duplicate points link to each other") {
    Matrix pts(3, 2);
    pts << 0, 0, 0, 0, 5, 5;
    Matrix A = mhfc::knn_graph(pts, 1);
    CHECK(A(0, 1) == doctest::Approx(1.0 + kEps));
    // point 2 ties between the duplicates and must pick the lower index
    CHECK(A(0, 2) == doctest::Approx(1.0 + kEps));
    CHECK(A(1, 2) == doctest::Approx(kEps));
  }
  SUBCASE("degenerate sizes throw") {
    Matrix pts = Matrix::Zero(3, 2);
    CHECK_THROWS_AS(mhfc::knn_graph(pts, 3), mhfc::TooFewPoints);
    CHECK_THROWS_AS(mhfc::knn_graph(pts, 0), mhfc::TooFewPoints);
  }
}

TEST_CASE("knn_indices") {
  Matrix pts(4, 1);
  pts << 0.0, 1.0, 3.0, 7.0;
  auto nn = mhfc::knn_indices(pts, 2);
  REQUIRE(nn.size() == 4);
  CHECK(nn[0] == std::vector<int>{1, 2});
  CHECK(nn[1] == std::vector<int>{0, 2});
  CHECK(nn[2] == std::vector<int>{1, 0});
  CHECK(nn[3] == std::vector<int>{2, 1});
}

TEST_CASE("project_to_simplex") {
  SUBCASE("points already on the simplex are fixed") {
    Vector v(2);
    v << 0.3, 0.7;
    auto w = mhfc::project_to_simplex(v);
    CHECK(w.weights(0) == doctest::Approx(0.3).epsilon(1e-14));
    CHECK(w.weights(1) == doctest::Approx(0.7).epsilon(1e-14));
    CHECK(w.valid());
  }
  SUBCASE("interior projection subtracts the mean excess") {
    Vector v(2);
    v << 0.9, 0.5;
    auto w = mhfc::project_to_simplex(v);
    CHECK(w.weights(0) == doctest::Approx(0.7).epsilon(1e-14));
    CHECK(w.weights(1) == doctest::Approx(0.3).epsilon(1e-14));
  }
  SUBCASE("far-out point lands on a vertex") {
    Vector v(2);
    v << 1.2, -0.5;
    auto w = mhfc::project_to_simplex(v);
    CHECK(w.weights(0) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(w.weights(1) == doctest::Approx(0.0).epsilon(1e-14));
  }
  SUBCASE("single element maps to 1") {
    Vector v(1);
    v << -3.7;
    auto w = mhfc::project_to_simplex(v);
    CHECK(w.weights(0) == doctest::Approx(1.0));
  }
  SUBCASE("translation along the all-ones direction is irrelevant") {
    mhfc::RandomStream rng(61);
    for (int t = 0; t < 20; ++t) {
      Vector v = random_matrix(rng, 4, 1);
      Vector shifted = (v.array() + (rng.unit() * 10.0 - 5.0)).matrix();
      auto a = mhfc::project_to_simplex(v);
      auto b = mhfc::project_to_simplex(shifted);
      CHECK((a.weights - b.weights).cwiseAbs().maxCoeff() <= 1e-12);
    }
  }
  SUBCASE("order preserving") {
    mhfc::RandomStream rng(62);
    for (int t = 0; t < 20; ++t) {
      Vector v = random_matrix(rng, 5, 1);
      auto w = mhfc::project_to_simplex(v);
      for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 5; ++j)
          if (v(i) > v(j)) CHECK(w.weights(i) >= w.weights(j) - 1e-14);
    }
  }
  SUBCASE("matches a brute-force simplex minimizer") {
    mhfc::RandomStream rng(63);
    for (int t = 0; t < 100; ++t) {
      const int H = 2 + static_cast<int>(rng.below(5));
      Vector v = 3.0 * random_matrix(rng, H, 1);
      auto w = mhfc::project_to_simplex(v);
      auto objective = [&](const Vector& x) { return (x - v).squaredNorm(); };
      auto [best_val, best_w] = oracles::simplex_min(objective, H);
      CHECK(objective(w.weights) <= best_val + 1e-9);
      CHECK(w.valid());
    }
  }
  SUBCASE("empty input throws") {
    CHECK_THROWS_AS(mhfc::project_to_simplex(Vector()), mhfc::EmptyVector);
  }
}

TEST_CASE("SimplexVector::valid") {
  mhfc::SimplexVector s;
  CHECK_FALSE(s.valid());
  s.weights = Vector::Constant(4, 0.25);
  CHECK(s.valid());
  s.weights(0) = -0.01;
  s.weights(1) = 0.51;
  CHECK_FALSE(s.valid());
  s.weights = Vector::Constant(2, 0.6);
  CHECK_FALSE(s.valid());
}

TEST_CASE("RandomStream basics") {
  SUBCASE("deterministic and independent derivations") {
    mhfc::RandomStream a = mhfc::RandomStream::derived(42, 7);
    mhfc::RandomStream b = mhfc::RandomStream::derived(42, 7);
    mhfc::RandomStream c = mhfc::RandomStream::derived(42, 8);
    bool all_equal = true, any_diff = false;
    for (int i = 0; i < 64; ++i) {
      const auto x = a.next_u64();
      all_equal = all_equal && (x == b.next_u64());
      any_diff = any_diff || (x != c.next_u64());
    }
    CHECK(all_equal);
    CHECK(any_diff);
  }
  SUBCASE("below stays in range and covers it") {
    mhfc::RandomStream rng(3);
    std::vector<int> seen(7, 0);
    for (int i = 0; i < 2000; ++i) {
      const auto v = rng.below(7);
      REQUIRE(v < 7);
      ++seen[static_cast<std::size_t>(v)];
    }
    for (int s : seen) CHECK(s > 0);
  }
  SUBCASE("unit in [0,1), gaussian has sane moments") {
    mhfc::RandomStream rng(4);
    double sum = 0.0, sum2 = 0.0;
    for (int i = 0; i < 20000; ++i) {
      const double u = rng.unit();
      REQUIRE(u >= 0.0);
      REQUIRE(u < 1.0);
      const double g = rng.gaussian();
      sum += g;
      sum2 += g * g;
    }
    CHECK(std::abs(sum / 20000.0) < 0.05);
    CHECK(std::abs(sum2 / 20000.0 - 1.0) < 0.05);
  }
  SUBCASE("partial_shuffle keeps a permutation") {
    mhfc::RandomStream rng(5);
    std::vector<int> v{0, 1, 2, 3, 4, 5, 6, 7};
    rng.partial_shuffle(v, 5);
    std::vector<int> sorted = v;
    std::sort(sorted.begin(), sorted.end());
    CHECK(sorted == std::vector<int>{0, 1, 2, 3, 4, 5, 6, 7});
  }
}
