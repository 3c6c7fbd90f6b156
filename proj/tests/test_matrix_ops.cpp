#include <random>

#include "doctest.h"
#include "ssid/errors.hpp"
#include "ssid/matrix_ops.hpp"

using namespace ssid;

TEST_SUITE("matrix_ops") {

TEST_CASE("vec stacks columns") {
  MatrixXd m(2, 2);
  m << 1, 3, 2, 4;
  VectorXd v = vec(m);
  CHECK(v(0) == 1);
  CHECK(v(1) == 2);
  CHECK(v(2) == 3);
  CHECK(v(3) == 4);
  CHECK(vec(MatrixXd::Zero(3, 2)).isZero());
}

TEST_CASE("vec of outer product equals kron of vectors") {
  std::mt19937 gen(7);
  std::normal_distribution<double> d;
  VectorXd y(4);
  for (int i = 0; i < 4; ++i) y(i) = d(gen);
  MatrixXd outer = y * y.transpose();
  VectorXd lhs = vec(outer);
  VectorXd rhs = kron(MatrixXd(y), MatrixXd(y.transpose())).reshaped();
  // vec(y yᵀ) = y ⊗ y
  MatrixXd ykron = kron(MatrixXd(y), MatrixXd::Identity(1, 1));
  VectorXd yy(16);
  for (int i = 0; i < 4; ++i) yy.segment(i * 4, 4) = y(i) * y;
  CHECK((lhs - yy).cwiseAbs().maxCoeff() < 1e-15);
  (void)rhs;
}

TEST_CASE("kron identities") {
  CHECK((kron(MatrixXd::Identity(2, 2), MatrixXd::Identity(3, 3)) -
         MatrixXd::Identity(6, 6))
            .cwiseAbs()
            .maxCoeff() == 0.0);
  MatrixXd b(2, 3);
  b << 1, 2, 3, 4, 5, 6;
  CHECK((kron(MatrixXd::Constant(1, 1, 2.0), b) - 2.0 * b).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("kron mixed product and vec bridge") {
  std::mt19937 gen(3);
  std::normal_distribution<double> d;
  auto randn = [&](int r, int c) {
    MatrixXd m(r, c);
    for (int i = 0; i < r; ++i)
      for (int j = 0; j < c; ++j) m(i, j) = d(gen);
    return m;
  };
  for (int rep = 0; rep < 5; ++rep) {
    MatrixXd a = randn(2, 2), b = randn(2, 2), c = randn(2, 2), e = randn(2, 2);
    MatrixXd lhs = kron(a, b) * kron(c, e);
    MatrixXd rhs = kron(MatrixXd(a * c), MatrixXd(b * e));
    CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-12);

    // (A ⊗ B) vec(X) = vec(B X Aᵀ)
    MatrixXd x = randn(2, 2);
    VectorXd v1 = kron(a, b) * vec(x);
    VectorXd v2 = vec(MatrixXd(b * x * a.transpose()));
    CHECK((v1 - v2).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("commutation matrix properties") {
  CHECK(commutation_matrix(1, 1)(0, 0) == 1.0);
  // K_{2,2} maps vec(M) to indices (1,3,2,4) of vec(M), 1-based.
  MatrixXd k22 = commutation_matrix(2, 2);
  MatrixXd m(2, 2);
  m << 1, 2, 3, 4;  // vec = [1,3,2,4]
  VectorXd km = k22 * vec(m);
  CHECK(km(0) == 1);
  CHECK(km(1) == 2);
  CHECK(km(2) == 3);
  CHECK(km(3) == 4);  // = vec(Mᵀ)

  std::mt19937 gen(11);
  std::normal_distribution<double> d;
  for (int p = 1; p <= 6; ++p)
    for (int q = 1; q <= 6; ++q) {
      MatrixXd mm(p, q);
      for (int i = 0; i < p; ++i)
        for (int j = 0; j < q; ++j) mm(i, j) = d(gen);
      MatrixXd kpq = commutation_matrix(p, q);
      CHECK((kpq * vec(mm) - vec(MatrixXd(mm.transpose()))).cwiseAbs().maxCoeff() == 0.0);
      CHECK((kpq * commutation_matrix(q, p) - MatrixXd::Identity(p * q, p * q))
                .cwiseAbs()
                .maxCoeff() == 0.0);
      CHECK((kpq.transpose() - commutation_matrix(q, p)).cwiseAbs().maxCoeff() == 0.0);
    }
}

TEST_CASE("symmetric sqrt clips and squares back") {
  MatrixXd q(2, 2);
  q << 0.075, 0.037, 0.037, 0.068;
  MatrixXd r = symmetric_sqrt(q);
  CHECK((r * r - q).cwiseAbs().maxCoeff() < 1e-14);
  CHECK(asymmetry(r) < 1e-14);

  MatrixXd z = MatrixXd::Zero(3, 3);
  CHECK(symmetric_sqrt(z).isZero());
  CHECK_THROWS_AS(require_symmetric((MatrixXd(2, 2) << 0, 1, 0, 0).finished(), "t"),
                  NonSymmetricInput);
}

TEST_CASE("spectral radius and stability") {
  MatrixXd a(2, 2);
  a << 0.874, 0.8, -0.2, 0.96;
  CHECK(spectral_radius(a) == doctest::Approx(0.99951988).epsilon(1e-6));
  CHECK(is_stable(a));
  CHECK(!is_stable(MatrixXd::Identity(2, 2)));
}

}  // TEST_SUITE
