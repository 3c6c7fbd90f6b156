#include <random>

#include "doctest.h"
#include "ssid/errors.hpp"
#include "ssid/lyapunov.hpp"
#include "support/test_models.hpp"

using namespace ssid;

namespace {
MatrixXd randn(std::mt19937& gen, int r, int c) {
  std::normal_distribution<double> d;
  MatrixXd m(r, c);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < c; ++j) m(i, j) = d(gen);
  return m;
}
}  // namespace

TEST_SUITE("lyapunov") {

TEST_CASE("dlyap trivial and scalar oracles") {
  // A = 0: fixed point is Q itself.
  MatrixXd x = solve_dlyap(MatrixXd::Zero(2, 2), MatrixXd::Identity(2, 2),
                           LyapunovForm::Controllability);
  CHECK((x - MatrixXd::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-14);

  // Scalar geometric series: x = Σ a^{2k} q = q / (1 − a²).
  MatrixXd xs = solve_dlyap(MatrixXd::Constant(1, 1, 0.5), MatrixXd::Constant(1, 1, 1.0),
                            LyapunovForm::Controllability);
  CHECK(xs(0, 0) == doctest::Approx(4.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("dlyap residuals on random stable systems") {
  std::mt19937 gen(42);
  for (int rep = 0; rep < 10; ++rep) {
    MatrixXd a = randn(gen, 3, 3);
    a *= 0.8 / spectral_radius(a);
    MatrixXd s = randn(gen, 3, 3);
    MatrixXd q = s * s.transpose();
    MatrixXd xo = solve_dlyap(a, q, LyapunovForm::Observability);
    MatrixXd res = a.transpose() * xo * a - xo + q;
    CHECK(res.cwiseAbs().maxCoeff() <= 1e-10 * (1 + xo.cwiseAbs().maxCoeff()));
    MatrixXd xc = solve_dlyap(a, q, LyapunovForm::Controllability);
    MatrixXd resc = a * xc * a.transpose() - xc + q;
    CHECK(resc.cwiseAbs().maxCoeff() <= 1e-10 * (1 + xc.cwiseAbs().maxCoeff()));
  }
}

TEST_CASE("dlyap rejects bad inputs") {
  CHECK_THROWS_AS(solve_dlyap(MatrixXd::Identity(2, 2), MatrixXd::Identity(2, 2),
                              LyapunovForm::Controllability),
                  UnstableMatrix);
  MatrixXd skew(2, 2);
  skew << 0, 1, -1, 0;
  CHECK_THROWS_AS(solve_dlyap(0.5 * MatrixXd::Identity(2, 2), skew,
                              LyapunovForm::Controllability),
                  NonSymmetricInput);
}

TEST_CASE("dare zero cross-covariance short-circuit") {
  MatrixXd a = 0.5 * MatrixXd::Identity(2, 2);
  MatrixXd d = MatrixXd::Zero(2, 2);
  MatrixXd c = MatrixXd::Identity(2, 2);
  MatrixXd r0 = 2.0 * MatrixXd::Identity(2, 2);
  DareSolution sol = solve_dare(a, d, c, r0);
  CHECK(sol.P.cwiseAbs().maxCoeff() < 1e-12);
  CHECK((sol.Q - r0).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(sol.K.cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("dare scalar fixed-point oracle") {
  // p = 0.25 p + (0.3 − 0.5p)² / (2 − p), solved independently by iteration.
  double p = 0.0;
  for (int i = 0; i < 200; ++i) p = 0.25 * p + std::pow(0.3 - 0.5 * p, 2) / (2.0 - p);
  DareSolution sol = solve_dare(MatrixXd::Constant(1, 1, 0.5), MatrixXd::Constant(1, 1, 0.3),
                                MatrixXd::Constant(1, 1, 1.0), MatrixXd::Constant(1, 1, 2.0));
  CHECK(sol.P(0, 0) == doctest::Approx(p).epsilon(1e-10));
  double res = sol.P(0, 0) - 0.25 * sol.P(0, 0) -
               std::pow(0.3 - 0.5 * sol.P(0, 0), 2) / (2.0 - sol.P(0, 0));
  CHECK(std::abs(res) <= 1e-12);
}

TEST_CASE("dare recovers K and Q of the generating model") {
  // Forward-compute (A, D, C, R0) from the true innovations model, then the
  // DARE must return the generating gain and innovations covariance.
  InnovationsModel m = testing::example2();
  MatrixXd b = m.B(), f = m.F();
  MatrixXd p_true = solve_dlyap(m.A, b * b.transpose(), LyapunovForm::Controllability);
  MatrixXd d = m.A * p_true * m.C.transpose() + b * f.transpose();
  MatrixXd r0 = m.C * p_true * m.C.transpose() + f * f.transpose();
  DareSolution sol = solve_dare(m.A, d, m.C, r0);
  CHECK((sol.K - m.K).cwiseAbs().maxCoeff() < 1e-6);
  CHECK((sol.Q - m.Q).cwiseAbs().maxCoeff() < 1e-6);
  CHECK((sol.P - p_true).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("dare residual contract on random valid models") {
  std::mt19937 gen(5);
  for (int rep = 0; rep < 8; ++rep) {
    auto m = testing::random_model(gen, 3, 2);
    MatrixXd b = m.B(), f = m.F();
    MatrixXd p_true = solve_dlyap(m.A, b * b.transpose(), LyapunovForm::Controllability);
    MatrixXd d = m.A * p_true * m.C.transpose() + b * f.transpose();
    MatrixXd r0 = m.C * p_true * m.C.transpose() + f * f.transpose();
    DareSolution sol = solve_dare(m.A, d, m.C, r0);
    MatrixXd n = d - m.A * sol.P * m.C.transpose();
    MatrixXd res = sol.P - m.A * sol.P * m.A.transpose() -
                   n * sol.Q.ldlt().solve(n.transpose());
    CHECK(res.cwiseAbs().maxCoeff() <= 1e-8 * (1 + sol.P.cwiseAbs().maxCoeff()));
  }
}

TEST_CASE("dare infeasible for an invalid covariance model") {
  // Scaling D far beyond validity empties the positive-real set.
  InnovationsModel m = testing::example2();
  MatrixXd b = m.B(), f = m.F();
  MatrixXd p_true = solve_dlyap(m.A, b * b.transpose(), LyapunovForm::Controllability);
  MatrixXd d = m.A * p_true * m.C.transpose() + b * f.transpose();
  MatrixXd r0 = m.C * p_true * m.C.transpose() + f * f.transpose();
  CHECK_THROWS_AS(solve_dare(m.A, 25.0 * d, m.C, r0), DareInfeasible);
}

}  // TEST_SUITE
