#include <random>

#include "doctest.h"
#include "ssid/sdp.hpp"

using namespace ssid;
using namespace ssid::sdp;

TEST_SUITE("sdp") {

TEST_CASE("min lambda s.t. lambda I - M psd returns largest eigenvalue") {
  std::mt19937 gen(2);
  std::normal_distribution<double> d;
  MatrixXd s(4, 4);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) s(i, j) = d(gen);
  MatrixXd m = symmetrize(s);
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(m, Eigen::EigenvaluesOnly);
  double lmax = es.eigenvalues().maxCoeff();

  SdpProblem prob;
  int lambda = prob.add_scalar_variable();
  prob.add_psd_constraint(AffExpr::scaled_var(lambda, MatrixXd::Identity(4, 4)) -
                          AffExpr::constant(m));
  prob.set_objective({{lambda, 1.0}});
  SdpResult res = solve_sdp(prob);
  REQUIRE(res.status == SdpStatus::Optimal);
  CHECK(res.x(lambda) == doctest::Approx(lmax).epsilon(1e-7));
  CHECK(res.max_violation <= 1e-8);
}

TEST_CASE("scalar contraction feasibility") {
  // P > 0 with P − a P a ⪰ 0 for a = 0.5 is trivially feasible.
  SdpProblem prob;
  AffExpr p = prob.add_symmetric_variable(1);
  double a = 0.5;
  prob.add_psd_constraint(p - a * a * p -
                          AffExpr::constant(1e-6 * MatrixXd::Identity(1, 1)));
  prob.add_psd_constraint(p - AffExpr::constant(1e-6 * MatrixXd::Identity(1, 1)));
  prob.add_psd_constraint(AffExpr::constant(MatrixXd::Identity(1, 1) * 10.0) - p);
  SdpResult res = solve_sdp(prob);
  REQUIRE(res.status == SdpStatus::Optimal);
  MatrixXd pv = SdpProblem::value(p, res.x);
  CHECK(pv(0, 0) > 0.0);
  CHECK(pv(0, 0) - a * pv(0, 0) * a >= 0.0);
}

TEST_CASE("contradictory constraints reported infeasible") {
  // P ⪰ δ with P + I ⪯ 0.
  SdpProblem prob;
  AffExpr p = prob.add_symmetric_variable(2);
  prob.add_psd_constraint(p - AffExpr::constant(1e-8 * MatrixXd::Identity(2, 2)));
  prob.add_psd_constraint(-1.0 * p - AffExpr::constant(MatrixXd::Identity(2, 2)));
  SdpResult res = solve_sdp(prob);
  CHECK(res.status == SdpStatus::Infeasible);
}

TEST_CASE("block assembly and value extraction") {
  SdpProblem prob;
  AffExpr p = prob.add_symmetric_variable(2);
  AffExpr z = prob.add_variable(2, 2);
  AffExpr big = block_expr({{p, z}, {z.transpose(), p}});
  CHECK(big.rows == 4);
  CHECK(big.cols == 4);
  // vec of an affine expression keeps coefficients aligned.
  AffExpr v = vec_expr(z);
  CHECK(v.rows == 4);
  CHECK(v.cols == 1);
}

TEST_CASE("lmi with equality-like pinning via two inequalities") {
  // minimize x subject to x ≥ 3 (as 1x1 blocks); checks scalar handling.
  SdpProblem prob;
  int x = prob.add_scalar_variable();
  prob.add_psd_constraint(prob.scalar_expr(x) -
                          AffExpr::constant(3.0 * MatrixXd::Ones(1, 1)));
  prob.add_psd_constraint(AffExpr::constant(100.0 * MatrixXd::Ones(1, 1)) -
                          prob.scalar_expr(x));
  prob.set_objective({{x, 1.0}});
  SdpResult res = solve_sdp(prob);
  REQUIRE(res.status == SdpStatus::Optimal);
  CHECK(res.x(x) == doctest::Approx(3.0).epsilon(1e-7));
}

TEST_CASE("conjugation keeps symmetric coefficient structure") {
  std::mt19937 gen(9);
  std::normal_distribution<double> d;
  MatrixXd a(3, 3);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) a(i, j) = d(gen);
  SdpProblem prob;
  AffExpr p = prob.add_symmetric_variable(3);
  AffExpr conj = lmul(a, rmul(p, a.transpose()));
  VectorXd x = VectorXd::LinSpaced(prob.num_variables(), 0.3, 1.4);
  MatrixXd pv = SdpProblem::value(p, x);
  MatrixXd cv = SdpProblem::value(conj, x);
  CHECK((cv - a * pv * a.transpose()).cwiseAbs().maxCoeff() < 1e-13);
}

}  // TEST_SUITE
