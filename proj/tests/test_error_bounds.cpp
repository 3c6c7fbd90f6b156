#include <random>

#include "doctest.h"
#include "ssid/error_bounds.hpp"
#include "ssid/errors.hpp"
#include "ssid/hinf.hpp"
#include "ssid/lyapunov.hpp"
#include "support/test_models.hpp"

using namespace ssid;

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

MatrixXd random_direction(std::mt19937& gen, Eigen::Index r, Eigen::Index c, double norm) {
  std::normal_distribution<double> d;
  MatrixXd m(r, c);
  for (Eigen::Index i = 0; i < r; ++i)
    for (Eigen::Index j = 0; j < c; ++j) m(i, j) = d(gen);
  return m * (norm / m.norm());
}

// Shift an innovations model by in-box state-space perturbations, treating the
// shifted system as the unknown truth: A = Â − δA etc.
InnovationsModel shifted_model(const InnovationsModel& hat, const MatrixXd& da,
                               const MatrixXd& db, const MatrixXd& dc, const MatrixXd& df) {
  MatrixXd f = hat.F() - df;
  MatrixXd b = hat.B() - db;
  InnovationsModel out;
  out.A = hat.A - da;
  out.C = hat.C - dc;
  out.Q = symmetrize(f * f.transpose());
  // K = B F⁻¹ keeps (A, B, C, F) exactly the perturbed quadruple.
  out.K = b * f.partialPivLu().inverse();
  return out;
}

double h2_grid_oracle(const TransferFunction& g, int n) {
  double acc = 0.0;
  for (int k = 0; k < n; ++k) acc += g.evaluate(-kPi + 2 * kPi * k / n).squaredNorm();
  return std::sqrt(acc / n);
}

}  // namespace

TEST_SUITE("error_bounds") {

TEST_CASE("identical models give zero exact error") {
  InnovationsModel m = testing::example2();
  auto norms = exact_error_norms(m, m);
  CHECK(norms.h2 < 1e-12);
  CHECK(norms.hinf < 1e-8);
}

TEST_CASE("scaled output error system matches direct quadrature") {
  InnovationsModel m = testing::example2();
  InnovationsModel scaled = m;
  scaled.C = 2.0 * m.C;
  ErrorSystem err = ErrorSystem::between(m, scaled);
  // output row must be [C, −2C]
  CHECK((err.system.C.leftCols(2) - m.C).cwiseAbs().maxCoeff() == 0.0);
  CHECK((err.system.C.rightCols(2) + 2.0 * m.C).cwiseAbs().maxCoeff() == 0.0);
  auto norms = exact_error_norms(m, scaled);
  CHECK(norms.h2 == doctest::Approx(h2_grid_oracle(err.system, 8192)).epsilon(1e-4));
}

TEST_CASE("vanishing uncertainty collapses every bound to zero") {
  InnovationsModel m = testing::example2();
  PerturbationMaps maps = perturbation_maps(m, 3);
  auto cov = asymptotic_covariance(m, 3, FrequencyGrid::uniform(1024));
  FNormBounds eps = fnorm_bounds(cov, maps, 1e30, 0.95);
  CHECK(h2_error_bound(maps.model, eps, cov, maps) < 1e-9);
  CHECK(hinf_error_bound_perturbative(maps.model, eps) < 1e-9);
  // the LMI bound drops its channels one by one as eps → 0
  FNormBounds zero{};
  zero.chi2_value = eps.chi2_value;
  zero.sample_count = eps.sample_count;
  CHECK(hinf_error_bound_lmi(maps.model, zero) < 1e-3);
}

TEST_CASE("delta P1 structure: dX11 = 0 and dX22 = -dX12 - dX12^T") {
  std::mt19937 gen(41);
  auto m = testing::random_model(gen, 2, 2, 0.8);
  PerturbationMaps maps = perturbation_maps(m, 3);
  const Eigen::Index nx = 2;
  std::normal_distribution<double> d;
  for (int rep = 0; rep < 5; ++rep) {
    VectorXd z(maps.M1.cols());
    for (Eigen::Index i = 0; i < z.size(); ++i) z(i) = d(gen);
    MatrixXd dp1 = unvec(maps.M1 * z, 2 * nx, 2 * nx);
    MatrixXd dx11 = dp1.topLeftCorner(nx, nx);
    MatrixXd dx12 = dp1.topRightCorner(nx, nx);
    MatrixXd dx22 = dp1.bottomRightCorner(nx, nx);
    CHECK(dx11.cwiseAbs().maxCoeff() < 1e-10 * (1 + dp1.cwiseAbs().maxCoeff()));
    CHECK((dx22 + dx12 + dx12.transpose()).cwiseAbs().maxCoeff() <
          1e-10 * (1 + dp1.cwiseAbs().maxCoeff()));
  }
}

TEST_CASE("trace identities of the doubled gramian") {
  std::mt19937 gen(43);
  auto m = testing::random_model(gen, 3, 2, 0.8);
  const Eigen::Index nx = m.n_x();
  MatrixXd x = solve_dlyap(m.A, m.C.transpose() * m.C, LyapunovForm::Observability);
  MatrixXd pbar(2 * nx, 2 * nx);
  pbar << x, -x, -x, x;
  MatrixXd b = m.B();
  MatrixXd bbar(2 * nx, m.n_y());
  bbar << b, b;
  CHECK(std::abs((bbar.transpose() * pbar * bbar).trace()) < 1e-12);

  // first-order term: tr[δB̄ᵀP̄B̄ + B̄ᵀδP1B̄ + B̄ᵀP̄δB̄] with structured δP1
  PerturbationMaps maps = perturbation_maps(m, 4);
  std::normal_distribution<double> d;
  VectorXd z(maps.M1.cols());
  for (Eigen::Index i = 0; i < z.size(); ++i) z(i) = d(gen);
  MatrixXd dp1 = unvec(maps.M1 * z, 2 * nx, 2 * nx);
  MatrixXd db = random_direction(gen, nx, m.n_y(), 0.37);
  MatrixXd dbbar = MatrixXd::Zero(2 * nx, m.n_y());
  dbbar.bottomRows(nx) = db;
  // evaluated at the realized coordinates where the maps live
  MatrixXd xr = solve_dlyap(maps.model.A, maps.model.C.transpose() * maps.model.C,
                            LyapunovForm::Observability);
  MatrixXd pbar_r(2 * nx, 2 * nx);
  pbar_r << xr, -xr, -xr, xr;
  MatrixXd br = maps.model.B();
  MatrixXd bbar_r(2 * nx, m.n_y());
  bbar_r << br, br;
  double first_order = (dbbar.transpose() * pbar_r * bbar_r).trace() +
                       (bbar_r.transpose() * dp1 * bbar_r).trace() +
                       (bbar_r.transpose() * pbar_r * dbbar).trace();
  CHECK(std::abs(first_order) < 1e-9 * (1 + dp1.norm() * bbar_r.squaredNorm()));
}

TEST_CASE("soundness of all three bounds for in-box perturbations") {
  InnovationsModel m = testing::example2();
  PerturbationMaps maps = perturbation_maps(m, 4);
  auto cov = asymptotic_covariance(m, 4, FrequencyGrid::uniform(2048));
  FNormBounds eps = fnorm_bounds(cov, maps, 1e5, 0.9518);
  double h2b = h2_error_bound(maps.model, eps, cov, maps);
  double hinf_pert = hinf_error_bound_perturbative(maps.model, eps);
  double hinf_lmi = hinf_error_bound_lmi(maps.model, eps);

  std::mt19937 gen(47);
  int h2_ok = 0, pert_ok = 0, lmi_ok = 0;
  const int samples = 40;
  for (int i = 0; i < samples; ++i) {
    MatrixXd da = random_direction(gen, 2, 2, eps.eps_A);
    MatrixXd db = random_direction(gen, 2, 2, eps.eps_B);
    MatrixXd dc = random_direction(gen, 2, 2, eps.eps_C);
    MatrixXd df = random_direction(gen, 2, 2, eps.eps_F);
    InnovationsModel truth = shifted_model(maps.model, da, db, dc, df);
    ErrorSystem err = ErrorSystem::between(truth, maps.model);
    double h2 = h2_norm(err.system);
    double hinf = hinf_norm(err.system, 1e-5);
    if (h2 <= h2b) ++h2_ok;
    if (hinf <= hinf_pert) ++pert_ok;
    if (hinf <= hinf_lmi * (1 + 1e-6)) ++lmi_ok;
  }
  CHECK(h2_ok >= samples - 1);   // first-order bounds allow a sliver of slack
  CHECK(pert_ok >= samples - 1);
  CHECK(lmi_ok == samples);      // the LMI certificate is exact over the box
}

TEST_CASE("bounds are monotone in each epsilon channel") {
  InnovationsModel m = testing::example2();
  PerturbationMaps maps = perturbation_maps(m, 3);
  auto cov = asymptotic_covariance(m, 3, FrequencyGrid::uniform(1024));
  FNormBounds eps = fnorm_bounds(cov, maps, 1e5, 0.95);
  double h2_0 = h2_error_bound(maps.model, eps, cov, maps);
  double pert_0 = hinf_error_bound_perturbative(maps.model, eps);
  double lmi_0 = hinf_error_bound_lmi(maps.model, eps);
  for (int channel = 0; channel < 4; ++channel) {
    FNormBounds bumped = eps;
    (channel == 0   ? bumped.eps_A
     : channel == 1 ? bumped.eps_B
     : channel == 2 ? bumped.eps_C
                    : bumped.eps_F) *= 2.0;
    CHECK(h2_error_bound(maps.model, bumped, cov, maps) >= h2_0 - 1e-12);
    CHECK(hinf_error_bound_perturbative(maps.model, bumped) >= pert_0 - 1e-12);
    CHECK(hinf_error_bound_lmi(maps.model, bumped) >= lmi_0 * (1 - 1e-4));
  }
}

TEST_CASE("lmi bound scales first order in the box size") {
  InnovationsModel m = testing::example2();
  PerturbationMaps maps = perturbation_maps(m, 3);
  auto cov = asymptotic_covariance(m, 3, FrequencyGrid::uniform(1024));
  FNormBounds eps = fnorm_bounds(cov, maps, 1e5, 0.95);
  FNormBounds small = eps;
  small.eps_A /= 10;
  small.eps_B /= 10;
  small.eps_C /= 10;
  small.eps_F /= 10;
  double g1 = hinf_error_bound_lmi(maps.model, eps);
  double g2 = hinf_error_bound_lmi(maps.model, small);
  CHECK(g2 <= g1 / 5.0);
}

TEST_CASE("unstable inputs are rejected") {
  InnovationsModel bad;
  bad.A = MatrixXd::Identity(1, 1);
  bad.K = MatrixXd::Zero(1, 1);
  bad.Q = MatrixXd::Identity(1, 1);
  bad.C = MatrixXd::Identity(1, 1);
  FNormBounds eps{};
  CHECK_THROWS_AS(hinf_error_bound_perturbative(bad, eps), UnstableMatrix);
  CHECK_THROWS_AS(hinf_error_bound_lmi(bad, eps), UnstableMatrix);
}

}  // TEST_SUITE
