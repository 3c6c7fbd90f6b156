#include <complex>
#include <random>

#include "doctest.h"
#include "ssid/errors.hpp"
#include "ssid/hinf.hpp"
#include "ssid/lyapunov.hpp"
#include "ssid/transfer_function.hpp"
#include "support/test_models.hpp"

using namespace ssid;

namespace {
constexpr double kPi = 3.141592653589793238462643383279502884;

// Frequency-domain quadrature oracle for the H2 norm:
// ‖G‖² = (1/2π) ∫ tr[G(e^{iω})* G(e^{iω})] dω.
double h2_by_quadrature(const TransferFunction& g, int n) {
  double acc = 0.0;
  for (int k = 0; k < n; ++k) {
    double w = -kPi + 2 * kPi * k / n;
    acc += g.evaluate(w).squaredNorm();
  }
  return std::sqrt(acc / n);
}
}  // namespace

TEST_SUITE("transfer") {

TEST_CASE("static system h2 equals frobenius of feedthrough") {
  MatrixXd f(2, 2);
  f << 1, 2, 3, 4;
  TransferFunction g{MatrixXd::Zero(1, 1), MatrixXd::Zero(1, 2), MatrixXd::Zero(2, 1), f};
  CHECK(h2_norm(g) == doctest::Approx(f.norm()).epsilon(1e-14));
}

TEST_CASE("example-2 true model H2 norm matches 0.5113") {
  TransferFunction g = innovations_transfer(testing::example2());
  CHECK(h2_norm(g) == doctest::Approx(0.5113).epsilon(0.005));
}

TEST_CASE("h2 trace formula agrees with quadrature on random systems") {
  std::mt19937 gen(17);
  for (int rep = 0; rep < 6; ++rep) {
    auto m = testing::random_model(gen, 3, 1);
    TransferFunction g = innovations_transfer(m);
    double a = h2_norm(g);
    double q = h2_by_quadrature(g, 8192);
    CHECK(std::abs(a - q) / q < 1e-4);
  }
}

TEST_CASE("hinf of static system is max singular value") {
  MatrixXd f(2, 2);
  f << 1, 2, 3, 4;
  TransferFunction g{MatrixXd::Zero(0, 0), MatrixXd::Zero(0, 2), MatrixXd::Zero(2, 0), f};
  Eigen::JacobiSVD<MatrixXd> svd(f);
  CHECK(hinf_norm(g) == doctest::Approx(svd.singularValues()(0)).epsilon(1e-10));
}

TEST_CASE("example-2 true model Hinf norm matches 0.9774 within 0.5%") {
  TransferFunction g = innovations_transfer(testing::example2());
  double v = hinf_norm(g, 1e-4);
  CHECK(v == doctest::Approx(0.9774).epsilon(0.005));
}

TEST_CASE("hinf bisection matches dense grid maximum") {
  std::mt19937 gen(23);
  for (int rep = 0; rep < 4; ++rep) {
    auto m = testing::random_model(gen, 2, 2);
    TransferFunction g = innovations_transfer(m);
    double rel_tol = 1e-4;
    double v = hinf_norm(g, rel_tol);
    double grid = grid_max_gain(g, 16384);
    CHECK(v >= grid * (1 - rel_tol - 1e-6));
    CHECK(v <= grid * (1 + rel_tol + 1e-3));  // grid under-estimates the peak
  }
}

TEST_CASE("hinf rejects unstable systems") {
  TransferFunction g{MatrixXd::Identity(1, 1), MatrixXd::Identity(1, 1),
                     MatrixXd::Identity(1, 1), MatrixXd::Zero(1, 1)};
  CHECK_THROWS_AS(hinf_norm(g), UnstableMatrix);
  CHECK_THROWS_AS(h2_norm(g), UnstableMatrix);
}

TEST_CASE("spectral density of white output is constant Q") {
  InnovationsModel m;
  m.A = 0.5 * MatrixXd::Identity(2, 2);
  m.K = MatrixXd::Zero(2, 2);
  m.C = MatrixXd::Identity(2, 2);
  m.Q = (MatrixXd(2, 2) << 0.5, 0.1, 0.1, 0.4).finished();
  auto s = spectral_density(m, FrequencyGrid::uniform(16));
  for (const auto& sw : s) {
    CHECK((sw.imag().cwiseAbs().maxCoeff()) < 1e-12);
    CHECK((sw.real() - m.Q).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("scalar spectral density value at omega zero") {
  InnovationsModel m = testing::scalar_example();
  auto s = spectral_density(m, FrequencyGrid::uniform(2));  // grid {−π, 0}
  double expected = 0.001 * std::pow(1.0 + 0.1 * 0.35 / (1.0 - 0.8), 2);
  CHECK(std::real(s[1](0, 0)) == doctest::Approx(expected).epsilon(1e-10));
}

TEST_CASE("spectral density is hermitian psd and integrates to R0") {
  std::mt19937 gen(31);
  auto m = testing::random_model(gen, 3, 2);
  FrequencyGrid grid = FrequencyGrid::uniform(4096);
  auto s = spectral_density(m, grid);
  MatrixXd b = m.B(), f = m.F();
  MatrixXd px = solve_dlyap(m.A, b * b.transpose(), LyapunovForm::Controllability);
  MatrixXd r0 = m.C * px * m.C.transpose() + f * f.transpose();
  Eigen::MatrixXcd acc = Eigen::MatrixXcd::Zero(2, 2);
  for (int k = 0; k < grid.n_points; ++k) {
    const auto& sw = s[k];
    CHECK((sw - sw.adjoint()).cwiseAbs().maxCoeff() < 1e-10);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(sw, Eigen::EigenvaluesOnly);
    CHECK(es.eigenvalues().minCoeff() > -1e-10);
    acc += sw;
  }
  acc /= grid.n_points;
  CHECK((acc.real() - r0).cwiseAbs().maxCoeff() < 1e-6);
  CHECK(acc.imag().cwiseAbs().maxCoeff() < 1e-10);
}

}  // TEST_SUITE
