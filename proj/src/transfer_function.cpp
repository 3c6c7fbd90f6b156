#include "ssid/transfer_function.hpp"

#include <cmath>
#include <complex>

#include "ssid/errors.hpp"
#include "ssid/lyapunov.hpp"

namespace ssid {

namespace {
constexpr double kPi = 3.141592653589793238462643383279502884;
}

MatrixXcd TransferFunction::evaluate(double omega) const {
  const std::complex<double> z(std::cos(omega), std::sin(omega));
  MatrixXcd m = z * MatrixXcd::Identity(n_x(), n_x()) - A.cast<std::complex<double>>();
  return C.cast<std::complex<double>>() * m.partialPivLu().solve(B.cast<std::complex<double>>()) +
         Dff.cast<std::complex<double>>();
}

TransferFunction innovations_transfer(const InnovationsModel& model) {
  MatrixXd f = model.F();
  return TransferFunction{model.A, model.K * f, model.C, f};
}

double FrequencyGrid::omega(int k) const { return -kPi + 2.0 * kPi * k / n_points; }

FrequencyGrid FrequencyGrid::uniform(int n) { return FrequencyGrid{n}; }

double h2_norm(const TransferFunction& g) {
  if (!g.stable()) throw UnstableMatrix("h2_norm: A is not Schur stable");
  MatrixXd gram = solve_dlyap(g.A, g.C.transpose() * g.C, LyapunovForm::Observability);
  double sq = (g.Dff.transpose() * g.Dff + g.B.transpose() * gram * g.B).trace();
  return std::sqrt(std::max(0.0, sq));
}

std::vector<MatrixXcd> spectral_density(const InnovationsModel& model,
                                        const FrequencyGrid& grid) {
  if (!is_stable(model.A)) throw UnstableMatrix("spectral_density: model unstable");
  TransferFunction ge = innovations_transfer(model);
  std::vector<MatrixXcd> out(grid.n_points);
  for (int k = 0; k < grid.n_points; ++k) {
    MatrixXcd g = ge.evaluate(grid.omega(k));
    out[k] = g * g.adjoint();
  }
  return out;
}

double grid_max_gain(const TransferFunction& g, int n_points) {
  double best = 0.0;
  for (int k = 0; k <= n_points; ++k) {
    double w = kPi * k / n_points;
    Eigen::JacobiSVD<MatrixXcd> svd(g.evaluate(w));
    best = std::max(best, svd.singularValues()(0));
  }
  return best;
}

}  // namespace ssid
