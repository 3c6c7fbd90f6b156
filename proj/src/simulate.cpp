#include "ssid/simulate.hpp"

#include <cmath>

#include "ssid/errors.hpp"
#include "ssid/rng.hpp"

namespace ssid {

Eigen::Index default_burn_in(const MatrixXd& a) {
  double rho = spectral_radius(a);
  if (rho >= 1.0) throw UnstableMatrix("default_burn_in: unstable A");
  double len = std::ceil(10.0 / (1.0 - rho));
  return static_cast<Eigen::Index>(std::min(len, 1e4));
}

TimeSeries simulate(const SimulationConfig& cfg) {
  const InnovationsModel& m = cfg.model;
  if (!is_stable(m.A)) throw UnstableMatrix("simulate: model A is not Schur stable");
  if (cfg.n < 1) throw InsufficientData("simulate: N must be >= 1");

  const Eigen::Index n_x = m.n_x();
  const Eigen::Index n_y = m.n_y();
  MatrixXd f = m.F();
  MatrixXd b = m.K * f;
  Eigen::Index burn = cfg.burn_in >= 0 ? cfg.burn_in : default_burn_in(m.A);

  GaussianStream noise(cfg.seed);
  VectorXd x = VectorXd::Zero(n_x);
  VectorXd e(n_y);
  TimeSeries ts;
  ts.n_y = n_y;
  ts.samples.resize(cfg.n, n_y);
  for (Eigen::Index t = 0; t < burn + cfg.n; ++t) {
    for (Eigen::Index i = 0; i < n_y; ++i) e(i) = noise.next();
    if (t >= burn) ts.samples.row(t - burn) = (m.C * x + f * e).transpose();
    x = m.A * x + b * e;
  }
  return ts;
}

}  // namespace ssid
