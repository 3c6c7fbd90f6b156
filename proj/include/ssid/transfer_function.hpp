#pragma once

#include <Eigen/Dense>
#include <vector>

#include "ssid/models.hpp"

namespace ssid {

using Eigen::MatrixXcd;

// Discrete-time state-space transfer function G(z) = C(zI − A)⁻¹B + Dff.
struct TransferFunction {
  MatrixXd A;
  MatrixXd B;
  MatrixXd C;
  MatrixXd Dff;

  Eigen::Index n_x() const { return A.rows(); }
  Eigen::Index n_u() const { return B.cols(); }
  Eigen::Index n_y() const { return C.rows(); }
  bool stable() const { return is_stable(A); }

  // G(e^{iω})
  MatrixXcd evaluate(double omega) const;
};

// Transfer function from normalized innovations to output for Eq.-(1) models:
// G_e(z) = C(zI − A)⁻¹ K Q^{1/2} + Q^{1/2}.
TransferFunction innovations_transfer(const InnovationsModel& model);

// Uniform grid of n points on [−π, π); includes ω = 0 when n is even.
struct FrequencyGrid {
  int n_points;
  double omega(int k) const;
  static FrequencyGrid uniform(int n);
};

// ‖G‖_{H2} via the observability-gramian trace formula
// ‖G‖² = tr[DffᵀDff + Bᵀ𝒫B], Aᵀ𝒫A − 𝒫 + CᵀC = 0. Throws UnstableMatrix.
double h2_norm(const TransferFunction& g);

// Power spectral density S_y(ω) = G_e(e^{iω}) G_eᵀ(e^{−iω}), one Hermitian
// PSD matrix per grid point.
std::vector<MatrixXcd> spectral_density(const InnovationsModel& model,
                                        const FrequencyGrid& grid);

// Largest singular value of G over a frequency grid; a lower bound on the
// H-infinity norm used to seed the certified bisection.
double grid_max_gain(const TransferFunction& g, int n_points);

}  // namespace ssid
