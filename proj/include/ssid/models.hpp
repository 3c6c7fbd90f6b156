#pragma once

#include <Eigen/Dense>
#include <vector>

#include "ssid/matrix_ops.hpp"

namespace ssid {

// Output-only time series: N samples of an n_y-channel process.
struct TimeSeries {
  Eigen::Index n_y = 0;
  // One row per sample, one column per channel (N × n_y).
  MatrixXd samples;

  Eigen::Index length() const { return samples.rows(); }
};

// Innovations-form state-space model
//   x_{k+1} = A x_k + K Q^{1/2} e_k,  y_k = C x_k + Q^{1/2} e_k,  E[e eᵀ] = I.
struct InnovationsModel {
  MatrixXd A;  // n_x × n_x
  MatrixXd K;  // n_x × n_y
  MatrixXd Q;  // n_y × n_y, symmetric PSD
  MatrixXd C;  // n_y × n_x

  Eigen::Index n_x() const { return A.rows(); }
  Eigen::Index n_y() const { return C.rows(); }
  MatrixXd F() const { return symmetric_sqrt(Q); }   // Q^{1/2}
  MatrixXd B() const { return K * F(); }             // K Q^{1/2}
};

// Covariance model (A, D, C, R0): the Markov parameters C A^{k-1} D are the
// process covariances R_k and R_0 the lag-0 covariance.
struct CovarianceModel {
  MatrixXd A;   // n_x × n_x
  MatrixXd D;   // n_x × n_y
  MatrixXd C;   // n_y × n_x
  MatrixXd R0;  // n_y × n_y, symmetric

  Eigen::Index n_x() const { return A.rows(); }
  Eigen::Index n_y() const { return C.rows(); }
};

// Sample covariances R̃_0 … R̃_{2m−1} and the m×m block-Hankel assembly.
struct HankelEstimate {
  Eigen::Index m = 0;
  std::vector<MatrixXd> covariances;  // R̃_0 … R̃_{2m−1}, each n_y × n_y
  MatrixXd H;                         // (m·n_y) × (m·n_y)

  Eigen::Index n_y() const { return covariances.empty() ? 0 : covariances[0].rows(); }
};

// Rank-n_x factorization of a block-Hankel matrix, H ≈ Ω Γ with Ω = Us Λs^{1/2}
// and Γ = Λs^{1/2} Vsᵀ (similarity transform fixed at T = I).
struct Realization {
  Eigen::Index n_x = 0;
  MatrixXd Us, Vs;            // retained singular subspaces, (m·n_y) × n_x
  VectorXd lambda_s;          // retained singular values, length n_x
  MatrixXd Un, Vn;            // discarded orthogonal complements
  MatrixXd observability;     // Ω, (m·n_y) × n_x
  MatrixXd controllability;   // Γ, n_x × (m·n_y)
  VectorXd singular_values;   // full spectrum, for diagnostics
};

}  // namespace ssid
