#pragma once

#include <Eigen/Dense>

#include "ssid/matrix_ops.hpp"

namespace ssid {

// The paper uses both discrete Lyapunov conventions; the caller picks one
// explicitly rather than relying on an implicit transpose.
enum class LyapunovForm {
  Controllability,  // X = A X Aᵀ + Q
  Observability,    // X = Aᵀ X A + Q   (AᵀXA − X + Q = 0)
};

// Solves the selected fixed-point equation for symmetric Q and stable A.
// Throws UnstableMatrix if ρ(A) ≥ 1 − 1e-10 and NonSymmetricInput for
// asymmetric Q. Residual max-norm is at most 1e-10·(1+‖X‖).
MatrixXd solve_dlyap(const MatrixXd& a, const MatrixXd& q, LyapunovForm form);

struct DareSolution {
  MatrixXd P;  // stabilizing solution, symmetric PSD
  MatrixXd Q;  // innovations covariance R0 − C P Cᵀ
  MatrixXd K;  // Kalman gain (D − A P Cᵀ) Q⁻¹
};

// Solves P = A P Aᵀ + (D − A P Cᵀ)(R0 − C P Cᵀ)⁻¹(D − A P Cᵀ)ᵀ by a
// structure-preserving doubling iteration on the equivalent form
// P = A_sᵀ P (I − S P)⁻¹ A_s + M, with a Kalman fixed-point fallback.
// Throws DareInfeasible when the iteration diverges, P is not PSD, or
// R0 − C P Cᵀ has an eigenvalue below −1e-8; SingularQ when Q cannot be
// inverted for K.
DareSolution solve_dare(const MatrixXd& a, const MatrixXd& d, const MatrixXd& c,
                        const MatrixXd& r0);

}  // namespace ssid
