#pragma once

#include <optional>
#include <utility>

#include "ssid/chi2.hpp"
#include "ssid/models.hpp"
#include "ssid/transfer_function.hpp"

namespace ssid {

// Joint asymptotic covariance of √N·(vec(R̃0−R0); vec(H̃−H)).
struct AsymptoticCovariance {
  Eigen::Index n_y = 0;
  int m = 0;
  MatrixXd P_R0;    // n_y² × n_y²
  MatrixXd P_R0H;   // n_y² × (m n_y)²
  MatrixXd P_H;     // (m n_y)² × (m n_y)²
  MatrixXd joint;   // assembled symmetric block matrix
  int n_quadrature = 0;

  Eigen::Index dof() const { return joint.rows(); }
};

// Spectral-integral evaluation of the covariance blocks. The Hankel block is
//   P_H = (1/2π)∫ S_{V2}*⊗S_{V1} dω + K·(1/2π)∫ S_{12}*⊗S_{21} dω
// with S_{V1} = (E1E1^H)⊗S_y, S_{V2} = (E2E2^H)⊗S_y, S_{12} = (E1E2^H)⊗S_y,
// S_{21} = (E2E1^H)⊗S_y; the commutation term couples the cross spectra of
// the two stacked windows (direct Gaussian fourth-moment expansion, confirmed
// by Bartlett's formula and Monte Carlo). Quadrature is uniform trapezoid on
// [−π, π) with fixed-order chunked reduction, bit-reproducible for any thread
// count. Requires an even grid with at least 1024 points.
AsymptoticCovariance asymptotic_covariance(const InnovationsModel& model, int m,
                                           const FrequencyGrid& grid);

namespace detail {
// Straightforward full-grid complex accumulation, kept as the reference for
// the parallel kernel.
AsymptoticCovariance asymptotic_covariance_serial(const InnovationsModel& model, int m,
                                                  const FrequencyGrid& grid);
// Lag-domain summation Σ_τ, an independent route to the same integrals.
AsymptoticCovariance asymptotic_covariance_lag_domain(const InnovationsModel& model,
                                                      int m, double tail_tol = 1e-12);
}  // namespace detail

// First-order sensitivities of the realization factors to the Hankel matrix:
// vec(δΩ) ≐ Π1 vec(δH), vec(δΓ) ≐ Π2 vec(δH), from the exact derivative of
// the sign-fixed SVD at a rank-n_x point (distinct retained singular values).
struct SvdPerturbation {
  MatrixXd Pi1;
  MatrixXd Pi2;
};
SvdPerturbation svd_perturbation_maps(const Realization& real);

// Sensitivities of (A, C, D) to (vec δR0; vec δH); only the Hankel block
// feeds these maps.
struct RealizationJacobians {
  MatrixXd Xi;      // vec(δA) ≐ Ξ vec(δΩ)
  MatrixXd map_dA;  // composed, from (vec δR0; vec δH)
  MatrixXd map_dC;
  MatrixXd map_dD;
};
RealizationJacobians realization_jacobians(const Realization& real,
                                           const CovarianceModel& cm, int m);

// DARE chain: vec(δP) ≐ G1·(vec δR0; vec δH), vec(δF) ≐ (G2−G3G1)·(…),
// vec(δB) ≐ (G4+G5G1)·(…), plus the deterministic-shift responses used when
// the repair program has adjusted D and R0.
struct DareChain {
  MatrixXd G1, G2, G3, G4, G5;
  MatrixXd map_dB;  // G4 + G5 G1
  MatrixXd map_dF;  // G2 − G3 G1
  MatrixXd B_from_D, B_from_R0;  // responses of δB to pure δD / δR0 shifts
  MatrixXd F_from_D, F_from_R0;
};
DareChain dare_perturbation_chain(const InnovationsModel& model, const CovarianceModel& cm,
                                  const RealizationJacobians& jac);

// Everything §III needs, evaluated at one model (identified in deployment,
// true in test mode). The evaluation point is the canonical sign-fixed SVD
// realization of the model's own exact Hankel matrix, matching what the
// identification chain converges to.
struct PerturbationMaps {
  int m = 0;
  InnovationsModel model;    // realized coordinates
  CovarianceModel cm;        // realized coordinates
  MatrixXd P;                // DARE solution at the evaluation point
  Realization real;
  SvdPerturbation svd;
  RealizationJacobians jac;
  DareChain dare;
  MatrixXd M1;               // δP1 map of the H2 error-bound theorem
};
PerturbationMaps perturbation_maps(const InnovationsModel& model, int m);

struct FNormBounds {
  double eps_A = 0, eps_B = 0, eps_C = 0, eps_F = 0;
  double confidence = 0;
  double chi2_value = 0;
  int dof = 0;
  double sample_count = 0;
  double adjustment_extra_B = 0;  // deterministic additions from repair shifts
  double adjustment_extra_F = 0;
};

// Chi-square-calibrated Frobenius bounds
//   eps_X² = (χ²_α/N)·‖P^{1/2} M_Xᵀ M_X P^{1/2}‖₂,
// with the repair adjustment norms (‖D̂−D̃‖_F, ‖R̂0−R̃0‖_F), when present,
// propagated through the exact linear shift responses and added to the B and
// F channels.
FNormBounds fnorm_bounds(const AsymptoticCovariance& cov, const PerturbationMaps& maps,
                         double sample_count, double confidence,
                         std::optional<std::pair<double, double>> repair_adjust = {});

}  // namespace ssid
