#pragma once

#include <vector>

#include "ssid/lyapunov.hpp"
#include "ssid/models.hpp"

namespace ssid {

// Sample output covariances R̃_k = (1/(N−k)) Σ_{t=k+1}^N y_t y_{t−k}ᵀ for
// k = 0 … max_lag. R̃_0 is symmetrized. Throws InsufficientData when
// max_lag ≥ N.
std::vector<MatrixXd> sample_covariances(const TimeSeries& ts, int max_lag);

namespace detail {
// Serial reference implementation, kept verbatim for the consistency tests.
std::vector<MatrixXd> sample_covariances_serial(const TimeSeries& ts, int max_lag);
}  // namespace detail

// Block-Hankel assembly: block (i,j) = R̃_{i+j−1}, i,j = 1…m. Needs lags
// R̃_1 … R̃_{2m−1}; throws InsufficientLags otherwise.
HankelEstimate build_hankel(const std::vector<MatrixXd>& covs, int m);

// Rank-n_x realization of the Hankel matrix via sign-fixed SVD, Ω = Us Λs^{1/2},
// Γ = Λs^{1/2} Vsᵀ. Throws RankDeficient when σ_{n_x}/σ_1 < 1e-12.
Realization realize(const HankelEstimate& hankel, int n_x);
Realization realize(const MatrixXd& h, int n_x);

// Advisory model order: the index with the largest ratio σ_i/σ_{i+1}.
int suggest_order(const Realization& real);

// C = first n_y rows of Ω, D = first n_y columns of Γ, A = least-squares
// solution of Ω̄ A = Ω̲ (QR). Throws IllConditionedShift when cond(Ω̄) > 1e10.
CovarianceModel extract_covariance_model(const Realization& real, const MatrixXd& r0,
                                         Eigen::Index n_y);

// DARE-based recovery of the innovations model; propagates DareInfeasible so
// the pipeline can route to the repair path.
InnovationsModel covariance_to_innovations(const CovarianceModel& cm);

// Exact process covariances R_0 … R_max_lag of a true innovations model
// (R_0 = C P Cᵀ + F Fᵀ, R_k = C A^{k−1} D with D = A P Cᵀ + B Fᵀ).
std::vector<MatrixXd> exact_covariances(const InnovationsModel& model, int max_lag);

// Exact covariance model of a true innovations model.
CovarianceModel exact_covariance_model(const InnovationsModel& model);

}  // namespace ssid
