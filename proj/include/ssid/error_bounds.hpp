#pragma once

#include "ssid/asymptotics.hpp"
#include "ssid/models.hpp"
#include "ssid/transfer_function.hpp"

namespace ssid {

// Difference of two innovations transfer functions as one state-space system:
// block-diagonal state matrix, stacked input, differenced output row.
struct ErrorSystem {
  TransferFunction system;

  static ErrorSystem between(const InnovationsModel& truth, const InnovationsModel& est);
};

// Exact H2 and H-infinity norms of the error system (test-mode utility).
struct ExactErrorNorms {
  double h2 = 0.0;
  double hinf = 0.0;
};
ExactErrorNorms exact_error_norms(const InnovationsModel& truth,
                                  const InnovationsModel& est,
                                  double hinf_rel_tol = 1e-4);

// Explicit H2 model-error bound:
//   ‖G−G̃‖² ≤ eps_F² + eps_B²‖P̄‖_F + 2‖B̄‖_F eps_B ‖δP1‖ + ‖B̄‖²_F ‖δP2‖,
// with ‖δP1‖ chi-square-calibrated through M1 and ‖δP2‖ from the
// second-order Lyapunov resolvent bound.
double h2_error_bound(const InnovationsModel& model_hat, const FNormBounds& bounds,
                      const AsymptoticCovariance& cov, const PerturbationMaps& maps);

// Triangle/submultiplicative perturbative H-infinity bound built from two
// auxiliary resolvent norms.
double hinf_error_bound_perturbative(const InnovationsModel& model_hat,
                                     const FNormBounds& bounds);

// Certified H-infinity bound over the whole Frobenius uncertainty box via the
// scaled small-gain LMI; valid for every ‖δX‖_F ≤ eps_X simultaneously.
double hinf_error_bound_lmi(const InnovationsModel& model_hat, const FNormBounds& bounds);

// All three bounds plus their ingredients.
struct BoundReport {
  double h2_bound = 0.0;
  double hinf_bound_perturbative = 0.0;
  double hinf_bound_lmi = 0.0;
  double confidence = 0.0;
  FNormBounds eps;
  double delta_p1_bound = 0.0;
  double delta_p2_bound = 0.0;
};

BoundReport compute_bound_report(const PerturbationMaps& maps,
                                 const AsymptoticCovariance& cov, double sample_count,
                                 double confidence,
                                 std::optional<std::pair<double, double>> repair_adjust = {});

// Ingredient of the H2 bound, exposed for the structural identity tests.
double delta_p1_bound(const FNormBounds& bounds, const AsymptoticCovariance& cov,
                      const PerturbationMaps& maps);

}  // namespace ssid
