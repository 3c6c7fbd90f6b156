#pragma once

#include <optional>

#include "ssid/models.hpp"
#include "ssid/subspace.hpp"

namespace ssid {

enum class RepairNorm { TwoNorm, FNorm };

struct RepairOutcome {
  MatrixXd P_bar;                  // dlyap(Â, Φ11), controllability form
  MatrixXd Phi11, Phi12, Phi22;
  double lambda = 0.0;             // objective value of the repair program
  MatrixXd D_hat, R0_hat;          // adjusted parameters
  double d_adjustment = 0.0;       // ‖D̂ − D̃‖_F
  double r0_adjustment = 0.0;      // ‖R̂0 − R̃0‖_F
};

// Stability projection: minimizes ‖(Â−Ã)W‖_F over the convexified stability
// set {[[ (1−δρ)W, Z],[Zᵀ,(1−δρ)W]] ⪰ 0, W ⪰ I} with Z = ÂW. Already-stable
// inputs are returned unchanged (exact short-circuit).
MatrixXd stabilize(const MatrixXd& a_tilde);

struct PositiveRealResult {
  bool valid = false;
  MatrixXd P;  // a member of the positive-real set when valid
};

// DARE-first positive-realness check with an LMI feasibility fallback.
PositiveRealResult check_positive_real(const CovarianceModel& cm);

// The repair program: finds PSD blocks Φ minimizing the chosen norm of the
// gap matrix, then adjusts D and R0 through the Lyapunov-consistent update.
// The adjusted model (Â, D̂, C̃, R̂0) is guaranteed positive real.
RepairOutcome repair(const CovarianceModel& cm, RepairNorm norm = RepairNorm::TwoNorm);

struct PipelineResult {
  InnovationsModel model;
  CovarianceModel covariance_model;   // model behind the returned innovations form
  bool stabilization_fired = false;
  double stabilization_shift = 0.0;   // ‖Â − Ã‖_F
  bool repair_fired = false;
  std::optional<RepairOutcome> repair_outcome;
  VectorXd singular_values;
};

// sample covariances → Hankel → realization → least-squares A → stabilization
// → DARE, with the repair program on DARE failure. Always returns a stable
// innovations model with PSD Q.
PipelineResult full_pipeline(const TimeSeries& ts, int m, int n_x,
                             RepairNorm norm = RepairNorm::TwoNorm);

}  // namespace ssid
