#pragma once

#include <Eigen/Dense>
#include <map>
#include <string>
#include <vector>

#include "ssid/matrix_ops.hpp"

namespace ssid::sdp {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// Matrix-valued expression affine in the scalar decision variables:
// E(x) = C0 + Σ_i x_i · Coef_i. All constraint matrices handed to the solver
// are built from these.
struct AffExpr {
  Eigen::Index rows = 0, cols = 0;
  MatrixXd c0;
  std::map<int, MatrixXd> lin;  // variable index → coefficient matrix

  static AffExpr constant(const MatrixXd& m);
  static AffExpr zero(Eigen::Index r, Eigen::Index c);
  // x_var · M
  static AffExpr scaled_var(int var, const MatrixXd& m);

  AffExpr transpose() const;
  AffExpr operator-() const;
};

AffExpr operator+(const AffExpr& a, const AffExpr& b);
AffExpr operator-(const AffExpr& a, const AffExpr& b);
AffExpr operator*(double s, const AffExpr& e);
// L · E and E · R with constant matrices.
AffExpr lmul(const MatrixXd& l, const AffExpr& e);
AffExpr rmul(const AffExpr& e, const MatrixXd& r);
// Columnwise vectorization of an affine matrix expression.
AffExpr vec_expr(const AffExpr& e);
// Block assembly from a dense grid of expressions (row-major list of rows).
AffExpr block_expr(const std::vector<std::vector<AffExpr>>& blocks);

enum class SdpStatus { Optimal, Infeasible, NumericalFailure };

struct SdpResult {
  SdpStatus status = SdpStatus::NumericalFailure;
  VectorXd x;
  double objective = 0.0;
  double max_violation = 0.0;  // most negative constraint eigenvalue, clamped at 0
  double rel_gap = 0.0;
  int iterations = 0;
};

struct SdpOptions {
  int max_iterations = 120;
  double feas_tol = 1e-10;   // relative primal/dual residual target
  double gap_tol = 5e-10;    // relative duality gap target
  double step_fraction = 0.98;
};

// Linear SDP over scalar variables x:
//   minimize cᵀx  subject to  F0_j + Σ_i x_i F_ij ⪰ 0 for every block j.
// Matrix variables are parameterized through their scalar entries; strict
// inequalities are closed by the caller via explicit δ·I slacks.
class SdpProblem {
 public:
  // Symmetric n×n matrix variable: n(n+1)/2 scalars, returned as an AffExpr.
  AffExpr add_symmetric_variable(Eigen::Index n);
  // General r×c matrix variable.
  AffExpr add_variable(Eigen::Index r, Eigen::Index c);
  int add_scalar_variable();
  AffExpr scalar_expr(int var) const;

  void add_psd_constraint(const AffExpr& e);
  // minimize Σ coef·x over the listed variables
  void set_objective(const std::vector<std::pair<int, double>>& terms);

  int num_variables() const { return num_vars_; }
  const std::vector<AffExpr>& constraints() const { return constraints_; }
  const std::vector<std::pair<int, double>>& objective() const { return objective_; }

  // Value of an affine expression at a solution vector.
  static MatrixXd value(const AffExpr& e, const VectorXd& x);

 private:
  int num_vars_ = 0;
  std::vector<AffExpr> constraints_;
  std::vector<std::pair<int, double>> objective_;
};

// Dense primal-dual interior-point method (HKM direction, Mehrotra
// predictor-corrector, infeasible start).
SdpResult solve_sdp(const SdpProblem& prob, const SdpOptions& opts = {});

}  // namespace ssid::sdp
