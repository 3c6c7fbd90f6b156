#include "ssid/hinf.hpp"

#include <cmath>

#include "ssid/errors.hpp"
#include "ssid/sdp.hpp"

namespace ssid {

namespace {

// Max-margin phase-I form of the bounded-real LMI: maximize t subject to
//   −BRL(P, γ) ⪰ t·I,  P ⪰ t·I,  t ≤ 1,  κ·I − P ⪰ 0.
// Strict feasibility of the BRL is equivalent to a positive optimal margin.
double bounded_real_margin(const TransferFunction& g, double gamma) {
  using namespace sdp;
  const Eigen::Index nx = g.n_x();
  const Eigen::Index nu = g.n_u();
  const Eigen::Index n = nx + nu;

  SdpProblem prob;
  AffExpr p = prob.add_symmetric_variable(nx);
  int t = prob.add_scalar_variable();

  // System matrix rows [A B; C D] stacked so that the quadratic form is
  // [AᵀPA + CᵀC, AᵀPB + CᵀD; ·, BᵀPB + DᵀD].
  MatrixXd ab(nx, n), cd(g.n_y(), n);
  ab << g.A, g.B;
  cd << g.C, g.Dff;

  // BRL(P,γ) = [A B;C D]ᵀ diag(P,I) [A B;C D] − diag(P, γ²I).
  AffExpr quad_p = lmul(ab.transpose(), rmul(p, ab));
  AffExpr quad_c = AffExpr::constant(cd.transpose() * cd);
  MatrixXd shift = MatrixXd::Zero(n, n);
  shift.bottomRightCorner(nu, nu) = gamma * gamma * MatrixXd::Identity(nu, nu);
  AffExpr diag_p = block_expr({{p, AffExpr::zero(nx, nu)},
                               {AffExpr::zero(nu, nx), AffExpr::zero(nu, nu)}});
  AffExpr brl = quad_p + quad_c - diag_p - AffExpr::constant(shift);

  // Normalize the margin against the data scale so t is a meaningful margin.
  double scale = 1.0 + gamma * gamma + ab.squaredNorm() + cd.squaredNorm();
  AffExpr t_eye_n = AffExpr::scaled_var(t, scale * MatrixXd::Identity(n, n));
  AffExpr t_eye_x = AffExpr::scaled_var(t, MatrixXd::Identity(nx, nx));

  prob.add_psd_constraint(-1.0 * brl - t_eye_n);
  prob.add_psd_constraint(p - t_eye_x);
  prob.add_psd_constraint(AffExpr::constant(MatrixXd::Ones(1, 1)) -
                          prob.scalar_expr(t));
  const double kappa = 1e4 * scale;
  prob.add_psd_constraint(AffExpr::constant(kappa * MatrixXd::Identity(nx, nx)) - p);
  prob.set_objective({{t, -1.0}});  // maximize t

  SdpResult res = solve_sdp(prob);
  if (res.status != SdpStatus::Optimal)
    throw SolverFailure("bounded_real_margin: feasibility oracle did not converge");
  return res.x(t);
}

}  // namespace

bool bounded_real_feasible(const TransferFunction& g, double gamma) {
  return bounded_real_margin(g, gamma) > 0.0;
}

double hinf_norm(const TransferFunction& g, double rel_tol) {
  if (!g.stable()) throw UnstableMatrix("hinf_norm: A is not Schur stable");
  if (rel_tol <= 0.0) throw Error("hinf_norm: rel_tol must be positive");

  // Static system: the LMI degenerates, the norm is the top singular value.
  double d_gain = 0.0;
  if (g.Dff.size() > 0) {
    Eigen::JacobiSVD<MatrixXd> svd(g.Dff);
    d_gain = svd.singularValues().size() ? svd.singularValues()(0) : 0.0;
  }
  if (g.n_x() == 0 || g.B.size() == 0 || g.C.size() == 0) return d_gain;

  // Grid seed: a certified lower bound on the norm.
  double lo = std::max(grid_max_gain(g, 512), 1e-14);
  double hi = lo * (1.0 + 8.0 * rel_tol) + 1e-12;
  int guard = 0;
  while (!bounded_real_feasible(g, hi)) {
    hi *= 2.0;
    if (++guard > 60) throw SolverFailure("hinf_norm: no feasible upper bound found");
  }
  while (hi - lo > rel_tol * lo) {
    double mid = 0.5 * (lo + hi);
    if (bounded_real_feasible(g, mid))
      hi = mid;
    else
      lo = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace ssid
