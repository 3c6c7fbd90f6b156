#include "ssid/repair.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

#include "ssid/errors.hpp"
#include "ssid/lyapunov.hpp"
#include "ssid/sdp.hpp"

namespace ssid {

using sdp::AffExpr;
using sdp::SdpProblem;
using sdp::SdpResult;
using sdp::SdpStatus;

namespace {

// The positive-real gap matrix of (A, D, C, R0) at P:
// [[P − APAᵀ, D − APCᵀ], [Dᵀ − CPAᵀ, R0 − CPCᵀ]] as an affine expression.
AffExpr gap_expr(const CovarianceModel& cm, const AffExpr& p) {
  const Eigen::Index nx = cm.n_x();
  const Eigen::Index ny = cm.n_y();
  AffExpr tl = p - lmul(cm.A, rmul(p, cm.A.transpose()));
  AffExpr tr = AffExpr::constant(cm.D) - lmul(cm.A, rmul(p, cm.C.transpose()));
  AffExpr br = AffExpr::constant(cm.R0) - lmul(cm.C, rmul(p, cm.C.transpose()));
  (void)nx;
  (void)ny;
  return sdp::block_expr({{tl, tr}, {tr.transpose(), br}});
}

SdpResult solve_or_retry(SdpProblem& prob) {
  SdpResult res = sdp::solve_sdp(prob);
  if (res.status == SdpStatus::NumericalFailure) {
    // One retry with a relaxed path on the relaxed path.
    sdp::SdpOptions relaxed;
    relaxed.feas_tol = 1e-8;
    relaxed.gap_tol = 1e-7;
    relaxed.max_iterations = 200;
    res = sdp::solve_sdp(prob, relaxed);
  }
  return res;
}

}  // namespace

MatrixXd stabilize(const MatrixXd& a_tilde) {
  if (a_tilde.rows() != a_tilde.cols()) throw DimensionMismatch("stabilize: A not square");
  if (is_stable(a_tilde)) return a_tilde;  // exact short-circuit

  const Eigen::Index n = a_tilde.rows();
  constexpr double kContraction = 1e-6;  // certified ρ(Â) ≤ 1 − kContraction

  SdpProblem prob;
  AffExpr w = prob.add_symmetric_variable(n);
  AffExpr z = prob.add_variable(n, n);
  int t = prob.add_scalar_variable();

  AffExpr scaled_w = (1.0 - kContraction) * w;
  prob.add_psd_constraint(sdp::block_expr({{scaled_w, z}, {z.transpose(), scaled_w}}));
  prob.add_psd_constraint(w - AffExpr::constant(MatrixXd::Identity(n, n)));
  prob.add_psd_constraint(AffExpr::constant(1e4 * MatrixXd::Identity(n, n)) - w);

  // t ≥ ‖Z − ÃW‖_F through the arrow block [[t, vᵀ],[v, t·I]].
  AffExpr residual = vec_expr(z - lmul(a_tilde, w));
  AffExpr t_scalar = prob.scalar_expr(t);
  AffExpr t_eye = AffExpr::scaled_var(t, MatrixXd::Identity(n * n, n * n));
  prob.add_psd_constraint(
      sdp::block_expr({{t_scalar, residual.transpose()}, {residual, t_eye}}));
  prob.set_objective({{t, 1.0}});

  SdpResult res = solve_or_retry(prob);
  if (res.status != SdpStatus::Optimal)
    throw SolverFailure("stabilize: stability projection SDP failed");

  MatrixXd wv = SdpProblem::value(w, res.x);
  MatrixXd zv = SdpProblem::value(z, res.x);
  MatrixXd a_hat = wv.ldlt().solve(zv.transpose()).transpose();  // Z W⁻¹
  if (spectral_radius(a_hat) >= 1.0)
    throw SolverFailure("stabilize: projected matrix not strictly stable");
  return a_hat;
}

PositiveRealResult check_positive_real(const CovarianceModel& cm) {
  if (!is_stable(cm.A)) throw UnstableMatrix("check_positive_real: A unstable");
  require_symmetric(cm.R0, "check_positive_real R0", 1e-8);

  try {
    DareSolution sol = solve_dare(cm.A, cm.D, cm.C, cm.R0);
    return {true, sol.P};
  } catch (const DareInfeasible&) {
    // fall through to the LMI feasibility problem
  } catch (const SingularQ&) {
  }

  const Eigen::Index nx = cm.n_x();
  const double scale = 1.0 + cm.R0.norm();
  SdpProblem prob;
  AffExpr p = prob.add_symmetric_variable(nx);
  int t = prob.add_scalar_variable();
  AffExpr t_big = AffExpr::scaled_var(t, MatrixXd::Identity(nx + cm.n_y(), nx + cm.n_y()));
  AffExpr t_small = AffExpr::scaled_var(t, MatrixXd::Identity(nx, nx));
  prob.add_psd_constraint(gap_expr(cm, p) - t_big);
  prob.add_psd_constraint(p - t_small);
  prob.add_psd_constraint(AffExpr::constant(MatrixXd::Ones(1, 1) * scale) -
                          prob.scalar_expr(t));
  prob.add_psd_constraint(AffExpr::constant(1e4 * scale * MatrixXd::Identity(nx, nx)) - p);
  prob.set_objective({{t, -1.0}});  // maximize the feasibility margin

  SdpResult res = solve_or_retry(prob);
  if (res.status != SdpStatus::Optimal)
    throw SolverFailure("check_positive_real: feasibility SDP failed");
  double margin = res.x(t);
  if (margin <= 1e-10 * scale) return {false, MatrixXd()};
  return {true, SdpProblem::value(p, res.x)};
}

RepairOutcome repair(const CovarianceModel& cm, RepairNorm norm) {
  if (!is_stable(cm.A)) throw UnstableMatrix("repair: run stabilize first");
  require_symmetric(cm.R0, "repair R0", 1e-8);

  const Eigen::Index nx = cm.n_x();
  const Eigen::Index ny = cm.n_y();
  const double scale = 1.0 + cm.R0.norm();
  const double delta = 1e-8 * scale;       // strictness slack
  const double phi_floor = 1e-7 * scale;   // keeps the adjusted model strictly PR

  // Feasible-at-zero-gap short-circuit: when the DARE already solves, the
  // optimum of the program is lambda = 0 with the Phi blocks reproducing the
  // gap matrix of the DARE solution exactly, so no numerical solve is needed
  // and the parameters are left untouched.
  try {
    DareSolution sol = solve_dare(cm.A, cm.D, cm.C, cm.R0);
    RepairOutcome out;
    out.lambda = 0.0;
    out.P_bar = sol.P;
    out.Phi11 = symmetrize(sol.P - cm.A * sol.P * cm.A.transpose());
    out.Phi12 = cm.D - cm.A * sol.P * cm.C.transpose();
    out.Phi22 = sol.Q;
    out.D_hat = cm.D;
    out.R0_hat = cm.R0;
    out.d_adjustment = 0.0;
    out.r0_adjustment = 0.0;
    return out;
  } catch (const DareInfeasible&) {
  } catch (const SingularQ&) {
  }

  const Eigen::Index ng = nx + ny;

  // Shared constraint body; the norm bound enters either as the phase-1
  // decision variable or as the fixed phase-1 optimum during the
  // minimal-adjustment tie-break pass.
  struct Built {
    SdpProblem prob;
    AffExpr p, phi11, phi12, phi22;
    int objective_var = -1;
  };
  auto build = [&](RepairNorm n, const double* fixed_lambda) {
    Built b;
    b.p = b.prob.add_symmetric_variable(nx);
    b.phi11 = b.prob.add_symmetric_variable(nx);
    b.phi12 = b.prob.add_variable(nx, ny);
    b.phi22 = b.prob.add_symmetric_variable(ny);

    AffExpr phi = sdp::block_expr({{b.phi11, b.phi12}, {b.phi12.transpose(), b.phi22}});
    AffExpr g = gap_expr(cm, b.p) - phi;

    if (n == RepairNorm::TwoNorm) {
      // [[lambda I, G],[G^T, I]] >= 0  <=>  G G^T <= lambda I.
      AffExpr lam_eye = fixed_lambda
                            ? AffExpr::constant(*fixed_lambda * MatrixXd::Identity(ng, ng))
                            : AffExpr::scaled_var(b.objective_var = b.prob.add_scalar_variable(),
                                                  MatrixXd::Identity(ng, ng));
      AffExpr eye = AffExpr::constant(MatrixXd::Identity(ng, ng));
      b.prob.add_psd_constraint(sdp::block_expr({{lam_eye, g}, {g.transpose(), eye}}));
    } else {
      // lambda >= ||G||_F through the arrow block.
      AffExpr gv = vec_expr(g);
      AffExpr lam = fixed_lambda
                        ? AffExpr::constant(*fixed_lambda * MatrixXd::Ones(1, 1))
                        : b.prob.scalar_expr(b.objective_var = b.prob.add_scalar_variable());
      AffExpr lam_eye = fixed_lambda
                            ? AffExpr::constant(*fixed_lambda * MatrixXd::Identity(ng * ng, ng * ng))
                            : AffExpr::scaled_var(b.objective_var,
                                                  MatrixXd::Identity(ng * ng, ng * ng));
      b.prob.add_psd_constraint(
          sdp::block_expr({{lam, gv.transpose()}, {gv, lam_eye}}));
    }
    b.prob.add_psd_constraint(phi -
                              AffExpr::constant(phi_floor * MatrixXd::Identity(ng, ng)));
    b.prob.add_psd_constraint(b.p - AffExpr::constant(delta * MatrixXd::Identity(nx, nx)));
    b.prob.add_psd_constraint(AffExpr::constant(1e4 * scale * MatrixXd::Identity(nx, nx)) -
                              b.p);
    return b;
  };

  // Phase 1: minimize the chosen norm of the gap residual (the printed
  // program).
  Built phase1 = build(norm, nullptr);
  phase1.prob.set_objective({{phase1.objective_var, 1.0}});
  SdpResult res1 = solve_or_retry(phase1.prob);
  if (res1.status != SdpStatus::Optimal) throw SolverFailure("repair: SDP failed");
  const double lambda_star = res1.x(phase1.objective_var);

  // Phase 2: the optimal face is typically not a single point; among the
  // norm-optimal solutions pick the one with the smallest parameter
  // adjustment. vec(D_hat) and vec(R0_hat) are affine in Phi11 because the
  // discrete Lyapunov solve is a fixed linear map.
  const double lambda_fix = lambda_star * (1.0 + 1e-5) + 1e-9 * scale;
  Built phase2 = build(norm, &lambda_fix);
  MatrixXd dlyap_inv = (MatrixXd::Identity(nx * nx, nx * nx) - kron(cm.A, cm.A))
                           .partialPivLu()
                           .inverse();
  MatrixXd d_map = kron(cm.C, cm.A) * dlyap_inv;    // vec(A Pbar C^T) from vec(Phi11)
  MatrixXd r_map = kron(cm.C, cm.C) * dlyap_inv;    // vec(C Pbar C^T) from vec(Phi11)
  AffExpr d_shift = lmul(d_map, vec_expr(phase2.phi11)) + vec_expr(phase2.phi12) -
                    AffExpr::constant(vec(cm.D));
  AffExpr r_shift = lmul(r_map, vec_expr(phase2.phi11)) + vec_expr(phase2.phi22) -
                    AffExpr::constant(vec(cm.R0));
  AffExpr adj = sdp::block_expr({{d_shift}, {r_shift}});
  int t2 = phase2.prob.add_scalar_variable();
  AffExpr t2_scalar = phase2.prob.scalar_expr(t2);
  AffExpr t2_eye = AffExpr::scaled_var(t2, MatrixXd::Identity(adj.rows, adj.rows));
  phase2.prob.add_psd_constraint(
      sdp::block_expr({{t2_scalar, adj.transpose()}, {adj, t2_eye}}));
  phase2.prob.set_objective({{t2, 1.0}});
  SdpResult res2 = solve_or_retry(phase2.prob);

  const Built& used = (res2.status == SdpStatus::Optimal) ? phase2 : phase1;
  const VectorXd& x = (res2.status == SdpStatus::Optimal) ? res2.x : res1.x;

  RepairOutcome out;
  out.lambda = lambda_star;
  out.Phi11 = symmetrize(SdpProblem::value(used.phi11, x));
  out.Phi12 = SdpProblem::value(used.phi12, x);
  out.Phi22 = symmetrize(SdpProblem::value(used.phi22, x));
  out.P_bar = solve_dlyap(cm.A, out.Phi11, LyapunovForm::Controllability);
  out.D_hat = cm.A * out.P_bar * cm.C.transpose() + out.Phi12;
  out.R0_hat = symmetrize(cm.C * out.P_bar * cm.C.transpose() + out.Phi22);
  out.d_adjustment = (out.D_hat - cm.D).norm();
  out.r0_adjustment = (out.R0_hat - cm.R0).norm();
  return out;
}

PipelineResult full_pipeline(const TimeSeries& ts, int m, int n_x, RepairNorm norm) {
  if (ts.length() < 2 * m * ts.n_y)
    throw InsufficientData("full_pipeline: N below 2*m*n_y");

  auto covs = sample_covariances(ts, 2 * m - 1);
  HankelEstimate hankel = build_hankel(covs, m);
  Realization real = realize(hankel, n_x);
  CovarianceModel raw = extract_covariance_model(real, covs[0], ts.n_y);

  PipelineResult out;
  out.singular_values = real.singular_values;
  MatrixXd a_hat = stabilize(raw.A);
  out.stabilization_fired = !is_stable(raw.A);
  out.stabilization_shift = (a_hat - raw.A).norm();

  CovarianceModel cm{a_hat, raw.D, raw.C, raw.R0};
  try {
    out.model = covariance_to_innovations(cm);
    out.covariance_model = cm;
    return out;
  } catch (const DareInfeasible&) {
  } catch (const SingularQ&) {
  }

  out.repair_fired = true;
  RepairOutcome rep = repair(cm, norm);
  CovarianceModel adjusted{cm.A, rep.D_hat, cm.C, rep.R0_hat};
  try {
    out.model = covariance_to_innovations(adjusted);
  } catch (const Error& e) {
    throw PostRepairDareFailure(std::string("full_pipeline: DARE failed after repair: ") +
                                e.what());
  }
  out.covariance_model = adjusted;
  out.repair_outcome = std::move(rep);
  return out;
}

}  // namespace ssid
