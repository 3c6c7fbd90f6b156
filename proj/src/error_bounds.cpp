#include "ssid/error_bounds.hpp"

#include <Eigen/SVD>
#include <cmath>

#include "ssid/errors.hpp"
#include "ssid/hinf.hpp"
#include "ssid/lyapunov.hpp"
#include "ssid/sdp.hpp"

namespace ssid {

namespace {

double spectral_norm(const MatrixXd& m) {
  Eigen::JacobiSVD<MatrixXd> svd(m);
  return svd.singularValues().size() ? svd.singularValues()(0) : 0.0;
}

}  // namespace

ErrorSystem ErrorSystem::between(const InnovationsModel& truth, const InnovationsModel& est) {
  const Eigen::Index nt = truth.n_x();
  const Eigen::Index ne = est.n_x();
  const Eigen::Index ny = truth.n_y();
  if (est.n_y() != ny) throw DimensionMismatch("ErrorSystem: output dimensions differ");
  ErrorSystem out;
  out.system.A = MatrixXd::Zero(nt + ne, nt + ne);
  out.system.A.topLeftCorner(nt, nt) = truth.A;
  out.system.A.bottomRightCorner(ne, ne) = est.A;
  out.system.B.resize(nt + ne, ny);
  out.system.B << truth.B(), est.B();
  out.system.C.resize(ny, nt + ne);
  out.system.C << truth.C, -est.C;
  out.system.Dff = truth.F() - est.F();
  return out;
}

ExactErrorNorms exact_error_norms(const InnovationsModel& truth, const InnovationsModel& est,
                                  double hinf_rel_tol) {
  ErrorSystem err = ErrorSystem::between(truth, est);
  if (!err.system.stable()) throw UnstableMatrix("exact_error_norms: unstable error system");
  return ExactErrorNorms{h2_norm(err.system), hinf_norm(err.system, hinf_rel_tol)};
}

double delta_p1_bound(const FNormBounds& bounds, const AsymptoticCovariance& cov,
                      const PerturbationMaps& maps) {
  MatrixXd half = symmetric_sqrt(cov.joint);
  double norm = spectral_norm(maps.M1 * half);
  return std::sqrt(bounds.chi2_value / bounds.sample_count) * norm;
}

double h2_error_bound(const InnovationsModel& model_hat, const FNormBounds& bounds,
                      const AsymptoticCovariance& cov, const PerturbationMaps& maps) {
  if (!is_stable(model_hat.A)) throw UnstableMatrix("h2_error_bound: model unstable");
  const Eigen::Index nx = model_hat.n_x();

  MatrixXd x = solve_dlyap(model_hat.A, model_hat.C.transpose() * model_hat.C,
                           LyapunovForm::Observability);
  MatrixXd pbar(2 * nx, 2 * nx);
  pbar << x, -x, -x, x;
  MatrixXd b = model_hat.B();
  MatrixXd bbar(2 * nx, model_hat.n_y());
  bbar << b, b;
  MatrixXd abar = MatrixXd::Zero(2 * nx, 2 * nx);
  abar.topLeftCorner(nx, nx) = model_hat.A;
  abar.bottomRightCorner(nx, nx) = model_hat.A;

  const double dp1 = delta_p1_bound(bounds, cov, maps);
  MatrixXd resolvent = kron(MatrixXd(abar.transpose()), MatrixXd(abar.transpose())) -
                       MatrixXd::Identity(4 * nx * nx, 4 * nx * nx);
  double inv_norm = 1.0 / Eigen::JacobiSVD<MatrixXd>(resolvent).singularValues().minCoeff();
  const double dp2 = inv_norm * (2.0 * abar.norm() * dp1 * bounds.eps_A +
                                 pbar.norm() * bounds.eps_A * bounds.eps_A +
                                 bounds.eps_C * bounds.eps_C);

  double sq = bounds.eps_F * bounds.eps_F + bounds.eps_B * bounds.eps_B * pbar.norm() +
              2.0 * bbar.norm() * bounds.eps_B * dp1 + bbar.squaredNorm() * dp2;
  return std::sqrt(std::max(0.0, sq));
}

double hinf_error_bound_perturbative(const InnovationsModel& model_hat,
                                     const FNormBounds& bounds) {
  if (!is_stable(model_hat.A)) throw UnstableMatrix("hinf_error_bound: model unstable");
  const Eigen::Index nx = model_hat.n_x();
  const Eigen::Index ny = model_hat.n_y();
  // ‖C̃(zI−Ã)⁻¹‖∞ and ‖(zI−Ã)⁻¹B̃‖∞
  TransferFunction left{model_hat.A, MatrixXd::Identity(nx, nx), model_hat.C,
                        MatrixXd::Zero(ny, nx)};
  TransferFunction right{model_hat.A, model_hat.B(), MatrixXd::Identity(nx, nx),
                         MatrixXd::Zero(nx, ny)};
  double norm_c = hinf_norm(left, 1e-6);
  double norm_b = hinf_norm(right, 1e-6);
  return norm_c * bounds.eps_A * norm_b + bounds.eps_F + bounds.eps_C * norm_b +
         norm_c * bounds.eps_B;
}

double hinf_error_bound_lmi(const InnovationsModel& model_hat, const FNormBounds& bounds) {
  using namespace sdp;
  if (!is_stable(model_hat.A)) throw UnstableMatrix("hinf_error_bound_lmi: model unstable");
  const Eigen::Index nx = model_hat.n_x();
  const Eigen::Index ny = model_hat.n_y();
  const Eigen::Index n = 2 * nx + ny;

  MatrixXd b = model_hat.B();
  MatrixXd msys = MatrixXd::Zero(n, n);
  msys.topLeftCorner(nx, nx) = model_hat.A;
  msys.block(nx, nx, nx, nx) = model_hat.A;
  msys.block(0, 2 * nx, nx, ny) = b;
  msys.block(nx, 2 * nx, nx, ny) = b;
  msys.block(2 * nx, 0, ny, nx) = model_hat.C;
  msys.block(2 * nx, nx, ny, nx) = -model_hat.C;

  // Uncertainty channels (√eps paddings); zero-eps channels are dropped so
  // their multipliers cannot run away.
  struct Channel {
    MatrixXd h;  // n × i
    MatrixXd e;  // j × n
  };
  std::vector<Channel> channels;
  auto pad_rows = [&](int slot, Eigen::Index dim, double root) {
    MatrixXd h = MatrixXd::Zero(n, dim);
    Eigen::Index off = slot == 0 ? 0 : 2 * nx;
    h.block(off, 0, dim, dim) = root * MatrixXd::Identity(dim, dim);
    return h;
  };
  auto pad_cols = [&](int slot, Eigen::Index dim, double root) {
    MatrixXd e = MatrixXd::Zero(dim, n);
    Eigen::Index off = slot == 0 ? 0 : 2 * nx;
    e.block(0, off, dim, dim) = root * MatrixXd::Identity(dim, dim);
    return e;
  };
  if (bounds.eps_A > 0)
    channels.push_back({pad_rows(0, nx, std::sqrt(bounds.eps_A)),
                        pad_cols(0, nx, std::sqrt(bounds.eps_A))});
  if (bounds.eps_B > 0)
    channels.push_back({pad_rows(0, nx, std::sqrt(bounds.eps_B)),
                        pad_cols(1, ny, std::sqrt(bounds.eps_B))});
  if (bounds.eps_C > 0)
    channels.push_back({pad_rows(1, ny, std::sqrt(bounds.eps_C)),
                        pad_cols(0, nx, std::sqrt(bounds.eps_C))});
  if (bounds.eps_F > 0)
    channels.push_back({pad_rows(1, ny, std::sqrt(bounds.eps_F)),
                        pad_cols(1, ny, std::sqrt(bounds.eps_F))});

  const double scale = 1.0 + msys.norm();
  const double delta = 1e-8 * scale;

  SdpProblem prob;
  AffExpr p = prob.add_symmetric_variable(2 * nx);
  int gamma_sq = prob.add_scalar_variable();
  std::vector<int> mu(channels.size());
  for (size_t k = 0; k < channels.size(); ++k) mu[k] = prob.add_scalar_variable();

  // diag(P, I) and diag(P, γ̄² I) as affine blocks.
  AffExpr zero_xy = AffExpr::zero(2 * nx, ny);
  AffExpr d_pi = sdp::block_expr(
      {{p, zero_xy},
       {zero_xy.transpose(), AffExpr::constant(MatrixXd::Identity(ny, ny))}});
  AffExpr d_pg = sdp::block_expr(
      {{p, zero_xy},
       {zero_xy.transpose(), AffExpr::scaled_var(gamma_sq, MatrixXd::Identity(ny, ny))}});

  AffExpr mid = -1.0 * d_pg;
  for (size_t k = 0; k < channels.size(); ++k)
    mid = mid + AffExpr::scaled_var(
                    mu[k], MatrixXd(channels[k].e.transpose() * channels[k].e));

  // Rows: [−diag(P,I), diag(P,I)M, diag(P,I)H_1 … ; …; −μ_k I].
  std::vector<std::vector<AffExpr>> rows;
  {
    std::vector<AffExpr> row0{-1.0 * d_pi, rmul(d_pi, msys)};
    for (const auto& ch : channels) row0.push_back(rmul(d_pi, ch.h));
    rows.push_back(std::move(row0));
  }
  {
    std::vector<AffExpr> row1{rmul(d_pi, msys).transpose(), mid};
    for (const auto& ch : channels) row1.push_back(AffExpr::zero(n, ch.h.cols()));
    rows.push_back(std::move(row1));
  }
  for (size_t k = 0; k < channels.size(); ++k) {
    std::vector<AffExpr> row{lmul(channels[k].h.transpose(), d_pi),
                             AffExpr::zero(channels[k].h.cols(), n)};
    for (size_t l = 0; l < channels.size(); ++l) {
      Eigen::Index dim = channels[k].h.cols();
      if (l == k)
        row.push_back(AffExpr::scaled_var(mu[k], -MatrixXd::Identity(dim, dim)));
      else
        row.push_back(AffExpr::zero(dim, channels[l].h.cols()));
    }
    rows.push_back(std::move(row));
  }
  AffExpr big = sdp::block_expr(rows);
  prob.add_psd_constraint(-1.0 * big -
                          AffExpr::constant(delta * MatrixXd::Identity(big.rows, big.rows)));
  prob.add_psd_constraint(p - AffExpr::constant(delta * MatrixXd::Identity(2 * nx, 2 * nx)));
  prob.add_psd_constraint(AffExpr::constant(1e6 * scale * MatrixXd::Identity(2 * nx, 2 * nx)) -
                          p);
  for (size_t k = 0; k < channels.size(); ++k) {
    prob.add_psd_constraint(prob.scalar_expr(mu[k]) -
                            AffExpr::constant(delta * MatrixXd::Ones(1, 1)));
    prob.add_psd_constraint(AffExpr::constant(1e8 * scale * MatrixXd::Ones(1, 1)) -
                            prob.scalar_expr(mu[k]));
  }
  prob.add_psd_constraint(prob.scalar_expr(gamma_sq));
  prob.add_psd_constraint(AffExpr::constant(1e8 * scale * scale * MatrixXd::Ones(1, 1)) -
                          prob.scalar_expr(gamma_sq));
  prob.set_objective({{gamma_sq, 1.0}});

  SdpResult res = solve_sdp(prob);
  if (res.status == SdpStatus::Infeasible)
    throw InfeasibleAtAnyGamma("hinf_error_bound_lmi: uncertain system not certifiable");
  if (res.status != SdpStatus::Optimal)
    throw SolverFailure("hinf_error_bound_lmi: SDP failed");
  return std::sqrt(std::max(0.0, res.x(gamma_sq)));
}

BoundReport compute_bound_report(const PerturbationMaps& maps,
                                 const AsymptoticCovariance& cov, double sample_count,
                                 double confidence,
                                 std::optional<std::pair<double, double>> repair_adjust) {
  BoundReport report;
  report.confidence = confidence;
  report.eps = fnorm_bounds(cov, maps, sample_count, confidence, repair_adjust);
  report.delta_p1_bound = delta_p1_bound(report.eps, cov, maps);
  report.h2_bound = h2_error_bound(maps.model, report.eps, cov, maps);
  report.hinf_bound_perturbative = hinf_error_bound_perturbative(maps.model, report.eps);
  report.hinf_bound_lmi = hinf_error_bound_lmi(maps.model, report.eps);

  const Eigen::Index nx = maps.model.n_x();
  MatrixXd x = solve_dlyap(maps.model.A, maps.model.C.transpose() * maps.model.C,
                           LyapunovForm::Observability);
  MatrixXd pbar(2 * nx, 2 * nx);
  pbar << x, -x, -x, x;
  MatrixXd abar = MatrixXd::Zero(2 * nx, 2 * nx);
  abar.topLeftCorner(nx, nx) = maps.model.A;
  abar.bottomRightCorner(nx, nx) = maps.model.A;
  MatrixXd resolvent = kron(MatrixXd(abar.transpose()), MatrixXd(abar.transpose())) -
                       MatrixXd::Identity(4 * nx * nx, 4 * nx * nx);
  double inv_norm = 1.0 / Eigen::JacobiSVD<MatrixXd>(resolvent).singularValues().minCoeff();
  report.delta_p2_bound =
      inv_norm * (2.0 * abar.norm() * report.delta_p1_bound * report.eps.eps_A +
                  pbar.norm() * report.eps.eps_A * report.eps.eps_A +
                  report.eps.eps_C * report.eps.eps_C);
  return report;
}

}  // namespace ssid
