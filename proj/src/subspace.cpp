#include "ssid/subspace.hpp"

#include <Eigen/QR>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>

#include "ssid/errors.hpp"

namespace ssid {

namespace detail {

std::vector<MatrixXd> sample_covariances_serial(const TimeSeries& ts, int max_lag) {
  const Eigen::Index n = ts.length();
  const Eigen::Index n_y = ts.n_y;
  if (max_lag >= n) throw InsufficientData("sample_covariances: max_lag >= N");
  std::vector<MatrixXd> covs(max_lag + 1);
  for (int k = 0; k <= max_lag; ++k) {
    MatrixXd acc = MatrixXd::Zero(n_y, n_y);
    for (Eigen::Index t = k; t < n; ++t)
      acc.noalias() += ts.samples.row(t).transpose() * ts.samples.row(t - k);
    covs[k] = acc / static_cast<double>(n - k);
  }
  covs[0] = symmetrize(covs[0]);
  return covs;
}

}  // namespace detail

std::vector<MatrixXd> sample_covariances(const TimeSeries& ts, int max_lag) {
  const Eigen::Index n = ts.length();
  const Eigen::Index n_y = ts.n_y;
  if (max_lag >= n) throw InsufficientData("sample_covariances: max_lag >= N");
  if (!ts.samples.allFinite()) throw InsufficientData("sample_covariances: non-finite samples");

  std::vector<MatrixXd> covs(max_lag + 1);
  // Fixed chunk grid, independent of the thread count, so the reduction order
  // (and therefore the rounding) never changes.
  constexpr Eigen::Index kChunks = 64;
  for (int k = 0; k <= max_lag; ++k) {
    const Eigen::Index rows = n - k;
    const Eigen::Index len = (rows + kChunks - 1) / kChunks;
    std::vector<MatrixXd> partial(kChunks, MatrixXd::Zero(n_y, n_y));
#pragma omp parallel for schedule(static)
    for (Eigen::Index c = 0; c < kChunks; ++c) {
      const Eigen::Index lo = c * len;
      if (lo >= rows) continue;
      const Eigen::Index count = std::min(len, rows - lo);
      partial[c].noalias() = ts.samples.block(k + lo, 0, count, n_y).transpose() *
                             ts.samples.block(lo, 0, count, n_y);
    }
    MatrixXd acc = MatrixXd::Zero(n_y, n_y);
    for (Eigen::Index c = 0; c < kChunks; ++c) acc += partial[c];
    covs[k] = acc / static_cast<double>(rows);
  }
  covs[0] = symmetrize(covs[0]);
  return covs;
}

HankelEstimate build_hankel(const std::vector<MatrixXd>& covs, int m) {
  if (m < 1) throw InsufficientLags("build_hankel: m must be >= 1");
  if (static_cast<int>(covs.size()) < 2 * m)
    throw InsufficientLags("build_hankel: need covariance lags 0 .. 2m-1");
  const Eigen::Index n_y = covs[0].rows();
  HankelEstimate est;
  est.m = m;
  est.covariances.assign(covs.begin(), covs.begin() + 2 * m);
  est.H.resize(m * n_y, m * n_y);
  for (int i = 1; i <= m; ++i)
    for (int j = 1; j <= m; ++j)
      est.H.block((i - 1) * n_y, (j - 1) * n_y, n_y, n_y) = covs[i + j - 1];
  return est;
}

Realization realize(const MatrixXd& h, int n_x) {
  const Eigen::Index p = h.rows();
  if (n_x < 1 || n_x > p) throw RankDeficient("realize: order out of range");
  Eigen::JacobiSVD<MatrixXd> svd(h, Eigen::ComputeFullU | Eigen::ComputeFullV);
  VectorXd sv = svd.singularValues();
  if (sv(n_x - 1) <= 1e-12 * sv(0))
    throw RankDeficient("realize: sigma_{n_x}/sigma_1 below 1e-12");

  MatrixXd u = svd.matrixU();
  MatrixXd v = svd.matrixV();
  // Deterministic sign convention: the largest-magnitude entry of every left
  // singular vector is made positive.
  for (Eigen::Index i = 0; i < p; ++i) {
    Eigen::Index idx = 0;
    u.col(i).cwiseAbs().maxCoeff(&idx);
    if (u(idx, i) < 0.0) {
      u.col(i) = -u.col(i);
      v.col(i) = -v.col(i);
    }
  }

  Realization real;
  real.n_x = n_x;
  real.singular_values = sv;
  real.Us = u.leftCols(n_x);
  real.Vs = v.leftCols(n_x);
  real.Un = u.rightCols(p - n_x);
  real.Vn = v.rightCols(p - n_x);
  real.lambda_s = sv.head(n_x);
  VectorXd root = real.lambda_s.cwiseSqrt();
  real.observability = real.Us * root.asDiagonal();
  real.controllability = root.asDiagonal() * real.Vs.transpose();
  return real;
}

Realization realize(const HankelEstimate& hankel, int n_x) {
  if (n_x > hankel.m * hankel.n_y())
    throw RankDeficient("realize: n_x exceeds m*n_y");
  return realize(hankel.H, n_x);
}

int suggest_order(const Realization& real) {
  const VectorXd& sv = real.singular_values;
  int best = 1;
  double best_ratio = 0.0;
  for (Eigen::Index i = 0; i + 1 < sv.size(); ++i) {
    if (sv(i + 1) <= 0.0) return static_cast<int>(i + 1);
    double ratio = sv(i) / sv(i + 1);
    if (ratio > best_ratio) {
      best_ratio = ratio;
      best = static_cast<int>(i + 1);
    }
  }
  return best;
}

CovarianceModel extract_covariance_model(const Realization& real, const MatrixXd& r0,
                                         Eigen::Index n_y) {
  const Eigen::Index rows = real.observability.rows();
  if (rows % n_y != 0) throw DimensionMismatch("extract_covariance_model: n_y mismatch");
  const Eigen::Index m = rows / n_y;
  if (m < 2) throw InsufficientLags("extract_covariance_model: m >= 2 required");

  const MatrixXd& omega = real.observability;
  MatrixXd upper = omega.topRows((m - 1) * n_y);    // shifted block rows 1..m-1
  MatrixXd lower = omega.bottomRows((m - 1) * n_y);  // shifted block rows 2..m

  Eigen::JacobiSVD<MatrixXd> cond_svd(upper);
  const VectorXd& s = cond_svd.singularValues();
  if (s(s.size() - 1) <= 0.0 || s(0) / s(s.size() - 1) > 1e10)
    throw IllConditionedShift("extract_covariance_model: cond(shifted observability) > 1e10");

  CovarianceModel cm;
  cm.A = upper.colPivHouseholderQr().solve(lower);
  cm.C = omega.topRows(n_y);
  cm.D = real.controllability.leftCols(n_y);
  cm.R0 = symmetrize(r0);
  return cm;
}

InnovationsModel covariance_to_innovations(const CovarianceModel& cm) {
  if (!is_stable(cm.A))
    throw UnstableMatrix("covariance_to_innovations: A is not Schur stable");
  DareSolution sol = solve_dare(cm.A, cm.D, cm.C, cm.R0);
  return InnovationsModel{cm.A, sol.K, sol.Q, cm.C};
}

CovarianceModel exact_covariance_model(const InnovationsModel& model) {
  MatrixXd b = model.B();
  MatrixXd f = model.F();
  MatrixXd p = solve_dlyap(model.A, b * b.transpose(), LyapunovForm::Controllability);
  CovarianceModel cm;
  cm.A = model.A;
  cm.C = model.C;
  cm.D = model.A * p * model.C.transpose() + b * f.transpose();
  cm.R0 = symmetrize(model.C * p * model.C.transpose() + f * f.transpose());
  return cm;
}

std::vector<MatrixXd> exact_covariances(const InnovationsModel& model, int max_lag) {
  CovarianceModel cm = exact_covariance_model(model);
  std::vector<MatrixXd> covs(max_lag + 1);
  covs[0] = cm.R0;
  MatrixXd a_pow = MatrixXd::Identity(model.n_x(), model.n_x());
  for (int k = 1; k <= max_lag; ++k) {
    covs[k] = cm.C * a_pow * cm.D;
    a_pow = model.A * a_pow;
  }
  return covs;
}

}  // namespace ssid
