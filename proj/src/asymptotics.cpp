#include "ssid/asymptotics.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <cmath>
#include <complex>
#include <vector>

#include "ssid/errors.hpp"
#include "ssid/lyapunov.hpp"
#include "ssid/subspace.hpp"

namespace ssid {

using Eigen::MatrixXcd;
using Eigen::VectorXcd;

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

struct BlockAccumulator {
  MatrixXd r0, r0h, h1, h3;
  BlockAccumulator(Eigen::Index ny, Eigen::Index p) {
    r0 = MatrixXd::Zero(ny * ny, ny * ny);
    r0h = MatrixXd::Zero(ny * ny, p * p);
    h1 = MatrixXd::Zero(p * p, p * p);
    h3 = MatrixXd::Zero(p * p, p * p);
  }
  BlockAccumulator& operator+=(const BlockAccumulator& o) {
    r0 += o.r0;
    r0h += o.r0h;
    h1 += o.h1;
    h3 += o.h3;
    return *this;
  }
};

// Integrand blocks at a single frequency, weighted and reduced to real parts
// (the grid pairs ±ω, so imaginary parts cancel exactly).
void accumulate_point(const TransferFunction& ge, int m, double omega, double weight,
                      BlockAccumulator* acc) {
  MatrixXcd g = ge.evaluate(omega);
  MatrixXcd s = g * g.adjoint();
  VectorXcd e1(m), e2(m);
  for (int k = 0; k < m; ++k) {
    e1(k) = std::polar(1.0, omega * k);
    e2(k) = std::polar(1.0, -omega * (k + 1));
  }
  MatrixXcd e1r = e1.adjoint();  // E1^H, 1×m
  MatrixXcd e2r = e2.adjoint();

  acc->r0 += weight * kron(MatrixXcd(s.conjugate()), s).real();
  MatrixXcd c2 = kron(e2r, s);  // E2^H ⊗ S
  MatrixXcd c1 = kron(e1r, s);
  acc->r0h += weight * kron(MatrixXcd(c2.conjugate()), c1).real();
  MatrixXcd v1 = kron(MatrixXcd(e1 * e1r), s);
  MatrixXcd v2 = kron(MatrixXcd(e2 * e2r), s);
  acc->h1 += weight * kron(MatrixXcd(v2.conjugate()), v1).real();
  MatrixXcd s12 = kron(MatrixXcd(e1 * e2r), s);
  MatrixXcd s21 = kron(MatrixXcd(e2 * e1r), s);
  acc->h3 += weight * kron(MatrixXcd(s12.conjugate()), s21).real();
}

AsymptoticCovariance assemble(Eigen::Index ny, int m, int n_quad, const MatrixXd& r0,
                              const MatrixXd& r0h, const MatrixXd& h1, const MatrixXd& h3) {
  const Eigen::Index p = m * ny;
  MatrixXd k_small = commutation_matrix(ny, ny);
  MatrixXd k_big = commutation_matrix(p, p);
  AsymptoticCovariance out;
  out.n_y = ny;
  out.m = m;
  out.n_quadrature = n_quad;
  out.P_R0 = symmetrize((MatrixXd::Identity(ny * ny, ny * ny) + k_small) * r0);
  out.P_R0H = (MatrixXd::Identity(ny * ny, ny * ny) + k_small) * r0h;
  out.P_H = symmetrize(h1 + k_big * h3);
  out.joint.resize(ny * ny + p * p, ny * ny + p * p);
  out.joint << out.P_R0, out.P_R0H, out.P_R0H.transpose(), out.P_H;
  out.joint = symmetrize(out.joint);
  return out;
}

void check_grid(const FrequencyGrid& grid) {
  if (grid.n_points < 1024 || grid.n_points % 2 != 0)
    throw Error("asymptotic_covariance: grid must be even with at least 1024 points");
}

}  // namespace

AsymptoticCovariance asymptotic_covariance(const InnovationsModel& model, int m,
                                           const FrequencyGrid& grid) {
  if (!is_stable(model.A)) throw UnstableMatrix("asymptotic_covariance: model unstable");
  check_grid(grid);
  const Eigen::Index ny = model.n_y();
  const Eigen::Index p = m * ny;
  TransferFunction ge = innovations_transfer(model);

  // Conjugate symmetry: ω and −ω contribute complex-conjugate integrands, so
  // only [−π, 0] is visited, with interior points double-weighted. The chunk
  // grid is fixed so the summation order never depends on the thread count.
  const int half = grid.n_points / 2;
  constexpr int kChunks = 64;
  const int len = (half + 1 + kChunks - 1) / kChunks;
  std::vector<BlockAccumulator> parts(kChunks, BlockAccumulator(ny, p));
#pragma omp parallel for schedule(static)
  for (int c = 0; c < kChunks; ++c) {
    for (int k = c * len; k < std::min((c + 1) * len, half + 1); ++k) {
      double weight = (k == 0 || k == half) ? 1.0 : 2.0;
      accumulate_point(ge, m, grid.omega(k), weight, &parts[c]);
    }
  }
  BlockAccumulator total(ny, p);
  for (int c = 0; c < kChunks; ++c) total += parts[c];
  double inv_n = 1.0 / grid.n_points;
  return assemble(ny, m, grid.n_points, total.r0 * inv_n, total.r0h * inv_n,
                  total.h1 * inv_n, total.h3 * inv_n);
}

namespace detail {

AsymptoticCovariance asymptotic_covariance_serial(const InnovationsModel& model, int m,
                                                  const FrequencyGrid& grid) {
  if (!is_stable(model.A)) throw UnstableMatrix("asymptotic_covariance: model unstable");
  check_grid(grid);
  const Eigen::Index ny = model.n_y();
  const Eigen::Index p = m * ny;
  TransferFunction ge = innovations_transfer(model);
  BlockAccumulator acc(ny, p);
  for (int k = 0; k < grid.n_points; ++k) accumulate_point(ge, m, grid.omega(k), 1.0, &acc);
  double inv_n = 1.0 / grid.n_points;
  return assemble(ny, m, grid.n_points, acc.r0 * inv_n, acc.r0h * inv_n, acc.h1 * inv_n,
                  acc.h3 * inv_n);
}

AsymptoticCovariance asymptotic_covariance_lag_domain(const InnovationsModel& model, int m,
                                                      double tail_tol) {
  const Eigen::Index ny = model.n_y();
  const Eigen::Index p = m * ny;
  CovarianceModel cm = exact_covariance_model(model);

  // R(τ) for τ ≥ 0 via Markov parameters, R(−τ) = R(τ)ᵀ.
  std::vector<MatrixXd> lags;
  lags.push_back(cm.R0);
  MatrixXd a_pow = MatrixXd::Identity(model.n_x(), model.n_x());
  double scale = cm.R0.norm();
  for (int tau = 1; tau < 100000; ++tau) {
    MatrixXd r = cm.C * a_pow * cm.D;
    a_pow = model.A * a_pow;
    lags.push_back(r);
    if (tau > 2 * m && r.norm() < tail_tol * scale) break;
  }
  const int tmax = static_cast<int>(lags.size()) - 1;
  auto lag = [&](int tau) -> MatrixXd {
    if (std::abs(tau) > tmax) return MatrixXd::Zero(ny, ny);
    return tau >= 0 ? lags[tau] : MatrixXd(lags[-tau].transpose());
  };
  // Stacked-window covariances: V1_k = [y_k … y_{k+m−1}], V2_k = [y_{k−1} … y_{k−m}].
  auto lag_v = [&](int tau, int sr, int sc) -> MatrixXd {
    MatrixXd out(p, p);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j)
        out.block(i * ny, j * ny, ny, ny) = lag(tau + sr * i + sc * j);
    return out;
  };

  MatrixXd sum_r0 = MatrixXd::Zero(ny * ny, ny * ny);
  MatrixXd sum_r0h = MatrixXd::Zero(ny * ny, p * p);
  MatrixXd sum_h1 = MatrixXd::Zero(p * p, p * p);
  MatrixXd sum_h3 = MatrixXd::Zero(p * p, p * p);
  for (int tau = -2 * tmax; tau <= 2 * tmax; ++tau) {
    MatrixXd r = lag(tau);
    sum_r0 += kron(r, r);
    MatrixXd c_y_v2(ny, p), c_y_v1(ny, p);
    for (int j = 0; j < m; ++j) {
      c_y_v2.block(0, j * ny, ny, ny) = lag(tau + j + 1);
      c_y_v1.block(0, j * ny, ny, ny) = lag(tau - j);
    }
    sum_r0h += kron(c_y_v2, c_y_v1);
    // R_{V1}(τ) block (i,j) = R(τ + i − j); R_{V2}(τ) block (i,j) = R(τ − i + j).
    MatrixXd r_v1 = lag_v(tau, +1, -1);
    MatrixXd r_v2 = lag_v(tau, -1, +1);
    sum_h1 += kron(r_v2, r_v1);
    // C12(τ) block (i,j) = E[y_{k+i} y_{k−τ−j−1+…}] = R(τ + i + j + 1);
    // C21(τ) block (i,j) = R(τ − i − j − 1).
    MatrixXd c12(p, p), c21(p, p);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) {
        c12.block(i * ny, j * ny, ny, ny) = lag(tau + i + j + 1);
        c21.block(i * ny, j * ny, ny, ny) = lag(tau - i - j - 1);
      }
    sum_h3 += kron(c12, c21);
  }
  return assemble(ny, m, 0, sum_r0, sum_r0h, sum_h1, sum_h3);
}

}  // namespace detail

SvdPerturbation svd_perturbation_maps(const Realization& real) {
  const Eigen::Index p = real.Us.rows();
  const Eigen::Index nx = real.n_x;
  const VectorXd& sv = real.singular_values;
  if (sv(nx - 1) <= 1e-12 * sv(0))
    throw RankDeficient("svd_perturbation_maps: retained singular values vanish");
  if (nx < p && sv(nx - 1) - sv(nx) <= 1e-12 * sv(0))
    throw RankDeficient("svd_perturbation_maps: no gap to the discarded subspace");

  MatrixXd u(p, p), v(p, p);
  u << real.Us, real.Un;
  v << real.Vs, real.Vn;

  SvdPerturbation maps;
  maps.Pi1 = MatrixXd::Zero(p * nx, p * p);
  maps.Pi2 = MatrixXd::Zero(nx * p, p * p);

  // Exact first-order SVD perturbation, one unit perturbation δH = e_r e_sᵀ
  // per column; retained–retained cross terms use the (σi² − σj²) resolvent,
  // the discarded subspace enters through the σj → 0 limit of the same form.
  for (Eigen::Index r = 0; r < p; ++r)
    for (Eigen::Index s = 0; s < p; ++s) {
      MatrixXd dom = MatrixXd::Zero(p, nx);
      MatrixXd dga = MatrixXd::Zero(nx, p);
      for (Eigen::Index i = 0; i < nx; ++i) {
        const double si = sv(i);
        const double root = std::sqrt(si);
        const double dsig = u(r, i) * v(s, i);
        VectorXd du = VectorXd::Zero(p);
        VectorXd dv = VectorXd::Zero(p);
        for (Eigen::Index j = 0; j < p; ++j) {
          if (j == i) continue;
          const double sj = sv(j);
          const double denom = si * si - sj * sj;
          const double a = (si * u(r, j) * v(s, i) + sj * v(s, j) * u(r, i)) / denom;
          const double b = (si * v(s, j) * u(r, i) + sj * u(r, j) * v(s, i)) / denom;
          du += a * u.col(j);
          dv += b * v.col(j);
        }
        dom.col(i) = du * root + u.col(i) * (dsig / (2.0 * root));
        dga.row(i) = (dv * root + v.col(i) * (dsig / (2.0 * root))).transpose();
      }
      const Eigen::Index col = s * p + r;
      maps.Pi1.col(col) = vec(dom);
      maps.Pi2.col(col) = vec(dga);
    }
  return maps;
}

RealizationJacobians realization_jacobians(const Realization& real,
                                           const CovarianceModel& cm, int m) {
  const Eigen::Index ny = cm.n_y();
  const Eigen::Index nx = cm.n_x();
  const Eigen::Index p = m * ny;
  if (m <= nx) throw Error("realization_jacobians: m > n_x required");
  if (real.observability.rows() != p)
    throw DimensionMismatch("realization_jacobians: m inconsistent with realization");

  MatrixXd phi1 = MatrixXd::Zero((m - 1) * ny, p);
  phi1.leftCols((m - 1) * ny).setIdentity();
  MatrixXd phi2 = MatrixXd::Zero((m - 1) * ny, p);
  phi2.rightCols((m - 1) * ny).setIdentity();
  MatrixXd phi3 = MatrixXd::Zero(ny, p);
  phi3.leftCols(ny).setIdentity();
  MatrixXd phi4 = MatrixXd::Zero(p, ny);
  phi4.topRows(ny).setIdentity();

  const MatrixXd& omega = real.observability;
  MatrixXd upper = phi1 * omega;
  MatrixXd gram = upper.transpose() * upper;
  Eigen::LDLT<MatrixXd> gram_fact(gram);
  MatrixXd pinv_t2 = gram_fact.solve(upper.transpose() * phi2);  // G⁻¹Ω̄ᵀΦ2
  MatrixXd pinv_t1 = gram_fact.solve(upper.transpose() * phi1);  // G⁻¹Ω̄ᵀΦ1

  SvdPerturbation svd = svd_perturbation_maps(real);

  RealizationJacobians jac;
  jac.Xi = kron(MatrixXd::Identity(nx, nx), pinv_t2) -
           kron(MatrixXd(cm.A.transpose()), pinv_t1);

  const Eigen::Index total = ny * ny + p * p;
  auto with_selector = [&](const MatrixXd& from_h) {
    MatrixXd out = MatrixXd::Zero(from_h.rows(), total);
    out.rightCols(p * p) = from_h;
    return out;
  };
  jac.map_dA = with_selector(jac.Xi * svd.Pi1);
  jac.map_dC = with_selector(kron(MatrixXd::Identity(nx, nx), phi3) * svd.Pi1);
  jac.map_dD = with_selector(kron(MatrixXd(phi4.transpose()), MatrixXd::Identity(nx, nx)) *
                             svd.Pi2);
  return jac;
}

DareChain dare_perturbation_chain(const InnovationsModel& model, const CovarianceModel& cm,
                                  const RealizationJacobians& jac) {
  const Eigen::Index nx = cm.n_x();
  const Eigen::Index ny = cm.n_y();
  const MatrixXd& a = cm.A;
  const MatrixXd& c = cm.C;
  const MatrixXd& d = cm.D;
  const MatrixXd r0 = symmetrize(cm.R0);
  MatrixXd b = model.B();
  MatrixXd f = model.F();
  MatrixXd p = solve_dlyap(a, b * b.transpose(), LyapunovForm::Controllability);

  Eigen::LDLT<MatrixXd> r0_fact(r0);
  MatrixXd d_r0inv = r0_fact.solve(d.transpose()).transpose();  // D R0⁻¹
  MatrixXd ct_r0inv = r0_fact.solve(c).transpose();             // Cᵀ R0⁻¹
  MatrixXd a_s = a.transpose() - ct_r0inv * d.transpose();
  MatrixXd s_mat = ct_r0inv * c;
  MatrixXd a_c = (MatrixXd::Identity(nx, nx) - s_mat * p).partialPivLu().solve(a_s);

  const MatrixXd eye_x2 = MatrixXd::Identity(nx * nx, nx * nx);
  MatrixXd act = a_c.transpose();
  MatrixXd j1 = eye_x2 - kron(act, act);
  Eigen::JacobiSVD<MatrixXd> j1_svd(j1);
  if (j1_svd.singularValues()(j1_svd.singularValues().size() - 1) <=
      1e-14 * j1_svd.singularValues()(0))
    throw SingularJ1("dare_perturbation_chain: I − A_cᵀ⊗A_cᵀ is singular");
  Eigen::PartialPivLU<MatrixXd> j1_fact(j1);

  MatrixXd k_xx = commutation_matrix(nx, nx);
  MatrixXd k_xy = commutation_matrix(nx, ny);
  MatrixXd k_yx = commutation_matrix(ny, nx);

  MatrixXd actp = act * p;
  MatrixXd j2 = kron(actp, MatrixXd::Identity(nx, nx)) * k_xx +
                kron(MatrixXd::Identity(nx, nx), actp);
  MatrixXd j3 = kron(actp, actp);
  MatrixXd j4 = -kron(d_r0inv, d_r0inv);
  MatrixXd j5 = kron(MatrixXd::Identity(nx, nx), d_r0inv) * k_xy +
                kron(d_r0inv, MatrixXd::Identity(nx, nx));
  MatrixXd j6 = -kron(d_r0inv, MatrixXd::Identity(nx, nx)) * k_yx;
  MatrixXd j7 = kron(d_r0inv, ct_r0inv);
  MatrixXd j8 = -kron(MatrixXd::Identity(nx, nx), ct_r0inv) * k_xy;
  MatrixXd j9 = -kron(ct_r0inv, ct_r0inv);
  MatrixXd j10 = kron(ct_r0inv, MatrixXd::Identity(nx, nx)) * k_yx +
                 kron(MatrixXd::Identity(nx, nx), ct_r0inv);

  MatrixXd p_from_r0 = j1_fact.solve(j4 + j2 * j7 + j3 * j9);
  MatrixXd p_from_a = j1_fact.solve(MatrixXd(j2 * k_xx));
  MatrixXd p_from_c = j1_fact.solve(j2 * j6 + j3 * j10);
  MatrixXd p_from_d = j1_fact.solve(j5 + j2 * j8);

  const Eigen::Index total = jac.map_dA.cols();
  MatrixXd sel_r0 = MatrixXd::Zero(ny * ny, total);
  sel_r0.leftCols(ny * ny).setIdentity();

  DareChain chain;
  chain.G1 = p_from_r0 * sel_r0 + p_from_a * jac.map_dA + p_from_c * jac.map_dC +
             p_from_d * jac.map_dD;

  MatrixXd iq = kron(MatrixXd::Identity(ny, ny), f) + kron(f, MatrixXd::Identity(ny, ny));
  Eigen::PartialPivLU<MatrixXd> iq_fact(iq);
  MatrixXd iq_inv = iq_fact.solve(MatrixXd::Identity(ny * ny, ny * ny));

  MatrixXd cp = c * p;
  MatrixXd c_mix = kron(cp, MatrixXd::Identity(ny, ny)) +
                   kron(MatrixXd::Identity(ny, ny), cp) * k_yx;  // vec(δC) → vec(δ(CPCᵀ))
  chain.G2 = iq_inv * (sel_r0 - c_mix * jac.map_dC);
  chain.G3 = iq_inv * kron(c, c);

  Eigen::SelfAdjointEigenSolver<MatrixXd> q_eig(symmetrize(model.Q));
  if (q_eig.eigenvalues().minCoeff() <= 0.0)
    throw SingularQ("dare_perturbation_chain: Q not positive definite");
  MatrixXd q_isqrt = q_eig.eigenvectors() *
                     q_eig.eigenvalues().cwiseSqrt().cwiseInverse().asDiagonal() *
                     q_eig.eigenvectors().transpose();

  MatrixXd qb = kron(q_isqrt, b) * iq_inv;
  chain.G4 = kron(q_isqrt, MatrixXd::Identity(nx, nx)) * jac.map_dD -
             kron(MatrixXd(q_isqrt * cp), MatrixXd::Identity(nx, nx)) * jac.map_dA -
             kron(q_isqrt, MatrixXd(a * p)) * k_yx * jac.map_dC - qb * sel_r0 +
             qb * c_mix * jac.map_dC;
  chain.G5 = qb * kron(c, c) - kron(MatrixXd(q_isqrt * c), a);

  chain.map_dB = chain.G4 + chain.G5 * chain.G1;
  chain.map_dF = chain.G2 - chain.G3 * chain.G1;

  chain.B_from_D = kron(q_isqrt, MatrixXd::Identity(nx, nx)) + chain.G5 * p_from_d;
  chain.B_from_R0 = -qb + chain.G5 * p_from_r0;
  chain.F_from_D = -chain.G3 * p_from_d;
  chain.F_from_R0 = iq_inv - chain.G3 * p_from_r0;
  return chain;
}

namespace {

// δP1 sensitivity of the doubled error-system Lyapunov equation.
MatrixXd build_m1(const InnovationsModel& model, const RealizationJacobians& jac,
                  const SvdPerturbation& svd, int m) {
  const Eigen::Index nx = model.n_x();
  const Eigen::Index ny = model.n_y();
  const Eigen::Index p = m * ny;
  MatrixXd abar = MatrixXd::Zero(2 * nx, 2 * nx);
  abar.topLeftCorner(nx, nx) = model.A;
  abar.bottomRightCorner(nx, nx) = model.A;
  MatrixXd cbar(ny, 2 * nx);
  cbar << model.C, -model.C;
  MatrixXd x = solve_dlyap(model.A, model.C.transpose() * model.C,
                           LyapunovForm::Observability);
  MatrixXd pbar(2 * nx, 2 * nx);
  pbar << x, -x, -x, x;

  MatrixXd abt = abar.transpose();
  MatrixXd t = kron(abt, abt) - MatrixXd::Identity(4 * nx * nx, 4 * nx * nx);
  Eigen::PartialPivLU<MatrixXd> t_fact(t);

  MatrixXd e_lift = MatrixXd::Zero(2 * nx, nx);
  e_lift.bottomRows(nx).setIdentity();
  MatrixXd e_neg = -e_lift;

  MatrixXd abar_p = abt * pbar;
  MatrixXd term_a =
      (kron(abar_p, MatrixXd::Identity(2 * nx, 2 * nx)) * commutation_matrix(2 * nx, 2 * nx) +
       kron(MatrixXd::Identity(2 * nx, 2 * nx), abar_p)) *
      kron(e_lift, e_lift);
  MatrixXd term_c =
      (kron(MatrixXd::Identity(2 * nx, 2 * nx), MatrixXd(cbar.transpose())) +
       kron(MatrixXd(cbar.transpose()), MatrixXd::Identity(2 * nx, 2 * nx)) *
           commutation_matrix(ny, 2 * nx)) *
      kron(e_neg, MatrixXd::Identity(ny, ny));

  MatrixXd phi3 = MatrixXd::Zero(ny, p);
  phi3.leftCols(ny).setIdentity();
  MatrixXd from_h = term_a * jac.Xi * svd.Pi1 +
                    term_c * kron(MatrixXd::Identity(nx, nx), phi3) * svd.Pi1;
  MatrixXd m1 = MatrixXd::Zero(4 * nx * nx, ny * ny + p * p);
  m1.rightCols(p * p) = -t_fact.solve(from_h);
  return m1;
}

}  // namespace

PerturbationMaps perturbation_maps(const InnovationsModel& model, int m) {
  if (!is_stable(model.A)) throw UnstableMatrix("perturbation_maps: model unstable");
  PerturbationMaps maps;
  maps.m = m;

  // Canonical evaluation point: the T = I realization of the model's own
  // exact Hankel matrix.
  auto covs = exact_covariances(model, 2 * m - 1);
  HankelEstimate hankel = build_hankel(covs, m);
  maps.real = realize(hankel, static_cast<int>(model.n_x()));
  maps.cm = extract_covariance_model(maps.real, covs[0], model.n_y());
  DareSolution sol = solve_dare(maps.cm.A, maps.cm.D, maps.cm.C, maps.cm.R0);
  maps.model = InnovationsModel{maps.cm.A, sol.K, sol.Q, maps.cm.C};
  maps.P = sol.P;

  maps.svd = svd_perturbation_maps(maps.real);
  maps.jac = realization_jacobians(maps.real, maps.cm, m);
  maps.dare = dare_perturbation_chain(maps.model, maps.cm, maps.jac);
  maps.M1 = build_m1(maps.model, maps.jac, maps.svd, m);
  return maps;
}

namespace {
double spectral_norm(const MatrixXd& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<MatrixXd> svd(m);
  return svd.singularValues()(0);
}
}  // namespace

FNormBounds fnorm_bounds(const AsymptoticCovariance& cov, const PerturbationMaps& maps,
                         double sample_count, double confidence,
                         std::optional<std::pair<double, double>> repair_adjust) {
  if (sample_count <= 0) throw Error("fnorm_bounds: N must be positive");
  FNormBounds out;
  out.dof = static_cast<int>(cov.dof());
  out.confidence = confidence;
  out.sample_count = sample_count;
  out.chi2_value = chi2_quantile(out.dof, confidence);

  MatrixXd half = symmetric_sqrt(cov.joint);
  const double factor = std::sqrt(out.chi2_value / sample_count);
  auto bound = [&](const MatrixXd& map) { return factor * spectral_norm(map * half); };
  out.eps_A = bound(maps.jac.map_dA);
  out.eps_C = bound(maps.jac.map_dC);
  out.eps_B = bound(maps.dare.map_dB);
  out.eps_F = bound(maps.dare.map_dF);

  if (repair_adjust) {
    const double d_shift = repair_adjust->first;
    const double r0_shift = repair_adjust->second;
    out.adjustment_extra_B = spectral_norm(maps.dare.B_from_D) * d_shift +
                             spectral_norm(maps.dare.B_from_R0) * r0_shift;
    out.adjustment_extra_F = spectral_norm(maps.dare.F_from_D) * d_shift +
                             spectral_norm(maps.dare.F_from_R0) * r0_shift;
    out.eps_B += out.adjustment_extra_B;
    out.eps_F += out.adjustment_extra_F;
  }
  return out;
}

}  // namespace ssid
