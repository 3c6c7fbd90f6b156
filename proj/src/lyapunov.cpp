#include "ssid/lyapunov.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

#include "ssid/errors.hpp"

namespace ssid {

namespace {

double min_eigenvalue(const MatrixXd& m) {
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(symmetrize(m), Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

// Residual of the covariance-model DARE, Eq-form
// P − APAᵀ − (D − APCᵀ)(R0 − CPCᵀ)⁻¹(D − APCᵀ)ᵀ.
MatrixXd dare_residual(const MatrixXd& a, const MatrixXd& d, const MatrixXd& c,
                       const MatrixXd& r0, const MatrixXd& p) {
  MatrixXd n = d - a * p * c.transpose();
  MatrixXd q = symmetrize(r0 - c * p * c.transpose());
  return p - a * p * a.transpose() - n * q.ldlt().solve(n.transpose());
}

bool finite(const MatrixXd& m) { return m.allFinite(); }

}  // namespace

MatrixXd solve_dlyap(const MatrixXd& a, const MatrixXd& q, LyapunovForm form) {
  if (a.rows() != a.cols() || q.rows() != q.cols() || a.rows() != q.rows())
    throw DimensionMismatch("solve_dlyap: dimension mismatch");
  require_symmetric(q, "solve_dlyap", 1e-9);
  if (spectral_radius(a) >= 1.0 - 1e-10)
    throw UnstableMatrix("solve_dlyap: spectral radius of A is not < 1");

  const Eigen::Index n = a.rows();
  MatrixXd t = (form == LyapunovForm::Controllability) ? a : MatrixXd(a.transpose());
  MatrixXd sys = MatrixXd::Identity(n * n, n * n) - kron(t, t);
  VectorXd x = sys.partialPivLu().solve(vec(symmetrize(q)));
  MatrixXd sol = symmetrize(unvec(x, n, n));

  MatrixXd res = (form == LyapunovForm::Controllability)
                     ? MatrixXd(a * sol * a.transpose() - sol + q)
                     : MatrixXd(a.transpose() * sol * a - sol + q);
  if (res.cwiseAbs().maxCoeff() > 1e-10 * (1.0 + sol.cwiseAbs().maxCoeff()))
    throw SolverFailure("solve_dlyap: residual above tolerance");
  return sol;
}

namespace {

// Structure-preserving doubling on P = A_sᵀ P (I − S P)⁻¹ A_s + M, written as
// X = AᵀX(I + GX)⁻¹A + H with G = −S, H = M. H_k converges quadratically to
// the stabilizing solution when one exists.
bool dare_doubling(const MatrixXd& a_s, const MatrixXd& s, const MatrixXd& m,
                   MatrixXd* p_out) {
  const Eigen::Index n = a_s.rows();
  const MatrixXd eye = MatrixXd::Identity(n, n);
  MatrixXd a_k = a_s;
  MatrixXd g_k = -s;
  MatrixXd h_k = m;
  constexpr int kMaxIters = 200;
  constexpr double kTol = 1e-12;
  for (int it = 0; it < kMaxIters; ++it) {
    Eigen::PartialPivLU<MatrixXd> lu(eye + g_k * h_k);
    if (std::abs(lu.determinant()) < 1e-300) return false;
    MatrixXd w = lu.solve(a_k);  // (I + G H)⁻¹ A
    MatrixXd a_next = a_k * w;
    // G(I + HG)⁻¹ = (I + GH)⁻¹G and H(I + GH)⁻¹ = (I + HG)⁻¹H let one LU serve
    // all three updates.
    MatrixXd g_next = g_k + a_k * lu.solve(g_k * a_k.transpose());
    MatrixXd h_next = h_k + a_k.transpose() * h_k * w;
    if (!finite(a_next) || !finite(g_next) || !finite(h_next)) return false;
    double step = (h_next - h_k).cwiseAbs().maxCoeff();
    double scale = 1.0 + h_next.cwiseAbs().maxCoeff();
    if (scale > 1e14) return false;  // divergence
    a_k = a_next;
    g_k = symmetrize(g_next);
    h_k = symmetrize(h_next);
    if (step <= kTol * scale) {
      *p_out = h_k;
      return true;
    }
  }
  return false;
}

// Kalman covariance recursion from P = 0; converges monotonically to the
// minimal (stabilizing) solution for valid covariance models.
bool dare_fixed_point(const MatrixXd& a, const MatrixXd& d, const MatrixXd& c,
                      const MatrixXd& r0, MatrixXd* p_out) {
  const Eigen::Index n = a.rows();
  MatrixXd p = MatrixXd::Zero(n, n);
  constexpr int kMaxIters = 20000;
  constexpr double kTol = 1e-12;
  for (int it = 0; it < kMaxIters; ++it) {
    MatrixXd innov = symmetrize(r0 - c * p * c.transpose());
    if (min_eigenvalue(innov) <= 0.0) return false;
    MatrixXd g = d - a * p * c.transpose();
    MatrixXd next = symmetrize(a * p * a.transpose() + g * innov.ldlt().solve(g.transpose()));
    if (!finite(next) || next.cwiseAbs().maxCoeff() > 1e14) return false;
    double step = (next - p).cwiseAbs().maxCoeff();
    p = next;
    if (step <= kTol * (1.0 + p.cwiseAbs().maxCoeff())) {
      *p_out = p;
      return true;
    }
  }
  return false;
}

bool validate_dare(const MatrixXd& a, const MatrixXd& d, const MatrixXd& c,
                   const MatrixXd& r0, const MatrixXd& p, double* rel_res_out) {
  double p_scale = 1.0 + p.cwiseAbs().maxCoeff();
  if (min_eigenvalue(p) < -1e-8 * p_scale) return false;
  MatrixXd q = symmetrize(r0 - c * p * c.transpose());
  if (min_eigenvalue(q) < -1e-8 * (1.0 + r0.cwiseAbs().maxCoeff())) return false;
  MatrixXd res = dare_residual(a, d, c, r0, p);
  double rel = res.cwiseAbs().maxCoeff() / p_scale;
  if (rel_res_out) *rel_res_out = rel;
  return rel <= 1e-8;
}

}  // namespace

DareSolution solve_dare(const MatrixXd& a, const MatrixXd& d, const MatrixXd& c,
                        const MatrixXd& r0) {
  const Eigen::Index n_x = a.rows();
  const Eigen::Index n_y = c.rows();
  if (a.cols() != n_x || d.rows() != n_x || d.cols() != n_y || c.cols() != n_x ||
      r0.rows() != n_y || r0.cols() != n_y)
    throw DimensionMismatch("solve_dare: dimension mismatch");
  require_symmetric(r0, "solve_dare R0", 1e-8);
  if (min_eigenvalue(r0) <= 0.0)
    throw DareInfeasible("solve_dare: R0 is not positive definite");

  // Transformed data: M = D R0⁻¹ Dᵀ, A_s = Aᵀ − Cᵀ R0⁻¹ Dᵀ, S = Cᵀ R0⁻¹ C.
  Eigen::LDLT<MatrixXd> r0_ldlt(symmetrize(r0));
  MatrixXd r0inv_dt = r0_ldlt.solve(d.transpose());
  MatrixXd m = symmetrize(d * r0inv_dt);
  MatrixXd a_s = a.transpose() - c.transpose() * r0inv_dt;
  MatrixXd s = symmetrize(c.transpose() * r0_ldlt.solve(c));

  MatrixXd p;
  bool ok = dare_doubling(a_s, s, m, &p) && validate_dare(a, d, c, r0, p, nullptr);
  if (!ok) {
    ok = dare_fixed_point(a, d, c, r0, &p) && validate_dare(a, d, c, r0, p, nullptr);
  }
  if (!ok) throw DareInfeasible("solve_dare: no stabilizing PSD solution found");

  p = symmetrize(p);
  MatrixXd q = symmetrize(r0 - c * p * c.transpose());
  Eigen::SelfAdjointEigenSolver<MatrixXd> qe(q);
  double qmax = qe.eigenvalues().maxCoeff();
  double qmin = qe.eigenvalues().minCoeff();
  if (qmax <= 0.0 || qmin < 1e-12 * qmax)
    throw SingularQ("solve_dare: innovations covariance numerically singular");
  MatrixXd n = d - a * p * c.transpose();
  MatrixXd k = q.ldlt().solve(n.transpose()).transpose();
  return DareSolution{p, q, k};
}

}  // namespace ssid
