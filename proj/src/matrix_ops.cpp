#include "ssid/matrix_ops.hpp"

#include <Eigen/Eigenvalues>

#include "ssid/errors.hpp"

namespace ssid {

VectorXd vec(const MatrixXd& m) {
  return Eigen::Map<const VectorXd>(m.data(), m.size());
}

MatrixXd unvec(const VectorXd& v, Eigen::Index rows, Eigen::Index cols) {
  if (v.size() != rows * cols) throw DimensionMismatch("unvec: size mismatch");
  return Eigen::Map<const MatrixXd>(v.data(), rows, cols);
}

MatrixXd commutation_matrix(Eigen::Index p, Eigen::Index q) {
  MatrixXd k = MatrixXd::Zero(p * q, p * q);
  // vec(M)[j*p+i] = M(i,j); vec(Mᵀ)[i*q+j] = M(i,j).
  for (Eigen::Index i = 0; i < p; ++i)
    for (Eigen::Index j = 0; j < q; ++j) k(i * q + j, j * p + i) = 1.0;
  return k;
}

MatrixXd symmetric_sqrt(const MatrixXd& m) {
  require_symmetric(m, "symmetric_sqrt", 1e-9);
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(symmetrize(m));
  VectorXd d = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * d.asDiagonal() * es.eigenvectors().transpose();
}

double spectral_radius(const MatrixXd& a) {
  if (a.size() == 0) return 0.0;
  Eigen::EigenSolver<MatrixXd> es(a, /*computeEigenvectors=*/false);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

bool is_stable(const MatrixXd& a) { return spectral_radius(a) < 1.0 - 1e-10; }

double asymmetry(const MatrixXd& m) {
  return (m - m.transpose()).cwiseAbs().maxCoeff();
}

MatrixXd symmetrize(const MatrixXd& m) { return 0.5 * (m + m.transpose()); }

void require_symmetric(const MatrixXd& m, const char* what, double tol) {
  if (m.rows() != m.cols()) throw NonSymmetricInput(std::string(what) + ": not square");
  double scale = 1.0 + (m.size() ? m.cwiseAbs().maxCoeff() : 0.0);
  if (m.size() && asymmetry(m) > tol * scale)
    throw NonSymmetricInput(std::string(what) + ": input not symmetric");
}

}  // namespace ssid
