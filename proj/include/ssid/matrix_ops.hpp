#pragma once

#include <Eigen/Dense>

namespace ssid {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// Columnwise vectorization: stacks the columns of M top to bottom.
VectorXd vec(const MatrixXd& m);

// Inverse of vec for a known shape.
MatrixXd unvec(const VectorXd& v, Eigen::Index rows, Eigen::Index cols);

// Kronecker product A ⊗ B.
template <typename DerivedA, typename DerivedB>
auto kron(const Eigen::MatrixBase<DerivedA>& a, const Eigen::MatrixBase<DerivedB>& b) {
  using Scalar = decltype(typename DerivedA::Scalar{} * typename DerivedB::Scalar{});
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> out(a.rows() * b.rows(),
                                                            a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) =
          Scalar(a(i, j)) * b.template cast<Scalar>();
  return out;
}

// Commutation matrix K_{p,q}: K_{p,q} vec(M) = vec(Mᵀ) for every p×q matrix M,
// equivalently K_{p,q}(e_i ⊗ e_j) = e_j ⊗ e_i with e_i ∈ R^p, e_j ∈ R^q.
MatrixXd commutation_matrix(Eigen::Index p, Eigen::Index q);

// Principal symmetric square root of a symmetric PSD matrix; eigenvalues are
// clipped at zero before taking roots.
MatrixXd symmetric_sqrt(const MatrixXd& m);

double spectral_radius(const MatrixXd& a);

// Stability threshold used throughout: ρ(A) < 1 − 1e-10.
bool is_stable(const MatrixXd& a);

// max |M − Mᵀ| relative asymmetry.
double asymmetry(const MatrixXd& m);

MatrixXd symmetrize(const MatrixXd& m);

// Throws NonSymmetricInput when max|M − Mᵀ| > tol·(1 + max|M|).
void require_symmetric(const MatrixXd& m, const char* what, double tol = 1e-12);

}  // namespace ssid
