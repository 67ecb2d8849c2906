#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <string>
#include <vector>

#include "opc/config.hpp"
#include "opc/errors.hpp"
#include "opc/matrix.hpp"

namespace opc {

/// Closed subspace given by an orthonormal column basis in a fixed ambient
/// space. dim() == 0 is the zero space.
struct Subspace {
  ComplexMatrix basis;  // ambient_dim x dim, orthonormal columns

  Eigen::Index ambient() const { return basis.rows(); }
  Eigen::Index dim() const { return basis.cols(); }

  static Subspace full(Eigen::Index n) {
    return Subspace{ComplexMatrix::Identity(n, n)};
  }

  /// Orthogonal projection of v onto the subspace.
  ComplexVector project(const ComplexVector& v) const {
    return basis * (basis.adjoint() * v);
  }

  double ortho_defect() const {
    if (dim() == 0) return 0.0;
    return (basis.adjoint() * basis - ComplexMatrix::Identity(dim(), dim())).norm();
  }
};

struct HermitianEig {
  RealVector values;      // ascending
  ComplexMatrix vectors;  // unitary, columns match values
};

/// Spectral decomposition of a Hermitian matrix. Postcondition:
/// ||Q diag(values) Q^* - H|| <= recon tolerance relative to ||H||.
inline HermitianEig hermitian_eig(const ComplexMatrix& h, const Tolerances& tol = tols()) {
  require_square(h, "hermitian_eig");
  require_finite(h, "hermitian_eig");
  const double scale = std::max(1.0, h.norm());
  if (herm_defect(h) > tol.herm * scale)
    throw NotHermitian("hermitian_eig: hermiticity defect " + std::to_string(herm_defect(h)));
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(0.5 * (h + h.adjoint()));
  if (es.info() != Eigen::Success) throw NoConvergence("hermitian_eig: solver did not converge");
  return HermitianEig{es.eigenvalues(), es.eigenvectors()};
}

/// Operator norm (largest singular value).
inline double op_norm(const ComplexMatrix& a) {
  require_finite(a, "op_norm");
  if (a.size() == 0) return 0.0;
  if (a.rows() <= 32 && a.cols() <= 32) {
    Eigen::JacobiSVD<ComplexMatrix> svd(a);
    return svd.singularValues()(0);
  }
  Eigen::BDCSVD<ComplexMatrix> svd(a);
  return svd.singularValues()(0);
}

/// Positive-semidefinite square root. Eigenvalues in [-psd_tol*scale, 0) are
/// clamped to zero; anything lower is a hard failure.
inline ComplexMatrix psd_sqrt(const ComplexMatrix& p, const Tolerances& tol = tols()) {
  HermitianEig eig = hermitian_eig(p, tol);
  const double scale = std::max(1.0, eig.values.cwiseAbs().maxCoeff());
  RealVector roots(eig.values.size());
  for (Eigen::Index i = 0; i < eig.values.size(); ++i) {
    double v = eig.values(i);
    if (v < -tol.psd * scale)
      throw NotPSD("psd_sqrt: eigenvalue " + std::to_string(v) + " below clamp window");
    roots(i) = v > 0 ? std::sqrt(v) : 0.0;
  }
  return eig.vectors * roots.asDiagonal() * eig.vectors.adjoint();
}

/// Defect operator (I - D^* D)^{1/2} of a contraction.
inline ComplexMatrix defect(const ComplexMatrix& d, const Tolerances& tol = tols()) {
  require_finite(d, "defect");
  const double n = op_norm(d);
  if (n > 1.0 + tol.psd)
    throw NormExceedsOne("defect: ||D|| = " + std::to_string(n) + " exceeds 1");
  ComplexMatrix g = ComplexMatrix::Identity(d.cols(), d.cols()) - d.adjoint() * d;
  return psd_sqrt(0.5 * (g + g.adjoint()), tol);
}

/// Largest subspace of M orthogonal to every vector in K (columns).
/// Postcondition: dim >= dim(M) - #K; exact orthogonality up to rounding.
/// Throws Exhausted when the result is the zero space.
inline Subspace avoidance_subspace(const ComplexMatrix& k_columns, const Subspace& m,
                                   const Tolerances& tol = tols()) {
  if (k_columns.cols() > 0 && k_columns.rows() != m.ambient())
    throw PreconditionError("avoidance_subspace: ambient dimension mismatch");
  if (k_columns.cols() == 0) return m;
  require_finite(k_columns, "avoidance_subspace");
  // Coordinates of the constraints inside M; null space of Y^H gives the
  // orthogonal directions that stay inside M.
  ComplexMatrix y = m.basis.adjoint() * k_columns;  // dim(M) x nK
  Eigen::JacobiSVD<ComplexMatrix> svd(y.adjoint(), Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  const double smax = sv.size() > 0 ? sv(0) : 0.0;
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) > tol.rank * std::max(smax, 1e-300)) ++rank;
  const Eigen::Index dim_l = m.dim() - rank;
  if (dim_l <= 0)
    throw Exhausted("avoidance_subspace: constraints span all of M (dim " +
                    std::to_string(m.dim()) + ", rank " + std::to_string(rank) + ")");
  ComplexMatrix v = svd.matrixV();  // dim(M) x dim(M)
  return Subspace{m.basis * v.rightCols(dim_l)};
}

/// Orthonormalize columns (thin QR), dropping near-dependent columns.
inline ComplexMatrix orthonormalize(const ComplexMatrix& a, const Tolerances& tol = tols()) {
  if (a.cols() == 0) return a;
  ComplexMatrix q(a.rows(), a.cols());
  Eigen::Index kept = 0;
  for (Eigen::Index j = 0; j < a.cols(); ++j) {
    ComplexVector v = a.col(j);
    const double scale = std::max(v.norm(), 1e-300);
    // two rounds of Gram-Schmidt for numerical orthogonality
    for (int round = 0; round < 2; ++round)
      for (Eigen::Index i = 0; i < kept; ++i) v -= q.col(i) * (q.col(i).dot(v));
    if (v.norm() > tol.rank * scale) q.col(kept++) = v / v.norm();
  }
  return q.leftCols(kept);
}

}  // namespace opc
