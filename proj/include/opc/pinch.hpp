#pragma once

#include <string>
#include <vector>

#include "opc/instances.hpp"
#include "opc/kernel.hpp"
#include "opc/numrange.hpp"

namespace opc {

/// One summand of a convex-combination compression: A acts on the block's own
/// space, A-tilde on the common space, and the unitary u intertwines them
/// (u * a_tilde * u^adj = a).
struct CompressionBlock {
  ComplexMatrix a;
  ComplexMatrix a_tilde;
  ComplexMatrix u;
};

/// Isometry V: X -> (+)_j H_j with Vx = (+)_j sqrt(alpha_j) U_j x, so that
/// V^* ((+)_j A_j) V = sum_j alpha_j A~_j. Returns the stacked block column.
inline ComplexMatrix pokrzywa_compress(const std::vector<CompressionBlock>& blocks,
                                       const std::vector<double>& alpha,
                                       const Tolerances& tol = tols()) {
  if (blocks.empty() || blocks.size() != alpha.size())
    throw PreconditionError("pokrzywa_compress: need matching non-empty blocks and weights");
  double sum = 0;
  for (double a : alpha) {
    if (a < -1e-15) throw WeightsNotConvex("pokrzywa_compress: negative weight");
    sum += a;
  }
  if (std::abs(sum - 1.0) > 1e-12) throw WeightsNotConvex("pokrzywa_compress: weights sum != 1");

  const Eigen::Index nx = blocks[0].a_tilde.rows();
  Eigen::Index total = 0;
  for (const auto& b : blocks) {
    require_square(b.a, "pokrzywa_compress block");
    if (b.a_tilde.rows() != nx || b.a_tilde.cols() != nx)
      throw PreconditionError("pokrzywa_compress: common-space dimensions differ");
    if (b.u.rows() != b.a.rows() || b.u.cols() != nx)
      throw PreconditionError("pokrzywa_compress: unitary shape mismatch");
    const double scale = std::max(1.0, b.a.norm());
    if ((b.u * b.u.adjoint() - ComplexMatrix::Identity(b.u.rows(), b.u.rows())).norm() >
            tol.ortho * b.u.rows() ||
        (b.u.adjoint() * b.u - ComplexMatrix::Identity(nx, nx)).norm() > tol.ortho * nx)
      throw PreconditionError("pokrzywa_compress: block transport is not unitary");
    if ((b.u * b.a_tilde * b.u.adjoint() - b.a).norm() > 1e3 * tol.recon * scale)
      throw EquivalenceViolated("pokrzywa_compress: block is not unitarily equivalent");
    total += b.a.rows();
  }
  ComplexMatrix v(total, nx);
  Eigen::Index row = 0;
  for (size_t j = 0; j < blocks.size(); ++j) {
    v.block(row, 0, blocks[j].u.rows(), nx) = std::sqrt(alpha[j]) * blocks[j].u;
    row += blocks[j].u.rows();
  }
  return v;
}

/// Result of the diagonal split: d_diag and an isometry j with
/// j^adj * diag(d_diag) * j = B. The normal fast path keeps the original
/// dimension and norm; the two-term hermitian split doubles the dimension and
/// pays a factor 2 in norm.
struct SplitDecomp {
  ComplexVector d_diag;
  ComplexMatrix j;
  bool normal_fast_path = false;

  ComplexMatrix diag_matrix() const { return ComplexMatrix(d_diag.asDiagonal()); }
};

namespace detail {

inline bool is_circulant(const ComplexMatrix& b, double tol) {
  const Eigen::Index n = b.rows();
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      if (std::abs(b(i, j) - b((i + 1) % n, (j + 1) % n)) > tol) return false;
  return true;
}

}  // namespace detail

/// Split a square matrix into a diagonal model compressed back onto it.
/// Normal inputs (diagonal, circulant, or numerically normal) take a fast
/// path with |d_diag| = |B|; general inputs use the exact two-term hermitian
/// split B = (1/2)(2 Re B) + (1/2)(2i Im B) with |d_diag| <= 2|B|.
/// The eps parameter is reserved for approximate splits and is unused by the
/// exact construction.
inline SplitDecomp hermitian_split_decomp(const ComplexMatrix& b, double eps = 0.0,
                                          const Tolerances& tol = tols()) {
  (void)eps;
  require_square(b, "hermitian_split_decomp");
  require_finite(b, "hermitian_split_decomp");
  const Eigen::Index n = b.rows();
  const double scale = std::max(1.0, b.norm());
  SplitDecomp out;

  // exact fast path: already diagonal
  if ((b - ComplexMatrix(b.diagonal().asDiagonal())).norm() == 0.0) {
    out.d_diag = b.diagonal();
    out.j = ComplexMatrix::Identity(n, n);
    out.normal_fast_path = true;
    return out;
  }

  // circulant fast path: exact discrete-Fourier diagonalization
  if (detail::is_circulant(b, 1e-14 * scale)) {
    ComplexMatrix f(n, n);
    const double inv_sqrt_n = 1.0 / std::sqrt(static_cast<double>(n));
    for (Eigen::Index j = 0; j < n; ++j)
      for (Eigen::Index k = 0; k < n; ++k)
        f(j, k) = std::polar(inv_sqrt_n, 2.0 * M_PI * static_cast<double>(j * k) / n);
    ComplexVector lam(n);
    for (Eigen::Index j = 0; j < n; ++j) {
      Cx s = 0;
      for (Eigen::Index k = 0; k < n; ++k)
        s += b(k == 0 ? 0 : k, 0) * std::polar(1.0, 2.0 * M_PI * static_cast<double>(j * k) / n);
      lam(j) = s;
    }
    out.d_diag = lam;
    out.j = f.adjoint();  // j^adj diag(lam) j = F diag(lam) F^* = b
    out.normal_fast_path = true;
    return out;
  }

  // normal fast path: Schur form is diagonal
  const double comm = (b * b.adjoint() - b.adjoint() * b).norm();
  if (comm <= tol.herm * scale * scale) {
    Eigen::ComplexSchur<ComplexMatrix> schur(b);
    if (schur.info() != Eigen::Success) throw NoConvergence("hermitian_split_decomp: schur failed");
    out.d_diag = schur.matrixT().diagonal();
    out.j = schur.matrixU().adjoint();
    out.normal_fast_path = true;
    return out;
  }

  // exact two-term hermitian split
  ComplexMatrix s1 = 0.5 * (b + b.adjoint());
  ComplexMatrix s2 = (b - b.adjoint()) / Cx(0, 2);
  HermitianEig e1 = hermitian_eig(s1, tol);
  HermitianEig e2 = hermitian_eig(s2, tol);
  ComplexVector d(2 * n);
  for (Eigen::Index i = 0; i < n; ++i) {
    d(i) = 2.0 * e1.values(i);
    d(n + i) = Cx(0, 2.0) * e2.values(i);
  }
  CompressionBlock b1{ComplexMatrix((2.0 * e1.values.cast<Cx>()).asDiagonal()), 2.0 * s1,
                      e1.vectors.adjoint()};
  CompressionBlock b2{ComplexMatrix((Cx(0, 2.0) * e2.values.cast<Cx>()).asDiagonal()),
                      Cx(0, 2.0) * s2, e2.vectors.adjoint()};
  out.d_diag = d;
  out.j = pokrzywa_compress({b1, b2}, {0.5, 0.5}, tol);
  out.normal_fast_path = false;
  return out;
}

/// Exact stationary compression: isometry V with V^* inst.matrix V = D, built
/// by splitting D into diagonal entries and realizing each entry in fresh
/// anchor slots (disjoint slots make every cross term an exact zero).
/// Consumes room budget; throws MarginViolated when the split entries leave
/// the guarantee region (the exact path pays a factor 2 on |D|).
inline ComplexMatrix exact_compress(ReservoirInstance& inst, const ComplexMatrix& d,
                                    const ComplexMatrix& l_forbidden = ComplexMatrix(),
                                    const Tolerances& tol = tols()) {
  require_square(d, "exact_compress");
  SplitDecomp split = hermitian_split_decomp(d, 0.0, tol);
  for (Eigen::Index i = 0; i < split.d_diag.size(); ++i)
    if (!region_contains(inst.region, split.d_diag(i), tol))
      throw MarginViolated(
          "exact_compress: split entry outside the guarantee region (the exact path costs a "
          "factor 2: it needs 2*|D| + margin inside the anchor hull)");

  AnchorLedger ledger(inst);
  if (l_forbidden.size() > 0) {
    if (l_forbidden.rows() != inst.dim())
      throw PreconditionError("exact_compress: forbidden dimension mismatch");
    ledger.add_block(l_forbidden);
  }
  std::vector<int> loads(inst.anchors.size());
  for (size_t k = 0; k < inst.anchors.size(); ++k) loads[k] = ledger.rank(static_cast<int>(k));
  std::vector<Cx> entries(split.d_diag.data(), split.d_diag.data() + split.d_diag.size());
  auto assign = balanced_assign(inst.anchors, entries, loads, tol);

  ComplexMatrix v0(inst.dim(), split.d_diag.size());
  for (size_t i = 0; i < entries.size(); ++i)
    v0.col(static_cast<Eigen::Index>(i)) = detail::realize_core(assign[i], ledger);
  ledger.commit(inst);
  return v0 * split.j;
}

/// Approximate compression against a dense (possibly non-normal) operator:
/// every entry of the split of D is realized by the inverse numerical-range
/// solver inside the orthogonal complement of all prior columns, their
/// A-images and A*-images, and the caller's forbidden vectors. Cross terms
/// vanish by construction; the diagonal carries the solver residual.
struct ApproxCompression {
  ComplexMatrix v;
  double residual = 0.0;  // max per-entry quadratic-form residual
};

inline ApproxCompression approx_compress(const ComplexMatrix& a, const ComplexMatrix& d,
                                         const ComplexMatrix& l_forbidden = ComplexMatrix(),
                                         const Tolerances& tol = tols()) {
  require_square(a, "approx_compress");
  require_square(d, "approx_compress");
  SplitDecomp split = hermitian_split_decomp(d, 0.0, tol);
  const Eigen::Index n = a.rows();
  const Eigen::Index r = split.d_diag.size();

  ComplexMatrix avoid = l_forbidden.size() > 0 ? l_forbidden : ComplexMatrix(n, 0);
  if (avoid.rows() != n) throw PreconditionError("approx_compress: forbidden dimension mismatch");
  ComplexMatrix v0(n, r);
  double worst = 0.0;
  for (Eigen::Index i = 0; i < r; ++i) {
    Subspace free = avoid.cols() == 0 ? Subspace::full(n)
                                      : avoidance_subspace(avoid, Subspace::full(n), tol);
    ComplexVector x = realize_constrained(a, split.d_diag(i), free, tol.n_angles, tol);
    worst = std::max(worst, std::abs((x.adjoint() * a * x)(0) - split.d_diag(i)));
    v0.col(i) = x;
    ComplexMatrix wider(n, avoid.cols() + 3);
    wider << avoid, x, a * x, a.adjoint() * x;
    avoid = wider;
  }
  return {v0 * split.j, worst};
}

}  // namespace opc
