#pragma once

#include <cmath>
#include <optional>
#include <vector>

#include "opc/kernel.hpp"
#include "opc/matrix.hpp"

namespace opc {

enum class PathKind { constant, drift, rotation, generic };

/// Time-dependent operator on [0, 1]. Structured kinds (constant, scalar
/// drift, unitary rotation) evaluate exactly from their generating data; the
/// generic kind interpolates stored samples piecewise-linearly. The declared
/// Lipschitz constant `lip` is the contract other modules budget against.
struct OperatorPath {
  PathKind kind = PathKind::constant;
  ComplexMatrix a0;

  // drift: A(t) = A0 + c(t) I with c(t) = amp * sin(2 pi freq t) + slope * t
  double drift_amp = 0.0, drift_freq = 0.0, drift_slope = 0.0;

  // rotation: A(t) = exp(tK) A0 exp(-tK), K skew-hermitian
  ComplexMatrix k_gen;

  // generic: samples on grid, piecewise-linear
  std::vector<double> grid;
  std::vector<ComplexMatrix> values;

  double lip = 0.0;
  double norm_bound = 0.0;  // sup_t ||A(t)||

  Eigen::Index dim() const { return kind == PathKind::generic && !values.empty() ? values[0].rows() : a0.rows(); }

  Cx drift_value(double t) const {
    return Cx(drift_amp * std::sin(2.0 * M_PI * drift_freq * t) + drift_slope * t, 0.0);
  }

  /// exp(tK) for the rotation kind (identity otherwise).
  ComplexMatrix rotation(double t) const {
    if (kind != PathKind::rotation) return ComplexMatrix::Identity(dim(), dim());
    if (!rot_cache_) {
      // K = iH with H hermitian; exp(tK) = Q e^{i t diag} Q^*
      ComplexMatrix h = Cx(0, -1) * k_gen;
      rot_cache_ = hermitian_eig(0.5 * (h + h.adjoint()));
    }
    const auto& eig = *rot_cache_;
    ComplexVector phases(eig.values.size());
    for (Eigen::Index i = 0; i < eig.values.size(); ++i)
      phases(i) = std::polar(1.0, t * eig.values(i));
    return eig.vectors * phases.asDiagonal() * eig.vectors.adjoint();
  }

  ComplexMatrix eval(double t) const {
    switch (kind) {
      case PathKind::constant:
        return a0;
      case PathKind::drift:
        return a0 + drift_value(t) * ComplexMatrix::Identity(a0.rows(), a0.cols());
      case PathKind::rotation: {
        ComplexMatrix q = rotation(t);
        return q * a0 * q.adjoint();
      }
      case PathKind::generic:
        return interp(t);
    }
    return a0;
  }

  /// Apply A(t) to a block of column vectors without forming A(t) densely
  /// (the structured kinds act on a diagonal base).
  ComplexMatrix apply(double t, const ComplexMatrix& x, const ComplexVector& diag,
                      bool adjoint = false) const {
    switch (kind) {
      case PathKind::constant:
        return adjoint ? ComplexMatrix(diag.conjugate().asDiagonal() * x)
                       : ComplexMatrix(diag.asDiagonal() * x);
      case PathKind::drift: {
        const Cx c = adjoint ? std::conj(drift_value(t)) : drift_value(t);
        return (adjoint ? ComplexMatrix(diag.conjugate().asDiagonal() * x)
                        : ComplexMatrix(diag.asDiagonal() * x)) +
               c * x;
      }
      case PathKind::rotation: {
        ComplexMatrix q = rotation(t);
        ComplexMatrix y = q.adjoint() * x;
        y = adjoint ? ComplexMatrix(diag.conjugate().asDiagonal() * y)
                    : ComplexMatrix(diag.asDiagonal() * y);
        return q * y;
      }
      case PathKind::generic: {
        ComplexMatrix a = interp(t);
        return adjoint ? ComplexMatrix(a.adjoint() * x) : ComplexMatrix(a * x);
      }
    }
    return x;
  }

 private:
  ComplexMatrix interp(double t) const {
    if (grid.empty() || values.empty()) throw BadGrid("OperatorPath: no samples");
    if (grid.size() == 1) return values[0];
    auto it = std::upper_bound(grid.begin(), grid.end(), t);
    size_t hi = std::min<size_t>(std::max<ptrdiff_t>(it - grid.begin(), 1), grid.size() - 1);
    size_t lo = hi - 1;
    double h = grid[hi] - grid[lo];
    double w = h > 0 ? (t - grid[lo]) / h : 0.0;
    w = std::clamp(w, 0.0, 1.0);
    return (1.0 - w) * values[lo] + w * values[hi];
  }

  mutable std::optional<HermitianEig> rot_cache_;
};

enum class TargetExpr { constant, affine, circle, nilpotent_rot, grid_linear };

/// Time-dependent finite target D(t) (scalar targets are 1x1). Expression
/// kinds evaluate exactly; grid_linear interpolates stored samples.
struct TargetPath {
  TargetExpr expr = TargetExpr::constant;
  ComplexMatrix d0;  // base value / constant
  Cx p1 = 0.0;       // affine slope or circle radius
  double freq = 0.0; // circle / nilpotent rotation frequency
  std::vector<double> grid;
  std::vector<ComplexMatrix> values;
  double lip = 0.0;

  Eigen::Index rows() const { return expr == TargetExpr::grid_linear && !values.empty() ? values[0].rows() : d0.rows(); }

  ComplexMatrix eval(double t) const {
    switch (expr) {
      case TargetExpr::constant:
        return d0;
      case TargetExpr::affine:
        return d0 + ComplexMatrix::Constant(d0.rows(), d0.cols(), t * p1);
      case TargetExpr::circle:
        return d0 + ComplexMatrix::Constant(d0.rows(), d0.cols(),
                                            p1 * std::polar(1.0, 2.0 * M_PI * freq * t));
      case TargetExpr::nilpotent_rot: {
        ComplexMatrix d = ComplexMatrix::Zero(2, 2);
        d(0, 1) = p1 * std::polar(1.0, 2.0 * M_PI * freq * t);
        return d;
      }
      case TargetExpr::grid_linear: {
        if (grid.empty()) throw BadGrid("TargetPath: no samples");
        if (grid.size() == 1) return values[0];
        auto it = std::upper_bound(grid.begin(), grid.end(), t);
        size_t hi = std::min<size_t>(std::max<ptrdiff_t>(it - grid.begin(), 1), grid.size() - 1);
        size_t lo = hi - 1;
        double h = grid[hi] - grid[lo];
        double w = h > 0 ? std::clamp((t - grid[lo]) / h, 0.0, 1.0) : 0.0;
        return (1.0 - w) * values[lo] + w * values[hi];
      }
    }
    return d0;
  }

  double norm_bound() const {
    switch (expr) {
      case TargetExpr::constant:
        return op_norm(d0);
      case TargetExpr::affine:
        return op_norm(d0) + std::abs(p1) * d0.rows();
      case TargetExpr::circle:
        return op_norm(d0) + std::abs(p1) * d0.rows();
      case TargetExpr::nilpotent_rot:
        return std::abs(p1);
      case TargetExpr::grid_linear: {
        double b = 0;
        for (auto& v : values) b = std::max(b, op_norm(v));
        return b;
      }
    }
    return 0.0;
  }

  static TargetPath constant(const ComplexMatrix& d) {
    TargetPath p;
    p.expr = TargetExpr::constant;
    p.d0 = d;
    p.lip = 0.0;
    return p;
  }

  static TargetPath scalar_affine(Cx base, Cx slope) {
    TargetPath p;
    p.expr = TargetExpr::affine;
    p.d0 = ComplexMatrix::Constant(1, 1, base);
    p.p1 = slope;
    p.lip = std::abs(slope);
    return p;
  }
};

/// Uniform grid with n_intervals+1 nodes on [0, 1].
inline std::vector<double> uniform_grid(int n_intervals) {
  if (n_intervals < 1) throw BadGrid("uniform_grid: need at least one interval");
  std::vector<double> g(n_intervals + 1);
  for (int i = 0; i <= n_intervals; ++i) g[i] = static_cast<double>(i) / n_intervals;
  return g;
}

}  // namespace opc
