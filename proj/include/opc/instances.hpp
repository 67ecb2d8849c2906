#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include "opc/kernel.hpp"
#include "opc/paths.hpp"
#include "opc/region.hpp"

namespace opc {

/// Reservoir instance: a diagonal operator whose spectrum consists of the
/// anchors, each with the same multiplicity m. The instance guarantees exact
/// quadratic-form realizations inside its region; the room budget (m
/// dimensions per anchor, of which m-1 can carry orthogonality constraints)
/// is tracked in `used` as a per-anchor high-water mark.
struct ReservoirInstance {
  std::vector<Cx> anchors;
  int multiplicity = 0;
  GuaranteeRegion region;
  std::vector<int> used;  // consumed dimensions per anchor (high water)

  Eigen::Index dim() const {
    return static_cast<Eigen::Index>(anchors.size()) * multiplicity;
  }

  /// Diagonal of the operator (anchor-major slot layout).
  ComplexVector diagonal() const {
    ComplexVector d(dim());
    for (size_t k = 0; k < anchors.size(); ++k)
      for (int j = 0; j < multiplicity; ++j) d(static_cast<Eigen::Index>(k) * multiplicity + j) = anchors[k];
    return d;
  }

  ComplexMatrix matrix() const { return ComplexMatrix(diagonal().asDiagonal()); }

  int anchor_count() const { return static_cast<int>(anchors.size()); }
};

namespace detail {

inline bool anchors_collinear(const std::vector<Cx>& a, double tol = 1e-10) {
  if (a.size() <= 2) return true;
  Cx u = 0;
  for (size_t i = 1; i < a.size() && std::abs(u) < tol; ++i) u = a[i] - a[0];
  if (std::abs(u) < tol) return true;
  u /= std::abs(u);
  for (size_t i = 1; i < a.size(); ++i)
    if (std::abs(((a[i] - a[0]) * std::conj(u)).imag()) > tol) return false;
  return true;
}

}  // namespace detail

/// Build a reservoir instance; validates that the margin-inflated region sits
/// inside the convex hull of the anchors.
inline ReservoirInstance gen_reservoir(std::vector<Cx> anchors, int multiplicity,
                                       GuaranteeRegion region, const Tolerances& tol = tols()) {
  if (anchors.empty()) throw PreconditionError("gen_reservoir: no anchors");
  if (multiplicity < 1) throw PreconditionError("gen_reservoir: multiplicity must be >= 1");
  for (size_t i = 0; i < anchors.size(); ++i)
    for (size_t j = i + 1; j < anchors.size(); ++j)
      if (std::abs(anchors[i] - anchors[j]) < 1e-12)
        throw PreconditionError("gen_reservoir: duplicate anchors");

  const double margin = region.margin;
  if (detail::anchors_collinear(anchors)) {
    // Degenerate hull: only interval regions over real anchors are supported.
    const auto* iv = std::get_if<Interval>(&region.shape);
    if (!iv)
      throw RegionNotCovered("gen_reservoir: collinear anchors support only interval regions");
    double lo = 1e300, hi = -1e300;
    for (Cx a : anchors) {
      if (std::abs(a.imag()) > tol.region)
        throw RegionNotCovered("gen_reservoir: interval instances need real anchors");
      lo = std::min(lo, a.real());
      hi = std::max(hi, a.real());
    }
    if (iv->a - margin < lo - tol.region || iv->b + margin > hi + tol.region)
      throw RegionNotCovered("gen_reservoir: inflated interval leaves the anchor hull");
  } else {
    std::vector<Cx> hull = convex_hull(anchors);
    std::vector<Cx> extremes;
    double inflate = 0.0;
    if (const auto* d = std::get_if<Disk>(&region.shape)) {
      extremes.push_back(d->center);
      inflate = d->radius;
    } else if (const auto* p = std::get_if<Polygon>(&region.shape)) {
      extremes = p->vertices;
    } else {
      const auto& seg = std::get<Interval>(region.shape);
      extremes = {Cx(seg.a, 0), Cx(seg.b, 0)};
    }
    for (Cx e : extremes)
      if (hull_inner_distance(e, hull) < inflate + margin - tol.region)
        throw RegionNotCovered("gen_reservoir: margin-inflated region leaves the anchor hull");
  }

  ReservoirInstance inst;
  inst.anchors = std::move(anchors);
  inst.multiplicity = multiplicity;
  inst.region = region;
  inst.used.assign(inst.anchors.size(), 0);
  return inst;
}

/// One anchor index with its convex weight.
struct AnchorWeight {
  int anchor;
  double beta;
};

namespace detail {

/// Exact barycentric weights of p in the triangle (anchors of indices t0..t2).
inline std::array<double, 3> bary3(Cx p, Cx a, Cx b, Cx c) {
  const double den = cross2(a, b, c);
  return {cross2(p, b, c) / den, cross2(a, p, c) / den, cross2(a, b, p) / den};
}

/// Anchor order sorted counter-clockwise around the anchor centroid
/// (stable on ties).
inline std::vector<int> ccw_order(const std::vector<Cx>& anchors) {
  Cx c = std::accumulate(anchors.begin(), anchors.end(), Cx(0)) /
         static_cast<double>(anchors.size());
  std::vector<int> idx(anchors.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](int i, int j) {
    return std::arg(anchors[i] - c) < std::arg(anchors[j] - c);
  });
  return idx;
}

/// Weights along a line of collinear anchors (consecutive segment containing
/// lambda, lower segment index on ties).
inline std::vector<AnchorWeight> segment_weights(const std::vector<Cx>& anchors, Cx lambda,
                                                 const Tolerances& tol) {
  Cx u = 0;
  for (size_t i = 1; i < anchors.size() && std::abs(u) < 1e-12; ++i) u = anchors[i] - anchors[0];
  if (std::abs(u) < 1e-12) {
    if (std::abs(lambda - anchors[0]) > tol.realize)
      throw NotInside("segment_weights: single-point hull cannot reach value");
    return {{0, 1.0}};
  }
  u /= std::abs(u);
  if (std::abs(((lambda - anchors[0]) * std::conj(u)).imag()) > tol.region)
    throw NotInside("segment_weights: value off the anchor line");
  std::vector<int> idx(anchors.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](int i, int j) {
    return ((anchors[i] - anchors[0]) * std::conj(u)).real() <
           ((anchors[j] - anchors[0]) * std::conj(u)).real();
  });
  const double s = ((lambda - anchors[0]) * std::conj(u)).real();
  for (size_t i = 0; i + 1 < idx.size(); ++i) {
    const double s0 = ((anchors[idx[i]] - anchors[0]) * std::conj(u)).real();
    const double s1 = ((anchors[idx[i + 1]] - anchors[0]) * std::conj(u)).real();
    if (s >= s0 - tol.region && s <= s1 + tol.region) {
      double w = s1 > s0 ? std::clamp((s - s0) / (s1 - s0), 0.0, 1.0) : 0.0;
      std::vector<AnchorWeight> out;
      if (1.0 - w > 1e-14) out.push_back({idx[i], 1.0 - w});
      if (w > 1e-14) out.push_back({idx[i + 1], w});
      return out;
    }
  }
  throw NotInside("segment_weights: value outside the anchor segment range");
}

}  // namespace detail

/// Barycentric weights for lambda over the anchors by the fan rule: anchors
/// ordered counter-clockwise around their centroid, fan triangles from the
/// first ordered anchor, first (lowest-index) containing triangle wins.
inline std::vector<AnchorWeight> fan_weights(const std::vector<Cx>& anchors, Cx lambda,
                                             const Tolerances& tol = tols()) {
  if (anchors.size() == 1) {
    if (std::abs(lambda - anchors[0]) > tol.realize)
      throw NotInside("fan_weights: value is not the unique anchor");
    return {{0, 1.0}};
  }
  if (detail::anchors_collinear(anchors)) return detail::segment_weights(anchors, lambda, tol);

  std::vector<int> order = detail::ccw_order(anchors);
  const int n = static_cast<int>(anchors.size());
  int best_tri = -1, fallback_tri = -1;
  double best_margin = -1e300;
  for (int i = 1; i + 1 < n; ++i) {
    auto w = detail::bary3(lambda, anchors[order[0]], anchors[order[i]], anchors[order[i + 1]]);
    double m = std::min({w[0], w[1], w[2]});
    if (m >= -1e-12) {
      best_tri = i;
      break;  // lowest triangle index wins ties
    }
    if (m > best_margin) {
      best_margin = m;
      fallback_tri = i;
    }
  }
  // Points on a fan-edge seam can round to slightly negative margins in every
  // triangle; accept the best triangle when the violation is rounding-sized.
  if (best_tri < 0 && best_margin >= -1e-7) best_tri = fallback_tri;
  int tri[3];
  if (best_tri >= 0) {
    tri[0] = order[0];
    tri[1] = order[best_tri];
    tri[2] = order[best_tri + 1];
  } else {
    // Anchors strictly inside the hull dent the fan polygon; fall back to the
    // lexicographically first containing triangle so the operation stays
    // total on the whole anchor hull.
    int bi = -1, bj = -1, bk = -1;
    double bm = -1e300;
    for (int i = 0; i < n && bi < 0; ++i)
      for (int j = i + 1; j < n && bi < 0; ++j)
        for (int k = j + 1; k < n; ++k) {
          if (std::abs(cross2(anchors[i], anchors[j], anchors[k])) < 1e-12) continue;
          auto w = detail::bary3(lambda, anchors[i], anchors[j], anchors[k]);
          double m = std::min({w[0], w[1], w[2]});
          if (m > bm) {
            bm = m;
            tri[0] = i;
            tri[1] = j;
            tri[2] = k;
          }
          if (m >= -1e-12) {
            bi = i;
            break;
          }
        }
    if (bm < -1e-7) throw NotInside("fan_weights: value outside the anchor hull");
  }
  auto w = detail::bary3(lambda, anchors[tri[0]], anchors[tri[1]], anchors[tri[2]]);
  std::vector<AnchorWeight> out;
  for (int j = 0; j < 3; ++j)
    if (w[j] > 1e-14) out.push_back({tri[j], std::max(w[j], 0.0)});
  // renormalize clamped weights
  double s = 0;
  for (auto& aw : out) s += aw.beta;
  for (auto& aw : out) aw.beta /= s;
  return out;
}

/// Deterministic load-balanced triangle assignment for a batch of values:
/// each value gets a containing anchor triangle chosen greedily to minimize
/// the resulting worst per-anchor load (ties: smaller load sum, then
/// lexicographic triple). Loads are passed in as the already-consumed ranks.
inline std::vector<std::vector<AnchorWeight>> balanced_assign(const std::vector<Cx>& anchors,
                                                              const std::vector<Cx>& entries,
                                                              std::vector<int> loads,
                                                              const Tolerances& tol = tols()) {
  const int n = static_cast<int>(anchors.size());
  std::vector<std::vector<AnchorWeight>> out;
  out.reserve(entries.size());
  if (detail::anchors_collinear(anchors)) {
    for (Cx lam : entries) out.push_back(detail::segment_weights(anchors, lam, tol));
    return out;
  }
  for (Cx lam : entries) {
    // snap to a single anchor when the value is an anchor
    int snap = -1;
    for (int i = 0; i < n; ++i)
      if (std::abs(lam - anchors[i]) < 1e-13) snap = i;
    if (snap >= 0) {
      out.push_back({{snap, 1.0}});
      loads[snap] += 1;
      continue;
    }
    int bi = -1, bj = -1, bk = -1;
    long best_key1 = std::numeric_limits<long>::max();
    long best_key2 = std::numeric_limits<long>::max();
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j)
        for (int k = j + 1; k < n; ++k) {
          if (std::abs(cross2(anchors[i], anchors[j], anchors[k])) < 1e-12) continue;
          auto w = detail::bary3(lam, anchors[i], anchors[j], anchors[k]);
          if (std::min({w[0], w[1], w[2]}) < -1e-12) continue;
          long key1 = std::max({loads[i], loads[j], loads[k]}) + 1;
          long key2 = loads[i] + loads[j] + loads[k];
          if (key1 < best_key1 || (key1 == best_key1 && key2 < best_key2)) {
            best_key1 = key1;
            best_key2 = key2;
            bi = i;
            bj = j;
            bk = k;
          }
        }
    if (bi < 0) {
      // no strictly containing triangle (value on the hull boundary):
      // fall back to the fan rule
      out.push_back(fan_weights(anchors, lam, tol));
      for (auto& aw : out.back()) loads[aw.anchor] += 1;
      continue;
    }
    auto w = detail::bary3(lam, anchors[bi], anchors[bj], anchors[bk]);
    std::vector<AnchorWeight> aw;
    const int tri[3] = {bi, bj, bk};
    double s = 0;
    for (int j = 0; j < 3; ++j)
      if (w[j] > 1e-14) {
        aw.push_back({tri[j], std::max(w[j], 0.0)});
        s += std::max(w[j], 0.0);
      }
    for (auto& x : aw) {
      x.beta /= s;
      loads[x.anchor] += 1;
    }
    out.push_back(std::move(aw));
  }
  return out;
}

/// Per-anchor orthogonality ledger in the diagonal frame. Records the span of
/// forbidden-vector projections into each anchor eigenspace and hands out
/// fresh slot vectors orthogonal to everything recorded.
class AnchorLedger {
 public:
  explicit AnchorLedger(const ReservoirInstance& inst)
      : m_(inst.multiplicity), bases_(inst.anchors.size()) {
    for (auto& b : bases_) b.resize(m_, 0);
  }

  int rank(int anchor) const { return static_cast<int>(bases_[anchor].cols()); }
  int eigenspace_dim() const { return m_; }
  int anchor_count() const { return static_cast<int>(bases_.size()); }

  /// Record a forbidden vector (diagonal-frame coordinates, full dimension).
  void add(const ComplexVector& f) {
    const double scale = f.norm();
    if (scale < 1e-300) return;
    for (size_t k = 0; k < bases_.size(); ++k) {
      Eigen::VectorXcd seg = f.segment(static_cast<Eigen::Index>(k) * m_, m_);
      add_segment(static_cast<int>(k), seg, scale);
    }
  }

  void add_block(const ComplexMatrix& cols) {
    for (Eigen::Index j = 0; j < cols.cols(); ++j) add(cols.col(j));
  }

  /// Allocate a fresh unit vector in anchor k's eigenspace, orthogonal to the
  /// recorded span; the vector itself is recorded as consumed. Returns
  /// full-dimension diagonal-frame coordinates.
  ComplexVector alloc(int k) {
    ComplexMatrix& q = bases_[k];
    const int r = static_cast<int>(q.cols());
    if (r >= m_)
      throw RoomExhausted("reservoir anchor " + std::to_string(k) + " exhausted (multiplicity " +
                              std::to_string(m_) + ")",
                          k, r + 1);
    // slot with the largest residual after projecting out the recorded span
    int best = 0;
    double best_res = -1.0;
    for (int j = 0; j < m_; ++j) {
      double pr = r > 0 ? q.row(j).squaredNorm() : 0.0;
      double res = 1.0 - std::min(pr, 1.0);
      if (res > best_res + 1e-15) {
        best_res = res;
        best = j;
      }
    }
    if (best_res < 1e-8)
      throw RoomExhausted("reservoir anchor " + std::to_string(k) + " numerically exhausted", k,
                          r + 1);
    ComplexVector z = ComplexVector::Zero(m_);
    z(best) = 1.0;
    for (int round = 0; round < 2; ++round)
      if (q.cols() > 0) z -= q * (q.adjoint() * z);
    z /= z.norm();
    q.conservativeResize(Eigen::NoChange, r + 1);
    q.col(r) = z;
    ComplexVector full = ComplexVector::Zero(static_cast<Eigen::Index>(bases_.size()) * m_);
    full.segment(static_cast<Eigen::Index>(k) * m_, m_) = z;
    return full;
  }

  /// Write the high-water marks into the instance's used ledger.
  void commit(ReservoirInstance& inst) const {
    for (size_t k = 0; k < bases_.size(); ++k)
      inst.used[k] = std::max(inst.used[k], rank(static_cast<int>(k)));
  }

 private:
  void add_segment(int k, const ComplexVector& seg, double scale) {
    if (seg.norm() <= 1e-14 * scale) return;
    ComplexMatrix& q = bases_[k];
    ComplexVector v = seg;
    for (int round = 0; round < 2; ++round)
      if (q.cols() > 0) v -= q * (q.adjoint() * v);
    if (v.norm() <= 1e-12 * scale) return;  // already represented
    if (q.cols() >= m_) return;             // saturated; alloc will signal
    v /= v.norm();
    q.conservativeResize(Eigen::NoChange, q.cols() + 1);
    q.col(q.cols() - 1) = v;
  }

  int m_;
  std::vector<ComplexMatrix> bases_;
};

/// Anchor values of the instance under a structured path at time t (drift
/// shifts all anchors; rotation leaves them fixed).
inline std::vector<Cx> anchors_at(const ReservoirInstance& inst, const OperatorPath& path,
                                  double t) {
  std::vector<Cx> a = inst.anchors;
  if (path.kind == PathKind::drift) {
    const Cx c = path.drift_value(t);
    for (auto& v : a) v += c;
  }
  return a;
}

/// Instance guarantee region at time t under a structured path.
inline GuaranteeRegion region_at(const ReservoirInstance& inst, const OperatorPath& path,
                                 double t) {
  if (path.kind == PathKind::drift) return inst.region.shifted(path.drift_value(t));
  return inst.region;
}

namespace detail {

/// Shared realization core: allocate slot vectors per weighted anchor and
/// combine. All coordinates are in the diagonal frame.
inline ComplexVector realize_core(const std::vector<AnchorWeight>& weights, AnchorLedger& ledger) {
  ComplexVector x = ComplexVector::Zero(static_cast<Eigen::Index>(ledger.anchor_count()) *
                                        ledger.eigenspace_dim());
  for (const auto& aw : weights) x += std::sqrt(aw.beta) * ledger.alloc(aw.anchor);
  return x;
}

}  // namespace detail

/// Realize lambda exactly as x^* A x in the reservoir, with x orthogonal to
/// every forbidden column. Consumes one dimension of each anchor carrying
/// positive weight. The fan rule picks the weights.
inline ComplexVector realize_in_reservoir(ReservoirInstance& inst, Cx lambda,
                                          const ComplexMatrix& forbidden = ComplexMatrix(),
                                          const Tolerances& tol = tols()) {
  region_distance(inst.region, lambda, tol);  // NotInside when outside
  AnchorLedger ledger(inst);
  if (forbidden.size() > 0) {
    if (forbidden.rows() != inst.dim())
      throw PreconditionError("realize_in_reservoir: forbidden dimension mismatch");
    ledger.add_block(forbidden);
  }
  auto weights = fan_weights(inst.anchors, lambda, tol);
  ComplexVector x = detail::realize_core(weights, ledger);
  ledger.commit(inst);
  return x;
}

/// Generate a structured operator path over the instance.
inline OperatorPath gen_path_constant(const ReservoirInstance& inst) {
  OperatorPath p;
  p.kind = PathKind::constant;
  p.a0 = inst.matrix();
  p.lip = 0.0;
  double nb = 0;
  for (Cx a : inst.anchors) nb = std::max(nb, std::abs(a));
  p.norm_bound = nb;
  return p;
}

inline OperatorPath gen_path_drift(const ReservoirInstance& inst, double amp, double freq,
                                   double slope) {
  OperatorPath p;
  p.kind = PathKind::drift;
  p.a0 = inst.matrix();
  p.drift_amp = amp;
  p.drift_freq = freq;
  p.drift_slope = slope;
  p.lip = std::abs(amp) * 2.0 * M_PI * std::abs(freq) + std::abs(slope);
  double nb = 0;
  for (Cx a : inst.anchors) nb = std::max(nb, std::abs(a));
  p.norm_bound = nb + std::abs(amp) + std::abs(slope);
  return p;
}

inline OperatorPath gen_path_rotation(const ReservoirInstance& inst, const ComplexMatrix& k_gen,
                                      const Tolerances& tol = tols()) {
  require_square(k_gen, "gen_path_rotation");
  if (k_gen.rows() != inst.dim())
    throw PreconditionError("gen_path_rotation: generator dimension mismatch");
  if ((k_gen + k_gen.adjoint()).norm() > tol.herm * std::max(1.0, k_gen.norm()))
    throw PreconditionError("gen_path_rotation: generator must be skew-hermitian");
  OperatorPath p;
  p.kind = PathKind::rotation;
  p.a0 = inst.matrix();
  p.k_gen = k_gen;
  double nb = 0;
  for (Cx a : inst.anchors) nb = std::max(nb, std::abs(a));
  p.norm_bound = nb;
  p.lip = 2.0 * op_norm(k_gen) * nb;
  return p;
}

}  // namespace opc
