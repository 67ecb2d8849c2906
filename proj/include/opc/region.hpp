#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <variant>
#include <vector>

#include "opc/config.hpp"
#include "opc/errors.hpp"
#include "opc/matrix.hpp"

namespace opc {

// Guarantee regions describe where an instance promises to realize quadratic
// forms exactly. The margin is the instance's declared slack between the
// region and the convex hull of its anchors.

struct Disk {
  Cx center;
  double radius = 0.0;
};

struct Polygon {
  std::vector<Cx> vertices;  // convex, counter-clockwise
};

struct Interval {
  double a = 0.0;
  double b = 0.0;  // a <= b, real segment
};

struct GuaranteeRegion {
  std::variant<Disk, Polygon, Interval> shape;
  double margin = 0.0;

  GuaranteeRegion shifted(Cx c) const {
    GuaranteeRegion r = *this;
    if (auto* d = std::get_if<Disk>(&r.shape)) {
      d->center += c;
    } else if (auto* p = std::get_if<Polygon>(&r.shape)) {
      for (auto& v : p->vertices) v += c;
    } else if (auto* iv = std::get_if<Interval>(&r.shape)) {
      iv->a += c.real();
      iv->b += c.real();
    }
    return r;
  }
};

inline double point_segment_dist(Cx p, Cx a, Cx b) {
  const Cx ab = b - a;
  const double len2 = std::norm(ab);
  if (len2 == 0.0) return std::abs(p - a);
  double t = std::clamp(((p - a) * std::conj(ab)).real() / len2, 0.0, 1.0);
  return std::abs(p - (a + t * ab));
}

inline double cross2(Cx o, Cx a, Cx b) {
  return (a.real() - o.real()) * (b.imag() - o.imag()) -
         (a.imag() - o.imag()) * (b.real() - o.real());
}

/// Convex hull (monotone chain), counter-clockwise, no repeated last point.
inline std::vector<Cx> convex_hull(std::vector<Cx> pts) {
  std::sort(pts.begin(), pts.end(), [](Cx a, Cx b) {
    return a.real() < b.real() || (a.real() == b.real() && a.imag() < b.imag());
  });
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  const size_t n = pts.size();
  if (n <= 2) return pts;
  std::vector<Cx> h(2 * n);
  size_t k = 0;
  for (size_t i = 0; i < n; ++i) {
    while (k >= 2 && cross2(h[k - 2], h[k - 1], pts[i]) <= 0) --k;
    h[k++] = pts[i];
  }
  for (size_t i = n - 1, t = k + 1; i > 0; --i) {
    while (k >= t && cross2(h[k - 2], h[k - 1], pts[i - 1]) <= 0) --k;
    h[k++] = pts[i - 1];
  }
  h.resize(k - 1);
  return h;
}

/// Signed inward distance from lambda to the hull boundary (>= 0 inside).
inline double hull_inner_distance(Cx lambda, const std::vector<Cx>& hull) {
  if (hull.empty()) return -1e300;
  if (hull.size() == 1) return std::abs(lambda - hull[0]) == 0.0 ? 0.0 : -std::abs(lambda - hull[0]);
  if (hull.size() == 2) {
    double d = point_segment_dist(lambda, hull[0], hull[1]);
    return -d;  // a segment has empty interior; on-segment gives 0
  }
  double inner = 1e300;
  bool inside = true;
  for (size_t i = 0; i < hull.size(); ++i) {
    Cx a = hull[i], b = hull[(i + 1) % hull.size()];
    double c = cross2(a, b, lambda) / std::abs(b - a);  // signed distance, + inside (CCW)
    inner = std::min(inner, c);
    if (c < 0) inside = false;
  }
  if (!inside) {
    double d = 1e300;
    for (size_t i = 0; i < hull.size(); ++i)
      d = std::min(d, point_segment_dist(lambda, hull[i], hull[(i + 1) % hull.size()]));
    return -d;
  }
  return inner;
}

/// Distance from lambda to the region boundary, measured inward.
/// Throws NotInside when lambda is outside the region.
inline double region_distance(const GuaranteeRegion& r, Cx lambda,
                              const Tolerances& tol = tols()) {
  if (const auto* d = std::get_if<Disk>(&r.shape)) {
    const double dist = d->radius - std::abs(lambda - d->center);
    if (dist < -tol.region) throw NotInside("region_distance: point outside disk");
    return std::max(dist, 0.0);
  }
  if (const auto* p = std::get_if<Polygon>(&r.shape)) {
    const double dist = hull_inner_distance(lambda, p->vertices);
    if (dist < -tol.region) throw NotInside("region_distance: point outside polygon");
    return std::max(dist, 0.0);
  }
  const auto& iv = std::get<Interval>(r.shape);
  if (std::abs(lambda.imag()) > tol.region)
    throw NotInside("region_distance: point off the real axis");
  const double dist = std::min(lambda.real() - iv.a, iv.b - lambda.real());
  if (dist < -tol.region) throw NotInside("region_distance: point outside interval");
  return std::max(dist, 0.0);
}

inline bool region_contains(const GuaranteeRegion& r, Cx lambda,
                            const Tolerances& tol = tols()) {
  try {
    region_distance(r, lambda, tol);
    return true;
  } catch (const NotInside&) {
    return false;
  }
}

/// Points on the region boundary, used for coverage checks.
inline std::vector<Cx> region_boundary_samples(const GuaranteeRegion& r, int n = 256) {
  std::vector<Cx> out;
  if (const auto* d = std::get_if<Disk>(&r.shape)) {
    for (int i = 0; i < n; ++i) out.push_back(d->center + std::polar(d->radius, 2 * M_PI * i / n));
  } else if (const auto* p = std::get_if<Polygon>(&r.shape)) {
    const size_t m = p->vertices.size();
    const int per_edge = std::max(1, n / static_cast<int>(m));
    for (size_t i = 0; i < m; ++i)
      for (int j = 0; j < per_edge; ++j) {
        double t = static_cast<double>(j) / per_edge;
        out.push_back(p->vertices[i] * (1.0 - t) + p->vertices[(i + 1) % m] * t);
      }
  } else {
    const auto& iv = std::get<Interval>(r.shape);
    out.push_back(Cx(iv.a, 0));
    out.push_back(Cx(iv.b, 0));
  }
  return out;
}

}  // namespace opc
