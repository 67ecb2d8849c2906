#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include "opc/kernel.hpp"
#include "opc/region.hpp"

namespace opc {

/// A numerical-range boundary sample: the achieved value and the unit vector
/// achieving it.
struct RegionPoint {
  Cx value;
  ComplexVector vector;
};

/// Top support point of the numerical range in direction theta: the largest
/// eigenvalue of Re(e^{-i theta} A) with its eigenvector x, reported as x^*Ax.
inline RegionPoint support_point(const ComplexMatrix& a, double theta) {
  const Cx e = std::polar(1.0, -theta);
  ComplexMatrix h = 0.5 * (e * a + std::conj(e) * a.adjoint());
  HermitianEig eig = hermitian_eig(h);
  ComplexVector x = eig.vectors.col(eig.vectors.cols() - 1);
  return RegionPoint{Cx(x.dot(a * x)), x};
}

/// Boundary sweep of the numerical range W(A). Every returned value lies in
/// W(A); their convex hull is an inscribed approximation that grows with
/// n_angles.
inline std::vector<RegionPoint> nr_boundary(const ComplexMatrix& a,
                                            int n_angles = tols().n_angles) {
  require_square(a, "nr_boundary");
  if (n_angles < 3) throw BadGrid("nr_boundary: need at least 3 angles");
  std::vector<RegionPoint> pts;
  pts.reserve(n_angles);
  for (int i = 0; i < n_angles; ++i)
    pts.push_back(support_point(a, 2.0 * M_PI * i / n_angles));
  return pts;
}

/// Membership in the convex hull of the boundary sweep, shrunk by the region
/// tolerance.
inline bool nr_contains(const ComplexMatrix& a, Cx lambda, int n_angles = tols().n_angles,
                        const Tolerances& tol = tols()) {
  auto pts = nr_boundary(a, n_angles);
  std::vector<Cx> vals;
  vals.reserve(pts.size());
  for (auto& p : pts) vals.push_back(p.value);
  // Degenerate (hermitian-like) case: hull may be a segment.
  std::vector<Cx> hull = convex_hull(vals);
  if (hull.size() <= 2) {
    double d = hull.size() == 2 ? point_segment_dist(lambda, hull[0], hull[1])
                                : std::abs(lambda - (hull.empty() ? Cx(0) : hull[0]));
    return d <= tol.region;
  }
  return hull_inner_distance(lambda, hull) >= tol.region;
}

namespace detail {

/// Evaluate the two-dimensional compressed form
///   q(s, phi) = cos^2 s B11 + sin^2 s B22 + cos s sin s (e^{i phi} B12 + e^{-i phi} B21).
inline Cx form2(const ComplexMatrix& b, double s, double phi) {
  const double c = std::cos(s), sn = std::sin(s);
  const Cx e = std::polar(1.0, phi);
  return c * c * b(0, 0) + sn * sn * b(1, 1) + c * sn * (e * b(0, 1) + std::conj(e) * b(1, 0));
}

/// Damped least-squares iteration on (s, phi) for form2 = lambda. Handles the
/// degenerate (real segment) case where phi has no effect. Returns residual.
inline double newton2(const ComplexMatrix& b, Cx lambda, double& s, double& phi) {
  double mu = 1e-12;
  for (int it = 0; it < 120; ++it) {
    const double c = std::cos(s), sn = std::sin(s);
    const Cx e = std::polar(1.0, phi);
    const Cx cross = e * b(0, 1) + std::conj(e) * b(1, 0);
    const Cx f = c * c * b(0, 0) + sn * sn * b(1, 1) + c * sn * cross - lambda;
    if (std::abs(f) < 1e-15) break;
    const Cx dfs = 2.0 * c * sn * (b(1, 1) - b(0, 0)) + (c * c - sn * sn) * cross;
    const Cx dfp = c * sn * (Cx(0, 1) * e * b(0, 1) - Cx(0, 1) * std::conj(e) * b(1, 0));
    // Levenberg-Marquardt step on the real 2x2 system J [ds dphi]^T = -f.
    const double a11 = dfs.real(), a12 = dfp.real(), a21 = dfs.imag(), a22 = dfp.imag();
    const double g11 = a11 * a11 + a21 * a21 + mu;
    const double g12 = a11 * a12 + a21 * a22;
    const double g22 = a12 * a12 + a22 * a22 + mu;
    const double r1 = -(a11 * f.real() + a21 * f.imag());
    const double r2 = -(a12 * f.real() + a22 * f.imag());
    const double det = g11 * g22 - g12 * g12;
    if (det <= 0) break;
    const double ds = (r1 * g22 - r2 * g12) / det;
    const double dp = (g11 * r2 - g12 * r1) / det;
    double damp = 1.0;
    bool improved = false;
    for (int h = 0; h < 40; ++h) {
      if (std::abs(form2(b, s + damp * ds, phi + damp * dp) - lambda) < std::abs(f)) {
        improved = true;
        break;
      }
      damp *= 0.5;
    }
    if (!improved) {
      mu *= 16.0;
      if (mu > 1e6) break;
      continue;
    }
    mu = std::max(1e-12, mu * 0.25);
    s += damp * ds;
    phi += damp * dp;
  }
  return std::abs(form2(b, s, phi) - lambda);
}

/// Closed-form seed for form2 = lambda via the traceless reduction: with
/// B = alpha I + Btilde, the slice {form2 : phi} at fixed s is an ellipse
/// centered cos(2s) d with axes scaled by sin(2s)/2; bisection on s places
/// lambda on the slice boundary.
inline bool seed2x2(const ComplexMatrix& b, Cx lambda, double& s_out, double& phi_out) {
  const Cx alpha = 0.5 * (b(0, 0) + b(1, 1));
  const Cx d = b(0, 0) - alpha;
  const Cx bb = b(0, 1), cc = b(1, 0);
  const Cx lam = lambda - alpha;
  const double psi = 0.5 * (std::arg(bb) + std::arg(cc));
  const double beta = std::abs(bb) > 0 ? std::arg(bb) - psi : 0.0;
  const double p = std::abs(bb) + std::abs(cc);
  const double q = std::abs(bb) - std::abs(cc);
  if (p < 1e-300) return false;
  auto gfun = [&](double t) {
    const double st = std::sin(t);
    if (st < 1e-12) return 1e300;
    const Cx v = std::polar(1.0, -psi) * ((lam - std::cos(t) * d) / (0.5 * st));
    const double x = v.real() / p;
    const double y = std::abs(q) > 1e-12 * p ? v.imag() / q : v.imag() / (1e-12 * p);
    return x * x + y * y - 1.0;
  };
  // scan for a sign change of g over t in (0, pi)
  const int scan = 256;
  double t_lo = -1, t_hi = -1, g_prev = gfun(M_PI * 0.5 / scan);
  double t_prev = M_PI * 0.5 / scan;
  for (int i = 1; i <= scan; ++i) {
    double t = M_PI * (0.5 + i) / (scan + 1);
    double g = gfun(t);
    if ((g_prev > 0) != (g > 0)) {
      t_lo = t_prev;
      t_hi = t;
      break;
    }
    t_prev = t;
    g_prev = g;
  }
  if (t_lo < 0) return false;
  bool lo_pos = gfun(t_lo) > 0;
  for (int i = 0; i < 80; ++i) {
    double mid = 0.5 * (t_lo + t_hi);
    ((gfun(mid) > 0) == lo_pos ? t_lo : t_hi) = mid;
  }
  const double t = 0.5 * (t_lo + t_hi);
  const Cx v = std::polar(1.0, -psi) * ((lam - std::cos(t) * d) / (0.5 * std::sin(t)));
  const double chi =
      std::atan2(std::abs(q) > 1e-12 * p ? v.imag() / q : 0.0, v.real() / std::max(p, 1e-300));
  s_out = 0.5 * t;
  phi_out = chi - beta;
  return true;
}

/// Best (s, phi) by closed-form seed + coarse grid + damped least squares.
inline double solve2x2(const ComplexMatrix& b, Cx lambda, double& s_out, double& phi_out) {
  double best = 1e300;
  double s_seed = 0, phi_seed = 0;
  if (seed2x2(b, lambda, s_seed, phi_seed)) {
    best = std::abs(form2(b, s_seed, phi_seed) - lambda);
    s_out = s_seed;
    phi_out = phi_seed;
  }
  for (int i = 0; i <= 24; ++i)
    for (int j = 0; j < 32; ++j) {
      double s = 0.5 * M_PI * i / 24.0;
      double phi = 2.0 * M_PI * j / 32.0;
      double r = std::abs(form2(b, s, phi) - lambda);
      if (r < best) {
        best = r;
        s_out = s;
        phi_out = phi;
      }
    }
  return newton2(b, lambda, s_out, phi_out);
}

/// Solve for a unit vector in span{x1, x2} whose form equals lambda; x1, x2
/// are unit but not necessarily orthogonal. Returns residual and the vector.
inline double solve_in_span(const ComplexMatrix& a, const ComplexVector& x1,
                            const ComplexVector& x2, Cx lambda, ComplexVector& out) {
  ComplexVector x2o = x2 - x1 * x1.dot(x2);
  if (x2o.norm() < 1e-10) return 1e300;
  x2o /= x2o.norm();
  ComplexMatrix frame(a.rows(), 2);
  frame.col(0) = x1;
  frame.col(1) = x2o;
  ComplexMatrix b = frame.adjoint() * a * frame;
  double s = 0, phi = 0;
  double res = detail::solve2x2(b, lambda, s, phi);
  ComplexVector x = std::cos(s) * x1 + std::polar(1.0, phi) * std::sin(s) * x2o;
  out = x / x.norm();
  return std::abs(Cx(out.dot(a * out)) - lambda);
}

}  // namespace detail

namespace detail {
/// Barycentric coordinates of p in triangle (a, b, c); minimum coordinate
/// (negative when outside).
inline double triangle_margin(Cx p, Cx a, Cx b, Cx c) {
  const double den = cross2(a, b, c);
  if (std::abs(den) < 1e-300) return -1e300;
  const double w0 = cross2(p, b, c) / den;
  const double w1 = cross2(a, p, c) / den;
  const double w2 = cross2(a, b, p) / den;
  return std::min({w0, w1, w2});
}

}  // namespace detail

/// Realize lambda as x^* A x with ||x|| = 1, via a two-support-vector
/// compression: pick boundary support vectors straddling lambda along the line
/// through lambda and the hull centroid, compress to 2x2, and solve over
/// cos s x1 + e^{i phi} sin s x2.
inline ComplexVector realize(const ComplexMatrix& a, Cx lambda,
                             int n_angles = tols().n_angles, const Tolerances& tol = tols()) {
  require_square(a, "realize");
  if (!nr_contains(a, lambda, n_angles, tol))
    throw NotInRange("realize: value outside the numerical range hull");
  auto pts = nr_boundary(a, n_angles);
  Cx centroid = 0;
  for (auto& p : pts) centroid += p.value;
  centroid /= static_cast<double>(pts.size());
  Cx dir = lambda - centroid;
  dir = std::abs(dir) > 1e-14 ? dir / std::abs(dir) : Cx(1, 0);

  // Rank candidate support pairs straddling lambda along dir by the distance
  // from lambda to the segment between their values.
  std::vector<int> ahead, behind;
  for (int i = 0; i < static_cast<int>(pts.size()); ++i) {
    const Cx rel = (pts[i].value - lambda) * std::conj(dir);
    (rel.real() >= 0 ? ahead : behind).push_back(i);
  }
  if (ahead.empty() || behind.empty())
    throw Degenerate2x2("realize: no straddling support pair");
  std::vector<std::pair<double, std::pair<int, int>>> pairs;
  for (int i : ahead)
    for (int j : behind)
      pairs.push_back({point_segment_dist(lambda, pts[i].value, pts[j].value), {i, j}});
  std::sort(pairs.begin(), pairs.end(),
            [](const auto& l, const auto& r) { return l.first < r.first; });

  double best_res = 1e300;
  ComplexVector best_x;
  const int retries = std::min<size_t>(24, pairs.size());
  for (int t = 0; t < retries && best_res > tol.realize * 1e-3; ++t) {
    ComplexVector x;
    double res = detail::solve_in_span(a, pts[pairs[t].second.first].vector,
                                       pts[pairs[t].second.second].vector, lambda, x);
    if (res < best_res) {
      best_res = res;
      best_x = x;
    }
  }

  if (best_res > tol.realize) {
    // Nested three-point fallback: pick a support triangle containing lambda,
    // realize the chord crossing on one side exactly, then solve along the
    // chord through the third vertex. Both stages have on-segment targets.
    const auto& [i1, i2] = pairs[0].second;
    int i3 = -1;
    double best_margin = 0.0;
    for (int i = 0; i < static_cast<int>(pts.size()); ++i) {
      double m = detail::triangle_margin(lambda, pts[i1].value, pts[i2].value, pts[i].value);
      if (m > best_margin) {
        best_margin = m;
        i3 = i;
      }
    }
    if (i3 >= 0) {
      const Cx p1 = pts[i1].value, p2 = pts[i2].value, p3 = pts[i3].value;
      // intersection of line(p3 -> lambda) with segment [p1, p2]
      const Cx u = p2 - p1, v = lambda - p3;
      const double den = u.real() * v.imag() - u.imag() * v.real();
      if (std::abs(den) > 1e-300) {
        const Cx w = p3 - p1;
        double tseg = (w.real() * v.imag() - w.imag() * v.real()) / den;
        tseg = std::clamp(tseg, 0.0, 1.0);
        const Cx mu = p1 + tseg * u;
        ComplexVector y12;
        double res1 = detail::solve_in_span(a, pts[i1].vector, pts[i2].vector, mu, y12);
        if (res1 < 1e300 && y12.size() > 0) {
          ComplexVector x;
          double res = detail::solve_in_span(a, pts[i3].vector, y12, lambda, x);
          if (res < best_res) {
            best_res = res;
            best_x = x;
          }
        }
      }
    }
  }

  if (best_x.size() == 0 || best_res > tol.realize)
    throw Degenerate2x2("realize: residual " + std::to_string(best_res) +
                        " exceeds tolerance after retries");
  return best_x;
}

/// Realize lambda inside a constrained subspace L: compress A to L, realize
/// there, and lift back. The value must lie in W(A restricted to L).
inline ComplexVector realize_constrained(const ComplexMatrix& a, Cx lambda, const Subspace& l,
                                         int n_angles = tols().n_angles,
                                         const Tolerances& tol = tols()) {
  if (l.dim() == 0) throw Exhausted("realize_constrained: zero subspace");
  ComplexMatrix al = l.basis.adjoint() * a * l.basis;
  if (l.dim() == 1) {
    const Cx v = al(0, 0);
    if (std::abs(v - lambda) > tol.realize)
      throw NotInRange("realize_constrained: 1-d subspace cannot reach value");
    return l.basis.col(0);
  }
  ComplexVector xc = realize(al, lambda, n_angles, tol);
  ComplexVector x = l.basis * xc;
  return x / x.norm();
}

}  // namespace opc
