#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include "opc/config.hpp"
#include "opc/errors.hpp"

namespace opc {

using Cx = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

inline bool all_finite(const ComplexMatrix& a) {
  return a.allFinite();
}

inline void require_finite(const ComplexMatrix& a, const std::string& what) {
  if (!all_finite(a)) throw SchemaError(what + ": non-finite entries");
}

inline void require_square(const ComplexMatrix& a, const std::string& what) {
  if (a.rows() != a.cols())
    throw NotSquare(what + ": matrix is " + std::to_string(a.rows()) + "x" +
                    std::to_string(a.cols()));
}

/// Hermiticity defect ||H - H^*|| measured in Frobenius norm.
inline double herm_defect(const ComplexMatrix& h) {
  return (h - h.adjoint()).norm();
}

/// Plain-text matrix exchange format: first line "rows cols", then
/// rows*cols lines "re im" in row-major order, 17 significant digits
/// (exact double round trip).
inline std::string to_cmx(const ComplexMatrix& a) {
  std::string out;
  out.reserve(static_cast<size_t>(a.size()) * 48 + 32);
  char buf[96];
  std::snprintf(buf, sizeof(buf), "%ld %ld\n", static_cast<long>(a.rows()),
                static_cast<long>(a.cols()));
  out += buf;
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      std::snprintf(buf, sizeof(buf), "%.17g %.17g\n", a(i, j).real(), a(i, j).imag());
      out += buf;
    }
  return out;
}

inline ComplexMatrix from_cmx(const std::string& text) {
  std::istringstream in(text);
  long rows = -1, cols = -1;
  if (!(in >> rows >> cols) || rows < 0 || cols < 0)
    throw SchemaError("cmx: bad header line");
  ComplexMatrix a(rows, cols);
  for (long i = 0; i < rows; ++i)
    for (long j = 0; j < cols; ++j) {
      double re, im;
      if (!(in >> re >> im))
        throw SchemaError("cmx: truncated entry list at (" + std::to_string(i) + "," +
                          std::to_string(j) + ")");
      a(i, j) = Cx(re, im);
    }
  double trailing;
  if (in >> trailing) throw SchemaError("cmx: trailing data after entries");
  require_finite(a, "cmx");
  return a;
}

inline void save_cmx(const std::string& path, const ComplexMatrix& a) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw SchemaError("cmx: cannot open for writing: " + path);
  out << to_cmx(a);
}

inline ComplexMatrix load_cmx(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw SchemaError("cmx: cannot open: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return from_cmx(ss.str());
}

/// Deterministic complex Gaussian vector (test and scenario generation).
inline ComplexVector random_vector(std::mt19937_64& rng, Eigen::Index n) {
  std::normal_distribution<double> g(0.0, 1.0);
  ComplexVector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = Cx(g(rng), g(rng));
  return v;
}

inline ComplexVector random_unit_vector(std::mt19937_64& rng, Eigen::Index n) {
  ComplexVector v = random_vector(rng, n);
  while (v.norm() < 1e-6) v = random_vector(rng, n);
  return v / v.norm();
}

inline ComplexMatrix random_matrix(std::mt19937_64& rng, Eigen::Index r, Eigen::Index c) {
  ComplexMatrix a(r, c);
  std::normal_distribution<double> g(0.0, 1.0);
  for (Eigen::Index i = 0; i < r; ++i)
    for (Eigen::Index j = 0; j < c; ++j) a(i, j) = Cx(g(rng), g(rng));
  return a;
}

}  // namespace opc
