#include <catch2/catch_amalgamated.hpp>
#include <random>

#include "opc/pinch.hpp"
#include "oracles.hpp"

using namespace opc;

namespace {

ComplexMatrix random_unitary(std::mt19937_64& rng, Eigen::Index n) {
  ComplexMatrix g = random_matrix(rng, n, n);
  Eigen::HouseholderQR<ComplexMatrix> qr(g);
  ComplexMatrix q = qr.householderQ();
  return q;
}

ComplexMatrix direct_sum(const std::vector<ComplexMatrix>& blocks) {
  Eigen::Index n = 0;
  for (const auto& b : blocks) n += b.rows();
  ComplexMatrix out = ComplexMatrix::Zero(n, n);
  Eigen::Index at = 0;
  for (const auto& b : blocks) {
    out.block(at, at, b.rows(), b.cols()) = b;
    at += b.rows();
  }
  return out;
}

}  // namespace

TEST_CASE("pokrzywa_compress: single block reduces to its unitary", "[pinch]") {
  std::mt19937_64 rng(42);
  ComplexMatrix at = random_matrix(rng, 3, 3);
  ComplexMatrix u = random_unitary(rng, 3);
  ComplexMatrix a = u * at * u.adjoint();
  ComplexMatrix v = pokrzywa_compress({{a, at, u}}, {1.0});
  REQUIRE((v - u).norm() < 1e-14);
  REQUIRE((v.adjoint() * a * v - at).norm() < 1e-12);
}

TEST_CASE("pokrzywa_compress: scalar average of +-1 is zero", "[pinch]") {
  // [TRIVIAL] Vx = (x/sqrt2, x/sqrt2), so V^*((1)+(-1))V = 0.
  ComplexMatrix p1 = ComplexMatrix::Constant(1, 1, 1.0);
  ComplexMatrix m1 = ComplexMatrix::Constant(1, 1, -1.0);
  ComplexMatrix id1 = ComplexMatrix::Identity(1, 1);
  ComplexMatrix v = pokrzywa_compress({{p1, p1, id1}, {m1, m1, id1}}, {0.5, 0.5});
  REQUIRE(v.rows() == 2);
  REQUIRE(v(0, 0).real() == Catch::Approx(1.0 / std::sqrt(2.0)));
  REQUIRE(v(1, 0).real() == Catch::Approx(1.0 / std::sqrt(2.0)));
  REQUIRE(std::abs(v(0, 0).imag()) == 0.0);
  ComplexMatrix big = direct_sum({p1, m1});
  REQUIRE(std::abs((v.adjoint() * big * v)(0, 0)) < 1e-15);
}

TEST_CASE("pokrzywa_compress: random blocks give the convex combination", "[pinch]") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u01(0.1, 1.0);
  for (int trial = 0; trial < 25; ++trial) {
    std::vector<CompressionBlock> blocks;
    std::vector<ComplexMatrix> bigs;
    std::vector<double> alpha(3);
    double s = 0;
    for (auto& a : alpha) {
      a = u01(rng);
      s += a;
    }
    for (auto& a : alpha) a /= s;
    ComplexMatrix expect = ComplexMatrix::Zero(4, 4);
    for (int j = 0; j < 3; ++j) {
      ComplexMatrix at = random_matrix(rng, 4, 4);
      ComplexMatrix u = random_unitary(rng, 4);
      blocks.push_back({u * at * u.adjoint(), at, u});
      bigs.push_back(blocks.back().a);
      expect += alpha[j] * at;
    }
    ComplexMatrix v = pokrzywa_compress(blocks, alpha);
    REQUIRE((v.adjoint() * v - ComplexMatrix::Identity(4, 4)).norm() < 1e-13);
    REQUIRE((v.adjoint() * direct_sum(bigs) * v - expect).norm() < 1e-12);
  }
}

TEST_CASE("pokrzywa_compress: rejects bad weights and broken equivalences", "[pinch]") {
  ComplexMatrix id1 = ComplexMatrix::Identity(1, 1);
  ComplexMatrix p1 = ComplexMatrix::Constant(1, 1, 1.0);
  REQUIRE_THROWS_AS(pokrzywa_compress({{p1, p1, id1}, {p1, p1, id1}}, {0.5, 0.6}),
                    WeightsNotConvex);
  REQUIRE_THROWS_AS(pokrzywa_compress({{p1, p1, id1}, {p1, p1, id1}}, {1.5, -0.5}),
                    WeightsNotConvex);
  ComplexMatrix wrong = ComplexMatrix::Constant(1, 1, 1.1);
  REQUIRE_THROWS_AS(pokrzywa_compress({{wrong, p1, id1}}, {1.0}), EquivalenceViolated);
}

TEST_CASE("hermitian_split_decomp: identity takes the exact fast path", "[pinch]") {
  SplitDecomp s = hermitian_split_decomp(ComplexMatrix::Identity(3, 3));
  REQUIRE(s.normal_fast_path);
  REQUIRE(s.d_diag.size() == 3);
  for (int i = 0; i < 3; ++i) REQUIRE(s.d_diag(i) == Cx(1, 0));
  REQUIRE((s.j - ComplexMatrix::Identity(3, 3)).norm() == 0.0);
}

TEST_CASE("hermitian_split_decomp: nilpotent 2x2 splits into +-1 and +-i", "[pinch]") {
  // [DERIVED] Re B has eigenvalues +-1/2 (doubled to +-1), Im B likewise
  // (doubled to +-i).
  ComplexMatrix b = ComplexMatrix::Zero(2, 2);
  b(0, 1) = 1.0;
  SplitDecomp s = hermitian_split_decomp(b);
  REQUIRE_FALSE(s.normal_fast_path);
  REQUIRE(s.d_diag.size() == 4);
  std::vector<Cx> got(s.d_diag.data(), s.d_diag.data() + 4);
  auto has = [&](Cx w) {
    for (Cx g : got)
      if (std::abs(g - w) < 1e-12) return true;
    return false;
  };
  REQUIRE(has(Cx(1, 0)));
  REQUIRE(has(Cx(-1, 0)));
  REQUIRE(has(Cx(0, 1)));
  REQUIRE(has(Cx(0, -1)));
  REQUIRE((s.j.adjoint() * s.diag_matrix() * s.j - b).norm() < 1e-12);
  REQUIRE((s.j.adjoint() * s.j - ComplexMatrix::Identity(2, 2)).norm() < 1e-13);
}

TEST_CASE("hermitian_split_decomp: cyclic shift diagonalizes to roots of unity", "[pinch]") {
  // [TRIVIAL] circulant spectrum: the 8 eighth roots of unity, norm 1.
  const int n = 8;
  ComplexMatrix c = ComplexMatrix::Zero(n, n);
  for (int j = 0; j < n; ++j) c((j + 1) % n, j) = 1.0;
  SplitDecomp s = hermitian_split_decomp(c);
  REQUIRE(s.normal_fast_path);
  REQUIRE(s.d_diag.size() == n);
  double dnorm = 0;
  for (int j = 0; j < n; ++j) dnorm = std::max(dnorm, std::abs(s.d_diag(j)));
  REQUIRE(dnorm == Catch::Approx(1.0).margin(1e-12));
  for (int k = 0; k < n; ++k) {
    Cx root = std::polar(1.0, 2 * M_PI * k / 8.0);
    bool found = false;
    for (int j = 0; j < n; ++j)
      if (std::abs(s.d_diag(j) - root) < 1e-10) found = true;
    REQUIRE(found);
  }
  REQUIRE((s.j.adjoint() * s.diag_matrix() * s.j - c).norm() < 1e-12);
}

TEST_CASE("hermitian_split_decomp: norm bounds, factor 2 general / 1 normal", "[pinch]") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 40; ++trial) {
    Eigen::Index n = 2 + static_cast<Eigen::Index>(rng() % 5);
    ComplexMatrix b = random_matrix(rng, n, n);
    SplitDecomp s = hermitian_split_decomp(b);
    REQUIRE((s.j.adjoint() * s.j - ComplexMatrix::Identity(n, n)).norm() < 1e-12);
    REQUIRE((s.j.adjoint() * s.diag_matrix() * s.j - b).norm() < 1e-11 * std::max(1.0, b.norm()));
    double dmax = 0;
    for (Eigen::Index i = 0; i < s.d_diag.size(); ++i)
      dmax = std::max(dmax, std::abs(s.d_diag(i)));
    REQUIRE(dmax <= 2.0 * op_norm(b) + 1e-10);

    // normal input: conjugated diagonal keeps the exact spectrum
    ComplexMatrix u = random_unitary(rng, n);
    ComplexVector diag = random_vector(rng, n);
    ComplexMatrix nb = u * diag.asDiagonal() * u.adjoint();
    SplitDecomp sn = hermitian_split_decomp(nb);
    REQUIRE(sn.normal_fast_path);
    double nmax = 0;
    for (Eigen::Index i = 0; i < sn.d_diag.size(); ++i)
      nmax = std::max(nmax, std::abs(sn.d_diag(i)));
    REQUIRE(nmax <= op_norm(nb) + 1e-10);
    REQUIRE((sn.j.adjoint() * sn.diag_matrix() * sn.j - nb).norm() <
            1e-11 * std::max(1.0, nb.norm()));
  }
}

TEST_CASE("exact_compress: scalar, diagonal, and exactly-zero targets", "[pinch]") {
  auto make_inst = [] {
    return gen_reservoir({Cx(1, 0), Cx(0, 1), Cx(-1, 0), Cx(0, -1)}, 8,
                         GuaranteeRegion{Disk{Cx(0, 0), 0.45}, 0.1});
  };

  ReservoirInstance inst = make_inst();
  ComplexMatrix a = inst.matrix();
  ComplexMatrix d1 = ComplexMatrix::Constant(1, 1, Cx(0.1, 0.2));
  ComplexMatrix v1 = exact_compress(inst, d1);
  REQUIRE(v1.cols() == 1);
  REQUIRE((v1.adjoint() * v1 - ComplexMatrix::Identity(1, 1)).norm() < 1e-13);
  REQUIRE((v1.adjoint() * a * v1 - d1).norm() < 1e-13);

  ReservoirInstance inst2 = make_inst();
  ComplexMatrix d2 = ComplexMatrix::Zero(2, 2);
  d2(0, 0) = 0.1;
  d2(1, 1) = -0.2;
  ComplexMatrix v2 = exact_compress(inst2, d2);
  REQUIRE((v2.adjoint() * v2 - ComplexMatrix::Identity(2, 2)).norm() < 1e-13);
  REQUIRE((v2.adjoint() * inst2.matrix() * v2 - d2).norm() < 1e-12);

  ReservoirInstance inst3 = make_inst();
  ComplexMatrix z = ComplexMatrix::Zero(2, 2);
  ComplexMatrix v3 = exact_compress(inst3, z);
  ComplexMatrix back = v3.adjoint() * inst3.matrix() * v3;
  REQUIRE(back.norm() <= 1e-15);  // exact zeros by slot disjointness
}

TEST_CASE("exact_compress: margin gate reports the factor-2 penalty", "[pinch]") {
  ReservoirInstance inst = gen_reservoir({Cx(1, 0), Cx(0, 1), Cx(-1, 0), Cx(0, -1)}, 4,
                                         GuaranteeRegion{Disk{Cx(0, 0), 0.45}, 0.1});
  // |D| = 0.3 fits the region, but the split doubles it to 0.6 > 0.45
  ComplexMatrix d = ComplexMatrix::Zero(2, 2);
  d(0, 1) = 0.3;
  try {
    exact_compress(inst, d);
    FAIL("expected MarginViolated");
  } catch (const MarginViolated& e) {
    REQUIRE(std::string(e.what()).find("factor 2") != std::string::npos);
  }
}

TEST_CASE("exact_compress: 200 randomized instances stay exact", "[pinch]") {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  int done = 0;
  for (int trial = 0; trial < 400 && done < 200; ++trial) {
    // random anchors in convex position
    std::vector<Cx> pts;
    int n_pts = 4 + static_cast<int>(rng() % 5);
    for (int i = 0; i < n_pts; ++i) pts.emplace_back(u(rng), u(rng));
    std::vector<Cx> anchors = convex_hull(pts);
    if (anchors.size() < 3) continue;
    Cx centroid = 0;
    for (Cx p : anchors) centroid += p / static_cast<double>(anchors.size());
    double inr = 1e300;
    for (size_t i = 0; i < anchors.size(); ++i)
      inr = std::min(inr, point_segment_dist(centroid, anchors[i],
                                             anchors[(i + 1) % anchors.size()]));
    if (inr < 0.15) continue;

    const Eigen::Index q = 1 + static_cast<Eigen::Index>(rng() % 3);
    const int m = static_cast<int>(2 * q) + 2;
    ReservoirInstance inst =
        gen_reservoir(anchors, m, GuaranteeRegion{Disk{centroid, 0.55 * inr}, 0.2 * inr});

    // target with entries safely inside the shifted disk after the x2 split
    ComplexMatrix d = random_matrix(rng, q, q);
    d *= 0.2 * inr / std::max(1.0, op_norm(d));
    d += centroid * ComplexMatrix::Identity(q, q);

    ComplexMatrix a = inst.matrix();
    ComplexMatrix v = exact_compress(inst, d);
    REQUIRE((v.adjoint() * v - ComplexMatrix::Identity(q, q)).norm() < 1e-12);
    REQUIRE((v.adjoint() * a * v - d).norm() < 1e-11);
    ++done;
  }
  REQUIRE(done == 200);
}

TEST_CASE("exact_compress: forbidden vectors are avoided; budget exhausts loudly", "[pinch]") {
  ReservoirInstance inst = gen_reservoir({Cx(1, 0), Cx(0, 1), Cx(-1, 0), Cx(0, -1)}, 6,
                                         GuaranteeRegion{Disk{Cx(0, 0), 0.45}, 0.1});
  std::mt19937_64 rng(9);
  ComplexMatrix forb = random_matrix(rng, inst.dim(), 3);
  ComplexMatrix d = ComplexMatrix::Zero(2, 2);
  d(0, 0) = Cx(0.1, 0.1);
  d(1, 1) = Cx(-0.15, 0.05);
  ComplexMatrix v = exact_compress(inst, d, forb);
  REQUIRE((forb.adjoint() * v).norm() < 1e-10);
  REQUIRE((v.adjoint() * inst.matrix() * v - d).norm() < 1e-12);

  ReservoirInstance tiny = gen_reservoir({Cx(1, 0), Cx(0, 1), Cx(-1, 0), Cx(0, -1)}, 1,
                                         GuaranteeRegion{Disk{Cx(0, 0), 0.45}, 0.1});
  ComplexMatrix dz = ComplexMatrix::Zero(2, 2);
  REQUIRE_THROWS_AS(exact_compress(tiny, dz), RoomExhausted);
}

TEST_CASE("approx_compress: dense non-normal operator, cross terms vanish", "[pinch]") {
  // Jordan block: numerical range is a disk of radius cos(pi/5) about 0
  const Eigen::Index n = 4;
  ComplexMatrix a = ComplexMatrix::Zero(n, n);
  for (Eigen::Index i = 0; i + 1 < n; ++i) a(i, i + 1) = 1.0;
  ComplexMatrix d = ComplexMatrix::Zero(1, 1);
  d(0, 0) = Cx(0.05, -0.03);
  ApproxCompression ac = approx_compress(a, d);
  REQUIRE((ac.v.adjoint() * ac.v - ComplexMatrix::Identity(1, 1)).norm() < 1e-12);
  double err = (ac.v.adjoint() * a * ac.v - d).norm();
  REQUIRE(err <= std::max(ac.residual * 2.01, 1e-8));
  REQUIRE(ac.residual <= tols().realize * 10);
}
