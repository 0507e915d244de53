#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "k3corr/geom.hpp"
#include "k3corr/roots.hpp"

#include <complex>

using namespace k3;
using namespace k3::geom;
using poly::Exponents;
using poly::HomogeneousForm;

static HomogeneousForm<Complex> fermat_quartic() {
  HomogeneousForm<Complex> F(4, 4);
  for (int i = 0; i < 4; ++i) {
    Exponents e(4, 0);
    e[i] = 4;
    F.add_term(e, Complex(1.0));
  }
  return F;
}

static ProjectivePoint pt(std::initializer_list<Complex> cs) {
  return ProjectivePoint::of(std::vector<Complex>(cs));
}

TEST_CASE("point normalization and equality") {
  auto p = pt({Complex(2, 0), Complex(0, 4), Complex(-4, 0)});
  // max-magnitude slot is exactly 1 after normalization
  bool has_unit = false;
  for (int i = 0; i < p.n(); ++i)
    if (p.x[i] == Complex(1.0, 0.0)) has_unit = true;
  CHECK(has_unit);

  auto q = pt({Complex(2, 1) * Complex(2, 0), Complex(2, 1) * Complex(0, 4),
               Complex(2, 1) * Complex(-4, 0)});
  CHECK(projectively_equal(p, q, 1e-12));
  CHECK(minor_distance(p, q) < 1e-15);

  auto r = pt({Complex(2, 0), Complex(0, 4), Complex(-4.0001, 0)});
  CHECK(!projectively_equal(p, r, 1e-8));

  // scale invariance across 4 orders of magnitude
  auto s = pt({Complex(200, 0), Complex(0, 400), Complex(-400, 0)});
  CHECK(projectively_equal(p, s, 1e-12));

  CHECK_THROWS_AS(pt({Complex(0), Complex(0)}), PreconditionError);
}

TEST_CASE("fermat tangent plane from gradient row") {
  // At p = (1 : zeta : 0 : 0) with zeta^8 = 1 primitive, the gradient of
  // x^4+y^4+z^4+w^4 is (4, 4 zeta^3, 0, 0); its kernel is the tangent plane.
  Complex zeta = std::polar(1.0, std::acos(-1.0) / 4.0);
  ProjectivePoint p = pt({Complex(1), zeta, Complex(0), Complex(0)});

  Eigen::MatrixXcd grad(1, 4);
  grad << Complex(4), Complex(4) * zeta * zeta * zeta, Complex(0), Complex(0);
  LinearSubspace T = subspace_from_forms(grad, 1e-10);

  CHECK(T.proj_dim() == 2);
  CHECK(!T.degenerate);
  CHECK(T.contains_residual(p) < 1e-12);  // p lies on its own tangent plane
  CHECK(T.contains_residual(pt({Complex(0), Complex(0), Complex(1), Complex(0)})) < 1e-12);
  CHECK(T.contains_residual(pt({Complex(0), Complex(0), Complex(0), Complex(1)})) < 1e-12);
  // a point off the plane
  CHECK(T.contains_residual(pt({Complex(1), Complex(0), Complex(0), Complex(0)})) > 0.1);

  // cutting forms vanish on every basis point
  auto cuts = T.cutting_forms();
  REQUIRE(cuts.size() == 1);
  for (auto& b : T.basis_points()) CHECK(std::abs(cuts[0].eval(b.coords())) < 1e-12);
}

TEST_CASE("span rank accounting") {
  auto e0 = pt({Complex(1), Complex(0), Complex(0), Complex(0)});
  auto e1 = pt({Complex(0), Complex(1), Complex(0), Complex(0)});
  auto mid = pt({Complex(1), Complex(1), Complex(0), Complex(0)});

  LinearSubspace line = span({e0, e1}, 1e-10);
  CHECK(line.proj_dim() == 1);
  CHECK(!line.degenerate);
  CHECK(line.contains_residual(mid) < 1e-12);

  LinearSubspace degen = span({e0, e1, mid}, 1e-10);
  CHECK(degen.proj_dim() == 1);  // rank 2 from 3 points
  CHECK(degen.degenerate);
  CHECK(degen.gap < 1e-10);

  LinearSubspace plane = span({e0, e1, pt({Complex(0), Complex(0), Complex(1), Complex(4)})}, 1e-10);
  CHECK(plane.proj_dim() == 2);
  CHECK(!plane.degenerate);
}

TEST_CASE("coordinate plane frame restricts fermat exactly") {
  // H = {w = 0}: the frame must reduce to the coordinate inclusion and the
  // Fermat quartic restricts to u^4 + v^4 + t^4.
  Eigen::MatrixXcd row(1, 4);
  row << Complex(0), Complex(0), Complex(0), Complex(1);
  LinearSubspace H = subspace_from_forms(row, 1e-10);
  SubspaceFrame fr = plane_coordinates(H);

  REQUIRE(fr.local_vars() == 3);
  REQUIRE(fr.pivots.size() == 3);
  CHECK(fr.pivots[0] == 0);
  CHECK(fr.pivots[1] == 1);
  CHECK(fr.pivots[2] == 2);
  for (int j = 0; j < 3; ++j) CHECK(std::abs(fr.map(3, j)) < 1e-14);

  auto R = fr.restrict_form(fermat_quartic());
  CHECK(R.nvars() == 3);
  CHECK(R.degree() == 4);
  for (int i = 0; i < 3; ++i) {
    Exponents e(3, 0);
    e[i] = 4;
    CHECK(std::abs(R.coeff(e) - Complex(1)) < 1e-12);
  }
  // no cross terms survive
  double off = 0;
  for (auto& [e, c] : R.terms()) {
    bool pure = (e[0] == 4) || (e[1] == 4) || (e[2] == 4);
    if (!pure) off = std::max(off, std::abs(c));
  }
  CHECK(off < 1e-12);
}

TEST_CASE("pivot frame round trips random planes") {
  Rng rng(subseed(7, 101));
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<ProjectivePoint> pts;
    for (int i = 0; i < 3; ++i) {
      std::vector<Complex> c(5);
      for (auto& z : c) z = rng.cgauss();
      pts.push_back(ProjectivePoint::of(c));
    }
    LinearSubspace H = span(pts, 1e-10);
    REQUIRE(H.proj_dim() == 2);
    SubspaceFrame fr = plane_coordinates(H);

    // local -> ambient -> local -> ambient is the identity on the subspace
    for (int k = 0; k < 5; ++k) {
      std::vector<Complex> u = {rng.cgauss(), rng.cgauss(), rng.cgauss()};
      ProjectivePoint q = fr.push(u);
      CHECK(H.contains_residual(q) < 1e-10);
      CHECK(fr.roundtrip_residual(q) < 1e-10);
    }
    // the original spanning points pull back and return
    for (auto& p : pts) CHECK(fr.roundtrip_residual(p) < 1e-9);

    // restriction commutes with evaluation (against the un-normalized image)
    auto F = poly::random_form<Complex>(5, 3, rng);
    auto R = fr.restrict_form(F);
    for (int k = 0; k < 5; ++k) {
      std::vector<Complex> u = {rng.cgauss(), rng.cgauss(), rng.cgauss()};
      Complex lhs = R.eval(u);
      Eigen::VectorXcd loc(3);
      for (int i = 0; i < 3; ++i) loc[i] = u[i];
      Eigen::VectorXcd amb = fr.map * loc;
      std::vector<Complex> ambv(amb.data(), amb.data() + 5);
      CHECK(std::abs(F.eval(ambv) - lhs) < 1e-8 * std::max(1.0, std::abs(lhs)));
    }
  }
}

TEST_CASE("anchored frame pins the anchor to the first unit vector") {
  Rng rng(subseed(7, 202));
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<ProjectivePoint> pts;
    for (int i = 0; i < 3; ++i) {
      std::vector<Complex> c(5);
      for (auto& z : c) z = rng.cgauss();
      pts.push_back(ProjectivePoint::of(c));
    }
    LinearSubspace H = span(pts, 1e-10);
    SubspaceFrame fr = anchored_frame(H, pts[0]);

    ProjectivePoint img = fr.push({Complex(1), Complex(0), Complex(0)});
    CHECK(minor_distance(img, pts[0]) < 1e-12);

    // least-squares pull still round-trips points of the subspace
    for (int k = 0; k < 4; ++k) {
      ProjectivePoint q = fr.push({rng.cgauss(), rng.cgauss(), rng.cgauss()});
      CHECK(fr.roundtrip_residual(q) < 1e-9);
    }

    // restricted form at the first unit vector = ambient form at the anchor
    auto F = poly::random_form<Complex>(5, 2, rng);
    auto R = fr.restrict_form(F);
    Complex lhs = R.eval(std::vector<Complex>{Complex(1), Complex(0), Complex(0)});
    Complex rhs = F.eval(pts[0].coords());
    CHECK(std::abs(lhs - rhs) < 1e-10 * std::max(1.0, std::abs(rhs)));
  }

  // anchor off the subspace is rejected
  auto e0 = pt({Complex(1), Complex(0), Complex(0), Complex(0)});
  auto e1 = pt({Complex(0), Complex(1), Complex(0), Complex(0)});
  LinearSubspace line = span({e0, e1}, 1e-10);
  CHECK_THROWS_AS(anchored_frame(line, pt({Complex(0), Complex(0), Complex(1), Complex(0)})),
                  PreconditionError);
}

TEST_CASE("forms/basis duality") {
  Rng rng(subseed(7, 303));
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<ProjectivePoint> pts;
    for (int i = 0; i < 2; ++i) {
      std::vector<Complex> c(4);
      for (auto& z : c) z = rng.cgauss();
      pts.push_back(ProjectivePoint::of(c));
    }
    LinearSubspace L = span(pts, 1e-10);
    REQUIRE(L.proj_dim() == 1);
    // every cutting form annihilates every sample of the line
    for (int k = 0; k < 5; ++k) {
      Complex a = rng.cgauss(), b = rng.cgauss();
      Eigen::VectorXcd v = a * pts[0].x + b * pts[1].x;
      CHECK(L.contains_residual(ProjectivePoint::of(v)) < 1e-10);
    }
    // rebuilding the subspace from its own forms reproduces it
    LinearSubspace L2 = subspace_from_forms(L.forms.transpose(), 1e-10);
    CHECK(L2.proj_dim() == 1);
    for (auto& p : pts) CHECK(L2.contains_residual(p) < 1e-10);
    for (auto& b2 : L2.basis_points()) CHECK(L.contains_residual(b2) < 1e-10);
  }
}

TEST_CASE("divisor degree bookkeeping") {
  IntersectionDivisor D;
  D.points.push_back({pt({Complex(1), Complex(0)}), 3, 0.0});
  D.points.push_back({pt({Complex(0), Complex(1)}), 1, 0.0});
  CHECK(D.total_degree() == 4);
}
