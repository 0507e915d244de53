#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "k3corr/corr_j.hpp"

#include <cmath>

using namespace k3;
using namespace k3::corrj;
using geom::ProjectivePoint;
using poly::Exponents;
using poly::HomogeneousForm;

static ProjectivePoint pt(std::vector<Complex> cs) { return ProjectivePoint::of(cs); }

static HomogeneousForm<Complex> f4(int deg, std::vector<std::pair<Exponents, Complex>> terms) {
  HomogeneousForm<Complex> f(4, deg);
  for (auto& [e, c] : terms) f.add_term(e, c);
  return f;
}

// Worked cusp: F = x3 x0^3 + x0^2 x1^2 + x0 (x1^3 + 2 x2^3 + x3^3) + x1^4 +
// x2^4 + x3^4.  At p = (1:0:0:0) the tangent plane is {x3 = 0} and the
// quadratic part of F|_T is the perfect square u1^2, so the cone is a cusp
// whose double line is the x2-axis direction; on that line
// F(1, 0, t, 0) = 2 t^3 + t^4, putting the residual point at t = -2.
static surf::SurfaceModel cusp_quartic() {
  return surf::SurfaceModel::quartic(f4(4, {{{3, 0, 0, 1}, Complex(1)},
                                            {{2, 2, 0, 0}, Complex(1)},
                                            {{1, 3, 0, 0}, Complex(1)},
                                            {{1, 0, 3, 0}, Complex(2)},
                                            {{1, 0, 0, 3}, Complex(1)},
                                            {{0, 4, 0, 0}, Complex(1)},
                                            {{0, 0, 4, 0}, Complex(1)},
                                            {{0, 0, 0, 4}, Complex(1)}}));
}

// A quartic containing the plane conic {x3 = 0, x0 x2 = x1^2}:
// F = x3 G3 + (x0 x2 - x1^2) Q2 with generic G3, Q2.
static surf::SurfaceModel conic_quartic(HomogeneousForm<Complex>* conic = nullptr,
                                        HomogeneousForm<Complex>* plane = nullptr) {
  auto G3 = f4(3, {{{3, 0, 0, 0}, Complex(1)},
                   {{0, 3, 0, 0}, Complex(2)},
                   {{0, 0, 3, 0}, Complex(1)},
                   {{0, 0, 0, 3}, Complex(3)},
                   {{1, 1, 1, 0}, Complex(1)}});
  auto Q2 = f4(2, {{{2, 0, 0, 0}, Complex(1)},
                   {{0, 2, 0, 0}, Complex(1)},
                   {{0, 0, 2, 0}, Complex(2)},
                   {{0, 0, 0, 2}, Complex(1)},
                   {{1, 0, 0, 1}, Complex(1)}});
  auto q2 = f4(2, {{{1, 0, 1, 0}, Complex(1)}, {{0, 2, 0, 0}, Complex(-1)}});
  HomogeneousForm<Complex> x3G3(4, 4);
  for (auto& [e, c] : G3.terms()) {
    Exponents ee = e;
    ee[3] += 1;
    x3G3.add_term(ee, c);
  }
  if (conic) *conic = q2;
  if (plane) *plane = f4(1, {{{0, 0, 0, 1}, Complex(1)}});
  return surf::SurfaceModel::quartic(x3G3 + q2 * Q2);
}

static void check_contact_divisor(const ContactPair& pr) {
  REQUIRE(pr.divisor.roots.size() == 2);
  REQUIRE(pr.divisor.degree_at_infinity == 0);
  int i0 = std::abs(pr.divisor.roots[0].value) <= std::abs(pr.divisor.roots[1].value) ? 0 : 1;
  CHECK(pr.divisor.roots[i0].multiplicity == 3);
  CHECK(std::abs(pr.divisor.roots[i0].value) < 2e-3);
  CHECK(pr.divisor.roots[1 - i0].multiplicity == 1);
  CHECK(std::abs(pr.divisor.roots[1 - i0].value - 1.0) < 1e-4);
}

// ===== blowup arithmetic ===================================================

TEST_CASE("blowup intersection numbers") {
  // worked contract examples
  CHECK(blowup_intersection({3, -2}, {4, -5}, 4) == 38);
  CHECK(blowup_intersection({1, 0}, {1, 0}, 4) == 4);
  CHECK(blowup_intersection({0, 1}, {0, 1}, 4) == -1);
  CHECK(blowup_intersection({0, 1}, {0, 1}, 100) == -1);  // E^2 ignores H^2
  // the classes behind the second-fiber count (see the degree test below):
  // R = 3H' - 2E has R.(H'-E) = 10 and R^2 = 32
  CHECK(blowup_intersection({3, -2}, {1, -1}, 4) == 10);
  CHECK(blowup_intersection({3, -2}, {3, -2}, 4) == 32);
  CHECK(blowup_intersection({3, -2}, {0, 1}, 4) == 2);
  // symmetry and bilinearity spot checks
  CHECK(blowup_intersection({2, 3}, {5, -1}, 6) == blowup_intersection({5, -1}, {2, 3}, 6));
  CHECK(blowup_intersection({1, 1}, {1, -1}, 2) == 2 + 1);
}

// ===== fiber over the first factor =========================================

TEST_CASE("first fiber at generic points: two certified pairs") {
  auto X = surf::random_surface(surf::ModelKind::QuarticP3, 41);
  for (std::uint64_t seed : {7ull, 9ull, 11ull}) {
    CAPTURE(seed);
    auto p = surf::sample_point(X, seed);
    auto r = j_fiber_first(X, p);
    CHECK(r.cone.node_type == NodeType::node);
    REQUIRE(r.pairs.size() == 2);
    CHECK(!geom::projectively_equal(r.pairs[0].q, r.pairs[1].q, 1e-6));
    for (const auto& pr : r.pairs) {
      CHECK(geom::projectively_equal(pr.p, p, 1e-9));
      CHECK(pr.certificate_residual <= 1e-8);
      check_contact_divisor(pr);
      // the line field spans exactly {p, q}
      REQUIRE(pr.line.basis.cols() == 2);
      CHECK(!pr.line.degenerate);
      CHECK(pr.line.contains_residual(pr.p) < 1e-8);
      CHECK(pr.line.contains_residual(pr.q) < 1e-8);
      // independent re-certification: restrict F to the line and read the
      // contact orders off the raw binary coefficients
      std::vector<Complex> dir(4);
      for (int i = 0; i < 4; ++i) dir[i] = pr.q.x[i] - pr.p.x[i];
      auto rb = poly::restrict_binary(X.forms[0], pr.p.coords(), dir);
      double sc = 0;
      for (auto& c : rb) sc = std::max(sc, std::abs(c));
      CHECK(std::abs(rb[0]) / sc < 1e-7);
      CHECK(std::abs(rb[1]) / sc < 1e-7);
      CHECK(std::abs(rb[2]) / sc < 1e-7);
      CHECK(std::abs(rb[3] + rb[4]) / sc < 1e-7);  // 1 is the fourth root
      CHECK(std::abs(rb[3]) / sc > 1e-4);
    }
    // the factor rows multiply back to the quadratic part (up to scale)
    const auto& q2 = r.cone.quadratic_part;
    REQUIRE(r.cone.factor_lines.size() == 2);
    const auto& L0 = r.cone.factor_lines[0];
    const auto& L1 = r.cone.factor_lines[1];
    Complex p20 = L0[0] * L1[0], p11 = L0[0] * L1[1] + L0[1] * L1[0], p02 = L0[1] * L1[1];
    Complex a = q2.coeff({2, 0}), b = q2.coeff({1, 1}), c = q2.coeff({0, 2});
    double s2 = std::max({std::abs(a), std::abs(b), std::abs(c)});
    Complex lam = std::abs(p20) >= std::abs(p02) ? a / p20 : c / p02;
    CHECK(std::abs(p20 * lam - a) / s2 < 1e-8);
    CHECK(std::abs(p11 * lam - b) / s2 < 1e-8);
    CHECK(std::abs(p02 * lam - c) / s2 < 1e-8);
  }
}

TEST_CASE("worked cusp: one pair with exact fourth point") {
  auto X = cusp_quartic();
  auto r = j_fiber_first(X, pt({1, 0, 0, 0}));
  CHECK(r.cone.node_type == NodeType::cusp);
  REQUIRE(r.pairs.size() == 1);
  CHECK(geom::projectively_equal(r.pairs[0].q, pt({1, 0, -2, 0}), 1e-9));
  CHECK(r.pairs[0].certificate_residual <= 1e-10);
  check_contact_divisor(r.pairs[0]);
  // the double line appears as two equal factor rows
  REQUIRE(r.cone.factor_lines.size() == 2);
  const auto& L0 = r.cone.factor_lines[0];
  const auto& L1 = r.cone.factor_lines[1];
  CHECK(std::abs(L0[0] * L1[1] - L0[1] * L1[0]) < 1e-8);
}

TEST_CASE("higher-order flex: empty fiber, reported cone type") {
  // same local model with the quadratic slice removed entirely
  auto X = surf::SurfaceModel::quartic(f4(4, {{{3, 0, 0, 1}, Complex(1)},
                                              {{1, 3, 0, 0}, Complex(1)},
                                              {{1, 0, 3, 0}, Complex(2)},
                                              {{1, 0, 0, 3}, Complex(1)},
                                              {{0, 4, 0, 0}, Complex(1)},
                                              {{0, 0, 4, 0}, Complex(1)},
                                              {{0, 0, 0, 4}, Complex(1)}}));
  auto r = j_fiber_first(X, pt({1, 0, 0, 0}));
  CHECK(r.cone.node_type == NodeType::higher);
  CHECK(r.pairs.empty());
  CHECK(r.cone.factor_lines.empty());
}

TEST_CASE("first fiber refusals") {
  // a cone line lying on the surface: the Fermat quartic contains
  // (s : z8 s : t : z8 t) with z8^4 = -1
  auto F = f4(4, {{{4, 0, 0, 0}, Complex(1)},
                  {{0, 4, 0, 0}, Complex(1)},
                  {{0, 0, 4, 0}, Complex(1)},
                  {{0, 0, 0, 4}, Complex(1)}});
  auto XF = surf::SurfaceModel::quartic(F);
  Complex z8 = std::polar(1.0, M_PI / 4.0);
  auto pf = pt({1.0, z8, 0.7, 0.7 * z8});
  CHECK(surf::defining_residual(XF, pf) < 1e-12);
  CHECK_THROWS_AS(j_fiber_first(XF, pf), LineOnSurfaceError);

  // wrong model kind
  auto Y = surf::random_surface(surf::ModelKind::CI23P4, 3);
  CHECK_THROWS_AS(j_fiber_first(Y, surf::sample_point(Y, 1)), PreconditionError);

  // cone vertex: singular point
  auto XC = surf::SurfaceModel::quartic(f4(4, {{{4, 0, 0, 0}, Complex(1)},
                                               {{0, 4, 0, 0}, Complex(1)},
                                               {{0, 0, 4, 0}, Complex(1)}}));
  CHECK_THROWS_AS(j_fiber_first(XC, pt({0, 0, 0, 1})), PreconditionError);

  // off-surface point
  CHECK_THROWS_AS(j_fiber_first(XF, pt({1, 0.2, 0.3, 0.4})), PreconditionError);
}

// ===== fiber over the second factor ========================================

// The degree of the second fiber.  For q on a smooth quartic X, projection
// from q makes the blowup X' = Bl_q X a 3:1 cover of P^2 (a line through q
// meets X at q plus three residual points).  The cover ramifies along
// R = 3H' - 2E (H'^2 = 4, E^2 = -1, H'.E = 0), whose image B has
//   deg B = R.(H' - E) = 12 - 2 = 10,   p_a(B) = 9*8/2 = 36,
//   g(R) = R^2/2 + R.E/2 + 1 = 16 + 1 + 1 = 18   (adjunction, K_{X'} = E),
// and R -> B is birational, so B carries delta = 36 - 18 = 18 worth of
// singular points.  A node of B would be a line through q tangent to X at
// two further points, meeting the quartic in 1 + 2 + 2 = 5 points --
// impossible.  So all 18 are cusps, i.e. lines with a triple contact away
// from q, and the fiber has degree exactly 18.
TEST_CASE("second fiber: certified degree eighteen") {
  auto X = surf::random_surface(surf::ModelKind::QuarticP3, 41);
  auto q = surf::sample_point(X, 5);
  auto r = j_fiber_second(X, q);
  CHECK(r.certified_degree == 18);
  REQUIRE(r.pairs.size() == 18);
  CHECK(r.rejected == 0);
  CHECK(r.multiplicities == std::vector<int>(18, 1));
  for (size_t i = 0; i < r.pairs.size(); ++i) {
    const auto& pr = r.pairs[i];
    CHECK(geom::projectively_equal(pr.q, q, 1e-8));  // shared second point
    CHECK(pr.certificate_residual <= 1e-8);
    check_contact_divisor(pr);
    if (i > 0) CHECK(!geom::projectively_equal(pr.p, r.pairs[i - 1].p, 1e-8));
  }
  // deterministic order
  for (size_t i = 1; i < r.pairs.size(); ++i) {
    const auto& a = r.pairs[i - 1].p.x;
    const auto& b = r.pairs[i].p.x;
    bool le = false;
    for (int k = 0; k < 4; ++k) {
      if (a[k].real() != b[k].real()) {
        le = a[k].real() < b[k].real();
        break;
      }
      if (a[k].imag() != b[k].imag()) {
        le = a[k].imag() < b[k].imag();
        break;
      }
    }
    CHECK(le);
  }
}

TEST_CASE("second fiber on an independent instance") {
  auto X = surf::random_surface(surf::ModelKind::QuarticP3, 7);
  auto q = surf::sample_point(X, 3);
  auto r = j_fiber_second(X, q);
  CHECK(r.certified_degree == 18);
  CHECK(r.rejected == 0);
  double worst = 0;
  for (const auto& pr : r.pairs) worst = std::max(worst, pr.certificate_residual);
  CHECK(worst <= 1e-8);
}

TEST_CASE("round trip: second-fiber pairs reappear in the first fiber") {
  auto X = surf::random_surface(surf::ModelKind::QuarticP3, 41);
  auto q = surf::sample_point(X, 5);
  auto r = j_fiber_second(X, q);
  REQUIRE(r.pairs.size() >= 3);
  for (size_t i = 0; i < 3; ++i) {
    auto back = j_fiber_first(X, r.pairs[i].p);
    bool found = false;
    for (const auto& pr : back.pairs)
      if (geom::projectively_equal(pr.q, q, 1e-6)) found = true;
    CHECK(found);
  }
}

TEST_CASE("scale invariance of both fibers") {
  auto X = surf::random_surface(surf::ModelKind::QuarticP3, 41);
  auto Xs = surf::SurfaceModel::quartic(X.forms[0] * Complex(-17.0, 3.0));
  auto p = surf::sample_point(X, 7);
  auto r1 = j_fiber_first(X, p);
  auto r1s = j_fiber_first(Xs, p);
  REQUIRE(r1.pairs.size() == r1s.pairs.size());
  for (size_t i = 0; i < r1.pairs.size(); ++i)
    CHECK(geom::projectively_equal(r1.pairs[i].q, r1s.pairs[i].q, 1e-9));

  auto q = surf::sample_point(X, 5);
  auto r2 = j_fiber_second(X, q);
  auto r2s = j_fiber_second(Xs, q);
  CHECK(r2.certified_degree == r2s.certified_degree);
  REQUIRE(r2.pairs.size() == r2s.pairs.size());
  for (size_t i = 0; i < r2.pairs.size(); ++i)
    CHECK(geom::projectively_equal(r2.pairs[i].p, r2s.pairs[i].p, 1e-9));
}

TEST_CASE("second fiber refusals") {
  auto Y = surf::random_surface(surf::ModelKind::CI23P4, 3);
  CHECK_THROWS_AS(j_fiber_second(Y, surf::sample_point(Y, 1)), PreconditionError);
  auto X = surf::random_surface(surf::ModelKind::QuarticP3, 41);
  CHECK_THROWS_AS(j_fiber_second(X, pt({1, 0.2, 0.3, 0.4})), PreconditionError);
}

// ===== pushforward =========================================================

TEST_CASE("pushforward of a plane conic") {
  HomogeneousForm<Complex> conic, plane;
  auto X = conic_quartic(&conic, &plane);
  std::vector<ProjectivePoint> samples;
  for (int k = 0; k < 22; ++k) {
    double t = 0.3 + 0.11 * k;
    samples.push_back(pt({1.0, t, t * t, 0.0}));
  }
  for (const auto& s : samples) CHECK(surf::defining_residual(X, s) < 1e-12);

  SUBCASE("small budget: cloud only, no determined fit") {
    auto push = j_push_curve(X, samples, 8, {plane, conic});
    CHECK(push.images.size() == 16);  // two image points per sample
    CHECK(push.skipped == 0);
    CHECK(push.fitted_degree == 0);
    CHECK(!push.fitted_form.has_value());
    CHECK(!push.same_curve);  // the image leaves the conic
    double worst = 0;
    for (const auto& img : push.images)
      worst = std::max(worst, surf::defining_residual(X, img));
    CHECK(worst < 1e-8);  // but stays on the surface
  }

  SUBCASE("larger budget: the least-degree fit is the surface quartic") {
    auto push = j_push_curve(X, samples, 20, {plane, conic});
    CHECK(push.images.size() == 40);
    REQUIRE(push.fitted_form.has_value());
    CHECK(push.fitted_degree == 4);
    double worst = 0;
    for (const auto& img : push.images)
      worst = std::max(worst, poly::normalized_residual(*push.fitted_form, img.coords()));
    CHECK(worst < 1e-8);
  }

  SUBCASE("single sample: two cloud points, fit impossible") {
    auto push = j_push_curve(X, samples, 1, {plane, conic});
    CHECK(push.images.size() == 2);
    CHECK(push.fitted_degree == 0);
    CHECK(!push.fitted_form.has_value());
  }

  SUBCASE("erroring samples are skipped and counted") {
    std::vector<ProjectivePoint> mixed = {pt({1, 0, 0, 0.5})};  // off the surface
    mixed.insert(mixed.end(), samples.begin(), samples.begin() + 3);
    auto push = j_push_curve(X, mixed, 4, {});
    CHECK(push.skipped == 1);
    CHECK(push.images.size() == 6);
    CHECK(!push.same_curve);  // no reference forms given
  }

  SUBCASE("budget preconditions") {
    CHECK_THROWS_AS(j_push_curve(X, samples, 0, {}), PreconditionError);
    CHECK_THROWS_AS(j_push_curve(X, samples, 23, {}), PreconditionError);
  }
}

TEST_CASE("pushforward keeps a fiber-invariant reference curve") {
  // Images of second-fiber points p all share q, so pushing the 18 p's
  // through the first fiber recovers q among the images: a cheap
  // consistency check that push and fibers agree.
  auto X = surf::random_surface(surf::ModelKind::QuarticP3, 41);
  auto q = surf::sample_point(X, 5);
  auto r = j_fiber_second(X, q);
  REQUIRE(r.pairs.size() >= 2);
  std::vector<ProjectivePoint> ps = {r.pairs[0].p, r.pairs[1].p};
  auto push = j_push_curve(X, ps, 2, {});
  CHECK(push.skipped == 0);
  int hits = 0;
  for (const auto& img : push.images)
    if (geom::projectively_equal(img, q, 1e-6)) ++hits;
  CHECK(hits >= 2);
}
