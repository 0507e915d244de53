// Expected-dimension ledgers, the Brill-Noether bound, and certified
// n-torsion pairs (n = 2, 3, 4) built from line/plane contact data.

#include "k3corr/torsion.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace k3::torsion {

using geom::SubspaceFrame;
using geom::WeightedPoint;
using poly::restrict_binary;
using poly::RootDivisor;
using poly::UnivariatePoly;

// ===== dimension arithmetic ================================================

DimensionLedger expected_dim_zprime(int g) {
  if (g < 3) throw PreconditionError("expected_dim_zprime: g >= 3 required");
  DimensionLedger out;
  out.g = g;
  out.dim_Hn = 2 * g - 1;
  out.dim_CxC = g + 2;
  out.dim_M_g2 = 3 * g - 1;
  out.expected_dim = out.dim_Hn + out.dim_CxC - out.dim_M_g2;
  return out;
}

DimensionLedger expected_dim_y(int g) {
  if (g < 3) throw PreconditionError("expected_dim_y: g >= 3 required");
  DimensionLedger out;
  out.g = g;
  out.dim_Hn = 2 * g - 1;
  out.dim_CxC = g;  // the fixed-pair pencil |L_pq| contributes dim |L| - 2 + 2
  out.dim_M_g2 = 3 * g - 1;
  out.expected_dim = out.dim_Hn + out.dim_CxC - out.dim_M_g2;
  return out;
}

BrillNoether bn_g1n_exists(int g, int n) {
  BrillNoether out;
  out.rho = g - 2 * (g - n + 1);
  out.exists = out.rho >= 0;
  return out;
}

// ===== helpers =============================================================

namespace {

HomogeneousForm<Complex> scaled(const HomogeneousForm<Complex>& f) {
  double m = f.max_abs_coeff();
  if (m == 0.0) return f;
  return f * Complex(1.0 / m);
}

// binary linear form in the line parameters (s, t): c_s * s + c_t * t
HomogeneousForm<Complex> shift_form(Complex c_s, Complex c_t) {
  HomogeneousForm<Complex> f(2, 1);
  f.add_term({1, 0}, c_s);
  f.add_term({0, 1}, c_t);
  return f;
}

// linear form sum_i c_i x_i (transpose pairing, same as LinearSubspace)
HomogeneousForm<Complex> linear_form(const Eigen::VectorXcd& c) {
  HomogeneousForm<Complex> f(static_cast<int>(c.size()), 1);
  for (int i = 0; i < c.size(); ++i) {
    poly::Exponents e(c.size(), 0);
    e[i] = 1;
    f.add_term(std::move(e), c[i]);
  }
  return f;
}

std::vector<Complex> normalized(std::vector<Complex> v) {
  double m = 0.0;
  for (const auto& c : v) m = std::max(m, std::abs(c));
  if (m > 0.0) for (auto& c : v) c /= m;
  return v;
}

// Relative gradient magnitude of a form at a (max-normalized) point: the
// euclidean norm of the partial evaluations over degree * coefficient scale.
double gradient_rel(const HomogeneousForm<Complex>& C, const std::vector<Complex>& x) {
  double s2 = 0.0;
  for (int i = 0; i < C.nvars(); ++i) {
    Complex gi = C.derivative(i).eval(x);
    s2 += std::norm(gi);
  }
  double scale = C.max_abs_coeff() * std::max(1, C.degree());
  return scale == 0.0 ? 0.0 : std::sqrt(s2) / scale;
}

// Relative discriminant of a binary form given by its restriction
// coefficients: |res(b, b')| over the homogeneity scale of the Sylvester
// determinant, so the answer is invariant under b -> lambda b.
double disc_rel(const std::vector<Complex>& rb) {
  UnivariatePoly<Complex> b(rb), db = UnivariatePoly<Complex>(rb).derivative();
  if (b.degree() < 1 || db.degree() < 0) return 0.0;
  Complex r = poly::resultant_scalar(b, db);
  double nb = b.norm_inf(), nd = db.norm_inf();
  double scale = std::pow(nb, db.degree()) * std::pow(nd, b.degree());
  return scale == 0.0 ? 0.0 : std::abs(r) / scale;
}

// Certified contact divisor of a plane curve C restricted to the line
// through local points a towards b: demands m0 * [a] + [b] with m0 = deg - 1
// (the z3 verification pattern).  Mirrors the corr_j certificate: the
// direction is max-normalized so a nearby b cannot collapse the coefficient
// scale, and the clustered roots must confirm {0 x m0, sigma x 1}.
double line_contact_residual(const HomogeneousForm<Complex>& C, const std::vector<Complex>& a,
                             const std::vector<Complex>& b, const RunConfig& cfg,
                             const char* who) {
  int d = C.degree();
  std::vector<Complex> dir(a.size());
  double sigma = 0.0;
  for (size_t i = 0; i < a.size(); ++i) {
    dir[i] = b[i] - a[i];
    sigma = std::max(sigma, std::abs(dir[i]));
  }
  if (sigma == 0.0) throw PreconditionError(std::string(who) + ": contact points collide");
  for (auto& c : dir) c /= sigma;
  auto rb = restrict_binary(C, a, dir);
  double sc = 0.0;
  for (const auto& c : rb) sc = std::max(sc, std::abs(c));
  if (sc / std::max(C.max_abs_coeff(), 1e-300) < 1e-10)
    throw PreconditionError(std::string(who) + ": the contact line lies in the section curve");
  double res = 0.0;
  for (int k = 0; k < d - 1; ++k) res = std::max(res, std::abs(rb[k]) / sc);
  if (res > cfg.tol.cert || std::abs(rb[d - 1]) / sc <= cfg.tol.cert)
    throw SolverError(std::string(who) + ": divisor verification failed");
  auto div = poly::roots_with_multiplicities(UnivariatePoly<Complex>(rb), cfg.tol.cluster, d);
  bool ok = div.degree_at_infinity == 0 && div.roots.size() == 2;
  if (ok) {
    int i0 = std::abs(div.roots[0].value) <= std::abs(div.roots[1].value) ? 0 : 1;
    ok = div.roots[i0].multiplicity == d - 1 && std::abs(div.roots[i0].value) <= 2e-3 &&
         div.roots[1 - i0].multiplicity == 1 &&
         std::abs(div.roots[1 - i0].value - sigma) <= 1e-4 * std::max(1.0, sigma);
  }
  if (!ok) throw SolverError(std::string(who) + ": root structure is not (deg-1, 1)");
  return res;
}

}  // namespace

// ===== n = 2: the double cover =============================================

TorsionCertificate z2_certificate(const surf::SurfaceModel& X, const ProjectivePoint& p,
                                  const ProjectivePoint& q, const RunConfig& cfg) {
  if (X.kind != surf::ModelKind::DoubleSextic)
    throw PreconditionError("z2_certificate: double sextic cover required");
  if (p.n() != 4 || q.n() != 4) throw PreconditionError("z2_certificate: points need (x:y:z;w)");
  const auto f6 = scaled(X.forms[0]);

  auto base_of = [](const ProjectivePoint& pt) {
    return normalized({pt.x[0], pt.x[1], pt.x[2]});
  };
  std::vector<Complex> bp = base_of(p), bq = base_of(q);
  // ramification curve w = 0, f6 = 0: w is forced by w^2 = f6 once the base
  // image is on the sextic, but a bad w slot is still a bad input
  if (std::abs(p.x[3]) > 1e-6 || std::abs(q.x[3]) > 1e-6)
    throw PreconditionError("z2_certificate: point not on the ramification curve (w != 0)");
  double on_p = poly::normalized_residual(f6, bp), on_q = poly::normalized_residual(f6, bq);
  if (on_p > cfg.tol.cert || on_q > cfg.tol.cert)
    throw PreconditionError("z2_certificate: base image not on the sextic");
  ProjectivePoint ibp = ProjectivePoint::of(bp), ibq = ProjectivePoint::of(bq);
  if (geom::projectively_equal(ibp, ibq, 1e-9))
    throw PreconditionError("z2_certificate: base images are equal");

  // parameter 0 at the image of p, 1 at the image of q
  std::vector<Complex> dir(3);
  for (int i = 0; i < 3; ++i) dir[i] = ibq.x[i] - ibp.x[i];
  auto rb = restrict_binary(f6, {ibp.x[0], ibp.x[1], ibp.x[2]}, dir);
  double sc = 0.0;
  for (const auto& c : rb) sc = std::max(sc, std::abs(c));
  if (sc < 1e-10)
    throw LineOnSurfaceError("z2_certificate: the line through the images lies in the sextic");
  UnivariatePoly<Complex> g6(rb);
  double res_p = std::abs(g6.eval(Complex(0))) / sc;
  double res_q = std::abs(g6.eval(Complex(1))) / sc;

  RootDivisor rd = poly::roots_with_multiplicities(g6, cfg.tol.cluster, 6);
  auto match = [&](Complex t0) -> const poly::RootEntry* {
    for (const auto& r : rd.roots)
      if (std::abs(r.value - t0) <= 1e-5) return &r;
    return nullptr;
  };
  const auto* rp = match(Complex(0));
  const auto* rq = match(Complex(1));
  if (!rp || !rq) throw SolverError("z2_certificate: branch root under p or q not recovered");

  TorsionCertificate out;
  out.n = 2;
  out.section = geom::span({ibp, ibq}, cfg.tol.rank);
  {  // the binary sextic on the line, entry k on s^(6-k) t^k
    HomogeneousForm<Complex> s6(2, 6);
    for (int k = 0; k <= 6; ++k)
      if (rb[k] != Complex(0)) s6.add_term({6 - k, k}, rb[k] / sc);
    out.curve_forms = {std::move(s6)};
  }
  out.p = p;
  out.p_prime = q;
  out.numerator = shift_form(Complex(0), Complex(1));    // t
  out.denominator = shift_form(Complex(-1), Complex(1));  // t - s
  // the function (t - 0)/(t - 1) pulls back to the cover with divisor 2p - 2q
  out.div_num.points = {{p, 2, res_p}};
  out.div_den.points = {{q, 2, res_q}};
  for (const auto& r : rd.roots) {
    std::vector<Complex> bx(4, Complex(0));
    for (int i = 0; i < 3; ++i) bx[i] = ibp.x[i] + r.value * dir[i];
    out.branch.points.push_back(WeightedPoint{ProjectivePoint::of(bx), r.multiplicity, r.residual});
  }
  if (rd.degree_at_infinity > 0) {
    std::vector<Complex> at_inf = {dir[0], dir[1], dir[2], Complex(0)};
    out.branch.points.push_back(
        WeightedPoint{ProjectivePoint::of(at_inf), rd.degree_at_infinity, 0.0});
  }
  out.nodal_fiber = rp->multiplicity > 1 || rq->multiplicity > 1;

  UnivariatePoly<Complex> dg6 = g6.derivative();
  double dscale = std::max(dg6.norm_inf(), 1e-300);
  auto grad_at = [&](Complex t) { return std::abs(dg6.eval(t)) / dscale; };
  out.smoothness.worst_point_gradient = std::min(grad_at(Complex(0)), grad_at(Complex(1)));
  double screen = 1e300;
  bool simple = rd.degree_at_infinity <= 1;
  for (const auto& r : rd.roots) {
    screen = std::min(screen, grad_at(r.value));
    simple = simple && r.multiplicity == 1;
  }
  out.smoothness.screen_min_gradient = rd.roots.empty() ? 0.0 : screen;
  out.smoothness.min_line_disc = disc_rel(rb);
  out.smoothness.samples = static_cast<int>(rd.roots.size());
  out.smoothness.pass = simple;
  out.residual = std::max(res_p, res_q);
  return out;
}

// ===== n = 3: two line contacts through a shared q =========================

TorsionCertificate z3_from_pairs(const surf::SurfaceModel& X, const corrj::ContactPair& pair1,
                                 const corrj::ContactPair& pair2, const RunConfig& cfg) {
  if (X.kind != surf::ModelKind::QuarticP3)
    throw PreconditionError("z3_from_pairs: quartic surface required");
  if (!geom::projectively_equal(pair1.q, pair2.q, 1e-6))
    throw PreconditionError("z3_from_pairs: pairs do not share the residual point");
  if (geom::projectively_equal(pair1.p, pair2.p, 1e-9))
    throw PreconditionError("z3_from_pairs: coincident pairs (diagonal)");
  const ProjectivePoint &p = pair1.p, &pp = pair2.p, &q = pair1.q;

  LinearSubspace H = geom::span({p, pp, q}, cfg.tol.rank);
  if (H.degenerate || H.basis.cols() != 3)
    throw PreconditionError("z3_from_pairs: section plane degenerate");
  SubspaceFrame fr = geom::plane_coordinates(H);
  if (fr.roundtrip_residual(p) > 1e-8 || fr.roundtrip_residual(pp) > 1e-8 ||
      fr.roundtrip_residual(q) > 1e-8)
    throw SolverError("z3_from_pairs: section frame did not capture the points");
  HomogeneousForm<Complex> C = scaled(fr.restrict_form(scaled(X.forms[0])));

  auto lp = normalized(fr.pull(p)), lpp = normalized(fr.pull(pp)), lq = normalized(fr.pull(q));
  auto cross = [](const std::vector<Complex>& u, const std::vector<Complex>& v) {
    return normalized({u[1] * v[2] - u[2] * v[1], u[2] * v[0] - u[0] * v[2],
                       u[0] * v[1] - u[1] * v[0]});
  };
  auto lform = cross(lp, lq), lform2 = cross(lpp, lq);

  double res_num = line_contact_residual(C, lp, lq, cfg, "z3_from_pairs[num]");
  double res_den = line_contact_residual(C, lpp, lq, cfg, "z3_from_pairs[den]");

  TorsionCertificate out;
  out.n = 3;
  out.section = H;
  out.curve_forms = {C};
  out.p = p;
  out.p_prime = pp;
  out.numerator = linear_form(Eigen::Map<const Eigen::VectorXcd>(lform.data(), 3));
  out.denominator = linear_form(Eigen::Map<const Eigen::VectorXcd>(lform2.data(), 3));
  out.div_num.points = {{p, 3, res_num}, {q, 1, res_num}};
  out.div_den.points = {{pp, 3, res_den}, {q, 1, res_den}};

  // smoothness: exact gradients at the marked points, then a sampled screen
  // of random line sections (roots are points of C; multiple restriction
  // roots or a tiny discriminant flag tangency/singularity nearby)
  auto& sm = out.smoothness;
  sm.worst_point_gradient =
      std::min({gradient_rel(C, lp), gradient_rel(C, lpp), gradient_rel(C, lq)});
  Rng rng(subseed(cfg.seed, "z3-screen"));
  sm.screen_min_gradient = 1e300;
  sm.min_line_disc = 1e300;
  for (int trial = 0; trial < 6; ++trial) {
    std::vector<Complex> a(3), d(3);
    for (int i = 0; i < 3; ++i) { a[i] = rng.cgauss(); d[i] = rng.cgauss(); }
    auto rbl = restrict_binary(C, a, d);
    sm.min_line_disc = std::min(sm.min_line_disc, disc_rel(rbl));
    auto rdl = poly::roots_with_multiplicities(UnivariatePoly<Complex>(rbl), cfg.tol.cluster, 4);
    for (const auto& r : rdl.roots) {
      std::vector<Complex> x(3);
      for (int i = 0; i < 3; ++i) x[i] = a[i] + r.value * d[i];
      sm.screen_min_gradient = std::min(sm.screen_min_gradient, gradient_rel(C, normalized(x)));
      ++sm.samples;
    }
  }
  sm.pass = sm.worst_point_gradient > 1e-6 && sm.screen_min_gradient > 1e-6 &&
            sm.min_line_disc > 1e-12;
  if (!sm.pass) throw PreconditionError("z3_from_pairs: section curve fails the smoothness screen");

  double lres = 0.0;
  auto dot3 = [](const std::vector<Complex>& f, const std::vector<Complex>& x) {
    return std::abs(f[0] * x[0] + f[1] * x[1] + f[2] * x[2]);
  };
  lres = std::max({dot3(lform, lp), dot3(lform, lq), dot3(lform2, lpp), dot3(lform2, lq)});
  out.residual = std::max({res_num, res_den, lres});
  return out;
}

// ===== n = 4: two plane contacts through a shared (q, r) ===================

TorsionCertificate z4_from_triples(const surf::SurfaceModel& X, const corrt::ContactTriple& t1,
                                   const corrt::ContactTriple& t2, const RunConfig& cfg) {
  if (X.kind != surf::ModelKind::CI23P4)
    throw PreconditionError("z4_from_triples: (2,3) complete intersection required");
  bool straight = geom::projectively_equal(t1.q, t2.q, 1e-6) &&
                  geom::projectively_equal(t1.r, t2.r, 1e-6);
  bool swapped = geom::projectively_equal(t1.q, t2.r, 1e-6) &&
                 geom::projectively_equal(t1.r, t2.q, 1e-6);
  if (!straight && !swapped)
    throw PreconditionError("z4_from_triples: triples do not share the residual pair");
  if (geom::projectively_equal(t1.p, t2.p, 1e-9))
    throw PreconditionError("z4_from_triples: coincident triples (diagonal)");
  const ProjectivePoint &q = t1.q, &r = t1.r;

  double share = std::max({t1.plane.contains_residual(q), t1.plane.contains_residual(r),
                           t2.plane.contains_residual(q), t2.plane.contains_residual(r)});
  if (share > 1e-6)
    throw PreconditionError("z4_from_triples: tangent planes do not share the qr line");

  // H = span(T_pX, T_p'X), a hyperplane since the planes meet in a line
  std::vector<ProjectivePoint> spanners = t1.plane.basis_points();
  for (auto& b : t2.plane.basis_points()) spanners.push_back(b);
  // span() flags any rank below the point count, but six spanners of a
  // hyperplane are meant to be dependent: only the recovered rank matters
  LinearSubspace H = geom::span(spanners, cfg.tol.rank);
  if (H.basis.cols() != 4)
    throw PreconditionError("z4_from_triples: section hyperplane degenerate");
  SubspaceFrame fr = geom::plane_coordinates(H);
  HomogeneousForm<Complex> cA = scaled(fr.restrict_form(scaled(X.forms[0])));
  HomogeneousForm<Complex> cB = scaled(fr.restrict_form(scaled(X.forms[1])));

  // linear forms on H cutting the two tangent planes: null vectors of the
  // pulled plane bases (transpose pairing)
  auto plane_form = [&](const LinearSubspace& T, const char* side) {
    Eigen::MatrixXcd rows(3, 4);
    auto bs = T.basis_points();
    for (int i = 0; i < 3; ++i) {
      auto u = normalized(fr.pull(bs[i]));
      for (int j = 0; j < 4; ++j) rows(i, j) = u[j];
    }
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(rows, Eigen::ComputeFullV);
    if (svd.singularValues()(2) / svd.singularValues()(0) < cfg.tol.rank)
      throw SolverError(std::string("z4_from_triples: tangent plane collapsed in the ") + side +
                        " frame");
    Eigen::VectorXcd lam = svd.matrixV().col(3);
    double resid = (rows * lam).cwiseAbs().maxCoeff();
    return std::make_pair(lam, resid);
  };
  auto [lam, lam_res] = plane_form(t1.plane, "numerator");
  auto [lam2, lam2_res] = plane_form(t2.plane, "denominator");

  // divisors are re-certified from scratch through the plane-contact fiber
  auto recertify = [&](const ProjectivePoint& pt, const char* side) {
    auto fib = corrt::t_fiber_first(X, pt, cfg);
    if (!fib.triple)
      throw SolverError(std::string("z4_from_triples: contact re-certification failed at ") +
                        side + (fib.degenerate.empty() ? "" : ": " + fib.degenerate));
    bool same = (geom::projectively_equal(fib.triple->q, q, 1e-6) &&
                 geom::projectively_equal(fib.triple->r, r, 1e-6)) ||
                (geom::projectively_equal(fib.triple->q, r, 1e-6) &&
                 geom::projectively_equal(fib.triple->r, q, 1e-6));
    if (!same)
      throw SolverError(std::string("z4_from_triples: re-certified residual pair moved at ") +
                        side);
    return *fib.triple;
  };
  corrt::ContactTriple c1 = recertify(t1.p, "p");
  corrt::ContactTriple c2 = recertify(t2.p, "p'");

  double inH = 0.0;
  for (const auto& w : c1.divisor.points) inH = std::max(inH, H.contains_residual(w.pt));
  for (const auto& w : c2.divisor.points) inH = std::max(inH, H.contains_residual(w.pt));
  if (inH > 1e-6)
    throw SolverError("z4_from_triples: re-certified divisor escapes the section hyperplane");

  TorsionCertificate out;
  out.n = 4;
  out.section = H;
  out.curve_forms = {cA, cB};
  out.p = t1.p;
  out.p_prime = t2.p;
  out.numerator = linear_form(lam);
  out.denominator = linear_form(lam2);
  out.div_num = c1.divisor;
  out.div_den = c2.divisor;

  auto& sm = out.smoothness;
  sm.worst_point_gradient = 1e300;
  for (const auto* pt : {&t1.p, &t2.p, &q, &r}) {
    auto rep = surf::is_smooth_at(X, *pt, cfg.tol);
    sm.worst_point_gradient = std::min(sm.worst_point_gradient, rep.sigma_min);
    sm.pass = rep.smooth;
    if (!rep.smooth) break;
  }
  // H contains both tangent planes, so the section curve is forced to be
  // nodal at p and p' -- that is the construction, not a defect.  The screen
  // checks regularity at the simple divisor points only.
  out.nodal_fiber = true;
  double sA = std::max(cA.max_abs_coeff() * cA.degree(), 1e-300);
  double sB = std::max(cB.max_abs_coeff() * cB.degree(), 1e-300);
  sm.screen_min_gradient = 1e300;
  for (const auto* div : {&c1.divisor, &c2.divisor})
    for (const auto& w : div->points) {
      if (w.multiplicity != 1) continue;  // the contact points are the nodes
      auto u = normalized(fr.pull(w.pt));
      Eigen::MatrixXcd Jl(2, 4);
      for (int j = 0; j < 4; ++j) {
        Jl(0, j) = cA.derivative(j).eval(u) / sA;
        Jl(1, j) = cB.derivative(j).eval(u) / sB;
      }
      Eigen::JacobiSVD<Eigen::MatrixXcd> svd(Jl);
      sm.screen_min_gradient =
          std::min(sm.screen_min_gradient, svd.singularValues()(1));
      ++sm.samples;
    }
  sm.min_line_disc = 0.0;  // no line screen for the space curve
  sm.pass = sm.pass && sm.screen_min_gradient > 1e-8;

  out.residual = std::max({c1.residual, c2.residual, lam_res, lam2_res, share, inH});
  return out;
}

// ===== jump-locus hunt for coincident residual pairs =======================

namespace {

// directional polar sum_i f_i(x) v_i: degree deg f - 1 in x; vanishing at x
// says v lies in the tangent hyperplane of {f = 0} at x
HomogeneousForm<Complex> polar(const HomogeneousForm<Complex>& f, const ProjectivePoint& v) {
  HomogeneousForm<Complex> out(f.nvars(), f.degree() - 1);
  for (int i = 0; i < f.nvars(); ++i) out = out + f.derivative(i) * v.x[i];
  return out;
}

// Residual pair of X . T_pX without the resultant machinery: the tangent
// conic splits into the two node lines through p, and the tangent cubic
// meets each line in p (twice) plus the one residual point.
std::optional<std::pair<ProjectivePoint, ProjectivePoint>> light_residual_pair(
    const surf::SurfaceModel& X, const ProjectivePoint& p, const RunConfig& cfg) {
  LinearSubspace T;
  try {
    T = surf::tangent_space(X, p, cfg.tol);
  } catch (const std::runtime_error&) {
    return std::nullopt;
  }
  if (T.basis.cols() != 3) return std::nullopt;
  SubspaceFrame fr = geom::anchored_frame(T, p);
  auto cA = scaled(fr.restrict_form(scaled(X.forms[0])));
  auto cB = scaled(fr.restrict_form(scaled(X.forms[1])));
  Complex a = cA.coeff({0, 2, 0}), b = cA.coeff({0, 1, 1}), c = cA.coeff({0, 0, 2});
  double s2 = std::max({std::abs(a), std::abs(b), std::abs(c)});
  Complex disc = b * b - 4.0 * a * c;
  if (s2 < 1e-8 || std::abs(disc) < 1e-10 * s2 * s2) return std::nullopt;  // cone degenerate
  Complex sq = std::sqrt(disc);
  if (std::abs(-b + sq) < std::abs(-b - sq)) sq = -sq;
  std::vector<std::vector<Complex>> lines;
  if (std::abs(a) >= std::abs(c)) {
    Complex l1 = (-b + sq) / (2.0 * a), l2 = c / (a * l1);
    lines = {{Complex(1), -l1}, {Complex(1), -l2}};
  } else {
    Complex m1 = (-b + sq) / (2.0 * c), m2 = a / (c * m1);
    lines = {{-m1, Complex(1)}, {-m2, Complex(1)}};
  }
  std::vector<ProjectivePoint> res;
  std::vector<Complex> e0 = {Complex(1), Complex(0), Complex(0)};
  for (const auto& row : lines) {
    std::vector<Complex> v = {Complex(0), row[1], -row[0]};
    auto rb = restrict_binary(cB, e0, v);
    double sc = std::max({std::abs(rb[0]), std::abs(rb[1]), std::abs(rb[2]), std::abs(rb[3])});
    if (sc == 0.0 || std::abs(rb[3]) / sc < 1e-8) return std::nullopt;  // contact >= 3
    Complex tau = -rb[2] / rb[3];
    Eigen::VectorXcd u(3);
    u << e0[0] + tau * v[0], e0[1] + tau * v[1], e0[2] + tau * v[2];
    res.push_back(ProjectivePoint::of(Eigen::VectorXcd(fr.map * u)));
  }
  if (geom::projectively_equal(res[0], res[1], 1e-8)) return std::nullopt;
  return std::make_pair(res[0], res[1]);
}

// square Newton for a point of X cut by two linear forms, pivot pinned
bool polish_candidate(const surf::SurfaceModel& X, const HomogeneousForm<Complex>& Lq,
                      const HomogeneousForm<Complex>& Lr, Eigen::VectorXcd& x) {
  const auto& A = X.forms[0];
  const auto& B = X.forms[1];
  int pivot = 0;
  for (int i = 1; i < 5; ++i)
    if (std::abs(x[i]) > std::abs(x[pivot])) pivot = i;
  const HomogeneousForm<Complex>* sys[4] = {&A, &B, &Lq, &Lr};
  double nrm[4];
  for (int e = 0; e < 4; ++e) nrm[e] = std::max(sys[e]->norm1(), 1e-300);
  for (int it = 0; it < 20; ++it) {
    std::vector<Complex> xc(x.data(), x.data() + 5);
    Eigen::Vector4cd vals;
    Eigen::Matrix4cd J;
    for (int e = 0; e < 4; ++e) {
      vals[e] = sys[e]->eval(xc) / nrm[e];
      int col = 0;
      for (int i = 0; i < 5; ++i) {
        if (i == pivot) continue;
        J(e, col++) = sys[e]->derivative(i).eval(xc) / nrm[e];
      }
    }
    if (vals.cwiseAbs().maxCoeff() < 1e-13) return true;
    Eigen::Vector4cd step = J.fullPivLu().solve(-vals);
    if (!step.allFinite() || step.cwiseAbs().maxCoeff() > 10.0) return false;
    int col = 0;
    for (int i = 0; i < 5; ++i) {
      if (i == pivot) continue;
      x[i] += step[col++];
    }
  }
  return false;
}

// lift the chart parameters back onto X: coordinates k1, k2 adjusted by a
// 2x2 Newton with the rest frozen
struct SurfaceChart {
  const surf::SurfaceModel* X = nullptr;
  int j1 = 0, j2 = 0, k1 = 0, k2 = 0;
  Eigen::VectorXcd base;

  std::optional<Eigen::VectorXcd> lift(Complex s, Complex t, Eigen::VectorXcd warm) const {
    warm[j1] = base[j1] + s;
    warm[j2] = base[j2] + t;
    const auto& A = X->forms[0];
    const auto& B = X->forms[1];
    double na = std::max(A.norm1(), 1e-300), nb = std::max(B.norm1(), 1e-300);
    for (int it = 0; it < 25; ++it) {
      std::vector<Complex> xc(warm.data(), warm.data() + 5);
      Eigen::Vector2cd vals(A.eval(xc) / na, B.eval(xc) / nb);
      if (vals.cwiseAbs().maxCoeff() < 1e-14) return warm;
      Eigen::Matrix2cd J;
      J << A.derivative(k1).eval(xc) / na, A.derivative(k2).eval(xc) / na,
          B.derivative(k1).eval(xc) / nb, B.derivative(k2).eval(xc) / nb;
      Eigen::Vector2cd step = J.fullPivLu().solve(-vals);
      if (!step.allFinite() || step.cwiseAbs().maxCoeff() > 10.0) return std::nullopt;
      warm[k1] += step[0];
      warm[k2] += step[1];
    }
    return std::nullopt;
  }
};

struct JumpEval {
  Complex gq, gr;            // the two cubic polar residuals at the candidate
  Eigen::VectorXcd p_warm;   // lifted surface point
  Eigen::VectorXcd x_warm;   // polished candidate
};

std::optional<JumpEval> jump_eval(const surf::SurfaceModel& X, const SurfaceChart& chart,
                                  Complex s, Complex t, const Eigen::VectorXcd& p_warm,
                                  const Eigen::VectorXcd& x_warm, const RunConfig& cfg) {
  auto lifted = chart.lift(s, t, p_warm);
  if (!lifted) return std::nullopt;
  ProjectivePoint p = ProjectivePoint::of(*lifted);
  auto qr = light_residual_pair(X, p, cfg);
  if (!qr) return std::nullopt;
  auto Lq = polar(X.forms[0], qr->first), Lr = polar(X.forms[0], qr->second);
  auto Pq = polar(X.forms[1], qr->first), Pr = polar(X.forms[1], qr->second);
  JumpEval out;
  out.p_warm = *lifted;
  out.x_warm = x_warm;
  if (!polish_candidate(X, Lq, Lr, out.x_warm)) return std::nullopt;
  ProjectivePoint x = ProjectivePoint::of(out.x_warm);
  if (geom::projectively_equal(x, p, 1e-6)) return std::nullopt;  // drifted onto the source
  // a residual point colliding with the source marks the hyperflex-like locus
  // where the whole configuration collapses; certificates never live there
  if (geom::projectively_equal(qr->first, p, 1e-5) ||
      geom::projectively_equal(qr->second, p, 1e-5))
    return std::nullopt;
  auto xc = x.coords();
  out.gq = Pq.eval(xc) / std::max(Pq.norm1(), 1e-300);
  out.gr = Pr.eval(xc) / std::max(Pr.norm1(), 1e-300);
  return out;
}

}  // namespace

std::vector<TorsionCertificate> z4_pair_search(const surf::SurfaceModel& X, int attempts,
                                               std::uint64_t seed, const RunConfig& cfg) {
  if (X.kind != surf::ModelKind::CI23P4)
    throw PreconditionError("z4_pair_search: (2,3) complete intersection required");
  if (attempts < 1) throw PreconditionError("z4_pair_search: attempts must be positive");
  std::vector<TorsionCertificate> out;

  for (int start = 0; start < attempts; ++start) {
    ProjectivePoint p0 = surf::sample_point(X, subseed(seed, static_cast<std::uint64_t>(start)));
    auto qr0 = light_residual_pair(X, p0, cfg);
    if (!qr0) continue;

    // chart at p0: pin the pivot, split the rest into free (j) and
    // dependent (k) coordinates by the best 2x2 Jacobian minor of (A, B)
    SurfaceChart chart;
    chart.X = &X;
    chart.base = p0.x;
    int pivot = 0;
    for (int i = 1; i < 5; ++i)
      if (std::abs(p0.x[i]) > std::abs(p0.x[pivot])) pivot = i;
    {
      auto pc = p0.coords();
      std::vector<int> free_ix;
      for (int i = 0; i < 5; ++i)
        if (i != pivot) free_ix.push_back(i);
      double best = -1.0;
      for (int u = 0; u < 4; ++u)
        for (int v = u + 1; v < 4; ++v) {
          Complex det = X.forms[0].derivative(free_ix[u]).eval(pc) *
                            X.forms[1].derivative(free_ix[v]).eval(pc) -
                        X.forms[0].derivative(free_ix[v]).eval(pc) *
                            X.forms[1].derivative(free_ix[u]).eval(pc);
          if (std::abs(det) > best) {
            best = std::abs(det);
            chart.k1 = free_ix[u];
            chart.k2 = free_ix[v];
          }
        }
      std::vector<int> js;
      for (int i : free_ix)
        if (i != chart.k1 && i != chart.k2) js.push_back(i);
      chart.j1 = js[0];
      chart.j2 = js[1];
    }

    // shadow candidates at the start: X cut by the two quadric polar planes
    auto Lq0 = polar(X.forms[0], qr0->first), Lr0 = polar(X.forms[0], qr0->second);
    Eigen::MatrixXcd lrows(2, 5);
    for (int i = 0; i < 5; ++i) {
      poly::Exponents e(5, 0);
      e[i] = 1;
      lrows(0, i) = Lq0.coeff(e);
      lrows(1, i) = Lr0.coeff(e);
    }
    auto Hs = geom::subspace_from_forms(lrows, cfg.tol.rank);
    if (Hs.degenerate || Hs.proj_dim() != 2) continue;
    auto frs = geom::plane_coordinates(Hs);
    geom::IntersectionDivisor shadow;
    try {
      shadow = corrt::plane_curve_intersection(scaled(frs.restrict_form(X.forms[0])),
                                               scaled(frs.restrict_form(X.forms[1])), cfg);
    } catch (const std::runtime_error&) {
      continue;
    }

    // rank the non-source candidates by how close they already are
    auto Pq0 = polar(X.forms[1], qr0->first), Pr0 = polar(X.forms[1], qr0->second);
    std::vector<std::pair<double, Eigen::VectorXcd>> branches;
    for (const auto& wp : shadow.points) {
      ProjectivePoint amb = frs.push(wp.pt.coords());
      if (geom::projectively_equal(amb, p0, 1e-6)) continue;
      double g = std::max(poly::normalized_residual(Pq0, amb.coords()),
                          poly::normalized_residual(Pr0, amb.coords()));
      branches.emplace_back(g, amb.x);
    }
    std::sort(branches.begin(), branches.end(),
              [](const auto& l, const auto& rr) { return l.first < rr.first; });
    if (branches.size() > 2) branches.resize(2);

    for (auto& [g0, x0] : branches) {
      Complex s(0), t(0);
      Eigen::VectorXcd pw = p0.x, xw = x0;
      auto cur = jump_eval(X, chart, s, t, pw, xw, cfg);
      if (!cur) continue;
      bool converged = false;
      for (int it = 0; it < 60; ++it) {
        double g = std::max(std::abs(cur->gq), std::abs(cur->gr));
        if (g < 3e-12) {
          converged = true;
          break;
        }
        double h = 1e-7 * std::max(1.0, std::max(std::abs(s), std::abs(t)));
        auto es = jump_eval(X, chart, s + h, t, cur->p_warm, cur->x_warm, cfg);
        auto et = jump_eval(X, chart, s, t + h, cur->p_warm, cur->x_warm, cfg);
        if (!es || !et) break;
        Eigen::Matrix2cd J;
        J << (es->gq - cur->gq) / h, (et->gq - cur->gq) / h, (es->gr - cur->gr) / h,
            (et->gr - cur->gr) / h;
        Eigen::Vector2cd rhs(-cur->gq, -cur->gr);
        Eigen::Vector2cd step = J.fullPivLu().solve(rhs);
        if (!step.allFinite()) break;
        double sn = step.cwiseAbs().maxCoeff();
        if (sn > 0.25) step *= 0.25 / sn;  // trust region: stay on the branch
        bool improved = false;
        for (int halve = 0; halve < 5; ++halve) {
          auto trial = jump_eval(X, chart, s + step[0], t + step[1], cur->p_warm, cur->x_warm, cfg);
          if (trial) {
            double gt = std::max(std::abs(trial->gq), std::abs(trial->gr));
            if (gt < g * 0.99 || gt < 3e-12) {
              s += step[0];
              t += step[1];
              cur = trial;
              improved = true;
              break;
            }
          }
          step *= 0.5;
        }
        if (!improved) break;
      }
      if (!converged) continue;

      // the hunt has a spurious attractor where p, the candidate, and the
      // residual pair all collapse to one point; real pairs are well separated
      {
        ProjectivePoint ps = ProjectivePoint::of(cur->p_warm);
        ProjectivePoint xs = ProjectivePoint::of(cur->x_warm);
        auto qrc = light_residual_pair(X, ps, cfg);
        if (!qrc) continue;
        bool clustered = geom::projectively_equal(ps, xs, 1e-3) ||
                         geom::projectively_equal(ps, qrc->first, 1e-3) ||
                         geom::projectively_equal(ps, qrc->second, 1e-3) ||
                         geom::projectively_equal(qrc->first, qrc->second, 1e-3);
        if (clustered) continue;
      }

      // honest harvest: both triples re-derived through the certified pipeline
      try {
        ProjectivePoint pstar = ProjectivePoint::of(cur->p_warm);
        auto fib = corrt::t_fiber_first(X, pstar, cfg);
        if (!fib.triple) continue;
        auto hits = corrt::t_fiber_second_search(X, fib.triple->q, fib.triple->r, 12, cfg);
        const corrt::ContactTriple* partner = nullptr;
        for (const auto& hh : hits)
          if (!geom::projectively_equal(hh.p, pstar, 1e-6)) partner = &hh;
        if (!partner) continue;
        auto cert = z4_from_triples(X, *fib.triple, *partner, cfg);
        bool dup = false;
        for (const auto& c : out) {
          bool same = (geom::projectively_equal(c.p, cert.p, 1e-6) &&
                       geom::projectively_equal(c.p_prime, cert.p_prime, 1e-6)) ||
                      (geom::projectively_equal(c.p, cert.p_prime, 1e-6) &&
                       geom::projectively_equal(c.p_prime, cert.p, 1e-6));
          if (same) dup = true;
        }
        if (!dup) out.push_back(std::move(cert));
        break;  // one certificate per start is enough
      } catch (const std::runtime_error&) {
        continue;
      }
    }
  }
  return out;
}

}  // namespace k3::torsion
