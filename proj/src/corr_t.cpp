#include "k3corr/corr_t.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <string>

namespace k3::corrt {

using poly::Exponents;
using poly::UnivariatePoly;
using poly::interpolate_on_unit_circle;
using poly::normalized_residual;
using poly::roots_with_multiplicities;
using poly::slice_var0;

namespace {

HomogeneousForm<Complex> scaled(const HomogeneousForm<Complex>& f) {
  double m = f.max_abs_coeff();
  return m > 0 ? f * Complex(1.0 / m) : f;
}

// coefficient forms of x_var^k (low-first), the eliminated variable dropped
std::vector<HomogeneousForm<Complex>> var_slices(const HomogeneousForm<Complex>& f, int var) {
  const int n = f.nvars();
  const int d = f.degree();
  std::vector<HomogeneousForm<Complex>> out;
  for (int k = 0; k <= d; ++k) out.emplace_back(n - 1, d - k);
  for (const auto& [e, c] : f.terms()) {
    Exponents r;
    for (int i = 0; i < n; ++i)
      if (i != var) r.push_back(e[i]);
    out[e[var]].add_term(std::move(r), c);
  }
  return out;
}

// Sylvester determinant of scalar coefficient vectors (low-first, formal
// degrees m and n with constant nonzero leading coefficients).  hadamard,
// when non-null, receives |det| of the row-normalized matrix — a scale-free
// zero-resultant detector.
Complex sylv_det(const std::vector<Complex>& f, int m, const std::vector<Complex>& g, int n,
                 double* hadamard) {
  const int N = m + n;
  Eigen::MatrixXcd S = Eigen::MatrixXcd::Zero(N, N);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j <= m; ++j) S(i, i + j) = f[m - j];
  for (int i = 0; i < m; ++i)
    for (int j = 0; j <= n; ++j) S(n + i, i + j) = g[n - j];
  if (hadamard) {
    Eigen::MatrixXcd T = S;
    for (int i = 0; i < N; ++i) {
      double r = T.row(i).norm();
      if (r > 0) T.row(i) /= r;
    }
    *hadamard = std::abs(Eigen::PartialPivLU<Eigen::MatrixXcd>(T).determinant());
  }
  return Eigen::PartialPivLU<Eigen::MatrixXcd>(S).determinant();
}

UnivariatePoly<Complex> rescaled(const UnivariatePoly<Complex>& p) {
  double m = p.norm_inf();
  if (m == 0) return p;
  std::vector<Complex> c;
  for (int k = 0; k <= p.degree(); ++k) c.push_back(p.coeff(k) / m);
  return UnivariatePoly<Complex>(std::move(c));
}

// One pencil fiber: roots of C1's slice at t, matched against C2's slice.
// The match scale is sum_k |g_k| |z|^k — the evaluation-conditioning scale,
// valid at any |z| (a max-coefficient scale overshoots badly for far roots).
struct FiberMatch {
  enum Status { kOk, kNone, kAmbiguous };
  Status status = kNone;
  Complex z;
};
FiberMatch fiber_match(const std::vector<HomogeneousForm<Complex>>& s1,
                       const std::vector<HomogeneousForm<Complex>>& s2, int d1, int d2, Complex t,
                       double eps_cluster) {
  std::vector<Complex> point = {Complex(1.0), t};
  std::vector<Complex> f(d1 + 1), g(d2 + 1);
  for (int k = 0; k <= d1; ++k) f[k] = s1[k].eval(point);
  for (int k = 0; k <= d2; ++k) g[k] = s2[k].eval(point);
  UnivariatePoly<Complex> fz(f), gz(g);
  auto r1 = roots_with_multiplicities(fz, eps_cluster);
  std::vector<Complex> matches;
  for (const auto& cand : r1.roots) {
    double scale = 0.0, zp = 1.0;
    for (int k = 0; k <= d2; ++k) {
      scale += std::abs(g[k]) * zp;
      zp *= std::abs(cand.value);
    }
    if (scale == 0.0) scale = 1.0;
    if (std::abs(gz.eval(cand.value)) <= 1e-4 * scale) matches.push_back(cand.value);
  }
  FiberMatch out;
  if (matches.empty()) return out;
  for (size_t i = 1; i < matches.size(); ++i)
    if (std::abs(matches[i] - matches[0]) > 1e-4 * (1.0 + std::abs(matches[0]))) {
      out.status = FiberMatch::kAmbiguous;
      return out;
    }
  out.status = FiberMatch::kOk;
  out.z = matches[0];
  return out;
}

// 2x2 Newton on the affine chart x = 1, keeping the best residual seen.
std::pair<Complex, Complex> newton2(const HomogeneousForm<Complex>& C1r,
                                    const HomogeneousForm<Complex>& C2r, Complex y, Complex z) {
  auto d1y = C1r.derivative(1), d1z = C1r.derivative(2);
  auto d2y = C2r.derivative(1), d2z = C2r.derivative(2);
  double best = 1e300;
  Complex by = y, bz = z;
  for (int it = 0; it < 14; ++it) {
    std::vector<Complex> pt = {Complex(1.0), y, z};
    Complex v1 = C1r.eval(pt), v2 = C2r.eval(pt);
    double res = std::max(std::abs(v1), std::abs(v2));
    if (res < best) {
      best = res;
      by = y;
      bz = z;
    }
    if (res < 1e-14) break;
    Eigen::Matrix2cd J;
    J << d1y.eval(pt), d1z.eval(pt), d2y.eval(pt), d2z.eval(pt);
    Eigen::Vector2cd rhs(-v1, -v2);
    Eigen::Vector2cd step = J.fullPivLu().solve(rhs);
    if (!step.allFinite()) break;
    double cap = 0.5 * (1.0 + std::abs(y) + std::abs(z));
    if (step.norm() > cap) step *= cap / step.norm();
    y += step[0];
    z += step[1];
  }
  return {by, bz};
}

bool lex_less(const ProjectivePoint& a, const ProjectivePoint& b) {
  for (int i = 0; i < a.n() && i < b.n(); ++i) {
    if (a.x[i].real() != b.x[i].real()) return a.x[i].real() < b.x[i].real();
    if (a.x[i].imag() != b.x[i].imag()) return a.x[i].imag() < b.x[i].imag();
  }
  return false;
}

}  // namespace

// ===== plane curve intersection ============================================

IntersectionDivisor plane_curve_intersection(const HomogeneousForm<Complex>& C1in,
                                             const HomogeneousForm<Complex>& C2in,
                                             const RunConfig& cfg,
                                             const std::vector<ProjectivePoint>& anchors) {
  if (C1in.nvars() != 3 || C2in.nvars() != 3)
    throw PreconditionError("plane intersection: 3 variables required");
  if (C1in.is_zero() || C2in.is_zero() || C1in.degree() < 1 || C2in.degree() < 1)
    throw PreconditionError("plane intersection: curves must be nonzero of positive degree");
  const int d1 = C1in.degree();
  const int d2 = C2in.degree();
  const int D = d1 * d2;
  const HomogeneousForm<Complex> C1 = scaled(C1in);
  const HomogeneousForm<Complex> C2 = scaled(C2in);

  for (const auto& a : anchors) {
    if (normalized_residual(C1, a.coords()) > 1e-6 || normalized_residual(C2, a.coords()) > 1e-6)
      throw PreconditionError("plane intersection: anchor not on both curves");
  }

  int zero_frames = 0;
  for (int attempt = 0; attempt < 6; ++attempt) {
    Rng rng(subseed(cfg.seed, "pci" + std::to_string(attempt)));
    Eigen::MatrixXcd U = geom::random_unitary(3, rng);
    auto C1r = scaled(C1.compose_linear(geom::nested(U)));
    auto C2r = scaled(C2.compose_linear(geom::nested(U)));
    std::vector<Complex> center = {Complex(0), Complex(0), Complex(1)};
    if (std::abs(C1r.eval(center)) < 1e-3 || std::abs(C2r.eval(center)) < 1e-3)
      continue;  // projection center too close to a curve
    auto s1 = var_slices(C1r, 2);
    auto s2 = var_slices(C2r, 2);

    double had_max = 0.0;
    auto R = interpolate_on_unit_circle(
        [&](Complex t) {
          std::vector<Complex> point = {Complex(1.0), t};
          std::vector<Complex> f(d1 + 1), g(d2 + 1);
          for (int k = 0; k <= d1; ++k) f[k] = s1[k].eval(point);
          for (int k = 0; k <= d2; ++k) g[k] = s2[k].eval(point);
          double h = 0.0;
          Complex det = sylv_det(f, d1, g, d2, &h);
          had_max = std::max(had_max, h);
          return det;
        },
        D);
    if (had_max < 1e-10) {
      if (++zero_frames >= 2) throw PreconditionError("plane intersection: common component");
      continue;
    }
    R = rescaled(R);

    // anchors: order of vanishing at the exact projection, then deflate
    IntersectionDivisor out;
    bool bad = false;
    int anchor_total = 0;
    UnivariatePoly<Complex> Rdef = R;
    std::vector<Complex> anchor_ts;
    for (const auto& a : anchors) {
      Eigen::Vector3cd u = U.adjoint() * a.x;
      double pn = std::sqrt(std::norm(u[0]) + std::norm(u[1]));
      if (pn < 0.05 * u.norm() || std::abs(u[0]) < 0.25 * pn) {
        bad = true;  // anchor projects near infinity or the chart edge
        break;
      }
      Complex ta = u[1] / u[0];
      double ores = 0.0;
      int ma = poly::vanishing_order_at(Rdef, ta, 1e-6, &ores);
      if (ma == 0) {
        bad = true;  // frame failed to expose the anchor's vanishing
        break;
      }
      Rdef = poly::deflate_at(Rdef, ta, ma);
      out.points.push_back({a, ma, ores});
      anchor_total += ma;
      anchor_ts.push_back(ta);
    }
    if (bad) continue;

    auto rest = roots_with_multiplicities(Rdef, cfg.tol.cluster, D - anchor_total);
    if (rest.degree_at_infinity != 0) continue;  // intersection escaped the chart

    // fiber matching + polish
    for (const auto& root : rest.roots) {
      Complex t = root.value;
      bool collides = false;
      for (auto& ta : anchor_ts)
        if (std::abs(t - ta) < 1e-4 * (1.0 + std::abs(t))) collides = true;
      if (collides) {
        bad = true;
        break;
      }
      auto fm = fiber_match(s1, s2, d1, d2, t, cfg.tol.cluster);
      if (fm.status != FiberMatch::kOk) {
        bad = true;  // no surface point over t, or two distinct ones
        break;
      }
      auto [by, bz] = newton2(C1r, C2r, t, fm.z);
      Eigen::Vector3cd loc;
      loc << Complex(1.0), by, bz;
      ProjectivePoint amb = ProjectivePoint::of((U * loc).eval());
      double res = std::max(normalized_residual(C1, amb.coords()),
                            normalized_residual(C2, amb.coords()));
      out.points.push_back({amb, root.multiplicity, res});
    }
    if (bad) continue;
    if (out.total_degree() != D) continue;
    return out;
  }
  throw SolverError("plane intersection: no admissible frame found");
}

IntersectionDivisor plane_curve_intersection_reduced(const HomogeneousForm<Complex>& C1in,
                                                     const HomogeneousForm<Complex>& C2in,
                                                     const std::vector<ProjectivePoint>& excess,
                                                     const RunConfig& cfg) {
  if (C1in.nvars() != 3 || C2in.nvars() != 3)
    throw PreconditionError("plane intersection: 3 variables required");
  if (C1in.is_zero() || C2in.is_zero() || C1in.degree() < 1 || C2in.degree() < 1)
    throw PreconditionError("plane intersection: curves must be nonzero of positive degree");
  const int d1 = C1in.degree();
  const int d2 = C2in.degree();
  const int D = d1 * d2;
  const int E = static_cast<int>(excess.size());
  const int Dq = D - E;
  if (Dq < 0) throw PreconditionError("plane intersection: more excess points than Bezout");
  const HomogeneousForm<Complex> C1 = scaled(C1in);
  const HomogeneousForm<Complex> C2 = scaled(C2in);
  for (const auto& a : excess) {
    if (normalized_residual(C1, a.coords()) > 1e-6 || normalized_residual(C2, a.coords()) > 1e-6)
      throw PreconditionError("plane intersection: excess point not on both curves");
  }

  int zero_frames = 0;
  for (int attempt = 0; attempt < 6; ++attempt) {
    Rng rng(subseed(cfg.seed, "pcr" + std::to_string(attempt)));
    Eigen::MatrixXcd U = geom::random_unitary(3, rng);
    auto C1r = scaled(C1.compose_linear(geom::nested(U)));
    auto C2r = scaled(C2.compose_linear(geom::nested(U)));
    std::vector<Complex> center = {Complex(0), Complex(0), Complex(1)};
    if (std::abs(C1r.eval(center)) < 1e-3 || std::abs(C2r.eval(center)) < 1e-3)
      continue;  // projection center too close to a curve

    // excess chart positions; division needs them clear of the sample nodes
    std::vector<Complex> tas;
    bool bad = false;
    for (const auto& a : excess) {
      Eigen::Vector3cd u = U.adjoint() * a.x;
      double pn = std::sqrt(std::norm(u[0]) + std::norm(u[1]));
      if (pn < 0.05 * u.norm() || std::abs(u[0]) < 0.25 * pn) {
        bad = true;
        break;
      }
      Complex ta = u[1] / u[0];
      for (int s = 0; s <= D; ++s) {
        Complex node = std::polar(1.0, 2.0 * M_PI * s / (D + 1));
        if (std::abs(node - ta) < 0.02) {
          bad = true;  // division would blow up interpolation noise
          break;
        }
      }
      if (bad) break;
      tas.push_back(ta);
    }
    if (bad) continue;

    auto s1 = var_slices(C1r, 2);
    auto s2 = var_slices(C2r, 2);
    double had_max = 0.0;
    auto Q = interpolate_on_unit_circle(
        [&](Complex t) {
          std::vector<Complex> point = {Complex(1.0), t};
          std::vector<Complex> f(d1 + 1), g(d2 + 1);
          for (int k = 0; k <= d1; ++k) f[k] = s1[k].eval(point);
          for (int k = 0; k <= d2; ++k) g[k] = s2[k].eval(point);
          double h = 0.0;
          Complex det = sylv_det(f, d1, g, d2, &h);
          had_max = std::max(had_max, h);
          Complex div(1.0);
          for (const auto& ta : tas) div *= (t - ta);
          return det / div;
        },
        D);
    if (had_max < 1e-10) {
      if (++zero_frames >= 2) throw PreconditionError("plane intersection: common component");
      continue;
    }
    Q = rescaled(Q);

    // the quotient must be an honest degree-Dq polynomial: its top E
    // coefficients vanish iff the divided factors were really in the resultant
    double top = 0.0;
    for (int k = Dq + 1; k <= D; ++k) top = std::max(top, std::abs(Q.coeff(k)));
    if (top > 1e-5) continue;
    std::vector<Complex> qc;
    for (int k = 0; k <= Dq; ++k) qc.push_back(Q.coeff(k));
    UnivariatePoly<Complex> Rq(std::move(qc));

    auto rest = roots_with_multiplicities(Rq, cfg.tol.cluster, Dq);
    if (rest.degree_at_infinity != 0) continue;  // intersection escaped the chart

    IntersectionDivisor out;
    for (const auto& root : rest.roots) {
      Complex t = root.value;
      for (const auto& ta : tas)
        if (std::abs(t - ta) < 1e-4 * (1.0 + std::abs(t))) bad = true;
      if (bad) break;  // a kept root collides with a divided-out point
      auto fm = fiber_match(s1, s2, d1, d2, t, cfg.tol.cluster);
      if (fm.status != FiberMatch::kOk) {
        bad = true;
        break;
      }
      auto [by, bz] = newton2(C1r, C2r, t, fm.z);
      Eigen::Vector3cd loc;
      loc << Complex(1.0), by, bz;
      ProjectivePoint amb = ProjectivePoint::of((U * loc).eval());
      double res = std::max(normalized_residual(C1, amb.coords()),
                            normalized_residual(C2, amb.coords()));
      out.points.push_back({amb, root.multiplicity, res});
    }
    if (bad) continue;
    if (out.total_degree() != Dq) continue;
    return out;
  }
  throw SolverError("plane intersection: no admissible frame found");
}

// ===== first projection fiber ==============================================

TFiberResult t_fiber_first(const surf::SurfaceModel& X, const ProjectivePoint& p,
                           const RunConfig& cfg) {
  if (X.kind != surf::ModelKind::CI23P4)
    throw PreconditionError("t_fiber_first: (2,3) complete intersection required");
  auto smooth = surf::is_smooth_at(X, p, cfg.tol);
  if (!smooth.smooth) throw PreconditionError("t_fiber_first: singular point");

  LinearSubspace T = surf::tangent_space(X, p, cfg.tol);
  geom::SubspaceFrame fr = geom::anchored_frame(T, p);
  auto A_p = fr.restrict_form(X.forms[0]);
  auto B_p = fr.restrict_form(X.forms[1]);
  if (A_p.max_abs_coeff() < 1e-10 * X.forms[0].max_abs_coeff())
    throw PreconditionError("t_fiber_first: tangent plane inside the quadric");
  if (B_p.max_abs_coeff() < 1e-10 * X.forms[1].max_abs_coeff())
    throw PreconditionError("t_fiber_first: tangent plane inside the cubic");
  A_p = scaled(A_p);
  B_p = scaled(B_p);

  TFiberResult out;

  // p = (1,0,0) locally; both restrictions must be singular there.  The
  // tangent cone of the conic is its (u1,u2)-quadratic slice, the cone of
  // the cubic sits one u0-power higher.
  auto coneA = slice_var0(A_p, 0);
  auto coneB = slice_var0(B_p, 1);
  auto disc = [](const HomogeneousForm<Complex>& q) {
    Complex a = q.coeff({2, 0}), b = q.coeff({1, 1}), c = q.coeff({0, 2});
    double scale = std::max({std::abs(a), std::abs(b), std::abs(c)});
    if (scale == 0.0) return 0.0;
    return std::abs(b * b - 4.0 * a * c) / (scale * scale);
  };
  out.conic_nodal = disc(coneA) > 1e-8;
  out.cubic_nodal = disc(coneB) > 1e-8;

  ProjectivePoint p_loc;
  p_loc.x.resize(3);
  p_loc.x << Complex(1), Complex(0), Complex(0);
  IntersectionDivisor local = plane_curve_intersection(A_p, B_p, cfg, {p_loc});

  // push every local point to the ambient surface
  int mp = 0;
  std::vector<geom::WeightedPoint> residual_pts;
  for (size_t i = 0; i < local.points.size(); ++i) {
    const auto& wp = local.points[i];
    ProjectivePoint amb = (i == 0) ? p : fr.push(wp.pt.coords());
    double res = std::max(wp.residual, surf::defining_residual(X, amb));
    out.divisor.points.push_back({amb, wp.multiplicity, res});
    if (i == 0)
      mp = wp.multiplicity;
    else
      residual_pts.push_back(out.divisor.points.back());
  }

  if (!out.conic_nodal) {
    out.degenerate = "conic non-nodal at p";
    return out;
  }
  if (!out.cubic_nodal) {
    out.degenerate = "cubic non-nodal at p";
    return out;
  }
  if (mp != 4) {
    out.degenerate = "contact order " + std::to_string(mp) + " at p (want 4)";
    return out;
  }
  if (residual_pts.size() != 2 || residual_pts[0].multiplicity != 1 ||
      residual_pts[1].multiplicity != 1) {
    out.degenerate = "residual intersection is not two simple points";
    return out;
  }
  auto spanpqr = geom::span({p, residual_pts[0].pt, residual_pts[1].pt}, cfg.tol.rank);
  if (spanpqr.proj_dim() < 2) {
    out.degenerate = "p, q, r collinear";
    return out;
  }

  ContactTriple tr;
  tr.p = p;
  tr.q = residual_pts[0].pt;
  tr.r = residual_pts[1].pt;
  if (lex_less(tr.r, tr.q)) std::swap(tr.q, tr.r);
  tr.plane = T;
  tr.divisor = out.divisor;
  for (const auto& wp : out.divisor.points) tr.residual = std::max(tr.residual, wp.residual);
  out.triple = tr;
  return out;
}

// ===== second projection fiber =============================================

// q in T_pX means grad A(p).q = 0 and grad B(p).q = 0.  For the quadric the
// polar pairing is symmetric, so grad A(p).q = grad A(q).p: both q- and
// r-tangency give a LINEAR condition on p.  The two linear forms cut a plane
// H' in P^4 containing every solution, and X meets H' in six points -- a
// plain (2,3) plane intersection.  (Eliminating with only the q-side system
// {A, B, Lq, Pq} is numerically fatal: q itself is a zero of local
// multiplicity ~8 there, by the Euler relations.)
std::vector<ContactTriple> t_fiber_second_search(const surf::SurfaceModel& X,
                                                 const ProjectivePoint& q,
                                                 const ProjectivePoint& r, int budget,
                                                 const RunConfig& cfg) {
  if (X.kind != surf::ModelKind::CI23P4)
    throw PreconditionError("t_fiber_second_search: (2,3) complete intersection required");
  if (surf::defining_residual(X, q) > 1e-6 || surf::defining_residual(X, r) > 1e-6)
    throw PreconditionError("t_fiber_second_search: q, r must lie on the surface");
  if (geom::projectively_equal(q, r, 1e-8))
    throw PreconditionError("t_fiber_second_search: q = r");

  const auto& A = X.forms[0];
  const auto& B = X.forms[1];
  auto directional = [](const HomogeneousForm<Complex>& f, const ProjectivePoint& v) {
    HomogeneousForm<Complex> out(f.nvars(), f.degree() - 1);
    for (int i = 0; i < f.nvars(); ++i) out = out + f.derivative(i) * v.x[i];
    return out;
  };
  auto Lq = directional(A, q);  // linear in p
  auto Pq = directional(B, q);  // quadric in p
  auto Lr = directional(A, r);
  auto Pr = directional(B, r);
  if (Lq.is_zero() || Pq.is_zero() || Lr.is_zero() || Pr.is_zero()) return {};

  Eigen::MatrixXcd lrows(2, 5);
  for (int i = 0; i < 5; ++i) {
    Exponents e(5, 0);
    e[i] = 1;
    lrows(0, i) = Lq.coeff(e);
    lrows(1, i) = Lr.coeff(e);
  }
  auto H = geom::subspace_from_forms(lrows, cfg.tol.rank);
  if (H.degenerate || H.proj_dim() != 2) return {};  // parallel polar forms
  auto frH = geom::plane_coordinates(H);
  auto A2 = frH.restrict_form(A);
  auto B2 = frH.restrict_form(B);
  if (A2.max_abs_coeff() < 1e-10 * A.max_abs_coeff() ||
      B2.max_abs_coeff() < 1e-10 * B.max_abs_coeff())
    return {};  // polar plane inside the quadric or the cubic
  auto shadow = plane_curve_intersection(scaled(A2), scaled(B2), cfg);

  std::vector<const HomogeneousForm<Complex>*> sys = {&A, &B, &Lq, &Pq, &Lr, &Pr};
  std::vector<ContactTriple> found;
  int polished = 0;
  for (const auto& wp : shadow.points) {
    if (polished >= budget) break;
    ++polished;
    ProjectivePoint p = frH.push(wp.pt.coords());

    // least-squares Newton on all six scaled conditions, pivot pinned
    int pivot = 0;
    for (int i = 0; i < 5; ++i)
      if (p.x[i] == Complex(1.0, 0.0)) pivot = i;
    for (int it = 0; it < 12; ++it) {
      auto pc = p.coords();
      Eigen::VectorXcd vals(6);
      Eigen::MatrixXcd J(6, 4);
      for (int e = 0; e < 6; ++e) {
        vals[e] = sys[e]->eval(pc) / sys[e]->norm1();
        int col = 0;
        for (int i = 0; i < 5; ++i) {
          if (i == pivot) continue;
          J(e, col++) = sys[e]->derivative(i).eval(pc) / sys[e]->norm1();
        }
      }
      if (vals.norm() < 1e-14) break;
      Eigen::VectorXcd step = J.colPivHouseholderQr().solve(-vals);
      if (!step.allFinite()) break;
      int col = 0;
      for (int i = 0; i < 5; ++i) {
        if (i == pivot) continue;
        p.x[i] += step[col++];
      }
    }
    p = ProjectivePoint::of(p.x);

    if (surf::defining_residual(X, p) > 1e-8) continue;
    if (normalized_residual(Lq, p.coords()) > 1e-8) continue;
    if (normalized_residual(Pq, p.coords()) > 1e-8) continue;
    if (normalized_residual(Lr, p.coords()) > 1e-8) continue;
    if (normalized_residual(Pr, p.coords()) > 1e-8) continue;
    bool dup = false;
    for (const auto& t : found)
      if (geom::projectively_equal(t.p, p, 1e-6)) dup = true;
    if (dup) continue;

    TFiberResult cert;
    try {
      cert = t_fiber_first(X, p, cfg);
    } catch (const PreconditionError&) {
      continue;
    } catch (const SolverError&) {
      continue;
    }
    if (!cert.triple) continue;
    auto& tr = *cert.triple;
    bool direct =
        geom::projectively_equal(tr.q, q, 1e-6) && geom::projectively_equal(tr.r, r, 1e-6);
    bool swapped =
        geom::projectively_equal(tr.q, r, 1e-6) && geom::projectively_equal(tr.r, q, 1e-6);
    if (!direct && !swapped) continue;
    if (swapped) std::swap(tr.q, tr.r);
    found.push_back(tr);
  }
  std::sort(found.begin(), found.end(),
            [](const ContactTriple& a, const ContactTriple& b) { return lex_less(a.p, b.p); });
  return found;
}

}  // namespace k3::corrt
