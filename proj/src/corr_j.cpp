// Line-contact correspondence on a quartic surface: tangent-cone fiber over
// the first factor, catalecticant elimination fiber over the second, blowup
// intersection numbers, curve pushforward.

#include "k3corr/corr_j.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace k3::corrj {

using geom::IntersectionDivisor;
using geom::SubspaceFrame;
using poly::restrict_binary;
using poly::slice_var0;
using poly::UnivariatePoly;

namespace {

HomogeneousForm<Complex> scaled(const HomogeneousForm<Complex>& f) {
  double m = f.max_abs_coeff();
  if (m == 0.0) return f;
  return f * Complex(1.0 / m);
}

bool lex_less(const ProjectivePoint& a, const ProjectivePoint& b) {
  for (int i = 0; i < a.n() && i < b.n(); ++i) {
    if (a.x[i].real() != b.x[i].real()) return a.x[i].real() < b.x[i].real();
    if (a.x[i].imag() != b.x[i].imag()) return a.x[i].imag() < b.x[i].imag();
  }
  return false;
}

// ===== contact certificate =================================================

// Restrict F to the line through p and q (parameter 0 at p, 1 at q) and
// demand the divisor 3*[0] + [1]: binary coefficients 0..2 vanish, the
// cubic one does not, and the re-clustered root divisor confirms a triple
// at 0 plus a simple root at 1.  Nothing from the producing solver is
// trusted; this is the only admission gate for a ContactPair.
std::optional<ContactPair> certify_pair(const HomogeneousForm<Complex>& F,
                                        const ProjectivePoint& p, const ProjectivePoint& q,
                                        const RunConfig& cfg, double* residual = nullptr) {
  std::vector<Complex> base = p.coords();
  std::vector<Complex> dir(base.size());
  double sigma = 0.0;
  for (int i = 0; i < p.n(); ++i) {
    dir[i] = q.x[i] - p.x[i];
    sigma = std::max(sigma, std::abs(dir[i]));
  }
  if (sigma == 0.0) return std::nullopt;  // q collides with p exactly
  // Certify in the max-normalized direction: when q sits close to p the raw
  // q - p parametrization collapses the coefficient scale like |q - p|^4
  // and rounding noise swamps the triple root.  Roots live at {0 x3, sigma};
  // dividing the values by sigma restores the contract's {0 x3, 1} chart.
  for (auto& c : dir) c /= sigma;
  auto rb = restrict_binary(F, base, dir);
  double sc = 0.0;
  for (const auto& c : rb) sc = std::max(sc, std::abs(c));
  if (sc == 0.0) return std::nullopt;  // the whole line lies on the surface
  double res = std::max({std::abs(rb[0]), std::abs(rb[1]), std::abs(rb[2])}) / sc;
  if (residual) *residual = res;
  if (res > cfg.tol.cert) return std::nullopt;
  if (std::abs(rb[3]) / sc <= cfg.tol.cert) return std::nullopt;  // q falls into p

  auto div = poly::roots_with_multiplicities(UnivariatePoly<Complex>(rb), cfg.tol.cluster, 4);
  if (div.degree_at_infinity != 0 || div.roots.size() != 2) return std::nullopt;
  int i0 = std::abs(div.roots[0].value) <= std::abs(div.roots[1].value) ? 0 : 1;
  auto& triple = div.roots[i0];
  auto& simple = div.roots[1 - i0];
  // a triple root scatters like noise^(1/3); 2e-3 sits above the rescue cap
  if (triple.multiplicity != 3 || std::abs(triple.value) > 2e-3) return std::nullopt;
  if (simple.multiplicity != 1 || std::abs(simple.value - sigma) > 1e-4 * std::max(1.0, sigma))
    return std::nullopt;
  triple.value /= sigma;
  simple.value /= sigma;

  ContactPair out;
  out.p = p;
  out.q = q;
  out.line = geom::span({p, q}, cfg.tol.rank);
  out.divisor = std::move(div);
  out.certificate_residual = res;
  return out;
}

}  // namespace

// ===== fiber over the first factor =========================================

JFiberFirstResult j_fiber_first(const surf::SurfaceModel& X, const ProjectivePoint& p,
                                const RunConfig& cfg) {
  if (X.kind != surf::ModelKind::QuarticP3)
    throw PreconditionError("j_fiber_first: quartic surface required");
  auto smooth = surf::is_smooth_at(X, p, cfg.tol);
  if (!smooth.smooth) throw PreconditionError("j_fiber_first: singular or off-surface point");
  const auto F = scaled(X.forms[0]);

  LinearSubspace T = surf::tangent_space(X, p, cfg.tol);
  SubspaceFrame fr = geom::anchored_frame(T, p);
  auto Fp = scaled(fr.restrict_form(F));
  // p = (1,0,0) locally; membership and tangency force the u0^4 and u0^3
  // slices down to noise, leaving the tangent cone as the u0^2 slice.
  if (slice_var0(Fp, 4).max_abs_coeff() > 1e-8 || slice_var0(Fp, 3).max_abs_coeff() > 1e-8)
    throw SolverError("j_fiber_first: tangent restriction inconsistent");

  JFiberFirstResult out;
  out.cone.quadratic_part = slice_var0(Fp, 2);
  Complex a = out.cone.quadratic_part.coeff({2, 0});
  Complex b = out.cone.quadratic_part.coeff({1, 1});
  Complex c = out.cone.quadratic_part.coeff({0, 2});
  double s2 = std::max({std::abs(a), std::abs(b), std::abs(c)});
  if (s2 <= 1e-8) {  // quadratic slice gone too: worse than a cusp
    out.cone.node_type = NodeType::higher;
    return out;
  }

  Complex disc = b * b - 4.0 * a * c;
  bool cusp = std::abs(disc) <= cfg.tol.cert * s2 * s2;
  out.cone.node_type = cusp ? NodeType::cusp : NodeType::node;

  // stable factorization of a u1^2 + b u1 u2 + c u2^2: pivot on the larger
  // end coefficient, take the larger quadratic root first, divide for the
  // other.  Rows multiply back to the quadratic part up to 1/pivot.
  Complex sq = std::sqrt(disc);
  if (std::abs(-b + sq) < std::abs(-b - sq)) sq = -sq;
  if (std::abs(a) >= std::abs(c)) {
    Complex l1 = (-b + sq) / (2.0 * a);  // roots of a t^2 + b t + c, t = u2-slope
    Complex l2 = cusp ? l1 : c / (a * l1);
    out.cone.factor_lines = {{Complex(1), -l1}, {Complex(1), -l2}};
  } else {
    Complex m1 = (-b + sq) / (2.0 * c);  // roots of c t^2 + b t + a, t = u1/u2
    Complex m2 = cusp ? m1 : a / (c * m1);
    out.cone.factor_lines = {{-m1, Complex(1)}, {-m2, Complex(1)}};
  }

  int nlines = cusp ? 1 : 2;  // the cusp's two factor rows are one line
  for (int li = 0; li < nlines; ++li) {
    const auto& row = out.cone.factor_lines[li];
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(3);
    v[1] = row[1];  // alpha u1 + beta u2 = 0 along (u1, u2) = (beta, -alpha)
    v[2] = -row[0];
    ProjectivePoint dpt = ProjectivePoint::of(Eigen::VectorXcd(fr.map * v));
    auto rb = restrict_binary(F, p.coords(), dpt.coords());
    double sc = 0.0;
    for (const auto& cc : rb) sc = std::max(sc, std::abs(cc));
    if (sc <= cfg.tol.cert)
      throw LineOnSurfaceError("j_fiber_first: tangent cone line lies on the surface");
    if (std::abs(rb[3]) / sc <= 1e-6) continue;  // contact 4: q falls into p, no pair
    ProjectivePoint q = std::abs(rb[4]) / sc <= 1e-8
                            ? dpt  // restriction is cubic: 4th point at the direction
                            : ProjectivePoint::of(Eigen::VectorXcd(p.x - rb[3] / rb[4] * dpt.x));
    auto pair = certify_pair(F, p, q, cfg);
    if (!pair) throw SolverError("j_fiber_first: contact certificate failed");
    out.pairs.push_back(std::move(*pair));
  }
  std::sort(out.pairs.begin(), out.pairs.end(),
            [](const ContactPair& u, const ContactPair& w) { return lex_less(u.q, w.q); });
  return out;
}

// ===== fiber over the second factor ========================================

JFiberSecondResult j_fiber_second(const surf::SurfaceModel& X, const ProjectivePoint& q,
                                  const RunConfig& cfg) {
  if (X.kind != surf::ModelKind::QuarticP3)
    throw PreconditionError("j_fiber_second: quartic surface required");
  auto smooth = surf::is_smooth_at(X, q, cfg.tol);
  if (!smooth.smooth) throw PreconditionError("j_fiber_second: singular or off-surface point");
  const auto F = scaled(X.forms[0]);

  // Lines through q are parametrized by directions d in the coordinate
  // plane missing q's pivot; expand F(q + t d) = t (a1 + a2 t + a3 t^2 +
  // a4 t^3) with deg a_k = k in d.
  int pivot = 0;
  for (int i = 1; i < 4; ++i)
    if (std::abs(q.x[i]) > std::abs(q.x[pivot])) pivot = i;
  std::vector<std::vector<Complex>> M(4, std::vector<Complex>(4, Complex(0)));
  for (int i = 0; i < 4; ++i) M[i][0] = q.x[i];
  int col = 1;
  for (int i = 0; i < 4; ++i) {
    if (i == pivot) continue;
    M[i][col++] = Complex(1);
  }
  auto G = F.compose_linear(M);
  if (slice_var0(G, 4).max_abs_coeff() > 1e-8 * G.max_abs_coeff())
    throw SolverError("j_fiber_second: expansion at q inconsistent");
  auto A1 = slice_var0(G, 3);
  auto A2 = slice_var0(G, 2);
  auto A3 = slice_var0(G, 1);
  auto A4 = slice_var0(G, 0);
  if (A1.is_zero() || A2.is_zero() || A3.is_zero() || A4.is_zero())
    throw SolverError("j_fiber_second: degenerate expansion at q");

  // Triple contact away from q <=> the cubic factor has a triple root
  // tau = -a3/(3 a4) <=> the catalecticant [[3a4, a3, a2], [a3, a2, 3a1]]
  // drops to rank 1.  Two minors cut that locus; their Bezout excess is
  // exactly V(a2, a3) (rank 0 there, no triple root): six simple points,
  // located first and divided out of the main resultant at its nodes.
  auto g1 = scaled(A2 * A4 * Complex(3) - A3 * A3);  // deg 6
  auto g3 = scaled(A1 * A3 * Complex(3) - A2 * A2);  // deg 4
  IntersectionDivisor main;
  try {
    IntersectionDivisor ex = corrt::plane_curve_intersection(scaled(A2), scaled(A3), cfg);
    std::vector<ProjectivePoint> expts;
    for (const auto& w : ex.points)
      for (int k = 0; k < w.multiplicity; ++k) expts.push_back(w.pt);
    main = corrt::plane_curve_intersection_reduced(g1, g3, expts, cfg);
  } catch (const PreconditionError& e) {
    throw SolverError(std::string("j_fiber_second: elimination degenerated: ") + e.what());
  }

  JFiberSecondResult out;
  std::vector<int> mult;
  for (const auto& w : main.points) {
    auto dv = w.pt.coords();
    double rej = 1.0;  // sentinel when tau is not even defined
    Complex t4 = A4.eval(dv);
    if (std::abs(t4) > 1e-10) {
      Complex tau = -A3.eval(dv) / (3.0 * t4);
      if (std::abs(tau) > 1e-8) {
        Eigen::VectorXcd damb = Eigen::VectorXcd::Zero(4);
        int cc = 0;
        for (int r = 0; r < 4; ++r) {
          if (r == pivot) continue;
          damb[r] = dv[cc++];
        }
        ProjectivePoint p = ProjectivePoint::of(Eigen::VectorXcd(q.x + tau * damb));
        if (auto pair = certify_pair(F, p, q, cfg, &rej)) {
          out.pairs.push_back(std::move(*pair));
          mult.push_back(w.multiplicity);
          continue;
        }
      }
    }
    out.rejected += 1;
    out.rejected_residuals.push_back(rej);
  }

  std::vector<size_t> idx(out.pairs.size());
  std::iota(idx.begin(), idx.end(), size_t{0});
  std::sort(idx.begin(), idx.end(),
            [&](size_t i, size_t j) { return lex_less(out.pairs[i].p, out.pairs[j].p); });
  std::vector<ContactPair> sorted;
  sorted.reserve(idx.size());
  for (size_t i : idx) {
    sorted.push_back(std::move(out.pairs[i]));
    out.multiplicities.push_back(mult[i]);
    out.certified_degree += mult[i];
  }
  out.pairs = std::move(sorted);
  return out;
}

// ===== blowup arithmetic ===================================================

long long blowup_intersection(std::pair<long long, long long> c1,
                              std::pair<long long, long long> c2, long long H_squared) {
  // (a H' + b E).(a' H' + b' E) with H'.E = 0, E^2 = -1
  return c1.first * c2.first * H_squared - c1.second * c2.second;
}

// ===== curve pushforward ===================================================

JPushResult j_push_curve(const surf::SurfaceModel& X,
                         const std::vector<ProjectivePoint>& curve_samples, int M,
                         const std::vector<HomogeneousForm<Complex>>& curve_forms,
                         const RunConfig& cfg) {
  if (X.kind != surf::ModelKind::QuarticP3)
    throw PreconditionError("j_push_curve: quartic surface required");
  if (M < 1 || M > static_cast<int>(curve_samples.size()))
    throw PreconditionError("j_push_curve: sample budget out of range");

  JPushResult out;
  for (int i = 0; i < M; ++i) {
    try {
      auto fib = j_fiber_first(X, curve_samples[i], cfg);
      for (const auto& pr : fib.pairs) out.images.push_back(pr.q);
    } catch (const std::runtime_error&) {  // fiber errors skip the sample
      ++out.skipped;
    }
  }

  // least-degree fit: raise the degree until the evaluation matrix still
  // has enough rows to force a kernel and the kernel is nontrivial
  std::vector<std::vector<Complex>> cloud;
  cloud.reserve(out.images.size());
  for (const auto& img : out.images) cloud.push_back(img.coords());
  for (int d = 1; d <= 12 && !cloud.empty(); ++d) {
    auto fit = poly::interpolate_vanishing_form(cloud, 4, d, cfg.tol.rank);
    if (fit.underdetermined) break;  // cloud too small: a kernel would be vacuous
    if (fit.form && fit.nullity >= 1) {
      out.fitted_form = fit.form;
      out.fitted_degree = d;
      break;
    }
  }

  if (!curve_forms.empty() && !out.images.empty()) {
    bool on = true;
    for (const auto& img : out.images)
      for (const auto& cf : curve_forms)
        if (poly::normalized_residual(cf, img.coords()) > cfg.tol.cert) on = false;
    out.same_curve = on;
  }
  return out;
}

}  // namespace k3::corrj
