#include "k3corr/surfaces.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <functional>

namespace k3::surf {

using poly::restrict_binary;
using poly::restrict_to_line;
using poly::roots_with_multiplicities;

// ===== model construction ==================================================

static void require_shape(const HomogeneousForm<Complex>& f, int nv, int d, const char* what) {
  if (f.nvars() != nv || f.degree() != d)
    throw PreconditionError(std::string("surface form shape: ") + what);
  if (f.is_zero()) throw PreconditionError(std::string("surface form zero: ") + what);
}

SurfaceModel SurfaceModel::quartic(HomogeneousForm<Complex> F) {
  require_shape(F, 4, 4, "quartic");
  return SurfaceModel{ModelKind::QuarticP3, {std::move(F)}, {}};
}

SurfaceModel SurfaceModel::ci23(HomogeneousForm<Complex> A, HomogeneousForm<Complex> B) {
  require_shape(A, 5, 2, "ci quadric");
  require_shape(B, 5, 3, "ci cubic");
  return SurfaceModel{ModelKind::CI23P4, {std::move(A), std::move(B)}, {}};
}

SurfaceModel SurfaceModel::double_sextic(HomogeneousForm<Complex> f6) {
  require_shape(f6, 3, 6, "sextic");
  return SurfaceModel{ModelKind::DoubleSextic, {std::move(f6)}, {}};
}

int SurfaceModel::ambient_vars() const {
  switch (kind) {
    case ModelKind::QuarticP3: return 4;
    case ModelKind::CI23P4: return 5;
    case ModelKind::DoubleSextic: return 3;
  }
  return 0;
}

int SurfaceModel::point_coords() const {
  return kind == ModelKind::CI23P4 ? 5 : 4;
}

SurfaceModel random_surface(ModelKind kind, std::uint64_t seed, int height) {
  Rng rng(subseed(seed, "surface"));
  auto draw = [&](int nv, int d) {
    auto f = poly::random_form<Rational>(nv, d, rng, height);
    if (f.is_zero()) throw SolverError("random surface: zero draw");
    return f;
  };
  SurfaceModel X;
  X.kind = kind;
  switch (kind) {
    case ModelKind::QuarticP3: X.exact_forms = {draw(4, 4)}; break;
    case ModelKind::CI23P4: X.exact_forms = {draw(5, 2), draw(5, 3)}; break;
    case ModelKind::DoubleSextic: X.exact_forms = {draw(3, 6)}; break;
  }
  for (auto& f : X.exact_forms) X.forms.push_back(f.complexified());
  return X;
}

// ===== residuals ===========================================================

std::vector<Complex> weighted_normalize(std::vector<Complex> xyzw) {
  if (xyzw.size() != 4) throw PreconditionError("weighted point needs 4 slots");
  double mx = 0.0;
  int arg = -1;
  for (int i = 0; i < 3; ++i)
    if (std::abs(xyzw[i]) > mx) {
      mx = std::abs(xyzw[i]);
      arg = i;
    }
  if (arg < 0 || mx == 0.0) throw PreconditionError("weighted point: zero base");
  Complex lam = xyzw[arg];
  for (int i = 0; i < 3; ++i) xyzw[i] /= lam;
  xyzw[arg] = Complex(1.0, 0.0);
  xyzw[3] /= lam * lam * lam;  // w has weight 3
  return xyzw;
}

double defining_residual(const SurfaceModel& X, const ProjectivePoint& p) {
  if (X.kind == ModelKind::DoubleSextic) {
    std::vector<Complex> c = p.coords();
    if (c.size() == 3) c.push_back(Complex(0.0));  // base point: claims w = 0
    c = weighted_normalize(std::move(c));
    std::vector<Complex> base(c.begin(), c.begin() + 3);
    double n = X.forms[0].norm1();
    return std::abs(c[3] * c[3] - X.forms[0].eval(base)) / (n > 0 ? n : 1.0);
  }
  double worst = 0.0;
  for (const auto& f : X.forms)
    worst = std::max(worst, poly::normalized_residual(f, p.coords()));
  return worst;
}

// ===== smoothness & tangent space ==========================================

static Eigen::MatrixXcd scaled_jacobian(const SurfaceModel& X, const ProjectivePoint& p) {
  if (X.kind == ModelKind::DoubleSextic) {
    std::vector<Complex> c = p.coords();
    if (c.size() == 3) c.push_back(Complex(0.0));
    c = weighted_normalize(std::move(c));
    std::vector<Complex> base(c.begin(), c.begin() + 3);
    const auto& f6 = X.forms[0];
    double n = f6.norm1();
    Eigen::MatrixXcd J(1, 4);
    for (int i = 0; i < 3; ++i) J(0, i) = -f6.derivative(i).eval(base) / n;
    J(0, 3) = 2.0 * c[3] / n;  // d(w^2 - f6)/dw
    return J;
  }
  const int n = X.ambient_vars();
  Eigen::MatrixXcd J(static_cast<int>(X.forms.size()), n);
  auto c = p.coords();
  for (size_t r = 0; r < X.forms.size(); ++r) {
    double s = X.forms[r].norm1();
    for (int i = 0; i < n; ++i) J(static_cast<int>(r), i) = X.forms[r].derivative(i).eval(c) / s;
  }
  return J;
}

SmoothnessReport is_smooth_at(const SurfaceModel& X, const ProjectivePoint& p,
                              const Tolerances& tol) {
  SmoothnessReport rep;
  rep.on_surface = defining_residual(X, p);
  if (rep.on_surface > 1e-6) throw PreconditionError("is_smooth_at: point not on surface");
  Eigen::MatrixXcd J = scaled_jacobian(X, p);
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(J);
  rep.sigma_min = svd.singularValues()[svd.singularValues().size() - 1];
  rep.smooth = rep.sigma_min > tol.rank;
  return rep;
}

LinearSubspace tangent_space(const SurfaceModel& X, const ProjectivePoint& p,
                             const Tolerances& tol) {
  if (X.kind == ModelKind::DoubleSextic)
    throw PreconditionError("tangent_space: cover model unsupported");
  auto rep = is_smooth_at(X, p, tol);
  if (!rep.smooth) throw PreconditionError("tangent_space: singular point");
  return geom::subspace_from_forms(scaled_jacobian(X, p), tol.rank);
}

// ===== sampling ============================================================

ProjectivePoint quartic_line_sample(const HomogeneousForm<Complex>& F,
                                    const std::vector<Complex>& base,
                                    const std::vector<Complex>& dir, int root_index) {
  auto q = restrict_to_line(F, base, dir);
  if (q.degree() < 1) throw SolverError("line sample: restriction degenerate");
  auto div = roots_with_multiplicities(q, 1e-6);
  if (div.roots.empty()) throw SolverError("line sample: no finite roots");
  root_index %= static_cast<int>(div.roots.size());
  Complex t = div.roots[root_index].value;
  std::vector<Complex> c(base.size());
  for (size_t i = 0; i < base.size(); ++i) c[i] = base[i] + t * dir[i];
  return ProjectivePoint::of(c);
}

static std::vector<Complex> random_cvec(Rng& rng, int n) {
  std::vector<Complex> v(n);
  for (auto& z : v) z = rng.cgauss();
  return v;
}

// Interpolate a univariate polynomial of degree <= n from its values at the
// (n+1)-st roots of unity.
static poly::UnivariatePoly<Complex> fit_univariate(const std::function<Complex(Complex)>& g,
                                                    int n) {
  const int m = n + 1;
  const double tau = 6.283185307179586476925286766559;
  Eigen::MatrixXcd V(m, m);
  Eigen::VectorXcd rhs(m);
  for (int j = 0; j < m; ++j) {
    Complex t = std::polar(1.0, tau * j / m);
    Complex pw(1.0);
    for (int k = 0; k < m; ++k) {
      V(j, k) = pw;
      pw *= t;
    }
    rhs[j] = g(t);
  }
  Eigen::VectorXcd c = V.colPivHouseholderQr().solve(rhs);
  return poly::UnivariatePoly<Complex>(std::vector<Complex>(c.data(), c.data() + m));
}

static ProjectivePoint sample_quartic(const SurfaceModel& X, Rng& rng) {
  for (int attempt = 0; attempt < 40; ++attempt) {
    auto base = random_cvec(rng, 4);
    auto dir = random_cvec(rng, 4);
    ProjectivePoint p;
    try {
      p = quartic_line_sample(X.forms[0], base, dir, 0);
    } catch (const SolverError&) {
      continue;
    }
    if (defining_residual(X, p) < 1e-9) return p;
  }
  throw SolverError("quartic sampler: retries exhausted");
}

// Plane section of the quadric is a conic; parametrize it rationally from a
// point c0 on it (second intersection of the pencil of lines through c0),
// then restrict the cubic to the parametrization and solve the degree-6
// univariate.
static ProjectivePoint sample_ci23(const SurfaceModel& X, Rng& rng) {
  const auto& A = X.forms[0];
  const auto& B = X.forms[1];
  for (int attempt = 0; attempt < 60; ++attempt) {
    // random plane frame P^2 -> P^4
    std::vector<std::vector<Complex>> M(5, std::vector<Complex>(3));
    for (auto& row : M)
      for (auto& z : row) z = rng.cgauss();
    auto A_loc = A.compose_linear(M);
    auto B_loc = B.compose_linear(M);
    if (A_loc.is_zero() || B_loc.is_zero()) continue;

    // a point on the conic
    auto base0 = random_cvec(rng, 3);
    auto dir0 = random_cvec(rng, 3);
    auto q = restrict_to_line(A_loc, base0, dir0);
    if (q.degree() < 1) continue;
    auto qroots = roots_with_multiplicities(q, 1e-6);
    if (qroots.roots.empty()) continue;
    Complex t0 = qroots.roots[0].value;
    std::vector<Complex> c0(3);
    for (int i = 0; i < 3; ++i) c0[i] = base0[i] + t0 * dir0[i];

    std::vector<Complex> grad(3);
    double gn = 0.0;
    for (int i = 0; i < 3; ++i) {
      grad[i] = A_loc.derivative(i).eval(c0);
      gn += std::norm(grad[i]);
    }
    if (std::sqrt(gn) < 1e-8 * A_loc.max_abs_coeff()) continue;  // c0 singular on conic

    // pencil directions e(l,m) = l*e1 + m*e2; second intersection point
    // P(l,m) = A_loc(e)*c0 - (grad.e)*e, a vector of binary quadrics
    auto e1 = random_cvec(rng, 3);
    auto e2 = random_cvec(rng, 3);
    std::vector<std::vector<Complex>> E(3, std::vector<Complex>(2));
    for (int i = 0; i < 3; ++i) {
      E[i][0] = e1[i];
      E[i][1] = e2[i];
    }
    auto Qe = A_loc.compose_linear(E);  // binary quadric
    HomogeneousForm<Complex> Le(2, 1);
    Le.add_term({1, 0}, grad[0] * e1[0] + grad[1] * e1[1] + grad[2] * e1[2]);
    Le.add_term({0, 1}, grad[0] * e2[0] + grad[1] * e2[1] + grad[2] * e2[2]);
    std::vector<HomogeneousForm<Complex>> P;
    for (int i = 0; i < 3; ++i) {
      HomogeneousForm<Complex> Ei(2, 1);
      Ei.add_term({1, 0}, e1[i]);
      Ei.add_term({0, 1}, e2[i]);
      P.push_back(Qe * c0[i] + (Le * Ei) * Complex(-1.0));
    }

    // cubic restricted to the parametrized conic: degree-6 univariate in m
    auto g = fit_univariate(
        [&](Complex t) {
          std::vector<Complex> u(3);
          for (int i = 0; i < 3; ++i) u[i] = P[i].eval(std::vector<Complex>{Complex(1.0), t});
          return B_loc.eval(u);
        },
        6);
    if (g.norm_inf() < 1e-10 * B_loc.max_abs_coeff()) continue;  // conic inside the cubic section
    auto groots = roots_with_multiplicities(g, 1e-6);
    if (groots.roots.empty()) continue;
    Complex m0 = groots.roots[0].value;

    std::vector<Complex> u(3);
    for (int i = 0; i < 3; ++i) u[i] = P[i].eval(std::vector<Complex>{Complex(1.0), m0});
    std::vector<Complex> amb(5, Complex(0.0));
    for (int r = 0; r < 5; ++r)
      for (int i = 0; i < 3; ++i) amb[r] += M[r][i] * u[i];
    ProjectivePoint p;
    try {
      p = ProjectivePoint::of(amb);
    } catch (const PreconditionError&) {
      continue;
    }
    if (defining_residual(X, p) < 1e-9) return p;
  }
  throw SolverError("ci23 sampler: retries exhausted");
}

static ProjectivePoint sample_double_sextic(const SurfaceModel& X, Rng& rng) {
  auto base = random_cvec(rng, 3);
  ProjectivePoint b = ProjectivePoint::of(base);
  Complex w = std::sqrt(X.forms[0].eval(b.coords()));
  ProjectivePoint p;
  p.x.resize(4);
  for (int i = 0; i < 3; ++i) p.x[i] = b.x[i];
  p.x[3] = w;
  return p;
}

ProjectivePoint sample_point(const SurfaceModel& X, std::uint64_t seed) {
  Rng rng(subseed(seed, "sample"));
  switch (X.kind) {
    case ModelKind::QuarticP3: return sample_quartic(X, rng);
    case ModelKind::CI23P4: return sample_ci23(X, rng);
    case ModelKind::DoubleSextic: return sample_double_sextic(X, rng);
  }
  throw PreconditionError("sample_point: unknown model");
}

// ===== line witness search =================================================

// Lines in the chart spanned by (1,0,a,b), (0,1,c,d) after a random unitary
// change of coordinates; Gauss-Newton on the 5 coefficients of the restricted
// binary quartic.
std::optional<LineWitness> line_on_surface_witness(const SurfaceModel& X, int trials,
                                                   std::uint64_t seed, const Tolerances& tol) {
  if (X.kind != ModelKind::QuarticP3)
    throw PreconditionError("line witness: quartic model only");
  const auto& F = X.forms[0];
  Rng rng(subseed(seed, "linewit"));

  for (int trial = 0; trial < trials; ++trial) {
    // fresh unitary rotation: lines invisible to one chart land in another
    Eigen::MatrixXcd Graw(4, 4);
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) Graw(i, j) = rng.cgauss();
    Eigen::MatrixXcd U = Eigen::HouseholderQR<Eigen::MatrixXcd>(Graw).householderQ();
    std::vector<std::vector<Complex>> Ucols(4, std::vector<Complex>(4));
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) Ucols[i][j] = U(i, j);
    auto G = F.compose_linear(Ucols);
    auto G2 = G.derivative(2);
    auto G3 = G.derivative(3);
    const double scale = G.max_abs_coeff();

    Eigen::Vector4cd z;
    for (int i = 0; i < 4; ++i) z[i] = rng.cgauss();

    auto line_pts = [&](const Eigen::Vector4cd& v) {
      std::vector<Complex> p1 = {Complex(1), Complex(0), v[0], v[1]};
      std::vector<Complex> p2 = {Complex(0), Complex(1), v[2], v[3]};
      return std::pair(p1, p2);
    };

    bool converged = false;
    for (int it = 0; it < 80; ++it) {
      auto [p1, p2] = line_pts(z);
      auto r = restrict_binary(G, p1, p2);  // 5 coefficients
      double rn = 0.0;
      for (auto& c : r) rn = std::max(rn, std::abs(c));
      if (rn <= 1e-12 * scale) {
        converged = true;
        break;
      }
      auto d2 = restrict_binary(G2, p1, p2);  // 4 coefficients (cubic)
      auto d3 = restrict_binary(G3, p1, p2);
      Eigen::MatrixXcd J(5, 4);
      J.setZero();
      for (int k = 0; k < 4; ++k) {
        J(k, 0) = d2[k];      // d/da: s * G_2 restriction
        J(k, 1) = d3[k];      // d/db
        J(k + 1, 2) = d2[k];  // d/dc: t * G_2 restriction
        J(k + 1, 3) = d3[k];  // d/dd
      }
      Eigen::VectorXcd rv(5);
      for (int k = 0; k < 5; ++k) rv[k] = r[k];
      Eigen::Vector4cd step = J.colPivHouseholderQr().solve(-rv);
      if (!step.allFinite()) break;
      z += step;
      if (z.norm() > 1e8) break;  // running away: no line near this start
    }
    if (!converged) continue;

    // certify against the original form in original coordinates
    auto [p1, p2] = line_pts(z);
    Eigen::Vector4cd a_amb = U * Eigen::Map<Eigen::Vector4cd>(p1.data());
    Eigen::Vector4cd b_amb = U * Eigen::Map<Eigen::Vector4cd>(p2.data());
    ProjectivePoint pa = ProjectivePoint::of(a_amb.eval());
    ProjectivePoint pb = ProjectivePoint::of(b_amb.eval());
    auto rb = restrict_binary(F, pa.coords(), pb.coords());
    double rn = 0.0;
    for (auto& c : rb) rn = std::max(rn, std::abs(c));
    rn /= F.norm1();
    if (rn > tol.cert) continue;

    LineWitness w;
    w.line = geom::span({pa, pb}, tol.rank);
    if (w.line.proj_dim() != 1) continue;
    w.a = pa;
    w.b = pb;
    w.restriction_norm = rn;
    return w;
  }
  return std::nullopt;
}

// ===== numerology ==========================================================

int genus_of_polarization(int L_squared) {
  if (L_squared < 2 || L_squared % 2 != 0)
    throw PreconditionError("genus: L^2 must be even and positive");
  return L_squared / 2 + 1;
}

}  // namespace k3::surf
