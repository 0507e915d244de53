#include "k3corr/roots.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <numeric>

namespace k3::poly {

namespace {

constexpr double kLeadingTrim = 1e-12;  // relative: treat leading coeffs below this as degree drop

// Multiplicity-adaptive rescue radius: eigenvalues of an m-fold root scatter
// like noise^(1/m), far beyond eps_cluster for m >= 3.  Tuned for coefficient
// noise around 1e-12 relative.
double rescue_radius(int m) {
  if (m <= 1) return 0.0;
  return std::min(std::pow(1e-11, 1.0 / m), 1.5e-3);
}

struct Cluster {
  std::vector<Complex> members;
  Complex centroid{0.0, 0.0};

  void recompute() {
    Complex s(0.0, 0.0);
    for (auto& z : members) s += z;
    centroid = s / static_cast<double>(members.size());
  }
  double radius() const {
    double r = 0.0;
    for (auto& z : members) r = std::max(r, std::abs(z - centroid));
    return r;
  }
};

std::vector<Complex> companion_eigenvalues(const std::vector<Complex>& c) {
  const int d = static_cast<int>(c.size()) - 1;
  Eigen::MatrixXcd A = Eigen::MatrixXcd::Zero(d, d);
  for (int i = 1; i < d; ++i) A(i, i - 1) = 1.0;
  for (int i = 0; i < d; ++i) A(i, d - 1) = -c[i] / c[d];
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(A, false);
  if (es.info() != Eigen::Success) throw SolverError("eigenvalue iteration failed");
  std::vector<Complex> out(d);
  for (int i = 0; i < d; ++i) out[i] = es.eigenvalues()(i);
  return out;
}

double root_scale(const UnivariatePoly<Complex>& p, const Complex& z) {
  return p.norm_inf() * std::pow(std::max(1.0, std::abs(z)), std::max(0, p.degree()));
}

}  // namespace

std::vector<Complex> taylor_at(const UnivariatePoly<Complex>& p, Complex t0) {
  std::vector<Complex> b = p.coeffs();
  const int d = static_cast<int>(b.size()) - 1;
  for (int j = 0; j < d; ++j)
    for (int k = d - 1; k >= j; --k) b[k] += t0 * b[k + 1];
  return b;
}

int vanishing_order_at(const UnivariatePoly<Complex>& p, Complex t0, double eps, double* residual) {
  if (p.is_zero()) throw PreconditionError("vanishing order of the zero polynomial");
  std::vector<Complex> b = taylor_at(p, t0);
  double scale = 0.0;
  for (auto& x : b) scale = std::max(scale, std::abs(x));
  int m = 0;
  double worst = 0.0;
  while (m < static_cast<int>(b.size()) && std::abs(b[m]) <= eps * scale) {
    worst = std::max(worst, std::abs(b[m]) / scale);
    ++m;
  }
  if (residual) *residual = worst;
  return m;
}

UnivariatePoly<Complex> deflate_at(const UnivariatePoly<Complex>& p, Complex t0, int order) {
  std::vector<Complex> b = taylor_at(p, t0);
  if (order >= static_cast<int>(b.size())) return UnivariatePoly<Complex>();
  std::vector<Complex> r(b.begin() + order, b.end());
  // r holds coefficients in the (t - t0) basis; shift back
  UnivariatePoly<Complex> shifted{std::vector<Complex>(r)};
  std::vector<Complex> out = taylor_at(shifted, -t0);
  return UnivariatePoly<Complex>(std::move(out));
}

Complex newton_polish(const UnivariatePoly<Complex>& p, Complex z, int iters, int mult) {
  UnivariatePoly<Complex> dp = p.derivative();
  Complex best = z;
  double best_res = std::abs(p.eval(z));
  for (int i = 0; i < iters; ++i) {
    Complex f = p.eval(z);
    Complex fp = dp.eval(z);
    if (std::abs(fp) < 1e-300) break;
    z -= static_cast<double>(mult) * f / fp;
    double res = std::abs(p.eval(z));
    if (res < best_res) {
      best_res = res;
      best = z;
    }
  }
  return best;
}

RootDivisor roots_with_multiplicities(const UnivariatePoly<Complex>& p, double eps_cluster,
                                      int formal_degree) {
  if (p.is_zero()) throw PreconditionError("root extraction on the zero polynomial");
  RootDivisor div;

  // relative trim of tiny leading coefficients -> roots at infinity
  std::vector<Complex> c = p.coeffs();
  double scale = p.norm_inf();
  while (c.size() > 1 && std::abs(c.back()) <= kLeadingTrim * scale) {
    c.pop_back();
    ++div.degree_at_infinity;
  }
  if (formal_degree >= 0) div.degree_at_infinity += formal_degree - p.degree();
  const int d = static_cast<int>(c.size()) - 1;
  if (d < 1) return div;

  UnivariatePoly<Complex> q{std::vector<Complex>(c)};
  std::vector<Complex> roots;
  if (d == 1) {
    roots.push_back(-c[0] / c[1]);
  } else {
    roots = companion_eigenvalues(c);
    for (auto& z : roots) z = newton_polish(q, z, 4);
  }
  std::sort(roots.begin(), roots.end(), [](const Complex& a, const Complex& b) {
    if (a.real() != b.real()) return a.real() < b.real();
    return a.imag() < b.imag();
  });

  // base clustering at eps_cluster (union-find over pairs)
  const int n = static_cast<int>(roots.size());
  std::vector<int> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  };
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      double s = std::max({1.0, std::abs(roots[i]), std::abs(roots[j])});
      if (std::abs(roots[i] - roots[j]) <= eps_cluster * s) parent[find(i)] = find(j);
    }
  std::map<int, Cluster> by_rep;
  for (int i = 0; i < n; ++i) by_rep[find(i)].members.push_back(roots[i]);
  std::vector<Cluster> clusters;
  for (auto& [rep, cl] : by_rep) {
    cl.recompute();
    clusters.push_back(std::move(cl));
  }

  // multiplicity rescue: an m-fold root scatters into m nearby singletons, so
  // pairwise merging is not enough.  Around every cluster, gather the whole
  // neighborhood, try growing unions by distance, and merge the largest union
  // that is tight for its size and isolated from everything else.
  bool merged = true;
  while (merged && clusters.size() > 1) {
    merged = false;
    double best_quality = 1e300;
    std::vector<size_t> best_union;
    for (size_t i = 0; i < clusters.size(); ++i) {
      double s_i = std::max(1.0, std::abs(clusters[i].centroid));
      std::vector<size_t> nb;
      for (size_t j = 0; j < clusters.size(); ++j)
        if (std::abs(clusters[j].centroid - clusters[i].centroid) <= 1.5e-3 * s_i)
          nb.push_back(j);
      if (nb.size() < 2) continue;
      std::sort(nb.begin(), nb.end(), [&](size_t a, size_t b) {
        return std::abs(clusters[a].centroid - clusters[i].centroid) <
               std::abs(clusters[b].centroid - clusters[i].centroid);
      });
      for (size_t take = nb.size(); take >= 2; --take) {
        Cluster u;
        for (size_t t = 0; t < take; ++t)
          u.members.insert(u.members.end(), clusters[nb[t]].members.begin(),
                           clusters[nb[t]].members.end());
        u.recompute();
        double rho = u.radius();
        int m = static_cast<int>(u.members.size());
        double s = std::max(1.0, std::abs(u.centroid));
        double rad = std::max(eps_cluster, rescue_radius(m)) * s;
        if (rho > rad) continue;
        double iso = 1e300;
        for (size_t k = 0; k < clusters.size(); ++k) {
          if (std::find(nb.begin(), nb.begin() + take, k) != nb.begin() + take) continue;
          for (auto& z : clusters[k].members) iso = std::min(iso, std::abs(z - u.centroid));
        }
        if (iso < 4.0 * std::max(rho, eps_cluster * s)) continue;
        double quality = rho / rad - m;  // prefer bigger, tighter unions
        if (quality < best_quality) {
          best_quality = quality;
          best_union.assign(nb.begin(), nb.begin() + take);
        }
        break;  // largest feasible union around i found
      }
    }
    if (!best_union.empty()) {
      std::sort(best_union.begin(), best_union.end());
      Cluster u;
      for (size_t idx : best_union)
        u.members.insert(u.members.end(), clusters[idx].members.begin(),
                         clusters[idx].members.end());
      u.recompute();
      for (auto it = best_union.rbegin(); it != best_union.rend(); ++it)
        clusters.erase(clusters.begin() + static_cast<long>(*it));
      clusters.push_back(std::move(u));
      merged = true;
    }
  }

  for (auto& cl : clusters) {
    int m = static_cast<int>(cl.members.size());
    Complex z = newton_polish(q, cl.centroid, 6, m);
    RootEntry e;
    e.value = z;
    e.multiplicity = m;
    e.residual = std::abs(q.eval(z)) / root_scale(q, z);
    div.roots.push_back(e);
  }
  std::sort(div.roots.begin(), div.roots.end(), [](const RootEntry& a, const RootEntry& b) {
    if (a.value.real() != b.value.real()) return a.value.real() < b.value.real();
    return a.value.imag() < b.value.imag();
  });
  return div;
}

namespace {

// best rational approximation with bounded denominator via continued fractions
std::optional<Rational> rational_reconstruct(double x, long long max_den) {
  if (!std::isfinite(x)) return std::nullopt;
  long long p0 = 0, q0 = 1, p1 = 1, q1 = 0;
  double v = x;
  for (int it = 0; it < 64; ++it) {
    double fl = std::floor(v);
    if (fl > 9e17 || fl < -9e17) return std::nullopt;
    long long a = static_cast<long long>(fl);
    long long p2 = a * p1 + p0, q2 = a * q1 + q0;
    if (q2 > max_den) break;
    p0 = p1;
    q0 = q1;
    p1 = p2;
    q1 = q2;
    double frac = v - fl;
    if (frac < 1e-14) break;
    v = 1.0 / frac;
  }
  if (q1 == 0) return std::nullopt;
  Rational r(p1);
  r /= q1;
  if (std::fabs(static_cast<double>(r) - x) > 1e-9 * std::max(1.0, std::fabs(x)))
    return std::nullopt;
  return r;
}

}  // namespace

RootDivisor roots_with_multiplicities(const UnivariatePoly<Rational>& p, double eps_cluster,
                                      int formal_degree) {
  if (p.is_zero()) throw PreconditionError("root extraction on the zero polynomial");
  RootDivisor div;
  if (formal_degree >= 0) div.degree_at_infinity = formal_degree - p.degree();
  if (p.degree() < 1) return div;

  auto factors = squarefree_decomposition(p);
  for (size_t fi = 0; fi < factors.size(); ++fi) {
    const auto& f = factors[fi];
    if (f.degree() < 1) continue;
    const int mult = static_cast<int>(fi) + 1;
    // complex roots of the square-free factor, then try exact reconstruction
    std::vector<Complex> cc;
    for (int k = 0; k <= f.degree(); ++k) cc.push_back(to_complex(f.coeff(k)));
    UnivariatePoly<Complex> fc(std::move(cc));
    RootDivisor sub = roots_with_multiplicities(fc, eps_cluster);
    for (auto& r : sub.roots) {
      RootEntry e;
      e.multiplicity = mult * r.multiplicity;
      e.value = r.value;
      e.residual = r.residual;
      if (std::abs(r.value.imag()) <= 1e-9 * std::max(1.0, std::abs(r.value))) {
        if (auto cand = rational_reconstruct(r.value.real(), 1000000)) {
          if (is_exact_zero(f.eval(*cand))) {
            e.value = Complex(static_cast<double>(*cand), 0.0);
            e.residual = 0.0;
            e.exact = true;
          }
        }
      }
      div.roots.push_back(e);
    }
  }
  std::sort(div.roots.begin(), div.roots.end(), [](const RootEntry& a, const RootEntry& b) {
    if (a.value.real() != b.value.real()) return a.value.real() < b.value.real();
    return a.value.imag() < b.value.imag();
  });
  return div;
}

UnivariatePoly<Complex> interpolate_on_unit_circle(const std::function<Complex(Complex)>& g,
                                                   int degree) {
  const int m = degree + 1;
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
  return UnivariatePoly<Complex>(std::vector<Complex>(c.data(), c.data() + m));
}

}  // namespace k3::poly
