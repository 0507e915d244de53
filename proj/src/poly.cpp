#include "k3corr/poly.hpp"

#include <Eigen/Dense>
#include <Eigen/SVD>

#include <unordered_map>

namespace k3::poly {

std::vector<Exponents> monomials(int nvars, int deg) {
  std::vector<Exponents> out;
  Exponents e(nvars, 0);
  e[0] = deg;
  // lexicographic successor on exponent tuples of fixed total degree
  while (true) {
    out.push_back(e);
    int i = nvars - 2;
    while (i >= 0 && e[i] == 0) --i;
    if (i < 0) break;
    e[i] -= 1;
    int rest = e[nvars - 1] + 1;
    e[nvars - 1] = 0;
    e[i + 1] = rest;
    // move everything below i+1 back up into position i+1
    for (int j = i + 2; j < nvars - 1; ++j) {
      e[i + 1] += e[j];
      e[j] = 0;
    }
  }
  return out;
}

// ===== resultant ===========================================================

namespace {

// Determinant by Laplace expansion along columns with minors memoized on the
// set of still-unused rows.  No division, so it is exact over rationals and
// benign in float.
template <class K>
HomogeneousForm<K> det_memo(const std::vector<std::vector<HomogeneousForm<K>>>& A, int nv) {
  const int N = static_cast<int>(A.size());
  if (N == 0) {
    HomogeneousForm<K> one(nv, 0);
    one.add_term(Exponents(nv, 0), K(1));
    return one;
  }
  std::unordered_map<std::uint32_t, HomogeneousForm<K>> memo;

  auto rec = [&](auto&& self, std::uint32_t rows) -> HomogeneousForm<K> {
    if (rows == 0) {
      HomogeneousForm<K> one(nv, 0);
      one.add_term(Exponents(nv, 0), K(1));
      return one;
    }
    auto it = memo.find(rows);
    if (it != memo.end()) return it->second;
    int col = N - __builtin_popcount(rows);
    HomogeneousForm<K> acc;  // zero
    int sign = 1;
    for (int r = 0; r < N; ++r) {
      if (!(rows >> r & 1)) continue;
      if (!A[r][col].is_zero()) {
        HomogeneousForm<K> sub = self(self, rows & ~(1u << r));
        HomogeneousForm<K> contrib = A[r][col] * sub;
        acc = acc + (sign > 0 ? contrib : contrib * K(-1));
      }
      sign = -sign;
    }
    memo.emplace(rows, acc);
    return acc;
  };

  return rec(rec, (1u << N) - 1);
}

template <class K>
void trim_zero_leading(std::vector<HomogeneousForm<K>>& p) {
  while (!p.empty() && p.back().is_zero()) p.pop_back();
}

}  // namespace

template <class K>
HomogeneousForm<K> resultant(std::vector<HomogeneousForm<K>> f, std::vector<HomogeneousForm<K>> g) {
  trim_zero_leading(f);
  trim_zero_leading(g);
  int nv = 0;
  for (const auto& c : f)
    if (!c.is_zero()) nv = c.nvars();
  for (const auto& c : g)
    if (!c.is_zero()) nv = c.nvars();
  if (nv == 0) nv = 1;
  HomogeneousForm<K> zero(nv, 0);
  if (f.empty() || g.empty()) return zero;  // resultant with the zero polynomial
  const int m = static_cast<int>(f.size()) - 1;
  const int n = static_cast<int>(g.size()) - 1;
  if (m == 0 && n == 0) {
    HomogeneousForm<K> one(nv, 0);
    one.add_term(Exponents(nv, 0), K(1));
    return one;
  }
  const int N = m + n;
  std::vector<std::vector<HomogeneousForm<K>>> S(N, std::vector<HomogeneousForm<K>>(N, zero));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j <= m; ++j) S[i][i + j] = f[m - j];
  for (int i = 0; i < m; ++i)
    for (int j = 0; j <= n; ++j) S[n + i][i + j] = g[n - j];
  return det_memo(S, nv);
}

template HomogeneousForm<Rational> resultant(std::vector<HomogeneousForm<Rational>>,
                                             std::vector<HomogeneousForm<Rational>>);
template HomogeneousForm<Complex> resultant(std::vector<HomogeneousForm<Complex>>,
                                            std::vector<HomogeneousForm<Complex>>);

template <class K>
K resultant_scalar(const UnivariatePoly<K>& f, const UnivariatePoly<K>& g) {
  // wrap the scalars as 1-variable constants and reuse the form machinery
  auto wrap = [](const UnivariatePoly<K>& p) {
    std::vector<HomogeneousForm<K>> v;
    for (int k = 0; k <= p.degree(); ++k) {
      HomogeneousForm<K> c(1, 0);
      c.add_term(Exponents(1, 0), p.coeff(k));
      v.push_back(c);
    }
    return v;
  };
  HomogeneousForm<K> r = resultant(wrap(f), wrap(g));
  return r.coeff(Exponents(1, 0));
}

template Rational resultant_scalar(const UnivariatePoly<Rational>&, const UnivariatePoly<Rational>&);
template Complex resultant_scalar(const UnivariatePoly<Complex>&, const UnivariatePoly<Complex>&);

// ===== interpolation =======================================================

InterpolationResult interpolate_vanishing_form(const std::vector<std::vector<Complex>>& points,
                                               int nvars, int degree, double eps_rank) {
  InterpolationResult res;
  auto mons = monomials(nvars, degree);
  const int M = static_cast<int>(mons.size());
  const int P = static_cast<int>(points.size());
  if (P == 0) {
    res.underdetermined = true;
    return res;
  }
  res.underdetermined = P < M - 1;

  Eigen::MatrixXcd A(P, M);
  for (int i = 0; i < P; ++i) {
    std::vector<Complex> x = points[i];
    if (static_cast<int>(x.size()) != nvars) throw std::invalid_argument("interpolation arity");
    double mx = 0.0;
    int arg = 0;
    for (int k = 0; k < nvars; ++k)
      if (std::abs(x[k]) > mx) {
        mx = std::abs(x[k]);
        arg = k;
      }
    if (mx == 0.0) throw PreconditionError("interpolation point is zero");
    for (auto& c : x) c /= x[arg];
    double rowmax = 0.0;
    for (int j = 0; j < M; ++j) {
      Complex v(1.0, 0.0);
      for (int k = 0; k < nvars; ++k)
        for (int t = 0; t < mons[j][k]; ++t) v *= x[k];
      A(i, j) = v;
      rowmax = std::max(rowmax, std::abs(v));
    }
    if (rowmax > 0) A.row(i) /= rowmax;
  }

  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(A, Eigen::ComputeFullV);
  const auto& s = svd.singularValues();
  double smax = s.size() ? s(0) : 0.0;
  int rank = 0;
  for (int i = 0; i < s.size(); ++i)
    if (s(i) > eps_rank * smax) ++rank;
  rank = std::min(rank, std::min(P, M));
  res.nullity = M - rank;
  res.gap = smax > 0 && s.size() == M ? s(M - 1) / smax : 0.0;
  if (res.nullity < 1) return res;  // no vanishing form at this tolerance

  Eigen::VectorXcd v = svd.matrixV().col(M - 1);
  HomogeneousForm<Complex> f(nvars, degree);
  double vmax = v.cwiseAbs().maxCoeff();
  for (int j = 0; j < M; ++j) {
    Complex c = v(j) / vmax;
    if (std::abs(c) > 0) f.add_term(mons[j], c);
  }
  res.form = std::move(f);
  return res;
}

double normalized_residual(const HomogeneousForm<Complex>& F, std::vector<Complex> p) {
  double mx = 0.0;
  int arg = 0;
  for (size_t k = 0; k < p.size(); ++k)
    if (std::abs(p[k]) > mx) {
      mx = std::abs(p[k]);
      arg = static_cast<int>(k);
    }
  if (mx == 0.0) throw PreconditionError("zero point");
  const Complex piv = p[arg];
  for (auto& c : p) c /= piv;
  double n = F.norm1();
  if (n == 0.0) return 0.0;
  return std::abs(F.eval(p)) / n;
}

// ===== exact univariate utilities ==========================================

namespace {

UnivariatePoly<Rational> monic(const UnivariatePoly<Rational>& p) {
  if (p.is_zero()) return p;
  Rational lead = p.coeff(p.degree());
  return p * (Rational(1) / lead);
}

UnivariatePoly<Rational> rem(UnivariatePoly<Rational> a, const UnivariatePoly<Rational>& b) {
  if (b.is_zero()) throw std::invalid_argument("division by zero polynomial");
  while (!a.is_zero() && a.degree() >= b.degree()) {
    Rational q = a.coeff(a.degree()) / b.coeff(b.degree());
    int shift = a.degree() - b.degree();
    std::vector<Rational> sub(shift + b.degree() + 1, Rational(0));
    for (int k = 0; k <= b.degree(); ++k) sub[k + shift] = b.coeff(k) * q;
    a = a - UnivariatePoly<Rational>(std::move(sub));
  }
  return a;
}

UnivariatePoly<Rational> divide_exact(const UnivariatePoly<Rational>& a,
                                      const UnivariatePoly<Rational>& b) {
  if (a.is_zero()) return a;
  std::vector<Rational> q(a.degree() - b.degree() + 1, Rational(0));
  UnivariatePoly<Rational> r = a;
  while (!r.is_zero() && r.degree() >= b.degree()) {
    Rational c = r.coeff(r.degree()) / b.coeff(b.degree());
    int shift = r.degree() - b.degree();
    q[shift] = c;
    std::vector<Rational> sub(shift + b.degree() + 1, Rational(0));
    for (int k = 0; k <= b.degree(); ++k) sub[k + shift] = b.coeff(k) * c;
    r = r - UnivariatePoly<Rational>(std::move(sub));
  }
  if (!r.is_zero()) throw std::logic_error("divide_exact: nonzero remainder");
  return UnivariatePoly<Rational>(std::move(q));
}

}  // namespace

UnivariatePoly<Rational> gcd_exact(UnivariatePoly<Rational> a, UnivariatePoly<Rational> b) {
  a = monic(a);
  b = monic(b);
  while (!b.is_zero()) {
    UnivariatePoly<Rational> r = monic(rem(a, b));
    a = b;
    b = r;
  }
  return monic(a);
}

std::vector<UnivariatePoly<Rational>> squarefree_decomposition(const UnivariatePoly<Rational>& f) {
  // Yun's algorithm; factors[i] collects the roots of multiplicity i+1.
  std::vector<UnivariatePoly<Rational>> out;
  if (f.degree() < 1) return out;
  UnivariatePoly<Rational> fp = f.derivative();
  UnivariatePoly<Rational> a0 = gcd_exact(f, fp);
  UnivariatePoly<Rational> b = divide_exact(f, a0);
  UnivariatePoly<Rational> c = divide_exact(fp, a0);
  UnivariatePoly<Rational> d = c - b.derivative();
  while (b.degree() > 0) {
    UnivariatePoly<Rational> ai = gcd_exact(b, d);
    out.push_back(monic(ai));
    b = divide_exact(b, ai);
    c = divide_exact(d, ai);
    d = c - b.derivative();
  }
  return out;
}

}  // namespace k3::poly
