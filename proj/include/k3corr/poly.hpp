#pragma once
// Homogeneous forms with exact-rational or complex-double coefficients,
// univariate polynomials, line restriction, Sylvester resultants and
// vanishing-form interpolation.

#include "k3corr/scalar.hpp"

#include <algorithm>
#include <map>
#include <optional>
#include <vector>

namespace k3::poly {

using Exponents = std::vector<int>;

// All exponent tuples of n variables summing to d, lexicographic.
std::vector<Exponents> monomials(int nvars, int deg);

// ===== HomogeneousForm =====================================================

template <class K>
class HomogeneousForm {
 public:
  HomogeneousForm() = default;
  HomogeneousForm(int nvars, int deg) : nvars_(nvars), deg_(deg) {
    if (nvars < 1 || deg < 0) throw std::invalid_argument("bad form shape");
  }

  int nvars() const { return nvars_; }
  int degree() const { return deg_; }
  bool is_zero() const { return terms_.empty(); }
  const std::map<Exponents, K>& terms() const { return terms_; }

  static HomogeneousForm monomial(int nvars, Exponents e, K c) {
    int d = 0;
    for (int x : e) d += x;
    HomogeneousForm f(nvars, d);
    f.add_term(std::move(e), std::move(c));
    return f;
  }

  void add_term(Exponents e, K c) {
    if (static_cast<int>(e.size()) != nvars_) throw std::invalid_argument("exponent arity");
    int s = 0;
    for (int x : e) {
      if (x < 0) throw std::invalid_argument("negative exponent");
      s += x;
    }
    if (s != deg_) throw std::invalid_argument("exponent tuple does not sum to degree");
    auto it = terms_.find(e);
    if (it == terms_.end()) {
      if (!is_exact_zero(c)) terms_.emplace(std::move(e), std::move(c));
    } else {
      it->second += c;
      if (is_exact_zero(it->second)) terms_.erase(it);
    }
  }

  K coeff(const Exponents& e) const {
    auto it = terms_.find(e);
    return it == terms_.end() ? K(0) : it->second;
  }

  template <class V>
  V eval(const std::vector<V>& x) const {
    if (static_cast<int>(x.size()) != nvars_) throw std::invalid_argument("eval arity");
    V acc(0);
    for (const auto& [e, c] : terms_) {
      V t(c);
      for (int i = 0; i < nvars_; ++i)
        for (int k = 0; k < e[i]; ++k) t *= x[i];
      acc += t;
    }
    return acc;
  }

  HomogeneousForm operator+(const HomogeneousForm& o) const {
    if (is_zero()) return o;
    if (o.is_zero()) return *this;
    if (nvars_ != o.nvars_ || deg_ != o.deg_)
      throw std::logic_error("form addition shape mismatch");
    HomogeneousForm r = *this;
    for (const auto& [e, c] : o.terms_) r.add_term(e, c);
    return r;
  }

  HomogeneousForm operator-(const HomogeneousForm& o) const { return *this + (o * K(-1)); }

  HomogeneousForm operator*(const K& s) const {
    HomogeneousForm r(nvars_, deg_);
    if (is_exact_zero(s)) return r;
    for (const auto& [e, c] : terms_) r.add_term(e, c * s);
    return r;
  }

  HomogeneousForm operator*(const HomogeneousForm& o) const {
    if (is_zero() || o.is_zero())  // zero forms may carry a default shape
      return HomogeneousForm(std::max({nvars_, o.nvars_, 1}), std::max(deg_ + o.deg_, 0));
    if (nvars_ != o.nvars_) throw std::logic_error("form product arity mismatch");
    HomogeneousForm r(nvars_, deg_ + o.deg_);
    for (const auto& [e1, c1] : terms_)
      for (const auto& [e2, c2] : o.terms_) {
        Exponents e(nvars_);
        for (int i = 0; i < nvars_; ++i) e[i] = e1[i] + e2[i];
        r.add_term(std::move(e), c1 * c2);
      }
    return r;
  }

  HomogeneousForm derivative(int var) const {
    if (deg_ == 0) return HomogeneousForm(nvars_, 0);
    HomogeneousForm r(nvars_, deg_ - 1);
    for (const auto& [e, c] : terms_) {
      if (e[var] == 0) continue;
      Exponents d = e;
      d[var] -= 1;
      r.add_term(std::move(d), c * K(e[var]));
    }
    return r;
  }

  // Substitute x_i = sum_j M[i][j] u_j; M has nvars rows, each of length m.
  HomogeneousForm compose_linear(const std::vector<std::vector<K>>& M) const {
    if (static_cast<int>(M.size()) != nvars_) throw std::invalid_argument("compose rows");
    int m = M.empty() ? 0 : static_cast<int>(M[0].size());
    std::vector<HomogeneousForm> lin(nvars_, HomogeneousForm(m, 1));
    for (int i = 0; i < nvars_; ++i) {
      if (static_cast<int>(M[i].size()) != m) throw std::invalid_argument("compose cols");
      for (int j = 0; j < m; ++j) {
        Exponents e(m, 0);
        e[j] = 1;
        lin[i].add_term(std::move(e), M[i][j]);
      }
    }
    // cache powers of each substituted variable
    std::vector<std::vector<HomogeneousForm>> pw(nvars_);
    for (int i = 0; i < nvars_; ++i) {
      pw[i].push_back(constant_one(m));
      pw[i].push_back(lin[i]);
    }
    HomogeneousForm acc(m, deg_);
    for (const auto& [e, c] : terms_) {
      HomogeneousForm t = constant_one(m) * c;
      for (int i = 0; i < nvars_; ++i) {
        while (static_cast<int>(pw[i].size()) <= e[i]) pw[i].push_back(pw[i].back() * lin[i]);
        if (e[i] > 0) t = t * pw[i][e[i]];
      }
      acc = acc + t;
    }
    return acc;
  }

  double max_abs_coeff() const {
    double m = 0.0;
    for (const auto& [e, c] : terms_) m = std::max(m, abs_val(c));
    return m;
  }

  double norm1() const {
    double s = 0.0;
    for (const auto& [e, c] : terms_) s += abs_val(c);
    return s;
  }

  HomogeneousForm<Complex> complexified() const {
    HomogeneousForm<Complex> r(nvars_, deg_);
    for (const auto& [e, c] : terms_) r.add_term(e, to_complex(c));
    return r;
  }

 private:
  static HomogeneousForm constant_one(int m) {
    HomogeneousForm f(m, 0);
    f.add_term(Exponents(m, 0), K(1));
    return f;
  }

  int nvars_ = 0;
  int deg_ = 0;
  std::map<Exponents, K> terms_;
};

// Fix the exponent of variable 0 to `a` and drop it: the coefficient slice,
// a form of degree deg-a in the remaining variables.
template <class K>
HomogeneousForm<K> slice_var0(const HomogeneousForm<K>& f, int a) {
  HomogeneousForm<K> r(f.nvars() - 1, f.degree() - a);
  for (const auto& [e, c] : f.terms()) {
    if (e[0] != a) continue;
    Exponents d(e.begin() + 1, e.end());
    r.add_term(std::move(d), c);
  }
  return r;
}

template <class K>
HomogeneousForm<K> random_form(int nvars, int deg, Rng& rng, int height = 100) {
  HomogeneousForm<K> f(nvars, deg);
  for (auto& e : monomials(nvars, deg)) {
    if constexpr (scalar_traits<K>::exact)
      f.add_term(e, rng.rational(height));
    else
      f.add_term(e, rng.cgauss());
  }
  return f;
}

// ===== UnivariatePoly ======================================================

template <class K>
class UnivariatePoly {
 public:
  UnivariatePoly() = default;
  explicit UnivariatePoly(std::vector<K> coeffs) : c_(std::move(coeffs)) { trim(); }

  // zero polynomial has degree -1
  int degree() const { return static_cast<int>(c_.size()) - 1; }
  bool is_zero() const { return c_.empty(); }
  const std::vector<K>& coeffs() const { return c_; }
  K coeff(int k) const { return k >= 0 && k < static_cast<int>(c_.size()) ? c_[k] : K(0); }

  template <class V>
  V eval(const V& t) const {
    V acc(0);
    for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * t + V(*it);
    return acc;
  }

  UnivariatePoly derivative() const {
    if (c_.size() <= 1) return UnivariatePoly();
    std::vector<K> d(c_.size() - 1);
    for (size_t k = 1; k < c_.size(); ++k) d[k - 1] = c_[k] * K(static_cast<int>(k));
    return UnivariatePoly(std::move(d));
  }

  UnivariatePoly operator+(const UnivariatePoly& o) const {
    std::vector<K> r(std::max(c_.size(), o.c_.size()), K(0));
    for (size_t i = 0; i < c_.size(); ++i) r[i] += c_[i];
    for (size_t i = 0; i < o.c_.size(); ++i) r[i] += o.c_[i];
    return UnivariatePoly(std::move(r));
  }

  UnivariatePoly operator*(const K& s) const {
    std::vector<K> r = c_;
    for (auto& x : r) x *= s;
    return UnivariatePoly(std::move(r));
  }

  UnivariatePoly operator-(const UnivariatePoly& o) const { return *this + o * K(-1); }

  UnivariatePoly operator*(const UnivariatePoly& o) const {
    if (is_zero() || o.is_zero()) return UnivariatePoly();
    std::vector<K> r(c_.size() + o.c_.size() - 1, K(0));
    for (size_t i = 0; i < c_.size(); ++i)
      for (size_t j = 0; j < o.c_.size(); ++j) r[i + j] += c_[i] * o.c_[j];
    return UnivariatePoly(std::move(r));
  }

  double norm_inf() const {
    double m = 0.0;
    for (const auto& x : c_) m = std::max(m, abs_val(x));
    return m;
  }

 private:
  void trim() {
    while (!c_.empty() && is_exact_zero(c_.back())) c_.pop_back();
  }
  std::vector<K> c_;
};

// ===== line restriction ====================================================

// Coefficients of F(s*base + t*dir) as a binary form: entry k multiplies
// s^(d-k) t^k.  Nothing is trimmed; contact certificates read the raw array.
template <class K>
std::vector<K> restrict_binary(const HomogeneousForm<K>& F, const std::vector<K>& base,
                               const std::vector<K>& dir) {
  int n = F.nvars();
  if (static_cast<int>(base.size()) != n || static_cast<int>(dir.size()) != n)
    throw std::invalid_argument("restrict_binary arity");
  std::vector<std::vector<K>> M(n, std::vector<K>(2));
  for (int i = 0; i < n; ++i) {
    M[i][0] = base[i];
    M[i][1] = dir[i];
  }
  HomogeneousForm<K> b = F.compose_linear(M);
  std::vector<K> out(F.degree() + 1, K(0));
  for (const auto& [e, c] : b.terms()) out[e[1]] = c;
  return out;
}

// F(base + t*dir) as a univariate polynomial.  Exact zero leading
// coefficients are trimmed; the caller recovers the drop as
// degree_at_infinity by comparing against the ambient degree.
template <class K>
UnivariatePoly<K> restrict_to_line(const HomogeneousForm<K>& F, const std::vector<K>& base,
                                   const std::vector<K>& dir) {
  return UnivariatePoly<K>(restrict_binary(F, base, dir));
}

// ===== resultant ===========================================================

// Resultant of two polynomials in an eliminated variable whose coefficients
// are forms in the remaining ones (entry k of each vector multiplies t^k).
// Sylvester determinant expanded by minors; exact over rationals, stable in
// float because no division happens.  Leading zero-form coefficients are
// trimmed first (degree bookkeeping for degenerate drops).
template <class K>
HomogeneousForm<K> resultant(std::vector<HomogeneousForm<K>> f, std::vector<HomogeneousForm<K>> g);

// Scalar-coefficient convenience overload.
template <class K>
K resultant_scalar(const UnivariatePoly<K>& f, const UnivariatePoly<K>& g);

// ===== interpolation =======================================================

struct InterpolationResult {
  std::optional<HomogeneousForm<Complex>> form;
  bool underdetermined = false;  // fewer points than conditions for uniqueness
  int nullity = 0;
  double gap = 0.0;  // sigma_min / sigma_max of the scaled evaluation matrix
};

// Least-degree-fixed fit: the form of the given degree vanishing on all
// points, found as a numerical null vector of the monomial evaluation matrix.
InterpolationResult interpolate_vanishing_form(const std::vector<std::vector<Complex>>& points,
                                               int nvars, int degree, double eps_rank);

// |F(p)| scaled by the form's coefficient norm; p is renormalized to max
// coordinate magnitude 1 so the answer is scale-invariant on both sides.
double normalized_residual(const HomogeneousForm<Complex>& F, std::vector<Complex> p);

// ===== exact univariate utilities ==========================================

UnivariatePoly<Rational> gcd_exact(UnivariatePoly<Rational> a, UnivariatePoly<Rational> b);
// Yun square-free decomposition: returns factors f_i with f = prod f_i^i.
std::vector<UnivariatePoly<Rational>> squarefree_decomposition(const UnivariatePoly<Rational>& f);

}  // namespace k3::poly
