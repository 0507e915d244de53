#pragma once
// Univariate root extraction with multiplicities, plus the anchored
// order-of-vanishing primitives that contact certificates are built on.

#include "k3corr/poly.hpp"

#include <functional>

namespace k3::poly {

struct RootEntry {
  Complex value;
  int multiplicity = 1;
  double residual = 0.0;  // |p(value)| relative to coefficient scale
  bool exact = false;     // recovered and verified as an exact rational root
};

struct RootDivisor {
  std::vector<RootEntry> roots;
  int degree_at_infinity = 0;  // formal degree minus observed degree

  int total_degree() const {
    int s = degree_at_infinity;
    for (const auto& r : roots) s += r.multiplicity;
    return s;
  }
};

// Roots of a complex polynomial via companion-matrix eigenvalues, Newton
// polish and clustering.  Clusters merge within eps_cluster (relative); on
// top of that genuine multiple roots are rescued with a multiplicity-adaptive
// radius, since an m-fold root scatters eigenvalues ~eps^(1/m).
// formal_degree, when >= 0, adds (formal_degree - degree) to the divisor's
// degree_at_infinity (restriction callers know the ambient degree).
RootDivisor roots_with_multiplicities(const UnivariatePoly<Complex>& p, double eps_cluster,
                                      int formal_degree = -1);

// Exact mode: multiplicities from Yun square-free decomposition; roots that
// round-trip as rationals are certified exact, the rest fall back to float.
RootDivisor roots_with_multiplicities(const UnivariatePoly<Rational>& p, double eps_cluster,
                                      int formal_degree = -1);

// Taylor coefficients of p at t0 (synthetic division shift).
std::vector<Complex> taylor_at(const UnivariatePoly<Complex>& p, Complex t0);

// Order of vanishing of p at t0 at relative tolerance eps: the largest m
// such that the first m Taylor coefficients are below eps * scale.  When
// residual is non-null it receives max_{j<m} |b_j| / scale.
int vanishing_order_at(const UnivariatePoly<Complex>& p, Complex t0, double eps,
                       double* residual = nullptr);

// Remove a root of the given order at t0: Taylor-shift, drop the (noisy)
// low coefficients, shift back.
UnivariatePoly<Complex> deflate_at(const UnivariatePoly<Complex>& p, Complex t0, int order);

// Modified Newton for a root of known multiplicity m (plain Newton at m=1).
Complex newton_polish(const UnivariatePoly<Complex>& p, Complex z, int iters = 8, int mult = 1);

// Recover a polynomial of degree <= degree from its values at the
// (degree+1)-st roots of unity (perfectly conditioned Vandermonde).
UnivariatePoly<Complex> interpolate_on_unit_circle(const std::function<Complex(Complex)>& g,
                                                   int degree);

}  // namespace k3::poly
