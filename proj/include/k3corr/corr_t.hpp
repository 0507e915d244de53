#pragma once
// The plane-contact correspondence on a (2,3) complete intersection in P^4:
// fibers over the first factor via the nodal conic/cubic plane intersection,
// plus the Bezout-complete plane curve intersection engine both
// correspondences are built on.

#include "k3corr/surfaces.hpp"

#include <optional>

namespace k3::corrt {

using geom::IntersectionDivisor;
using geom::LinearSubspace;
using geom::ProjectivePoint;
using poly::HomogeneousForm;

// Intersection of two plane curves (3 variables) with multiplicities summing
// to exactly d1*d2.  Computed by a bivariate resultant in a random unitary
// frame: values at roots of unity -> Sylvester determinants -> interpolation,
// then per-root fiber matching and a 2x2 Newton polish.
//
// `anchors` are known intersection points whose local multiplicity must be
// extracted by anchored order-of-vanishing (the only numerically safe way to
// read a high-order contact): each anchor's order is measured at its exact
// projection and the resultant is deflated there before clustering the rest.
IntersectionDivisor plane_curve_intersection(const HomogeneousForm<Complex>& C1,
                                             const HomogeneousForm<Complex>& C2,
                                             const RunConfig& cfg,
                                             const std::vector<ProjectivePoint>& anchors = {});

// Variant for intersections with known simple excess points (common zeros
// that are not wanted in the output): their linear factors are divided out
// of the resultant pointwise at the interpolation nodes — exact division,
// immune to the coefficient-noise amplification that Taylor-shift deflation
// suffers at anchors far from the unit circle — and the quotient's trimmed
// top coefficients are checked to actually vanish.  The returned divisor
// has total degree d1*d2 - excess.size() and no entries at the excess.
IntersectionDivisor plane_curve_intersection_reduced(const HomogeneousForm<Complex>& C1,
                                                     const HomogeneousForm<Complex>& C2,
                                                     const std::vector<ProjectivePoint>& excess,
                                                     const RunConfig& cfg);

struct ContactTriple {
  ProjectivePoint p, q, r;
  LinearSubspace plane;         // = T_pX
  IntersectionDivisor divisor;  // ambient points, {p:4, q:1, r:1}
  double residual = 0.0;
};

struct TFiberResult {
  std::optional<ContactTriple> triple;
  IntersectionDivisor divisor;  // ambient intersection of T_pX with X (degree 6)
  bool conic_nodal = false;     // tangent cone of A|_T at p has two distinct lines
  bool cubic_nodal = false;     // same for B|_T
  std::string degenerate;       // empty iff triple was produced
};

// Fiber of the first projection: restrict both forms to T_pX, intersect the
// (nodal) conic and cubic, certify multiplicity 4 at p, return the residual
// pair q, r.
TFiberResult t_fiber_first(const surf::SurfaceModel& X, const ProjectivePoint& p,
                           const RunConfig& cfg);

// All p with {q, r} in T_pX.  Both tangency conditions contribute a linear
// polar form (gradient symmetry of the quadric), so every solution lies in
// the plane {grad A(q).x = grad A(r).x = 0}; the candidates are the six
// points of X cut by that plane, then filtered by the cubic polar conditions
// and re-certified through t_fiber_first.  Using both linear forms matters:
// the single-sided system {A, B, Lq, Pq} has a fat zero at q itself (Euler),
// which poisons any one-sided elimination.  budget caps candidate polishing.
std::vector<ContactTriple> t_fiber_second_search(const surf::SurfaceModel& X,
                                                 const ProjectivePoint& q,
                                                 const ProjectivePoint& r, int budget,
                                                 const RunConfig& cfg);

}  // namespace k3::corrt
