#pragma once
// n-torsion machinery on section curves: expected-dimension ledgers, the
// Brill-Noether bound, and certified torsion pairs for n = 2, 3, 4.
// Torsion is always witnessed by an explicit rational function (a ratio of
// linear forms on the section, or a parameter shift on a double cover),
// never by Jacobian numerics: div_num - div_den = n p - n p' as formal
// sums, with both divisors extracted from restriction root structure.

#include "k3corr/corr_j.hpp"

namespace k3::torsion {

using geom::IntersectionDivisor;
using geom::LinearSubspace;
using geom::ProjectivePoint;
using poly::HomogeneousForm;

// ===== dimension arithmetic ================================================

struct DimensionLedger {
  int g = 0;
  int dim_Hn = 0;        // incidence family of (curve, p, p') with n p ~ n p'
  int dim_CxC = 0;       // pairs of points on section curves (fixed-pair
                         // pencil count in the y-variant)
  int dim_M_g2 = 0;      // moduli of 2-pointed genus-g curves
  int expected_dim = 0;  // dim_Hn + dim_CxC - dim_M_g2
};

// Ledger (2g-1, g+2, 3g-1); the expected dimension is always 2.
DimensionLedger expected_dim_zprime(int g);

// Fixed-pair variant: (2g-1, g, 3g-1); the expected dimension is always 0.
DimensionLedger expected_dim_y(int g);

struct BrillNoether {
  bool exists = false;
  int rho = 0;  // g - 2(g - n + 1)
};

// A general genus-g curve carries a g^1_n iff rho >= 0, iff g <= 2n-2.
BrillNoether bn_g1n_exists(int g, int n);

// ===== torsion certificates ================================================

struct CurveSmoothness {
  bool pass = false;
  double worst_point_gradient = 0.0;  // min relative gradient at the marked points
  double screen_min_gradient = 0.0;   // min over the sampled screen
  double min_line_disc = 0.0;  // min relative discriminant over the line screen
                               // (branch sextic for n = 2; 0 when not screened)
  int samples = 0;
};

// A certified pair (p, p') with n[p - p'] = 0 in the Jacobian of the
// section curve C.  numerator/denominator are linear forms in the section
// frame's local coordinates (parameter shifts t, t - s for n = 2) whose
// ratio has divisor div_num - div_den = n p - n p'; both divisors store
// ambient points and are verified from restriction roots, never copied
// from the inputs.
struct TorsionCertificate {
  int n = 2;
  LinearSubspace section;  // line (n=2, in the base plane), plane (n=3),
                           // hyperplane (n=4)
  std::vector<HomogeneousForm<Complex>> curve_forms;  // defining forms of C in
                                                      // section coordinates
  ProjectivePoint p, p_prime;
  HomogeneousForm<Complex> numerator, denominator;
  IntersectionDivisor div_num, div_den;
  IntersectionDivisor branch;  // n = 2 only: the six branch points of the
                               // double cover, counted with multiplicity
  CurveSmoothness smoothness;
  // n = 2: p or p' sits over a multiple branch root.  n = 4: always set --
  // the hyperplane holds both tangent planes, so the section curve is nodal
  // at p and p' by construction (the screen checks the simple points only).
  bool nodal_fiber = false;
  double residual = 0.0;     // max certificate residual
};

// 2-torsion on the genus-2 double cover of a line: p, p' on the
// ramification curve (w = 0, f6 = 0), the line through their base images
// meets the sextic in the 6 branch points of the induced double cover, and
// (t - t_p)/(t - t_p') has divisor 2p - 2p'.  A multiple branch root under
// p or p' marks the fiber nodal (certificate still valid); a multiple root
// elsewhere fails the smoothness screen but is reported, not thrown.
// Errors: base image off the sextic / images equal (PreconditionError),
// line inside the sextic (LineOnSurfaceError).
TorsionCertificate z2_certificate(const surf::SurfaceModel& X, const ProjectivePoint& p,
                                  const ProjectivePoint& q, const RunConfig& cfg = {});

// 3-torsion from two line-contact pairs sharing their residual point q:
// on the plane quartic C = X cut by H = span{p, p', q}, the lines l_{p,q}
// and l_{p',q} cut 3p + q and 3p' + q, so their ratio has divisor 3p - 3p'.
// Both divisors are re-verified by univariate restriction inside H and C
// passes a gradient smoothness screen (marked points + random sections).
// Errors: pairs do not share q / coincident pairs / degenerate H / screen
// failure (PreconditionError).
TorsionCertificate z3_from_pairs(const surf::SurfaceModel& X, const corrj::ContactPair& pair1,
                                 const corrj::ContactPair& pair2, const RunConfig& cfg = {});

// 4-torsion from two plane-contact triples sharing the residual pair
// {q, r}: the tangent planes T_pX and T_p'X meet in the qr line, their
// span H is a hyperplane, and on the degree-6 curve C = X cap H the two
// planes cut 4p + q + r and 4p' + q + r.  Divisors are re-certified from
// scratch through the plane-contact fiber at p and p'.
// Errors: triples do not share {q, r} / planes miss the qr line /
// degenerate H (PreconditionError); re-certification failure (SolverError).
TorsionCertificate z4_from_triples(const surf::SurfaceModel& X, const corrt::ContactTriple& t1,
                                   const corrt::ContactTriple& t2, const RunConfig& cfg = {});

// Coincident-residual-pair hunter.  Over a generic residual pair (q, r) the
// plane-contact fiber is a single point -- the pair remembers its source p,
// so sampling never yields the two distinct triples z4_from_triples needs.
// Second triples live on a jump locus: p such that one of the other five
// points of X cut by the polar plane {grad A(q).x = grad A(r).x = 0} also
// satisfies both cubic polar conditions.  Each attempt drives p along X by
// a damped 2x2 complex Newton on those two residuals (tracking the
// candidate by warm-started polish), then re-derives both triples honestly
// through t_fiber_first + t_fiber_second_search and certifies the pair.
// Returns every distinct certificate found within `attempts` starts.
std::vector<TorsionCertificate> z4_pair_search(const surf::SurfaceModel& X, int attempts,
                                               std::uint64_t seed, const RunConfig& cfg = {});

}  // namespace k3::torsion
