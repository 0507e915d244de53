#pragma once
// The line-contact correspondence on a quartic surface in P^3: the tangent
// cone fiber over the first factor, the triple-root elimination fiber over
// the second, blowup intersection numbers, and pushforward of curves.

#include "k3corr/corr_t.hpp"

#include <optional>
#include <utility>

namespace k3::corrj {

using geom::LinearSubspace;
using geom::ProjectivePoint;
using poly::HomogeneousForm;
using poly::RootDivisor;

// A certified line contact: the line through p and q meets the quartic in
// the divisor 3p + q.  The divisor is re-extracted from the restriction of
// F to the line (parameter 0 at p, 1 at q), never trusted from whichever
// solver produced the pair.
struct ContactPair {
  ProjectivePoint p, q;
  LinearSubspace line;  // span{p, q}
  RootDivisor divisor;  // parameter values {0: 3, 1: 1}
  double certificate_residual = 0.0;
};

enum class NodeType { node, cusp, higher };

// Quadratic part of F|_{T_pX} at p in the anchored local chart, and its
// factorization into two lines (equal rows at a cusp).  factor_lines rows
// are (alpha, beta) meaning alpha*u1 + beta*u2; their product recovers
// quadratic_part up to scale.  Empty when node_type == higher.
struct TangentConeReport {
  HomogeneousForm<Complex> quadratic_part;        // 2 local variables
  std::vector<std::vector<Complex>> factor_lines;  // 0 or 2 rows
  NodeType node_type = NodeType::node;
};

struct JFiberFirstResult {
  std::vector<ContactPair> pairs;  // 2 generic, 1 at a cusp, 0 when higher
  TangentConeReport cone;
};

// Fiber of the first projection over p: factor the tangent cone of
// F|_{T_pX} at p; each cone line has contact >= 3 with X at p and its
// residual intersection point is the fiber point q.  A cone line on which
// F vanishes identically lies on the surface: LineOnSurfaceError.  Lines
// with contact 4 at p (q would collide with p) yield no pair; the cone
// report still shows them.
JFiberFirstResult j_fiber_first(const surf::SurfaceModel& X, const ProjectivePoint& p,
                                const RunConfig& cfg = {});

struct JFiberSecondResult {
  std::vector<ContactPair> pairs;   // certified, ordered by lex_less on p
  std::vector<int> multiplicities;  // aligned with pairs; >1 when clusters merged
  int certified_degree = 0;         // sum of multiplicities
  int rejected = 0;                 // elimination candidates failing the certificate
  std::vector<double> rejected_residuals;
};

// Fiber of the second projection over q.  Lines through q are parametrized
// by directions d in the coordinate plane missing q's pivot; writing
// F(q + t d) = t (a1 + a2 t + a3 t^2 + a4 t^3) with deg a_k = k, a triple
// contact away from q means the cubic factor has a triple root
// tau = -a3/(3 a4), i.e. rank 1 of the catalecticant
//   [ 3a4  a3  a2 ]
//   [  a3  a2 3a1 ]   (rows scaled to integer coefficients),
// cut by the minors g1 = 3 a4 a2 - a3^2 and g3 = 3 a1 a3 - a2^2.  Their
// intersection carries V(a2, a3) (6 simple points, no triple contact) as
// Bezout excess; the engine divides those factors out of the resultant at
// the interpolation nodes and Newton-polishes the remaining directions.
// Every candidate then passes the same restriction certificate as
// j_fiber_first or is counted in `rejected`.  Degenerate elimination
// (no admissible frame) raises SolverError.
JFiberSecondResult j_fiber_second(const surf::SurfaceModel& X, const ProjectivePoint& q,
                                  const RunConfig& cfg = {});

// Intersection number (a H' + b E).(a' H' + b' E) = a a' H^2 - b b' on the
// blowup of a surface at one smooth point (H'.E = 0, E^2 = -1).
long long blowup_intersection(std::pair<long long, long long> c1,
                              std::pair<long long, long long> c2, long long H_squared);

struct JPushResult {
  std::vector<ProjectivePoint> images;             // up to 2 per usable sample
  int skipped = 0;                                 // samples whose fiber errored
  std::optional<HomogeneousForm<Complex>> fitted_form;  // least-degree vanishing form
  int fitted_degree = 0;                           // 0 when no fit was possible
  bool same_curve = false;  // all images satisfy the input curve's forms
};

// Pushforward of a curve through the correspondence: apply j_fiber_first to
// the first M samples, collect the image cloud, fit the least-degree form
// vanishing on it (degree raised until the evaluation matrix has a
// nontrivial, data-forced kernel; no fit when every determined degree is
// exhausted or the cloud is too small to determine one), and report whether
// the cloud still lies on the input curve, whose defining forms (restricted
// to the surface ambient) are passed in `curve_forms`.
JPushResult j_push_curve(const surf::SurfaceModel& X,
                         const std::vector<ProjectivePoint>& curve_samples, int M,
                         const std::vector<HomogeneousForm<Complex>>& curve_forms,
                         const RunConfig& cfg = {});

}  // namespace k3::corrj
