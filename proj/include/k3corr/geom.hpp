#pragma once
// Projective points, linear subspaces with dual (basis + cutting forms)
// representations, and frames that pull forms back to subspace coordinates.

#include "k3corr/poly.hpp"

#include <Eigen/Dense>

namespace k3::geom {

using poly::HomogeneousForm;

// ===== points ==============================================================

struct ProjectivePoint {
  Eigen::VectorXcd x;  // normalized: the max-magnitude coordinate equals 1

  static ProjectivePoint of(const std::vector<Complex>& coords);
  static ProjectivePoint of(const Eigen::VectorXcd& coords);

  int n() const { return static_cast<int>(x.size()); }
  std::vector<Complex> coords() const { return {x.data(), x.data() + x.size()}; }
};

// max |2x2 minor| of the coordinate pair; zero iff projectively equal
double minor_distance(const ProjectivePoint& a, const ProjectivePoint& b);
bool projectively_equal(const ProjectivePoint& a, const ProjectivePoint& b, double eps);

// ===== subspaces ===========================================================

struct LinearSubspace {
  Eigen::MatrixXcd basis;  // n x (k+1): columns span the cone over the subspace
  Eigen::MatrixXcd forms;  // n x (n-k-1): columns are cutting linear forms
  bool degenerate = false;  // input had lower rank than its cardinality
  double gap = 0.0;         // first discarded singular value / largest

  int ambient() const { return static_cast<int>(basis.rows()); }
  int proj_dim() const { return static_cast<int>(basis.cols()) - 1; }
  // max |form . x| over normalized x (membership residual)
  double contains_residual(const ProjectivePoint& p) const;
  std::vector<HomogeneousForm<Complex>> cutting_forms() const;
  std::vector<ProjectivePoint> basis_points() const;
};

// Span of points; rank decided at eps_rank (relative singular values).
LinearSubspace span(const std::vector<ProjectivePoint>& pts, double eps_rank);

// Common zero locus of linear forms (rows of the matrix).
LinearSubspace subspace_from_forms(const Eigen::MatrixXcd& form_rows, double eps_rank);

// ===== frames ==============================================================

// A parametrization P^{k-1} -> subspace of P^{n-1}.  Pivot frames carry an
// identity block so pulling a point back is coordinate extraction; anchored
// frames have no pivots and pull by least squares instead.
struct SubspaceFrame {
  Eigen::MatrixXcd map;     // n x k
  std::vector<int> pivots;  // k rows where map restricts to the identity (may be empty)

  int ambient() const { return static_cast<int>(map.rows()); }
  int local_vars() const { return static_cast<int>(map.cols()); }

  ProjectivePoint push(const std::vector<Complex>& u) const;
  std::vector<Complex> pull(const ProjectivePoint& p) const;
  double roundtrip_residual(const ProjectivePoint& p) const;
  HomogeneousForm<Complex> restrict_form(const HomogeneousForm<Complex>& F) const;
};

// Frame through the 3 most independent coordinate directions (column-pivoted
// QR on the basis).  Works for any subspace dimension, not only planes.
SubspaceFrame plane_coordinates(const LinearSubspace& H);

// Frame whose first local variable maps to the given anchor point (used by
// contact computations that Taylor-expand at the anchor).
SubspaceFrame anchored_frame(const LinearSubspace& H, const ProjectivePoint& anchor);

// ===== matrix plumbing =====================================================

// Haar-ish random unitary (QR of a complex Gaussian draw); used to put
// curves and charts in general position while staying deterministic per rng.
Eigen::MatrixXcd random_unitary(int n, Rng& rng);

// Row-major nesting for HomogeneousForm::compose_linear: x_i = sum_j M(i,j) u_j.
std::vector<std::vector<Complex>> nested(const Eigen::MatrixXcd& M);

// ===== intersection divisors ===============================================

struct WeightedPoint {
  ProjectivePoint pt;
  int multiplicity = 1;
  double residual = 0.0;
};

struct IntersectionDivisor {
  std::vector<WeightedPoint> points;
  int total_degree() const {
    int s = 0;
    for (auto& w : points) s += w.multiplicity;
    return s;
  }
};

}  // namespace k3::geom
