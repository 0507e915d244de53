#pragma once
// The three explicit K3 models: quartic in P^3, (2,3) complete intersection
// in P^4, and the double cover of P^2 branched over a sextic.  Point
// sampling, smoothness checks, tangent spaces, and the line witness search.

#include "k3corr/geom.hpp"
#include "k3corr/roots.hpp"

#include <optional>

namespace k3::surf {

using geom::LinearSubspace;
using geom::ProjectivePoint;
using poly::HomogeneousForm;

enum class ModelKind { QuarticP3, CI23P4, DoubleSextic };

// forms[] per kind:  QuarticP3: {F deg 4, 4 vars};  CI23P4: {A deg 2, B deg 3,
// 5 vars};  DoubleSextic: {f6 deg 6, 3 vars}, points are (x:y:z;w), w^2 = f6.
// exact_forms mirror forms when the surface was drawn with rational
// coefficients (empty otherwise).
struct SurfaceModel {
  ModelKind kind;
  std::vector<HomogeneousForm<Complex>> forms;
  std::vector<HomogeneousForm<Rational>> exact_forms;

  static SurfaceModel quartic(HomogeneousForm<Complex> F);
  static SurfaceModel ci23(HomogeneousForm<Complex> A, HomogeneousForm<Complex> B);
  static SurfaceModel double_sextic(HomogeneousForm<Complex> f6);

  bool has_exact() const { return !exact_forms.empty(); }
  int ambient_vars() const;  // 4 / 5 / 3 (base variables only for the cover)
  int point_coords() const;  // 4 / 5 / 4 (cover points carry the w slot)
};

// Random surface with independent rational coefficients of bounded height.
SurfaceModel random_surface(ModelKind kind, std::uint64_t seed, int height = 100);

// max normalized residual of all defining forms at p (weighted w^2 = f6
// equation for the double cover)
double defining_residual(const SurfaceModel& X, const ProjectivePoint& p);

// Canonical weighted representative of a double-cover point: base scaled so
// its max coordinate is 1, w scaled by the cube of the same factor.
std::vector<Complex> weighted_normalize(std::vector<Complex> xyzw);

struct SmoothnessReport {
  bool smooth = false;
  double on_surface = 0.0;  // defining residual at p
  double sigma_min = 0.0;   // smallest singular value of the scaled Jacobian
};

SmoothnessReport is_smooth_at(const SurfaceModel& X, const ProjectivePoint& p,
                              const Tolerances& tol);

// Projective tangent space at a smooth point: plane in P^3 for the quartic,
// plane (= P^2) in P^4 for the complete intersection.
LinearSubspace tangent_space(const SurfaceModel& X, const ProjectivePoint& p,
                             const Tolerances& tol);

// Deterministic point sampler; distinct seeds give independent draws.
ProjectivePoint sample_point(const SurfaceModel& X, std::uint64_t seed);

// Intersection point of a concrete line with a quartic (root_index selects
// among the sorted roots of the restricted binary form).
ProjectivePoint quartic_line_sample(const HomogeneousForm<Complex>& F,
                                    const std::vector<Complex>& base,
                                    const std::vector<Complex>& dir, int root_index = 0);

struct LineWitness {
  LinearSubspace line;                      // dim-1 subspace of P^3
  ProjectivePoint a, b;                     // spanning points
  double restriction_norm = 0.0;            // max |coeff| of F on the line / |F|
};

// Heuristic search for a line on a quartic.  nullopt is NOT a proof of
// line-freeness; a returned witness is certified (restriction identically
// small).
std::optional<LineWitness> line_on_surface_witness(const SurfaceModel& X, int trials,
                                                   std::uint64_t seed,
                                                   const Tolerances& tol);

// L^2/2 + 1 for an even positive self-intersection.
int genus_of_polarization(int L_squared);

}  // namespace k3::surf
