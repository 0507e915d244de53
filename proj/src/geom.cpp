#include "k3corr/geom.hpp"

#include <Eigen/QR>
#include <Eigen/SVD>

#include <algorithm>
#include <stdexcept>

namespace k3::geom {

// ===== points ==============================================================

static void normalize_inplace(Eigen::VectorXcd& v) {
  int best = -1;
  double mag = 0.0;
  for (int i = 0; i < v.size(); ++i) {
    double m = std::abs(v[i]);
    if (m > mag) {
      mag = m;
      best = i;
    }
  }
  if (best < 0 || mag == 0.0) throw PreconditionError("projective point: zero vector");
  v /= v[best];
  v[best] = Complex(1.0, 0.0);  // kill rounding in the pivot slot
}

ProjectivePoint ProjectivePoint::of(const std::vector<Complex>& coords) {
  Eigen::VectorXcd v(coords.size());
  for (size_t i = 0; i < coords.size(); ++i) v[static_cast<int>(i)] = coords[i];
  return of(v);
}

ProjectivePoint ProjectivePoint::of(const Eigen::VectorXcd& coords) {
  ProjectivePoint p;
  p.x = coords;
  normalize_inplace(p.x);
  return p;
}

double minor_distance(const ProjectivePoint& a, const ProjectivePoint& b) {
  if (a.x.size() != b.x.size()) throw PreconditionError("minor_distance: ambient mismatch");
  double worst = 0.0;
  for (int i = 0; i < a.x.size(); ++i)
    for (int j = i + 1; j < a.x.size(); ++j)
      worst = std::max(worst, std::abs(a.x[i] * b.x[j] - a.x[j] * b.x[i]));
  return worst;
}

bool projectively_equal(const ProjectivePoint& a, const ProjectivePoint& b, double eps) {
  return minor_distance(a, b) <= eps;
}

// ===== subspaces ===========================================================

double LinearSubspace::contains_residual(const ProjectivePoint& p) const {
  if (forms.cols() == 0) return 0.0;
  Eigen::VectorXcd vals = forms.transpose() * p.x;
  return vals.cwiseAbs().maxCoeff();
}

std::vector<HomogeneousForm<Complex>> LinearSubspace::cutting_forms() const {
  std::vector<HomogeneousForm<Complex>> out;
  const int n = ambient();
  for (int c = 0; c < forms.cols(); ++c) {
    HomogeneousForm<Complex> L(n, 1);
    for (int i = 0; i < n; ++i) {
      poly::Exponents e(n, 0);
      e[i] = 1;
      L.add_term(e, forms(i, c));
    }
    out.push_back(std::move(L));
  }
  return out;
}

std::vector<ProjectivePoint> LinearSubspace::basis_points() const {
  std::vector<ProjectivePoint> out;
  for (int c = 0; c < basis.cols(); ++c) out.push_back(ProjectivePoint::of(basis.col(c).eval()));
  return out;
}

// Shared SVD core: rows of A are the input vectors; the row space is the
// span, the kernel supplies cutting forms.  Unitarity of V gives exact
// mutual annihilation between the two blocks.
static LinearSubspace subspace_from_rowspace(const Eigen::MatrixXcd& A, int expected_rank,
                                             double eps_rank) {
  const int n = static_cast<int>(A.cols());
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(A, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  double smax = sv.size() ? sv[0] : 0.0;
  if (smax == 0.0) throw PreconditionError("span: all vectors zero");
  int rank = 0;
  for (int i = 0; i < sv.size(); ++i)
    if (sv[i] > eps_rank * smax) ++rank;

  LinearSubspace H;
  // Row space of A = span of conj(V) leading columns (A = U S V^H).
  H.basis = svd.matrixV().leftCols(rank).conjugate();
  H.forms = svd.matrixV().rightCols(n - rank);
  H.degenerate = rank < expected_rank;
  H.gap = (rank < sv.size()) ? sv[rank] / smax : 0.0;
  return H;
}

LinearSubspace span(const std::vector<ProjectivePoint>& pts, double eps_rank) {
  if (pts.empty()) throw PreconditionError("span: no points");
  const int n = pts[0].n();
  Eigen::MatrixXcd A(static_cast<int>(pts.size()), n);
  for (size_t r = 0; r < pts.size(); ++r) {
    if (pts[r].n() != n) throw PreconditionError("span: ambient mismatch");
    A.row(static_cast<int>(r)) = pts[r].x.transpose();
  }
  return subspace_from_rowspace(A, static_cast<int>(pts.size()), eps_rank);
}

LinearSubspace subspace_from_forms(const Eigen::MatrixXcd& form_rows, double eps_rank) {
  // Kernel of the form matrix: swap the roles of basis and forms by running
  // the same SVD on the conjugate so the output blocks line up.
  const int n = static_cast<int>(form_rows.cols());
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(form_rows, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  double smax = sv.size() ? sv[0] : 0.0;
  if (smax == 0.0) throw PreconditionError("subspace_from_forms: zero forms");
  int rank = 0;
  for (int i = 0; i < sv.size(); ++i)
    if (sv[i] > eps_rank * smax) ++rank;

  LinearSubspace H;
  H.basis = svd.matrixV().rightCols(n - rank);
  // Independent representatives of the row space, as column vectors f with
  // f . x = 0 on the kernel: conj(V) leading columns.
  H.forms = svd.matrixV().leftCols(rank).conjugate();
  H.degenerate = rank < static_cast<int>(form_rows.rows());
  H.gap = (rank < sv.size()) ? sv[rank] / smax : 0.0;
  return H;
}

// ===== frames ==============================================================

ProjectivePoint SubspaceFrame::push(const std::vector<Complex>& u) const {
  if (static_cast<int>(u.size()) != local_vars())
    throw PreconditionError("frame push: arity mismatch");
  Eigen::VectorXcd loc(local_vars());
  for (int i = 0; i < local_vars(); ++i) loc[i] = u[i];
  return ProjectivePoint::of((map * loc).eval());
}

std::vector<Complex> SubspaceFrame::pull(const ProjectivePoint& p) const {
  if (!pivots.empty()) {
    std::vector<Complex> out(pivots.size());
    for (size_t i = 0; i < pivots.size(); ++i) out[i] = p.x[pivots[i]];
    return out;
  }
  Eigen::VectorXcd u = map.householderQr().solve(p.x);
  return {u.data(), u.data() + u.size()};
}

double SubspaceFrame::roundtrip_residual(const ProjectivePoint& p) const {
  return minor_distance(push(pull(p)), p);
}

HomogeneousForm<Complex> SubspaceFrame::restrict_form(const HomogeneousForm<Complex>& F) const {
  std::vector<std::vector<Complex>> M(ambient(), std::vector<Complex>(local_vars()));
  for (int r = 0; r < ambient(); ++r)
    for (int c = 0; c < local_vars(); ++c) M[r][c] = map(r, c);
  return F.compose_linear(M);
}

// Column-pivoted QR on basis^T picks the rows (= ambient coordinates) where
// the subspace projects most independently; G = basis restricted to those
// rows, map = basis * G^{-1} has an identity block there.
static SubspaceFrame frame_from_basis(const Eigen::MatrixXcd& B) {
  const int n = static_cast<int>(B.rows());
  const int k = static_cast<int>(B.cols());
  Eigen::ColPivHouseholderQR<Eigen::MatrixXcd> qr(B.transpose());
  std::vector<int> piv(k);
  for (int i = 0; i < k; ++i) piv[i] = qr.colsPermutation().indices()[i];
  std::sort(piv.begin(), piv.end());

  Eigen::MatrixXcd G(k, k);
  for (int i = 0; i < k; ++i) G.row(i) = B.row(piv[i]);
  SubspaceFrame fr;
  fr.map = B * G.inverse();
  fr.pivots = piv;
  for (int i = 0; i < k; ++i) {  // snap the identity block exactly
    for (int j = 0; j < k; ++j) fr.map(piv[i], j) = (i == j) ? 1.0 : 0.0;
  }
  if (!fr.map.allFinite()) throw SolverError("frame: singular pivot block");
  return fr;
}

SubspaceFrame plane_coordinates(const LinearSubspace& H) { return frame_from_basis(H.basis); }

SubspaceFrame anchored_frame(const LinearSubspace& H, const ProjectivePoint& anchor) {
  const int n = H.ambient();
  const int k = static_cast<int>(H.basis.cols());
  if (anchor.n() != n) throw PreconditionError("anchored_frame: ambient mismatch");
  if (H.contains_residual(anchor) > 1e-6)
    throw PreconditionError("anchored_frame: anchor not on subspace");

  // Complete the anchor to a basis of the subspace: project the anchor out
  // of the basis columns and keep the k-1 strongest directions.  The map is
  // the basis itself (no pivot normalization), so the first unit vector
  // lands exactly on the anchor.
  Eigen::VectorXcd a = anchor.x / anchor.x.norm();
  Eigen::MatrixXcd rest = H.basis;
  for (int c = 0; c < rest.cols(); ++c) rest.col(c) -= a * (a.adjoint() * rest.col(c));
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(rest, Eigen::ComputeFullU);
  SubspaceFrame fr;
  fr.map.resize(n, k);
  fr.map.col(0) = anchor.x;
  fr.map.rightCols(k - 1) = svd.matrixU().leftCols(k - 1);
  if (!fr.map.allFinite()) throw SolverError("anchored_frame: degenerate basis");
  return fr;
}

// ===== matrix plumbing =====================================================

Eigen::MatrixXcd random_unitary(int n, Rng& rng) {
  Eigen::MatrixXcd G(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) G(i, j) = rng.cgauss();
  return Eigen::HouseholderQR<Eigen::MatrixXcd>(G).householderQ();
}

std::vector<std::vector<Complex>> nested(const Eigen::MatrixXcd& M) {
  std::vector<std::vector<Complex>> out(M.rows(), std::vector<Complex>(M.cols()));
  for (int i = 0; i < M.rows(); ++i)
    for (int j = 0; j < M.cols(); ++j) out[i][j] = M(i, j);
  return out;
}

}  // namespace k3::geom
