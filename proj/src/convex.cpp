#include "prs/convex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace prs {

HSI::HSI(Eigen::MatrixXd A, Eigen::VectorXd b)
    : A_(std::move(A)), b_(std::move(b)) {
  if (A_.rows() != b_.size()) {
    fail(ErrorCode::DimensionMismatch, "row count of A must match size of b");
  }
  if (A_.cols() < 1) {
    fail(ErrorCode::DimensionMismatch, "sets need at least one dimension");
  }
  for (Eigen::Index i = 0; i < A_.rows(); ++i) {
    const double n = A_.row(i).norm();
    if (n <= 1e-12) {
      fail(ErrorCode::ZeroVector, "constraint row " + std::to_string(i) +
                                      " has a near-zero normal");
    }
    // Keep already-unit rows bit-identical so stacking is exact.
    if (std::abs(n - 1.0) > 1e-12) {
      A_.row(i) /= n;
      b_(i) /= n;
    }
  }
}

bool HSI::contains(const Eigen::VectorXd& x, double tol) const {
  if (x.size() != dim()) {
    fail(ErrorCode::DimensionMismatch, "point dimension does not match set");
  }
  if (rows() == 0) return true;
  return ((A_ * x - b_).maxCoeff() <= tol);
}

double HSI::boundary_distance(const Eigen::VectorXd& x) const {
  if (x.size() != dim()) {
    fail(ErrorCode::DimensionMismatch, "point dimension does not match set");
  }
  if (rows() == 0) return std::numeric_limits<double>::infinity();
  return (b_ - A_ * x).minCoeff();
}

void HsiBuilder::add(const Eigen::VectorXd& a, double b) {
  if (a.size() != dim_) {
    fail(ErrorCode::DimensionMismatch, "row dimension does not match builder");
  }
  rows_.push_back(a);
  bounds_.push_back(b);
}

void HsiBuilder::add_box(const Eigen::VectorXd& lo, const Eigen::VectorXd& hi) {
  for (int j = 0; j < dim_; ++j) {
    Eigen::VectorXd a = Eigen::VectorXd::Zero(dim_);
    a(j) = 1.0;
    add(a, hi(j));
    a(j) = -1.0;
    add(a, -lo(j));
  }
}

void HsiBuilder::append(const HSI& h) {
  if (h.dim() != dim_) {
    fail(ErrorCode::DimensionMismatch, "appended set dimension mismatch");
  }
  for (int i = 0; i < h.rows(); ++i) {
    rows_.push_back(h.A().row(i));
    bounds_.push_back(h.b()(i));
  }
}

HSI HsiBuilder::build() const {
  Eigen::MatrixXd A(static_cast<Eigen::Index>(rows_.size()), dim_);
  Eigen::VectorXd b(static_cast<Eigen::Index>(rows_.size()));
  for (size_t i = 0; i < rows_.size(); ++i) {
    A.row(static_cast<Eigen::Index>(i)) = rows_[i];
    b(static_cast<Eigen::Index>(i)) = bounds_[i];
  }
  return HSI(std::move(A), std::move(b));
}

HSI intersect(const HSI& p, const HSI& q) {
  if (p.dim() != q.dim()) {
    fail(ErrorCode::DimensionMismatch,
         "cannot intersect sets of different dimension");
  }
  Eigen::MatrixXd A(p.rows() + q.rows(), p.dim());
  Eigen::VectorXd b(p.rows() + q.rows());
  A << p.A(), q.A();
  b << p.b(), q.b();
  return HSI(std::move(A), std::move(b));
}

// ===== Linear programming ===================================================

namespace {

constexpr double kPivotTol = 1e-10;
constexpr double kPhase1Tol = 1e-8;

void pivot(Eigen::MatrixXd& T, std::vector<int>& basis, int row, int col) {
  T.row(row) /= T(row, col);
  for (Eigen::Index i = 0; i < T.rows(); ++i) {
    if (i == row) continue;
    const double f = T(i, col);
    if (f != 0.0) T.row(i) -= f * T.row(row);
  }
  basis[static_cast<size_t>(row)] = col;
}

// Minimizes the reduced-cost row (last row) of the tableau; Bland's rule for
// both the entering column (smallest eligible index) and the leaving row
// (smallest basic index among minimal ratios) prevents cycling. Returns false
// when the problem is unbounded below.
bool simplex_min(Eigen::MatrixXd& T, std::vector<int>& basis, int ncols,
                 const std::vector<char>& enterable) {
  const int m = static_cast<int>(T.rows()) - 1;
  for (int iter = 0; iter < 100000; ++iter) {
    int enter = -1;
    for (int j = 0; j < ncols; ++j) {
      if (enterable[static_cast<size_t>(j)] && T(m, j) < -kPivotTol) {
        enter = j;
        break;
      }
    }
    if (enter < 0) return true;

    int leave = -1;
    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i < m; ++i) {
      if (T(i, enter) <= kPivotTol) continue;
      const double ratio = T(i, ncols) / T(i, enter);
      if (ratio < best - 1e-12) {
        best = ratio;
        leave = i;
      } else if (ratio <= best + 1e-12 && leave >= 0 &&
                 basis[static_cast<size_t>(i)] <
                     basis[static_cast<size_t>(leave)]) {
        leave = i;
      }
    }
    if (leave < 0) return false;
    pivot(T, basis, leave, enter);
  }
  fail(ErrorCode::UnboundedRegion, "simplex iteration limit exceeded");
}

}  // namespace

LPResult lp_solve(const Eigen::VectorXd& c, const Eigen::MatrixXd& A,
                  const Eigen::VectorXd& b, bool maximize) {
  const int m = static_cast<int>(A.rows());
  const int d = static_cast<int>(A.cols());
  if (b.size() != m || c.size() != d) {
    fail(ErrorCode::DimensionMismatch, "lp operand sizes do not agree");
  }
  LPResult out;
  if (m == 0) {
    if (c.norm() <= kPivotTol) {
      out.status = LPResult::Status::Optimal;
      out.x = Eigen::VectorXd::Zero(d);
      out.value = 0.0;
    } else {
      out.status = LPResult::Status::Unbounded;
    }
    return out;
  }

  // Standard form: x = u - v with u, v >= 0, plus one slack per row and an
  // artificial for every row whose right-hand side is negative.
  int nart = 0;
  for (int i = 0; i < m; ++i) {
    if (b(i) < 0.0) ++nart;
  }
  const int n = 2 * d + m + nart;
  Eigen::MatrixXd T = Eigen::MatrixXd::Zero(m + 1, n + 1);
  std::vector<int> basis(static_cast<size_t>(m));
  int art = 2 * d + m;
  for (int i = 0; i < m; ++i) {
    const double sign = b(i) < 0.0 ? -1.0 : 1.0;
    for (int j = 0; j < d; ++j) {
      T(i, j) = sign * A(i, j);
      T(i, d + j) = -sign * A(i, j);
    }
    T(i, 2 * d + i) = sign;
    T(i, n) = sign * b(i);
    if (sign < 0.0) {
      T(i, art) = 1.0;
      basis[static_cast<size_t>(i)] = art++;
    } else {
      basis[static_cast<size_t>(i)] = 2 * d + i;
    }
  }

  std::vector<char> enterable(static_cast<size_t>(n), 1);
  if (nart > 0) {
    for (int j = 2 * d + m; j < n; ++j) T(m, j) = 1.0;
    for (int i = 0; i < m; ++i) {
      if (basis[static_cast<size_t>(i)] >= 2 * d + m) T.row(m) -= T.row(i);
    }
    if (!simplex_min(T, basis, n, enterable)) {
      out.status = LPResult::Status::Infeasible;  // cannot happen numerically
      return out;
    }
    if (-T(m, n) > kPhase1Tol) {
      out.status = LPResult::Status::Infeasible;
      return out;
    }
    // Drive remaining artificials out of the basis where possible; rows that
    // resist are redundant and keep a zero-valued artificial that is simply
    // barred from re-entering.
    for (int i = 0; i < m; ++i) {
      if (basis[static_cast<size_t>(i)] >= 2 * d + m) {
        for (int j = 0; j < 2 * d + m; ++j) {
          if (std::abs(T(i, j)) > kPivotTol) {
            pivot(T, basis, i, j);
            break;
          }
        }
      }
    }
    for (int j = 2 * d + m; j < n; ++j) enterable[static_cast<size_t>(j)] = 0;
  }

  T.row(m).setZero();
  for (int j = 0; j < d; ++j) {
    const double cj = maximize ? -c(j) : c(j);
    T(m, j) = cj;
    T(m, d + j) = -cj;
  }
  for (int i = 0; i < m; ++i) {
    const double f = T(m, basis[static_cast<size_t>(i)]);
    if (f != 0.0) T.row(m) -= f * T.row(i);
  }
  if (!simplex_min(T, basis, n, enterable)) {
    out.status = LPResult::Status::Unbounded;
    return out;
  }

  Eigen::VectorXd w = Eigen::VectorXd::Zero(n);
  for (int i = 0; i < m; ++i) w(basis[static_cast<size_t>(i)]) = T(i, n);
  out.status = LPResult::Status::Optimal;
  out.x = w.head(d) - w.segment(d, d);
  out.value = c.dot(out.x);
  return out;
}

LPResult lp_solve(const Eigen::VectorXd& c, const HSI& h, bool maximize) {
  return lp_solve(c, h.A(), h.b(), maximize);
}

// ===== Erosion ==============================================================

HSI erode(const HSI& region, const HSI& object_offsets) {
  if (region.dim() != object_offsets.dim()) {
    fail(ErrorCode::DimensionMismatch,
         "erosion operands live in different dimensions");
  }
  Eigen::VectorXd shrunk = region.b();
  for (int i = 0; i < region.rows(); ++i) {
    const Eigen::VectorXd a = region.A().row(i);
    const LPResult r = lp_solve(a, object_offsets, /*maximize=*/true);
    if (r.status == LPResult::Status::Unbounded) {
      fail(ErrorCode::UnboundedObject,
           "erosion requires a bounded object, row " + std::to_string(i) +
               " is unbounded");
    }
    if (r.status == LPResult::Status::Infeasible) {
      fail(ErrorCode::EmptyRegion, "cannot erode by an empty object");
    }
    shrunk(i) -= r.value;
  }
  return HSI(region.A(), std::move(shrunk));
}

// ===== Inscribed ball, line clipping, hit-and-run ==========================

ChebyshevBall chebyshev_center(const HSI& h) {
  const int d = h.dim();
  Eigen::MatrixXd A(h.rows(), d + 1);
  A.leftCols(d) = h.A();
  A.col(d).setOnes();  // rows are unit, so the radius coefficient is 1
  Eigen::VectorXd c = Eigen::VectorXd::Zero(d + 1);
  c(d) = 1.0;
  const LPResult r = lp_solve(c, A, h.b(), /*maximize=*/true);
  if (r.status == LPResult::Status::Unbounded) {
    fail(ErrorCode::UnboundedRegion,
         "set admits arbitrarily large inscribed balls");
  }
  if (r.status == LPResult::Status::Infeasible || r.x(d) <= 1e-12) {
    fail(ErrorCode::EmptyRegion, "set has no interior");
  }
  return {r.x.head(d), r.x(d)};
}

bool is_empty(const HSI& h) {
  try {
    chebyshev_center(h);
    return false;
  } catch (const Error& e) {
    if (e.code() == ErrorCode::EmptyRegion) return true;
    throw;
  }
}

std::pair<double, double> clip_line(const HSI& h, const Eigen::VectorXd& p,
                                    const Eigen::VectorXd& dir) {
  if (p.size() != h.dim() || dir.size() != h.dim()) {
    fail(ErrorCode::DimensionMismatch, "line dimension does not match set");
  }
  const Eigen::VectorXd slack = h.b() - h.A() * p;
  const Eigen::VectorXd along = h.A() * dir;
  double m_fwd = std::numeric_limits<double>::infinity();
  double m_bwd = std::numeric_limits<double>::infinity();
  for (int i = 0; i < h.rows(); ++i) {
    if (along(i) > 1e-12) {
      m_fwd = std::min(m_fwd, slack(i) / along(i));
    } else if (along(i) < -1e-12) {
      m_bwd = std::min(m_bwd, slack(i) / -along(i));
    }
  }
  if (!std::isfinite(m_fwd) || !std::isfinite(m_bwd)) {
    fail(ErrorCode::UnboundedDirection,
         "line is unbounded inside the set, clip the set to a workspace");
  }
  return {std::max(m_bwd, 0.0), std::max(m_fwd, 0.0)};
}

Eigen::VectorXd hit_and_run(const HSI& h, const Eigen::VectorXd& p0,
                            int iterations, RandomStream& rng) {
  const int d = h.dim();
  Eigen::VectorXd p = p0;
  Eigen::VectorXd dir(d);
  for (int it = 0; it < iterations; ++it) {
    double n = 0.0;
    do {
      for (int j = 0; j < d; ++j) dir(j) = rng.normal();
      n = dir.norm();
    } while (n <= 1e-12);
    dir /= n;
    const auto [m_bwd, m_fwd] = clip_line(h, p, dir);
    p += rng.uniform(-m_bwd, m_fwd) * dir;
  }
  return p;
}

int default_mixing_iterations(int dim) { return 10 * dim * dim * dim; }

Eigen::VectorXd sample_uniform(const HSI& h, int iterations,
                               RandomStream& rng) {
  const ChebyshevBall ball = chebyshev_center(h);
  return hit_and_run(h, ball.center, iterations, rng);
}

// ===== Plane embeddings =====================================================

PlaneFrame PlaneFrame::from_normal(const Vec3& origin, const Vec3& normal) {
  const Vec3 n = normal.normalized();
  // Helper axis least aligned with n keeps the tangents well-conditioned; a
  // horizontal plane gets the natural world (x, y) tangents.
  const Vec3 helper = std::abs(n.z) <= 0.9 ? Vec3{0, 0, 1} : Vec3{0, 1, 0};
  const Vec3 tu = helper.cross(n).normalized();
  const Vec3 tv = n.cross(tu);
  return {origin, n, tu, tv};
}

PlaneFrame PlaneFrame::from_rotation(const Vec3& origin, const Rotation& rot) {
  return {origin, rot.up(), rot.right(), rot.forward()};
}

bool PlaneFrame::coplanar_with(const PlaneFrame& o, double tol) const {
  if (normal.cross(o.normal).norm() > tol) return false;
  return std::abs(height_of(o.origin)) <= tol;
}

bool EmbeddedHSI::contains_world(const Vec3& p, double tol) const {
  if (std::abs(frame.height_of(p)) > tol) return false;
  return hsi.contains(frame.to_plane(p), tol);
}

Vec3 EmbeddedHSI::sample(int iterations, RandomStream& rng) const {
  const Eigen::VectorXd uv = sample_uniform(hsi, iterations, rng);
  return frame.to_world(uv(0), uv(1));
}

// ===== Regions ==============================================================

HSI workspace_hsi(const AABB& workspace) {
  const Vec3 he = workspace.half_extents();
  if (he.x <= 0 || he.y <= 0 || he.z <= 0) {
    fail(ErrorCode::EmptyRegion, "workspace must have positive extent");
  }
  HsiBuilder b(3);
  b.add_box(to_eigen(workspace.min), to_eigen(workspace.max));
  return b.build();
}

HSI obb_to_hsi(const OBB& box) {
  if (box.half_extents.x <= 0 || box.half_extents.y <= 0 ||
      box.half_extents.z <= 0) {
    fail(ErrorCode::EmptyRegion, "box extents must be positive");
  }
  HsiBuilder b(3);
  for (int k = 0; k < 3; ++k) {
    const Eigen::Vector3d axis = to_eigen(box.rotation.column(k));
    const double mid = axis.dot(to_eigen(box.center));
    const double h = box.half_extents[k];
    b.add(axis, mid + h);
    b.add(-axis, -(mid - h));
  }
  return b.build();
}

bool append_projected(const HSI& h3, const PlaneFrame& frame, HsiBuilder& out) {
  const Eigen::Vector3d tu = to_eigen(frame.tangent_u);
  const Eigen::Vector3d tv = to_eigen(frame.tangent_v);
  const Eigen::Vector3d o = to_eigen(frame.origin);
  for (int i = 0; i < h3.rows(); ++i) {
    const Eigen::Vector3d a = h3.A().row(i);
    Eigen::Vector2d a2{a.dot(tu), a.dot(tv)};
    const double rest = h3.b()(i) - a.dot(o);
    if (a2.norm() <= 1e-12) {
      if (rest < -1e-9) return false;  // plane entirely outside this row
      continue;                        // row holds everywhere on the plane
    }
    out.add(a2, rest);
  }
  return true;
}

RegionSet region_to_hsi(const Region& r, const AABB& workspace) {
  return std::visit(
      [&](const auto& reg) -> RegionSet {
        using T = std::decay_t<decltype(reg)>;
        if constexpr (std::is_same_v<T, RegionCuboid>) {
          return obb_to_hsi(
              OBB{reg.origin, reg.orientation, reg.dims * 0.5});
        } else if constexpr (std::is_same_v<T, RegionRect3D>) {
          if (reg.width <= 0 || reg.length <= 0) {
            fail(ErrorCode::EmptyRegion, "rectangle extents must be positive");
          }
          HsiBuilder b(2);
          b.add_box(Eigen::Vector2d{-reg.width / 2, -reg.length / 2},
                    Eigen::Vector2d{reg.width / 2, reg.length / 2});
          return EmbeddedHSI{
              b.build(), PlaneFrame::from_rotation(reg.origin, reg.orientation)};
        } else if constexpr (std::is_same_v<T, RegionHalfspace>) {
          const Vec3 n = reg.normal.normalized();
          HsiBuilder b(3);
          b.add(-to_eigen(n), -n.dot(reg.origin));
          b.append(workspace_hsi(workspace));
          return b.build();
        } else if constexpr (std::is_same_v<T, RegionConvexPolygon3D>) {
          if (reg.hsi2d.dim() != 2) {
            fail(ErrorCode::DimensionMismatch,
                 "polygon constraints must be two-dimensional");
          }
          return EmbeddedHSI{reg.hsi2d,
                             PlaneFrame::from_normal(reg.origin, reg.normal)};
        } else if constexpr (std::is_same_v<T, RegionConvexPolyhedron>) {
          if (reg.hsi.dim() != 3) {
            fail(ErrorCode::DimensionMismatch,
                 "polyhedron constraints must be three-dimensional");
          }
          return reg.hsi;
        } else if constexpr (std::is_same_v<T, RegionAll>) {
          return workspace_hsi(workspace);
        } else {
          fail(ErrorCode::EmptyRegion, "the empty region has no points");
        }
      },
      r);
}

HSI hull_to_hsi_2d(const std::vector<Eigen::Vector2d>& points) {
  std::vector<Eigen::Vector2d> pts = points;
  std::sort(pts.begin(), pts.end(), [](const auto& a, const auto& b) {
    return a.x() < b.x() || (a.x() == b.x() && a.y() < b.y());
  });
  pts.erase(std::unique(pts.begin(), pts.end(),
                        [](const auto& a, const auto& b) {
                          return a.x() == b.x() && a.y() == b.y();
                        }),
            pts.end());
  auto cross = [](const Eigen::Vector2d& o, const Eigen::Vector2d& a,
                  const Eigen::Vector2d& b) {
    return (a.x() - o.x()) * (b.y() - o.y()) -
           (a.y() - o.y()) * (b.x() - o.x());
  };
  // Andrew's monotone chain, counter-clockwise hull.
  std::vector<Eigen::Vector2d> hull;
  for (int pass = 0; pass < 2; ++pass) {
    const size_t base = hull.size();
    for (const auto& p : pts) {
      while (hull.size() >= base + 2 &&
             cross(hull[hull.size() - 2], hull[hull.size() - 1], p) <= 1e-15) {
        hull.pop_back();
      }
      hull.push_back(p);
    }
    hull.pop_back();
    std::reverse(pts.begin(), pts.end());
  }
  if (hull.size() < 3) {
    fail(ErrorCode::EmptyRegion, "hull has no interior");
  }
  HsiBuilder b(2);
  for (size_t i = 0; i < hull.size(); ++i) {
    const Eigen::Vector2d p = hull[i];
    const Eigen::Vector2d q = hull[(i + 1) % hull.size()];
    const Eigen::Vector2d edge = q - p;
    Eigen::Vector2d n{edge.y(), -edge.x()};  // outward for a CCW polygon
    const double len = n.norm();
    if (len <= 1e-12) continue;
    n /= len;
    b.add(n, n.dot(p));
  }
  return b.build();
}

}  // namespace prs
