#pragma once

#include <utility>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "prs/error.hpp"
#include "prs/geom.hpp"
#include "prs/rng.hpp"

namespace prs {

inline Eigen::Vector3d to_eigen(const Vec3& v) { return {v.x, v.y, v.z}; }
inline Vec3 from_eigen(const Eigen::Vector3d& v) {
  return {v.x(), v.y(), v.z()};
}

// Convex set {x | A x <= b}. Rows are unit-normalized on construction so row
// slacks b_i - a_i.x are geometric distances; rows that are already unit are
// kept bit-identical, which makes stacking two sets an exact operation.
class HSI {
 public:
  HSI(Eigen::MatrixXd A, Eigen::VectorXd b);

  int dim() const { return static_cast<int>(A_.cols()); }
  int rows() const { return static_cast<int>(A_.rows()); }
  const Eigen::MatrixXd& A() const { return A_; }
  const Eigen::VectorXd& b() const { return b_; }

  bool contains(const Eigen::VectorXd& x, double tol = 1e-9) const;
  // Signed distance to the nearest bounding hyperplane (positive inside).
  double boundary_distance(const Eigen::VectorXd& x) const;

 private:
  Eigen::MatrixXd A_;
  Eigen::VectorXd b_;
};

// Incremental row collector; every construction site funnels through this.
struct HsiBuilder {
  explicit HsiBuilder(int dim) : dim_(dim) {}

  void add(const Eigen::VectorXd& a, double b);
  void add_box(const Eigen::VectorXd& lo, const Eigen::VectorXd& hi);
  void append(const HSI& h);
  int rows() const { return static_cast<int>(rows_.size()); }
  HSI build() const;

 private:
  int dim_;
  std::vector<Eigen::VectorXd> rows_;
  std::vector<double> bounds_;
};

HSI intersect(const HSI& p, const HSI& q);

struct LPResult {
  enum class Status { Optimal, Infeasible, Unbounded };
  Status status = Status::Infeasible;
  Eigen::VectorXd x;
  double value = 0.0;
};

// Dense two-phase simplex over free variables (internally split into
// differences of non-negatives plus slacks). Bland's rule everywhere, so the
// iteration always terminates; pivot tolerance 1e-10.
LPResult lp_solve(const Eigen::VectorXd& c, const Eigen::MatrixXd& A,
                  const Eigen::VectorXd& b, bool maximize);
LPResult lp_solve(const Eigen::VectorXd& c, const HSI& h, bool maximize);

// Morphological erosion: {z | for all y in object, z + y in region}. Row-wise
// this is b_i - max_{y in object} a_i.y, each maximum found by lp_solve.
HSI erode(const HSI& region, const HSI& object_offsets);

struct ChebyshevBall {
  Eigen::VectorXd center;
  double radius = 0.0;
};

// Largest inscribed ball, solved as an LP in dimension d+1. Throws
// EmptyRegion when infeasible or the radius degenerates below 1e-12, and
// UnboundedRegion when the set has no inscribed-ball optimum.
ChebyshevBall chebyshev_center(const HSI& h);
bool is_empty(const HSI& h);

// Parametric clip of the line p + m*dir against the set: returns (m_a, m_b)
// with p - m_a*dir and p + m_b*dir on the boundary; p must be inside. Throws
// UnboundedDirection when no row bounds one side.
std::pair<double, double> clip_line(const HSI& h, const Eigen::VectorXd& p,
                                    const Eigen::VectorXd& dir);

// Hit-and-run chain: each step draws an isotropic direction (normalized iid
// standard normals), clips it against the set, then jumps to a uniform point
// on the chord. Returns the chain's final point.
Eigen::VectorXd hit_and_run(const HSI& h, const Eigen::VectorXd& p0,
                            int iterations, RandomStream& rng);

int default_mixing_iterations(int dim);  // 10 * d^3

// Fresh chain started at the Chebyshev center.
Eigen::VectorXd sample_uniform(const HSI& h, int iterations, RandomStream& rng);

// Right-handed orthonormal frame of a plane embedded in 3-space.
struct PlaneFrame {
  Vec3 origin, normal, tangent_u, tangent_v;

  static PlaneFrame from_normal(const Vec3& origin, const Vec3& normal);
  static PlaneFrame from_rotation(const Vec3& origin, const Rotation& rot);

  Vec3 to_world(double u, double v) const {
    return origin + tangent_u * u + tangent_v * v;
  }
  Eigen::Vector2d to_plane(const Vec3& p) const {
    const Vec3 d = p - origin;
    return {d.dot(tangent_u), d.dot(tangent_v)};
  }
  double height_of(const Vec3& p) const { return (p - origin).dot(normal); }
  bool coplanar_with(const PlaneFrame& o, double tol = 1e-9) const;
};

// Two-dimensional convex set living on a plane; the out-of-plane coordinate
// is carried exactly by the frame and never sampled.
struct EmbeddedHSI {
  HSI hsi;  // dim == 2, coordinates in the tangent basis
  PlaneFrame frame;

  bool contains_world(const Vec3& p, double tol = 1e-9) const;
  Vec3 sample(int iterations, RandomStream& rng) const;
};

struct RegionCuboid {
  Vec3 origin;
  Rotation orientation;
  Vec3 dims;  // full extents, all > 0
};
struct RegionRect3D {
  Vec3 origin;
  Rotation orientation;
  double width = 0.0, length = 0.0;
};
struct RegionHalfspace {
  Vec3 origin;
  Vec3 normal;  // feasible side is the one the normal points into
};
struct RegionConvexPolygon3D {
  HSI hsi2d;
  Vec3 origin;
  Vec3 normal;
};
struct RegionConvexPolyhedron {
  HSI hsi;  // dim == 3
};
struct RegionAll {};
struct RegionEmpty {};

using Region =
    std::variant<RegionCuboid, RegionRect3D, RegionHalfspace,
                 RegionConvexPolygon3D, RegionConvexPolyhedron, RegionAll,
                 RegionEmpty>;

using RegionSet = std::variant<HSI, EmbeddedHSI>;

// Unbounded inputs (All, Halfspace) pick up the six workspace rows so every
// result is bounded and samplable. Empty input raises EmptyRegion.
RegionSet region_to_hsi(const Region& r, const AABB& workspace);

HSI workspace_hsi(const AABB& workspace);
HSI obb_to_hsi(const OBB& box);

// Projects the rows of a 3D set into plane coordinates, appending to `out`.
// Rows orthogonal to the plane either hold everywhere on it (dropped) or
// nowhere, in which case false is returned.
bool append_projected(const HSI& h3, const PlaneFrame& frame, HsiBuilder& out);

// H-representation of the convex hull of 2D points (hull must have interior).
HSI hull_to_hsi_2d(const std::vector<Eigen::Vector2d>& points);

}  // namespace prs
