#include "prs/geom.hpp"

#include <array>
#include <cmath>

#include "doctest.h"
#include "prs/rng.hpp"
#include "test_util.hpp"

using namespace prs;

namespace {

Vec3 random_unit(RandomStream& rng) {
  while (true) {
    const Vec3 v{rng.normal(), rng.normal(), rng.normal()};
    if (v.norm() > 1e-6) return v.normalized();
  }
}

Rotation random_rotation(RandomStream& rng) {
  return Rotation::from_rpy(rng.uniform(-3.1, 3.1), rng.uniform(-1.5, 1.5),
                            rng.uniform(-3.1, 3.1));
}

bool is_orthonormal(const Rotation& r, double tol) {
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      const double want = i == j ? 1.0 : 0.0;
      if (std::abs(r.column(i).dot(r.column(j)) - want) > tol) return false;
    }
  }
  const double det = r.column(0).cross(r.column(1)).dot(r.column(2));
  return std::abs(det - 1.0) <= tol;
}

// Containment check done directly in the box frame, independent of the
// separating-axis code under test.
bool point_in_obb(const Vec3& p, const OBB& box, double shrink) {
  const Vec3 local = box.rotation.inverse_rotate(p - box.center);
  return std::abs(local.x) <= box.half_extents.x - shrink &&
         std::abs(local.y) <= box.half_extents.y - shrink &&
         std::abs(local.z) <= box.half_extents.z - shrink;
}

// Largest separation gap over the 15 candidate axes, computed by projecting
// corners (positive: clearly disjoint, negative: overlapping on every axis).
double projection_margin(const OBB& a, const OBB& b) {
  std::array<Vec3, 15> axes;
  int n = 0;
  for (int i = 0; i < 3; ++i) axes[n++] = a.rotation.column(i);
  for (int i = 0; i < 3; ++i) axes[n++] = b.rotation.column(i);
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      axes[n++] = a.rotation.column(i).cross(b.rotation.column(j));
    }
  }
  const auto ca = obb_corners(a);
  const auto cb = obb_corners(b);
  double margin = -1e300;
  for (const Vec3& axis : axes) {
    if (axis.norm() < 1e-9) continue;
    double amin = 1e300, amax = -1e300, bmin = 1e300, bmax = -1e300;
    for (const Vec3& p : ca) {
      amin = std::min(amin, axis.dot(p));
      amax = std::max(amax, axis.dot(p));
    }
    for (const Vec3& p : cb) {
      bmin = std::min(bmin, axis.dot(p));
      bmax = std::max(bmax, axis.dot(p));
    }
    const double gap =
        std::max(bmin - amax, amin - bmax) / axis.norm();
    margin = std::max(margin, gap);
  }
  return margin;
}

}  // namespace

TEST_CASE("vectors normalize and reject the zero vector") {
  CHECK(Vec3{3, 0, 4}.normalized() == Vec3{0.6, 0.0, 0.8});
  CHECK(test::caught([] { Vec3{0, 0, 0}.normalized(); }) ==
        ErrorCode::ZeroVector);
  CHECK(test::caught([] { Vec3{0, 1e-13, 0}.normalized(); }) ==
        ErrorCode::ZeroVector);
}

TEST_CASE("forward +y gives the identity frame") {
  const Rotation r = rotation_from_forward({0, 1, 0});
  CHECK(r == Rotation());
}

TEST_CASE("forward +x is a quarter yaw turn") {
  const Rotation r = rotation_from_forward({1, 0, 0});
  CHECK((r * Vec3{0, 1, 0} - Vec3{1, 0, 0}).norm() < 1e-12);
  CHECK((r.up() - Vec3{0, 0, 1}).norm() < 1e-12);
  CHECK(is_orthonormal(r, 1e-12));
}

TEST_CASE("straight-down forward falls back to the +y up hint") {
  const Rotation r = rotation_from_forward({0, 0, -1});
  CHECK((r.forward() - Vec3{0, 0, -1}).norm() < 1e-12);
  CHECK((r.up() - Vec3{0, 1, 0}).norm() < 1e-12);
  CHECK(is_orthonormal(r, 1e-12));
}

TEST_CASE("forward frames are orthonormal for random directions") {
  RandomStream rng(20240811);
  for (int k = 0; k < 1000; ++k) {
    const Vec3 f = random_unit(rng);
    const Rotation r = rotation_from_forward(f);
    CHECK(is_orthonormal(r, 1e-12));
    CHECK((r.forward() - f).norm() < 1e-12);
  }
  CHECK(test::caught([] { rotation_from_forward({0, 0, 0}); }) ==
        ErrorCode::ZeroVector);
}

TEST_CASE("quaternions round-trip rotations") {
  RandomStream rng(77);
  for (int k = 0; k < 200; ++k) {
    const Rotation r = random_rotation(rng);
    const auto q = r.to_quaternion();
    const double norm =
        std::sqrt(q[0] * q[0] + q[1] * q[1] + q[2] * q[2] + q[3] * q[3]);
    CHECK(std::abs(norm - 1.0) < 1e-12);
    CHECK(q[0] >= 0.0);
    const Rotation back = Rotation::from_quaternion(q);
    for (int i = 0; i < 3; ++i) {
      CHECK((back.column(i) - r.column(i)).norm() < 1e-9);
    }
  }
}

TEST_CASE("anchor points combine face tags") {
  const OBB box{{0, 0, 0.4}, Rotation(), {0.8, 0.4, 0.4}};
  CHECK(anchor_point(box, kFaceTop | kFaceBack) == Vec3{0, -0.4, 0.8});
  CHECK(anchor_point(box, kFaceTop) == Vec3{0, 0, 0.8});
  CHECK(anchor_point(box, kFaceLeft | kFaceFront | kFaceBottom) ==
        Vec3{-0.8, 0.4, 0.0});
  CHECK(anchor_point(box, 0) == box.center);
  CHECK(test::caught([&] { anchor_point(box, kFaceTop | kFaceBottom); }) ==
        ErrorCode::ConflictingTags);
  CHECK(test::caught([&] { anchor_point(box, kFaceLeft | kFaceRight); }) ==
        ErrorCode::ConflictingTags);
}

TEST_CASE("opposite anchors mirror through the center, rotated too") {
  RandomStream rng(9);
  for (int k = 0; k < 100; ++k) {
    const OBB box{{rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-2, 2)},
                  random_rotation(rng),
                  {rng.uniform(0.1, 2), rng.uniform(0.1, 2), rng.uniform(0.1, 2)}};
    const Vec3 a = anchor_point(box, kFaceTop | kFaceLeft);
    const Vec3 b = anchor_point(box, kFaceBottom | kFaceRight);
    CHECK(((a + b) * 0.5 - box.center).norm() < 1e-12);
  }
}

TEST_CASE("box overlap: disjoint, nested, touching") {
  const OBB unit{{0, 0, 0}, Rotation(), {0.5, 0.5, 0.5}};
  const OBB far_away{{3, 0, 0}, Rotation(), {0.5, 0.5, 0.5}};
  const OBB inside{{0.1, 0.1, 0.1}, Rotation(), {0.2, 0.2, 0.2}};
  CHECK_FALSE(obb_overlap(unit, far_away));
  CHECK(obb_overlap(unit, inside));

  // Stacked cubes share a face; interiors do not intersect.
  const OBB stacked{{0, 0, 1}, Rotation(), {0.5, 0.5, 0.5}};
  CHECK_FALSE(obb_overlap(unit, stacked, 1e-9));
  CHECK_FALSE(obb_overlap(unit, stacked, 0.0));
  // Push it down a hair and they interpenetrate.
  const OBB sunk{{0, 0, 1 - 1e-6}, Rotation(), {0.5, 0.5, 0.5}};
  CHECK(obb_overlap(unit, sunk, 1e-9));
}

TEST_CASE("rotated boxes need the edge cross-product axes") {
  const OBB a{{0, 0, 0}, Rotation(), {0.5, 0.5, 0.5}};
  // Diagonal box whose corner points at a but stops short of it.
  // The diamond's nearest vertex sits at center - (sqrt(2)/4)*(1,1,0); at
  // (0.9, 0.9) that vertex is (0.546, 0.546), just outside the cube corner.
  const OBB b{{0.9, 0.9, 0}, Rotation::from_rpy(0, 0, M_PI / 4), {0.5, 0.5, 0.5}};
  CHECK_FALSE(obb_overlap(a, b));
  // At (0.8, 0.8) it reaches (0.446, 0.446), inside the cube.
  const OBB c{{0.8, 0.8, 0}, Rotation::from_rpy(0, 0, M_PI / 4), {0.5, 0.5, 0.5}};
  CHECK(obb_overlap(a, c));
}

TEST_CASE("overlap is symmetric and matches a point-sampling oracle") {
  RandomStream rng(20240812);
  int decisive = 0;
  for (int k = 0; k < 60; ++k) {
    const OBB a{{rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)},
                random_rotation(rng),
                {rng.uniform(0.2, 0.9), rng.uniform(0.2, 0.9), rng.uniform(0.2, 0.9)}};
    const OBB b{{rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)},
                random_rotation(rng),
                {rng.uniform(0.2, 0.9), rng.uniform(0.2, 0.9), rng.uniform(0.2, 0.9)}};
    const bool hit = obb_overlap(a, b, 1e-9);
    CHECK(hit == obb_overlap(b, a, 1e-9));

    const double margin = projection_margin(a, b);
    if (margin > 1e-3) {
      CHECK_FALSE(hit);
      ++decisive;
    } else if (margin < -1e-3) {
      CHECK(hit);
      ++decisive;
    }

    // Dense grid of points in a; any point clearly interior to both proves
    // overlap regardless of what the axis tests concluded.
    bool witnessed = false;
    const int n = 21;
    for (int ix = 0; ix < n && !witnessed; ++ix) {
      for (int iy = 0; iy < n && !witnessed; ++iy) {
        for (int iz = 0; iz < n && !witnessed; ++iz) {
          const Vec3 local{(2.0 * ix / (n - 1) - 1.0) * a.half_extents.x,
                           (2.0 * iy / (n - 1) - 1.0) * a.half_extents.y,
                           (2.0 * iz / (n - 1) - 1.0) * a.half_extents.z};
          const Vec3 p = a.center + a.rotation * local;
          if (point_in_obb(p, a, 1e-3) && point_in_obb(p, b, 1e-3)) {
            witnessed = true;
          }
        }
      }
    }
    if (witnessed) CHECK(hit);
  }
  CHECK(decisive > 30);  // the random cases must actually exercise both sides
}
