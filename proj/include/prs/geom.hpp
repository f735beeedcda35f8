#pragma once

#include <array>
#include <cmath>

#include "prs/error.hpp"

namespace prs {

// World frame convention: x points right, y forward, z up. An object's
// canonical forward direction is +y; width spans x, length y, height z.

struct Vec3 {
  double x = 0.0, y = 0.0, z = 0.0;

  Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
  Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
  Vec3 operator-() const { return {-x, -y, -z}; }
  Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
  Vec3& operator+=(const Vec3& o) {
    x += o.x;
    y += o.y;
    z += o.z;
    return *this;
  }

  double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
  Vec3 cross(const Vec3& o) const {
    return {y * o.z - z * o.y, z * o.x - x * o.z, x * o.y - y * o.x};
  }
  double squared_norm() const { return dot(*this); }
  double norm() const { return std::sqrt(squared_norm()); }
  Vec3 normalized() const;  // throws ZeroVector when |v| <= 1e-12

  double operator[](int i) const { return i == 0 ? x : (i == 1 ? y : z); }
  bool finite() const {
    return std::isfinite(x) && std::isfinite(y) && std::isfinite(z);
  }
  bool operator==(const Vec3&) const = default;
};

inline Vec3 operator*(double s, const Vec3& v) { return v * s; }

struct AABB {
  Vec3 min, max;

  Vec3 center() const { return (min + max) * 0.5; }
  Vec3 half_extents() const { return (max - min) * 0.5; }
  bool contains(const Vec3& p, double tol = 0.0) const {
    return p.x >= min.x - tol && p.x <= max.x + tol && p.y >= min.y - tol &&
           p.y <= max.y + tol && p.z >= min.z - tol && p.z <= max.z + tol;
  }
};

// Proper rotation, stored row-major. Columns are the body axes (right,
// forward, up) expressed in world coordinates.
class Rotation {
 public:
  Rotation() : m_{1, 0, 0, 0, 1, 0, 0, 0, 1} {}

  static Rotation from_columns(const Vec3& right, const Vec3& forward,
                               const Vec3& up);
  // Roll about x, pitch about y, yaw about z; composed as Rz * Ry * Rx.
  static Rotation from_rpy(double roll, double pitch, double yaw);
  static Rotation from_quaternion(const std::array<double, 4>& wxyz);

  Vec3 column(int i) const { return {m_[i], m_[3 + i], m_[6 + i]}; }
  Vec3 right() const { return column(0); }
  Vec3 forward() const { return column(1); }
  Vec3 up() const { return column(2); }
  double at(int r, int c) const { return m_[3 * r + c]; }

  Vec3 operator*(const Vec3& v) const {
    return {m_[0] * v.x + m_[1] * v.y + m_[2] * v.z,
            m_[3] * v.x + m_[4] * v.y + m_[5] * v.z,
            m_[6] * v.x + m_[7] * v.y + m_[8] * v.z};
  }
  Vec3 inverse_rotate(const Vec3& v) const {
    return {m_[0] * v.x + m_[3] * v.y + m_[6] * v.z,
            m_[1] * v.x + m_[4] * v.y + m_[7] * v.z,
            m_[2] * v.x + m_[5] * v.y + m_[8] * v.z};
  }
  Rotation operator*(const Rotation& o) const;

  // Unit quaternion [w, x, y, z]; sign canonicalized (w >= 0, and for w == 0
  // the first non-zero component is positive) so equal rotations always
  // serialize identically.
  std::array<double, 4> to_quaternion() const;

  bool operator==(const Rotation&) const = default;

 private:
  std::array<double, 9> m_;
};

struct OBB {
  Vec3 center;
  Rotation rotation;
  Vec3 half_extents;  // all components > 0
};

enum Face : unsigned {
  kFaceTop = 1u << 0,
  kFaceBottom = 1u << 1,
  kFaceFront = 1u << 2,
  kFaceBack = 1u << 3,
  kFaceLeft = 1u << 4,
  kFaceRight = 1u << 5,
};

// Orthonormal right-handed frame whose forward column equals
// normalize(forward). The up column is up_hint projected off forward; if the
// two are parallel the hint falls back to (0,1,0), then (1,0,0).
Rotation rotation_from_forward(const Vec3& forward,
                               const Vec3& up_hint = Vec3{0, 0, 1});

// Point center + R * (sx*hx, sy*hy, sz*hz) with s in {-1,0,1} per axis taken
// from the face tags. Opposing tags conflict.
Vec3 anchor_point(const OBB& box, unsigned faces);

// Separating-axis test over the 15 candidate axes. True iff the interiors of
// the boxes, each half-extent shrunk by eps, intersect; exact surface contact
// therefore reports false, which is what allows stacked placements.
bool obb_overlap(const OBB& a, const OBB& b, double eps = 1e-9);

std::array<Vec3, 8> obb_corners(const OBB& box);

}  // namespace prs
