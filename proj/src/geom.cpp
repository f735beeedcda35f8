#include "prs/geom.hpp"

#include <algorithm>
#include <cmath>

namespace prs {

Vec3 Vec3::normalized() const {
  const double n = norm();
  if (n <= 1e-12) {
    fail(ErrorCode::ZeroVector, "cannot normalize a near-zero vector");
  }
  return {x / n, y / n, z / n};
}

Rotation Rotation::from_columns(const Vec3& right, const Vec3& forward,
                                const Vec3& up) {
  Rotation r;
  r.m_ = {right.x, forward.x, up.x,  //
          right.y, forward.y, up.y,  //
          right.z, forward.z, up.z};
  return r;
}

Rotation Rotation::from_rpy(double roll, double pitch, double yaw) {
  const double cr = std::cos(roll), sr = std::sin(roll);
  const double cp = std::cos(pitch), sp = std::sin(pitch);
  const double cy = std::cos(yaw), sy = std::sin(yaw);
  Rotation r;
  r.m_ = {cy * cp, cy * sp * sr - sy * cr, cy * sp * cr + sy * sr,
          sy * cp, sy * sp * sr + cy * cr, sy * sp * cr - cy * sr,
          -sp,     cp * sr,                cp * cr};
  return r;
}

Rotation Rotation::operator*(const Rotation& o) const {
  Rotation r;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      double s = 0.0;
      for (int k = 0; k < 3; ++k) s += at(i, k) * o.at(k, j);
      r.m_[3 * i + j] = s;
    }
  }
  return r;
}

Rotation Rotation::from_quaternion(const std::array<double, 4>& wxyz) {
  const double w = wxyz[0], x = wxyz[1], y = wxyz[2], z = wxyz[3];
  const double n = std::sqrt(w * w + x * x + y * y + z * z);
  if (n <= 1e-12) fail(ErrorCode::ZeroVector, "zero quaternion");
  const double qw = w / n, qx = x / n, qy = y / n, qz = z / n;
  Rotation r;
  r.m_ = {1 - 2 * (qy * qy + qz * qz), 2 * (qx * qy - qz * qw),
          2 * (qx * qz + qy * qw),
          2 * (qx * qy + qz * qw),     1 - 2 * (qx * qx + qz * qz),
          2 * (qy * qz - qx * qw),
          2 * (qx * qz - qy * qw),     2 * (qy * qz + qx * qw),
          1 - 2 * (qx * qx + qy * qy)};
  return r;
}

std::array<double, 4> Rotation::to_quaternion() const {
  const double t = at(0, 0) + at(1, 1) + at(2, 2);
  double w, x, y, z;
  if (t > 0.0) {
    double s = std::sqrt(t + 1.0) * 2.0;
    w = 0.25 * s;
    x = (at(2, 1) - at(1, 2)) / s;
    y = (at(0, 2) - at(2, 0)) / s;
    z = (at(1, 0) - at(0, 1)) / s;
  } else if (at(0, 0) > at(1, 1) && at(0, 0) > at(2, 2)) {
    double s = std::sqrt(1.0 + at(0, 0) - at(1, 1) - at(2, 2)) * 2.0;
    w = (at(2, 1) - at(1, 2)) / s;
    x = 0.25 * s;
    y = (at(0, 1) + at(1, 0)) / s;
    z = (at(0, 2) + at(2, 0)) / s;
  } else if (at(1, 1) > at(2, 2)) {
    double s = std::sqrt(1.0 + at(1, 1) - at(0, 0) - at(2, 2)) * 2.0;
    w = (at(0, 2) - at(2, 0)) / s;
    x = (at(0, 1) + at(1, 0)) / s;
    y = 0.25 * s;
    z = (at(1, 2) + at(2, 1)) / s;
  } else {
    double s = std::sqrt(1.0 + at(2, 2) - at(0, 0) - at(1, 1)) * 2.0;
    w = (at(1, 0) - at(0, 1)) / s;
    x = (at(0, 2) + at(2, 0)) / s;
    y = (at(1, 2) + at(2, 1)) / s;
    z = 0.25 * s;
  }
  const double n = std::sqrt(w * w + x * x + y * y + z * z);
  std::array<double, 4> q{w / n, x / n, y / n, z / n};
  bool flip = q[0] < 0.0;
  if (q[0] == 0.0) {
    for (int i = 1; i < 4; ++i) {
      if (q[i] != 0.0) {
        flip = q[i] < 0.0;
        break;
      }
    }
  }
  if (flip) {
    for (double& c : q) c = -c;
  }
  return q;
}

Rotation rotation_from_forward(const Vec3& forward, const Vec3& up_hint) {
  const Vec3 f = forward.normalized();
  const Vec3 candidates[3] = {up_hint, Vec3{0, 1, 0}, Vec3{1, 0, 0}};
  for (const Vec3& hint : candidates) {
    const Vec3 proj = hint - f * f.dot(hint);
    if (proj.norm() > 1e-6) {
      const Vec3 up = proj.normalized();
      return Rotation::from_columns(f.cross(up), f, up);
    }
  }
  fail(ErrorCode::ZeroVector, "no usable up direction");  // unreachable
}

Vec3 anchor_point(const OBB& box, unsigned faces) {
  auto pick = [faces](unsigned pos, unsigned neg, const char* axis) {
    const bool p = faces & pos, n = faces & neg;
    if (p && n) {
      fail(ErrorCode::ConflictingTags,
           std::string("conflicting face tags on the ") + axis + " axis");
    }
    return p ? 1.0 : (n ? -1.0 : 0.0);
  };
  const double sx = pick(kFaceRight, kFaceLeft, "x");
  const double sy = pick(kFaceFront, kFaceBack, "y");
  const double sz = pick(kFaceTop, kFaceBottom, "z");
  const Vec3 local{sx * box.half_extents.x, sy * box.half_extents.y,
                   sz * box.half_extents.z};
  return box.center + box.rotation * local;
}

std::array<Vec3, 8> obb_corners(const OBB& box) {
  std::array<Vec3, 8> out;
  int k = 0;
  for (int sx : {-1, 1}) {
    for (int sy : {-1, 1}) {
      for (int sz : {-1, 1}) {
        out[k++] = box.center + box.rotation * Vec3{sx * box.half_extents.x,
                                                    sy * box.half_extents.y,
                                                    sz * box.half_extents.z};
      }
    }
  }
  return out;
}

bool obb_overlap(const OBB& a, const OBB& b, double eps) {
  const double ae[3] = {std::max(a.half_extents.x - eps, 0.0),
                        std::max(a.half_extents.y - eps, 0.0),
                        std::max(a.half_extents.z - eps, 0.0)};
  const double be[3] = {std::max(b.half_extents.x - eps, 0.0),
                        std::max(b.half_extents.y - eps, 0.0),
                        std::max(b.half_extents.z - eps, 0.0)};

  // R expresses b's axes in a's frame; t is the center offset in a's frame.
  // absR carries the exact magnitudes for the face-axis tests; absRc adds a
  // cushion so the cross-product axes stay conservative when edges are
  // near-parallel (a degenerate cross axis must never report separation).
  double R[3][3], absR[3][3], absRc[3][3];
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      R[i][j] = a.rotation.column(i).dot(b.rotation.column(j));
      absR[i][j] = std::abs(R[i][j]);
      absRc[i][j] = absR[i][j] + 1e-12;
    }
  }
  const Vec3 d = b.center - a.center;
  const double t[3] = {d.dot(a.rotation.column(0)), d.dot(a.rotation.column(1)),
                       d.dot(a.rotation.column(2))};

  // Face axes of a.
  for (int i = 0; i < 3; ++i) {
    const double ra = ae[i];
    const double rb = be[0] * absR[i][0] + be[1] * absR[i][1] + be[2] * absR[i][2];
    if (std::abs(t[i]) >= ra + rb) return false;
  }
  // Face axes of b.
  for (int j = 0; j < 3; ++j) {
    const double ra = ae[0] * absR[0][j] + ae[1] * absR[1][j] + ae[2] * absR[2][j];
    const double rb = be[j];
    const double tl = std::abs(t[0] * R[0][j] + t[1] * R[1][j] + t[2] * R[2][j]);
    if (tl >= ra + rb) return false;
  }
  // Cross products of edges a_i x b_j.
  for (int i = 0; i < 3; ++i) {
    const int i1 = (i + 1) % 3, i2 = (i + 2) % 3;
    for (int j = 0; j < 3; ++j) {
      const int j1 = (j + 1) % 3, j2 = (j + 2) % 3;
      const double ra = ae[i1] * absRc[i2][j] + ae[i2] * absRc[i1][j];
      const double rb = be[j1] * absRc[i][j2] + be[j2] * absRc[i][j1];
      const double tl = std::abs(t[i2] * R[i1][j] - t[i1] * R[i2][j]);
      if (tl >= ra + rb) return false;
    }
  }
  return true;
}

}  // namespace prs
