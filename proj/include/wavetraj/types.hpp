#pragma once

#include <functional>

#include <Eigen/Core>

namespace wavetraj {

// Plane vectors are stored as (x, z); z is the launch axis of every beam.
template <typename Scalar>
using Vec2 = Eigen::Matrix<Scalar, 2, 1>;
using Vec2d = Vec2<double>;

// Column i holds ray i.
using RayColumns = Eigen::Matrix2Xd;
using RayValues = Eigen::VectorXd;

inline constexpr int kX = 0;
inline constexpr int kZ = 1;

/// Clockwise quarter turn: (p_x, p_z) -> (p_z, -p_x). Maps +z onto +x.
template <typename Derived>
Vec2<typename Derived::Scalar> quarter_turn(const Eigen::MatrixBase<Derived>& v) {
  return Vec2<typename Derived::Scalar>(v(kZ), -v(kX));
}

/// Runs body(begin, end) over a partition of [0, count). Per-ray work is
/// handed to one of these so callers choose serial or pooled execution.
using RangeRunner = std::function<void(int count, const std::function<void(int, int)>& body)>;

inline void run_serial(int count, const std::function<void(int, int)>& body) { body(0, count); }

}  // namespace wavetraj
