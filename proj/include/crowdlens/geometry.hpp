#pragma once

#include <cmath>
#include <concepts>
#include <cstdint>
#include <numbers>

#include <Eigen/Core>

namespace crowdlens {

template <typename Scalar>
using Point2 = Eigen::Matrix<Scalar, 2, 1>;

using Vec2 = Point2<double>;
using PedestrianId = std::int64_t;
using Frame = std::int64_t;

namespace geometry {

template <typename Scalar>
constexpr Scalar radians_to_degrees(Scalar radians) {
  return radians * Scalar(180) / std::numbers::pi_v<Scalar>;
}

/// Signed angle of `d` against the reference direction (1, 0), in degrees,
/// normalized to (-180, 180].
template <typename Derived>
typename Derived::Scalar heading_degrees(const Eigen::MatrixBase<Derived>& d) {
  EIGEN_STATIC_ASSERT_VECTOR_SPECIFIC_SIZE(Derived, 2);
  using Scalar = typename Derived::Scalar;
  Scalar deg = radians_to_degrees(std::atan2(d.y(), d.x()));
  if (deg <= Scalar(-180)) {
    deg += Scalar(360);
  }
  return deg;
}

/// Shortest-arc difference between two headings, in [0, 180].
template <std::floating_point Scalar>
Scalar heading_difference(Scalar a, Scalar b) {
  Scalar d = std::fmod(std::abs(a - b), Scalar(360));
  return d > Scalar(180) ? Scalar(360) - d : d;
}

/// Element-wise shortest-arc difference for headings already in (-180, 180].
template <typename DerivedA, typename DerivedB>
auto heading_difference(const Eigen::ArrayBase<DerivedA>& a, const Eigen::ArrayBase<DerivedB>& b) {
  using Scalar = typename DerivedA::Scalar;
  const auto raw = (a - b).abs().eval();
  return raw.min(Scalar(360) - raw).eval();
}

/// Pairwise Euclidean distances between the columns of a 2xN point matrix.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic> pairwise_distances(
    const Eigen::MatrixBase<Derived>& points) {
  using Scalar = typename Derived::Scalar;
  const Eigen::Index n = points.cols();
  const Eigen::Array<Scalar, Eigen::Dynamic, 1> xs = points.row(0).transpose();
  const Eigen::Array<Scalar, Eigen::Dynamic, 1> ys = points.row(1).transpose();
  const auto dx = xs.replicate(1, n) - xs.transpose().replicate(n, 1);
  const auto dy = ys.replicate(1, n) - ys.transpose().replicate(n, 1);
  return (dx.square() + dy.square()).sqrt().matrix();
}

}  // namespace geometry
}  // namespace crowdlens
