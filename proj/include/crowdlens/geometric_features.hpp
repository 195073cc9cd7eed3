#pragma once

#include <cmath>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "crowdlens/geometry.hpp"
#include "crowdlens/trajectory_io.hpp"

namespace crowdlens {

/// Walk/run transition speed, meters per frame (2 m/s at 24 fps, rounded).
inline constexpr double kPreferredTransitionSpeed = 0.08;
/// Radius of the proxemic social space, meters.
inline constexpr double kSocialSpaceRadius = 3.6;
/// Mean distance reported for a pedestrian alone in the frame, meters.
inline constexpr double kAloneMeanDistance = 10.0;

struct CollectivityParams {
  double gamma = 1.0;
  double beta = 2.77;
  double w1 = 0.5;  // speed term
  double w2 = 0.5;  // orientation term

  /// Throws InvalidParameter unless all are > 0 and w1 + w2 = 1.
  void validate() const;
};

struct FrameFeatures {
  PedestrianId pedestrian_id = 0;
  Frame frame = 0;
  Vec2 position = Vec2::Zero();
  double speed = 0.0;              // m/frame
  double heading = 0.0;            // degrees, (-180, 180]
  double angular_variation = 0.0;  // degrees, [0, 180]
  double mean_distance = kAloneMeanDistance;
  int social_neighbors = 0;
  double collectivity = 0.0;  // [0, 1]
};

struct FeatureVector {
  Vec2 x = Vec2::Zero();
  double s = 0.0;
  double alpha = 0.0;
  double isolation = 1.0;
  double socialization = 0.0;
  double collectivity = 0.0;
};

struct SocialScores;

/// Per-sample kinematics of one gap-free trajectory.
struct KinematicSeries {
  std::vector<double> speed;
  std::vector<double> heading;
  std::vector<double> variation;
};

/// Speed, heading and angular variation for every sample. The first sample
/// copies the second; zero displacement carries the previous heading (leading
/// stationary samples take the first defined heading). Requires >= 2
/// contiguous samples (TooFewSamples / FrameAbsent).
KinematicSeries kinematic_series(const Trajectory& traj);

double compute_speed(const Trajectory& traj, Frame frame);

struct HeadingVariation {
  double heading = 0.0;
  double variation = 0.0;
};

HeadingVariation compute_heading_and_variation(const Trajectory& traj, Frame frame);

struct DistanceStats {
  double mean_distance = kAloneMeanDistance;
  int social_neighbors = 0;
};

DistanceStats distance_stats(const TrackedScene& scene, PedestrianId ped, Frame frame);

/// Dissimilarity of two pedestrians' motion at one frame:
/// w1 * |ds| / PTS + w2 * dheading / 180.
double pair_similarity(const FrameFeatures& a, const FrameFeatures& b, const CollectivityParams& p);

double collectivity(const TrackedScene& scene, PedestrianId ped, Frame frame, const CollectivityParams& p);

/// Frame-level features for every pedestrian of a gap-free scene;
/// `per_pedestrian[k]` follows `scene.trajectories[k]`.
struct SceneFeatures {
  std::vector<std::vector<FrameFeatures>> per_pedestrian;
};

SceneFeatures compute_scene_features(const TrackedScene& scene, const CollectivityParams& p);

FeatureVector aggregate_feature_vector(std::span<const FrameFeatures> frames, const SocialScores& social);

namespace kernels {

/// Pairwise dissimilarity matrix for the pedestrians of one frame.
template <typename DerivedS, typename DerivedH>
Eigen::Array<typename DerivedS::Scalar, Eigen::Dynamic, Eigen::Dynamic> pair_similarity_matrix(
    const Eigen::ArrayBase<DerivedS>& speeds, const Eigen::ArrayBase<DerivedH>& headings,
    const CollectivityParams& p) {
  using Scalar = typename DerivedS::Scalar;
  const Eigen::Index n = speeds.size();
  const auto s_col = speeds.matrix().replicate(1, n).array();
  const auto s_row = speeds.matrix().transpose().replicate(n, 1).array();
  const auto h_col = headings.matrix().replicate(1, n).array();
  const auto h_row = headings.matrix().transpose().replicate(n, 1).array();
  return Scalar(p.w1) * (s_col - s_row).abs() / Scalar(kPreferredTransitionSpeed) +
         Scalar(p.w2) * geometry::heading_difference(h_col, h_row) / Scalar(180);
}

/// Collectivity of each pedestrian of one frame: mean over the others of
/// gamma * exp(-beta * w^2), clamped to [0, 1]; zero for a lone pedestrian.
template <typename DerivedS, typename DerivedH>
Eigen::Array<typename DerivedS::Scalar, Eigen::Dynamic, 1> frame_collectivity(
    const Eigen::ArrayBase<DerivedS>& speeds, const Eigen::ArrayBase<DerivedH>& headings,
    const CollectivityParams& p) {
  using Scalar = typename DerivedS::Scalar;
  const Eigen::Index n = speeds.size();
  if (n < 2) {
    return Eigen::Array<Scalar, Eigen::Dynamic, 1>::Zero(n);
  }
  const auto w = pair_similarity_matrix(speeds, headings, p);
  auto kernel = (Scalar(p.gamma) * (-Scalar(p.beta) * w.square()).exp()).eval();
  kernel.matrix().diagonal().setZero();
  return (kernel.rowwise().sum() / Scalar(n - 1)).min(Scalar(1)).max(Scalar(0)).eval();
}

}  // namespace kernels
}  // namespace crowdlens
