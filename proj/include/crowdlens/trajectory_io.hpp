#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>
#include <Eigen/LU>

#include "crowdlens/geometry.hpp"

namespace crowdlens {

enum class DensityLevel { Low, Medium, High };
enum class CoordinateSpace { World, Image };
enum class TrackingFormat { Csv, Json };

std::string_view to_string(DensityLevel level);
std::optional<DensityLevel> parse_density_level(std::string_view text);
std::string_view to_string(CoordinateSpace space);

struct SceneMetadata {
  std::string scene_id;
  std::string country;
  int fps = 24;
  std::optional<DensityLevel> density_label;  // ground truth, when the dataset provides one
  std::size_t pedestrian_count = 0;
  CoordinateSpace coords = CoordinateSpace::World;
  std::optional<Eigen::Matrix3d> homography;  // image pixels -> world meters
};

bool operator==(const SceneMetadata& a, const SceneMetadata& b);

struct TrajectorySample {
  Frame frame = 0;
  Vec2 position = Vec2::Zero();

  bool operator==(const TrajectorySample& o) const { return frame == o.frame && position == o.position; }
};

struct Trajectory {
  PedestrianId pedestrian_id = 0;
  std::vector<TrajectorySample> samples;  // strictly increasing frames

  Frame first_frame() const { return samples.front().frame; }
  Frame last_frame() const { return samples.back().frame; }
  const TrajectorySample* find(Frame frame) const;

  bool operator==(const Trajectory& o) const = default;
};

struct FrameRange {
  Frame min = 0;
  Frame max = 0;

  bool contains(Frame f) const { return f >= min && f <= max; }
  Frame clamp(Frame f) const { return f < min ? min : (f > max ? max : f); }
  bool operator==(const FrameRange& o) const = default;
};

/// Planar homography mapping image pixels to world meters.
class CoordinateTransform {
 public:
  static constexpr double kMinDeterminant = 1e-12;
  static constexpr double kMinHomogeneousW = 1e-12;

  /// Throws SingularTransform unless |det| > kMinDeterminant and all entries are finite.
  explicit CoordinateTransform(const Eigen::Matrix3d& matrix);

  static CoordinateTransform identity() { return CoordinateTransform(Eigen::Matrix3d::Identity()); }

  const Eigen::Matrix3d& matrix() const { return matrix_; }
  CoordinateTransform inverse() const { return CoordinateTransform(matrix_.inverse()); }

  /// Dehomogenized H * [p, 1]. Throws PointAtInfinity when |w| < kMinHomogeneousW.
  Vec2 apply(const Vec2& p) const;

 private:
  Eigen::Matrix3d matrix_;
};

struct TrackedScene {
  SceneMetadata metadata;
  std::vector<Trajectory> trajectories;  // sorted by pedestrian_id
  FrameRange frame_range;

  const Trajectory* find(PedestrianId id) const;
  bool operator==(const TrackedScene& o) const = default;
};

/// Validates trajectories, sorts them by id and samples by frame, fills in
/// pedestrian_count and frame_range.
TrackedScene make_scene(SceneMetadata metadata, std::vector<Trajectory> trajectories);

TrackedScene parse_tracking_file(std::string_view bytes, TrackingFormat format);
std::string serialize_tracking_file(const TrackedScene& scene, TrackingFormat format);

/// Reads a tracking file; the format follows the extension (.json, anything else is CSV).
/// A missing `scene_id` header falls back to the file stem.
TrackedScene read_tracking_file(const std::filesystem::path& path);
std::optional<TrackingFormat> format_for_path(const std::filesystem::path& path);

/// Maps every position through `t`. Metadata is left untouched.
TrackedScene apply_transform(const TrackedScene& scene, const CoordinateTransform& t);

/// Linear interpolation of dropped frames. Gaps with more than `max_gap`
/// missing frames raise TrackLost.
Trajectory fill_gaps(const Trajectory& trajectory, std::optional<Frame> max_gap = std::nullopt);

/// Brings a parsed scene into analysis form: world coordinates (applying the
/// header homography for `coords=image`) and gap-free trajectories, with gaps
/// longer than 2 * fps frames treated as lost tracks.
TrackedScene normalize_scene(const TrackedScene& scene);

}  // namespace crowdlens
