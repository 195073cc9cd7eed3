#include "crowdlens/geometric_features.hpp"

#include <map>
#include <string>

#include "crowdlens/error.hpp"
#include "crowdlens/personality_emotion.hpp"

namespace crowdlens {

namespace {

constexpr double kMinDisplacement = 1e-12;

std::string where(PedestrianId ped, Frame frame) {
  return "pedestrian " + std::to_string(ped) + " frame " + std::to_string(frame);
}

std::size_t index_of(const Trajectory& traj, Frame frame) {
  const auto* s = traj.find(frame);
  if (s == nullptr) {
    throw Error(ErrorCode::FrameAbsent, where(traj.pedestrian_id, frame));
  }
  return static_cast<std::size_t>(s - traj.samples.data());
}

/// Single-sample trajectories are treated as standing still.
KinematicSeries series_or_static(const Trajectory& traj) {
  if (traj.samples.size() == 1) {
    return {{0.0}, {0.0}, {0.0}};
  }
  return kinematic_series(traj);
}

}  // namespace

void CollectivityParams::validate() const {
  if (!(gamma > 0.0) || !(beta > 0.0) || !(w1 > 0.0) || !(w2 > 0.0)) {
    throw Error(ErrorCode::InvalidParameter, "collectivity gamma, beta, w1, w2 must be strictly positive");
  }
  if (std::abs(w1 + w2 - 1.0) > 1e-9) {
    throw Error(ErrorCode::InvalidParameter, "collectivity weights must satisfy w1 + w2 = 1");
  }
}

KinematicSeries kinematic_series(const Trajectory& traj) {
  const std::size_t n = traj.samples.size();
  if (n < 2) {
    throw Error(ErrorCode::TooFewSamples, "pedestrian " + std::to_string(traj.pedestrian_id));
  }
  std::vector<Vec2> disp(n);
  for (std::size_t k = 1; k < n; ++k) {
    if (traj.samples[k].frame != traj.samples[k - 1].frame + 1) {
      throw Error(ErrorCode::FrameAbsent, where(traj.pedestrian_id, traj.samples[k - 1].frame + 1));
    }
    disp[k] = traj.samples[k].position - traj.samples[k - 1].position;
  }
  disp[0] = disp[1];

  KinematicSeries out;
  out.speed.resize(n);
  out.heading.assign(n, 0.0);
  out.variation.assign(n, 0.0);

  std::vector<bool> defined(n, false);
  std::optional<std::size_t> first_defined;
  for (std::size_t k = 0; k < n; ++k) {
    out.speed[k] = disp[k].norm();
    if (out.speed[k] > kMinDisplacement) {
      out.heading[k] = geometry::heading_degrees(disp[k]);
      defined[k] = true;
      if (!first_defined) {
        first_defined = k;
      }
    }
  }
  if (first_defined) {
    for (std::size_t k = 0; k < *first_defined; ++k) {
      out.heading[k] = out.heading[*first_defined];
    }
    for (std::size_t k = *first_defined + 1; k < n; ++k) {
      if (!defined[k]) {
        out.heading[k] = out.heading[k - 1];
      }
    }
  }
  for (std::size_t k = 1; k < n; ++k) {
    out.variation[k] = geometry::heading_difference(out.heading[k], out.heading[k - 1]);
  }
  return out;
}

double compute_speed(const Trajectory& traj, Frame frame) {
  if (traj.samples.size() < 2) {
    throw Error(ErrorCode::TooFewSamples, "pedestrian " + std::to_string(traj.pedestrian_id));
  }
  const std::size_t k = index_of(traj, frame);
  const std::size_t prev = k == 0 ? 0 : k - 1;
  const std::size_t next = k == 0 ? 1 : k;
  if (traj.samples[next].frame != traj.samples[prev].frame + 1) {
    throw Error(ErrorCode::FrameAbsent, where(traj.pedestrian_id, k == 0 ? frame + 1 : frame - 1));
  }
  return (traj.samples[next].position - traj.samples[prev].position).norm();
}

HeadingVariation compute_heading_and_variation(const Trajectory& traj, Frame frame) {
  const std::size_t k = index_of(traj, frame);
  const auto series = kinematic_series(traj);
  return {series.heading[k], series.variation[k]};
}

DistanceStats distance_stats(const TrackedScene& scene, PedestrianId ped, Frame frame) {
  const auto* self = scene.find(ped);
  const auto* here = self ? self->find(frame) : nullptr;
  if (here == nullptr) {
    throw Error(ErrorCode::PedestrianAbsent, where(ped, frame));
  }
  double total = 0.0;
  int others = 0;
  int neighbors = 0;
  for (const auto& t : scene.trajectories) {
    if (t.pedestrian_id == ped) {
      continue;
    }
    if (const auto* s = t.find(frame)) {
      const double d = (s->position - here->position).norm();
      total += d;
      ++others;
      neighbors += d <= kSocialSpaceRadius ? 1 : 0;
    }
  }
  if (others == 0) {
    return {};
  }
  return {total / others, neighbors};
}

double pair_similarity(const FrameFeatures& a, const FrameFeatures& b, const CollectivityParams& p) {
  if (a.frame != b.frame) {
    throw Error(ErrorCode::FrameMismatch, std::to_string(a.frame) + " vs " + std::to_string(b.frame));
  }
  return p.w1 * std::abs(a.speed - b.speed) / kPreferredTransitionSpeed +
         p.w2 * geometry::heading_difference(a.heading, b.heading) / 180.0;
}

double collectivity(const TrackedScene& scene, PedestrianId ped, Frame frame, const CollectivityParams& p) {
  p.validate();
  const auto* self = scene.find(ped);
  if (self == nullptr || self->find(frame) == nullptr) {
    throw Error(ErrorCode::PedestrianAbsent, where(ped, frame));
  }
  auto features_at = [frame](const Trajectory& t) {
    const auto series = series_or_static(t);
    const auto k = static_cast<std::size_t>(t.find(frame) - t.samples.data());
    FrameFeatures f;
    f.pedestrian_id = t.pedestrian_id;
    f.frame = frame;
    f.speed = series.speed[k];
    f.heading = series.heading[k];
    return f;
  };
  const FrameFeatures focal = features_at(*self);
  double sum = 0.0;
  int others = 0;
  for (const auto& t : scene.trajectories) {
    if (t.pedestrian_id == ped || t.find(frame) == nullptr) {
      continue;
    }
    const double w = pair_similarity(focal, features_at(t), p);
    sum += p.gamma * std::exp(-p.beta * w * w);
    ++others;
  }
  if (others == 0) {
    return 0.0;
  }
  return std::clamp(sum / others, 0.0, 1.0);
}

SceneFeatures compute_scene_features(const TrackedScene& scene, const CollectivityParams& p) {
  p.validate();
  const std::size_t peds = scene.trajectories.size();

  SceneFeatures out;
  out.per_pedestrian.resize(peds);
  std::map<Frame, std::vector<std::pair<std::size_t, std::size_t>>> at_frame;
  for (std::size_t i = 0; i < peds; ++i) {
    const auto& traj = scene.trajectories[i];
    const auto series = series_or_static(traj);
    auto& rows = out.per_pedestrian[i];
    rows.resize(traj.samples.size());
    for (std::size_t k = 0; k < traj.samples.size(); ++k) {
      auto& f = rows[k];
      f.pedestrian_id = traj.pedestrian_id;
      f.frame = traj.samples[k].frame;
      f.position = traj.samples[k].position;
      f.speed = series.speed[k];
      f.heading = series.heading[k];
      f.angular_variation = series.variation[k];
      at_frame[f.frame].emplace_back(i, k);
    }
  }

  for (const auto& [frame, members] : at_frame) {
    const auto n = static_cast<Eigen::Index>(members.size());
    Eigen::Matrix2Xd points(2, n);
    Eigen::ArrayXd speeds(n);
    Eigen::ArrayXd headings(n);
    for (Eigen::Index m = 0; m < n; ++m) {
      const auto& [i, k] = members[static_cast<std::size_t>(m)];
      const auto& f = out.per_pedestrian[i][k];
      points.col(m) = f.position;
      speeds(m) = f.speed;
      headings(m) = f.heading;
    }
    const Eigen::ArrayXd phi = kernels::frame_collectivity(speeds, headings, p);
    const Eigen::MatrixXd dist = geometry::pairwise_distances(points);
    for (Eigen::Index m = 0; m < n; ++m) {
      const auto& [i, k] = members[static_cast<std::size_t>(m)];
      auto& f = out.per_pedestrian[i][k];
      f.collectivity = phi(m);
      if (n > 1) {
        f.mean_distance = dist.row(m).sum() / static_cast<double>(n - 1);
        // The diagonal is zero and always within range, hence the -1.
        f.social_neighbors = static_cast<int>((dist.row(m).array() <= kSocialSpaceRadius).count()) - 1;
      }
    }
  }
  return out;
}

FeatureVector aggregate_feature_vector(std::span<const FrameFeatures> frames, const SocialScores& social) {
  if (frames.empty()) {
    throw Error(ErrorCode::NoFrames, "cannot aggregate an empty frame list");
  }
  FeatureVector v;
  for (const auto& f : frames) {
    v.x += f.position;
    v.s += f.speed;
    v.alpha += f.angular_variation;
    v.collectivity += f.collectivity;
  }
  const double n = static_cast<double>(frames.size());
  v.x /= n;
  v.s /= n;
  v.alpha /= n;
  v.collectivity /= n;
  v.socialization = social.socialization;
  v.isolation = social.isolation;
  return v;
}

}  // namespace crowdlens
