#include "crowdlens/synthetic.hpp"

#include <cmath>
#include <functional>
#include <numbers>
#include <random>

#include "text_util.hpp"

namespace crowdlens::synthetic {

namespace {

constexpr Frame kClipFrames = 96;  // 4 s at 24 fps

using PathFn = std::function<Vec2(Frame)>;

Trajectory sample_path(PedestrianId id, const PathFn& path, Frame first = 0, Frame last = kClipFrames - 1) {
  Trajectory t{id, {}};
  for (Frame f = first; f <= last; ++f) {
    t.samples.push_back({f, path(f)});
  }
  return t;
}

PathFn straight(Vec2 start, Vec2 velocity) {
  return [=](Frame f) -> Vec2 { return start + static_cast<double>(f) * velocity; };
}

SceneMetadata clip_metadata(const std::string& id) {
  SceneMetadata m;
  m.scene_id = id;
  m.country = "synthetic";
  m.fps = 24;
  m.density_label = DensityLevel::Low;
  return m;
}

void ask(Scenario& s, const std::string& label, Trait trait, Answer expected) {
  s.questions.push_back({s.scene.metadata.scene_id, s.yellow, s.red, trait, label});
  s.expected.push_back(expected);
}

/// Uniform double in [lo, hi) from raw engine bits, identical on every platform.
double uniform(std::mt19937_64& rng, double lo, double hi) {
  const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
  return lo + (hi - lo) * u;
}

}  // namespace

Scenario p01() {
  const Vec2 group_velocity(0.03, 0.0);
  const std::vector<Vec2> formation = {{0.0, 0.0}, {0.8, 0.5}, {0.8, -0.5}, {1.6, 0.0}};
  std::vector<Trajectory> trajs;
  for (std::size_t k = 0; k < formation.size(); ++k) {
    trajs.push_back(sample_path(static_cast<PedestrianId>(k + 1), straight(formation[k], group_velocity)));
  }
  // Crosses the group's centre at frame 48, perpendicular to its motion.
  const double cross_x = 0.8 + 48 * group_velocity.x();
  trajs.push_back(sample_path(5, straight({cross_x, -4.8}, {0.0, 0.1})));

  Scenario s;
  s.scene = make_scene(clip_metadata("P01"), std::move(trajs));
  s.yellow = 2;
  s.red = 5;
  ask(s, "Q1", Trait::N, Answer::Red);
  ask(s, "Q2", Trait::Anger, Answer::Red);
  return s;
}

Scenario p02() {
  const Vec2 group_velocity(0.03, 0.0);
  const std::vector<Vec2> formation = {{0.0, 0.6}, {0.0, -0.6}, {1.2, 0.0}};
  const std::vector<PedestrianId> group_ids = {1, 3, 4};
  std::vector<Trajectory> trajs;
  for (std::size_t k = 0; k < formation.size(); ++k) {
    trajs.push_back(sample_path(group_ids[k], straight(formation[k], group_velocity)));
  }
  // Weaves laterally through the group while keeping its pace.
  trajs.push_back(sample_path(2, [&](Frame f) -> Vec2 {
    const double t = static_cast<double>(f);
    return {0.6 + group_velocity.x() * t, 0.3 * std::sin(2.0 * std::numbers::pi * t / 48.0)};
  }));
  const double diag = std::numbers::sqrt2 / 2.0;
  trajs.push_back(sample_path(5, straight({12.0, 8.0}, {-0.015 * diag, 0.015 * diag})));

  Scenario s;
  s.scene = make_scene(clip_metadata("P02"), std::move(trajs));
  s.yellow = 2;
  s.red = 5;
  ask(s, "Q3", Trait::O, Answer::Yellow);
  ask(s, "Q4", Trait::Fear, Answer::Red);
  return s;
}

Scenario p03() {
  const Vec2 group_velocity(0.04, 0.0);
  const std::vector<Vec2> formation = {{0.0, 0.0}, {0.7, 0.6}, {0.7, -0.6}, {1.4, 0.0}};
  std::vector<Trajectory> trajs;
  for (std::size_t k = 0; k < formation.size(); ++k) {
    trajs.push_back(sample_path(static_cast<PedestrianId>(k + 1), straight(formation[k], group_velocity)));
  }
  trajs.push_back(sample_path(5, straight({7.0, 3.0}, {-0.04, 0.0})));

  Scenario s;
  s.scene = make_scene(clip_metadata("P03"), std::move(trajs));
  s.yellow = 2;
  s.red = 5;
  ask(s, "Q5", Trait::Happiness, Answer::Yellow);
  ask(s, "Q6", Trait::E, Answer::Yellow);
  ask(s, "Q7", Trait::Socialization, Answer::Yellow);
  return s;
}

std::vector<Scenario> highlight_scenarios() { return {p01(), p02(), p03()}; }

const std::vector<VideoInfo>& cultural_crowds_videos() {
  static const std::vector<VideoInfo> videos = {
      {"AE-01", "United Arab Emirates", 12, DensityLevel::Low}, {"AT-03", "Austria", 10, DensityLevel::Low},
      {"BR-01", "Brazil", 16, DensityLevel::Low},               {"BR-15", "Brazil", 15, DensityLevel::Low},
      {"BR-25", "Brazil", 25, DensityLevel::Medium},            {"BR-34", "Brazil", 34, DensityLevel::High},
  };
  return videos;
}

TrackedScene crowd_scene(const VideoInfo& video, Frame frames, std::uint64_t seed) {
  std::mt19937_64 rng(detail::fnv1a(video.scene_id) ^ seed);
  const double side = 6.0 + std::sqrt(static_cast<double>(video.pedestrians)) * 2.5;
  std::vector<Trajectory> trajs;
  for (std::size_t k = 0; k < video.pedestrians; ++k) {
    const Frame first = static_cast<Frame>(uniform(rng, 0.0, static_cast<double>(frames) * 0.25));
    const Frame last = frames - 1 - static_cast<Frame>(uniform(rng, 0.0, static_cast<double>(frames) * 0.25));
    Vec2 p(uniform(rng, 0.0, side), uniform(rng, 0.0, side));
    double heading = uniform(rng, -std::numbers::pi, std::numbers::pi);
    const double speed = uniform(rng, 0.015, 0.07);
    const bool lingers = uniform(rng, 0.0, 1.0) < 0.15;
    Trajectory t{static_cast<PedestrianId>(k + 1), {}};
    for (Frame f = first; f <= last; ++f) {
      t.samples.push_back({f, p});
      heading += uniform(rng, -0.08, 0.08);
      if (!lingers) {
        p += speed * Vec2(std::cos(heading), std::sin(heading));
      }
    }
    trajs.push_back(std::move(t));
  }
  SceneMetadata meta;
  meta.scene_id = video.scene_id;
  meta.country = video.country;
  meta.fps = 24;
  meta.density_label = video.density;
  return make_scene(std::move(meta), std::move(trajs));
}

}  // namespace crowdlens::synthetic
