#include <doctest.h>

#include <cmath>

#include "crowdlens/error.hpp"
#include "crowdlens/geometric_features.hpp"
#include "crowdlens/geometry.hpp"
#include "crowdlens/personality_emotion.hpp"
#include "support/oracles.hpp"

using namespace crowdlens;

namespace {

Trajectory straight(PedestrianId id, Vec2 start, Vec2 velocity, Frame frames, Frame first = 0) {
  Trajectory t{id, {}};
  for (Frame f = first; f < first + frames; ++f) {
    t.samples.push_back({f, start + static_cast<double>(f - first) * velocity});
  }
  return t;
}

TrackedScene scene_of(std::vector<Trajectory> trajs) { return make_scene(SceneMetadata{}, std::move(trajs)); }

TrackedScene rigid_motion(const TrackedScene& scene, double angle, Vec2 offset) {
  Eigen::Matrix3d m = Eigen::Matrix3d::Identity();
  m.topLeftCorner<2, 2>() << std::cos(angle), -std::sin(angle), std::sin(angle), std::cos(angle);
  m.topRightCorner<2, 1>() = offset;
  return apply_transform(scene, CoordinateTransform(m));
}

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::Io;
}

}  // namespace

TEST_CASE("heading helpers") {
  CHECK(geometry::heading_degrees(Vec2(0.0, 1.0)) == doctest::Approx(90.0));
  CHECK(geometry::heading_degrees(Vec2(-1.0, 0.0)) == doctest::Approx(180.0));
  CHECK(geometry::heading_difference(170.0, -170.0) == doctest::Approx(20.0));
  CHECK(geometry::heading_difference(0.0, 180.0) == doctest::Approx(180.0));
  CHECK(geometry::heading_difference(-90.0, 90.0) == doctest::Approx(180.0));
  CHECK(geometry::heading_difference(10.0, 10.0) == 0.0);
  Eigen::ArrayXd a(3), b(3);
  a << 170, 0, 45;
  b << -170, 90, 45;
  const Eigen::ArrayXd d = geometry::heading_difference(a, b);
  CHECK(d(0) == doctest::Approx(20.0));
  CHECK(d(1) == doctest::Approx(90.0));
  CHECK(d(2) == 0.0);
}

TEST_CASE("pairwise distances") {
  Eigen::Matrix<double, 2, 3> pts;
  pts << 0, 3, 0, 0, 4, 1;
  const auto d = geometry::pairwise_distances(pts);
  CHECK(d(0, 1) == doctest::Approx(5.0));
  CHECK(d(1, 0) == doctest::Approx(5.0));
  CHECK(d(0, 2) == doctest::Approx(1.0));
  CHECK(d(2, 2) == 0.0);
}

TEST_CASE("speed is displacement per frame") {
  const auto t = straight(1, Vec2(1, 1), Vec2(0.03, 0.04), 5);
  CHECK(compute_speed(t, 3) == doctest::Approx(0.05));
  CHECK(compute_speed(t, 0) == doctest::Approx(0.05));
}

TEST_CASE("heading and angular variation at a corner") {
  Trajectory t{1, {{0, Vec2(0, 0)}, {1, Vec2(1, 0)}, {2, Vec2(2, 0)}, {3, Vec2(2, 1)}}};
  const auto hv = compute_heading_and_variation(t, 3);
  CHECK(hv.heading == doctest::Approx(90.0));
  CHECK(hv.variation == doctest::Approx(90.0));
  CHECK(compute_heading_and_variation(t, 2).variation == doctest::Approx(0.0));
}

TEST_CASE("stationary samples take a neighbouring heading") {
  Trajectory t{1, {{0, Vec2(0, 0)}, {1, Vec2(0, 0)}, {2, Vec2(0, 1)}, {3, Vec2(0, 1)}}};
  const auto k = kinematic_series(t);
  CHECK(k.speed[1] == 0.0);
  CHECK(k.heading[0] == doctest::Approx(90.0));
  CHECK(k.heading[1] == doctest::Approx(90.0));
  CHECK(k.heading[3] == doctest::Approx(90.0));
  CHECK(k.variation[3] == 0.0);
  const Trajectory still{2, {{0, Vec2(1, 1)}, {1, Vec2(1, 1)}}};
  const auto s = kinematic_series(still);
  CHECK(s.heading[0] == 0.0);
  CHECK(s.speed[1] == 0.0);
}

TEST_CASE("kinematics preconditions") {
  CHECK(code_of([] { kinematic_series(Trajectory{1, {{0, Vec2(0, 0)}}}); }) == ErrorCode::TooFewSamples);
  CHECK(code_of([] { kinematic_series(Trajectory{1, {{0, Vec2(0, 0)}, {2, Vec2(1, 0)}}}); }) ==
        ErrorCode::FrameAbsent);
  CHECK(code_of([] { compute_speed(straight(1, Vec2(0, 0), Vec2(1, 0), 3), 9); }) == ErrorCode::FrameAbsent);
}

TEST_CASE("distance statistics use the social-space radius inclusively") {
  const auto scene = scene_of({straight(1, Vec2(0, 0), Vec2(0, 0.01), 2), straight(2, Vec2(3.6, 0), Vec2(0, 0.01), 2),
                               straight(3, Vec2(0, 4.0), Vec2(0, 0.01), 2)});
  const auto d = distance_stats(scene, 1, 0);
  CHECK(d.mean_distance == doctest::Approx(3.8));
  CHECK(d.social_neighbors == 1);
  const auto alone = distance_stats(scene_of({straight(1, Vec2(0, 0), Vec2(1, 0), 2)}), 1, 0);
  CHECK(alone.mean_distance == kAloneMeanDistance);
  CHECK(alone.social_neighbors == 0);
  CHECK(code_of([&] { distance_stats(scene, 9, 0); }) == ErrorCode::PedestrianAbsent);
}

TEST_CASE("pair dissimilarity") {
  FrameFeatures a{1, 0, Vec2::Zero(), 0.02, 10.0};
  FrameFeatures b{2, 0, Vec2::Zero(), 0.10, -80.0};
  // 0.5 * 0.08 / 0.08 + 0.5 * 90 / 180
  CHECK(pair_similarity(a, b, {}) == doctest::Approx(0.75));
  CHECK(pair_similarity(a, b, {}) == pair_similarity(b, a, {}));
  b.frame = 1;
  CHECK(code_of([&] { pair_similarity(a, b, {}); }) == ErrorCode::FrameMismatch);
}

TEST_CASE("collectivity of a uniform group and an outlier") {
  // Two identical walkers and a third one 0.08 m/frame faster in the same direction.
  const auto scene = scene_of({straight(1, Vec2(0, 0), Vec2(0.02, 0), 3), straight(2, Vec2(0, 1), Vec2(0.02, 0), 3),
                               straight(3, Vec2(0, 2), Vec2(0.10, 0), 3)});
  const double expected = (1.0 + std::exp(-2.77 * 0.25)) / 2.0;
  CHECK(collectivity(scene, 1, 1, {}) == doctest::Approx(expected).epsilon(1e-12));
  CHECK(expected == doctest::Approx(0.7502).epsilon(1e-4));
  CHECK(collectivity(scene, 3, 1, {}) == doctest::Approx(std::exp(-2.77 * 0.25)).epsilon(1e-12));
}

TEST_CASE("collectivity of a lone pedestrian is zero") {
  const auto scene = scene_of({straight(1, Vec2(0, 0), Vec2(0.02, 0), 4)});
  CHECK(collectivity(scene, 1, 2, {}) == 0.0);
  const auto features = compute_scene_features(scene, {});
  for (const auto& f : features.per_pedestrian[0]) {
    CHECK(f.collectivity == 0.0);
  }
}

TEST_CASE("collectivity parameters must be positive with unit weight sum") {
  CHECK_NOTHROW(CollectivityParams{}.validate());
  CHECK_THROWS_AS((CollectivityParams{1.0, 2.77, 0.7, 0.5}.validate()), Error);
  CHECK_THROWS_AS((CollectivityParams{0.0, 2.77, 0.5, 0.5}.validate()), Error);
  CHECK_THROWS_AS((CollectivityParams{1.0, -1.0, 0.5, 0.5}.validate()), Error);
}

TEST_CASE("vectorized scene features agree with the brute-force sum") {
  oracle::Rng rng(2024);
  for (int trial = 0; trial < 25; ++trial) {
    const auto scene = oracle::random_scene(rng, 20, 40);
    const CollectivityParams p{rng.uniform(0.2, 1.0), rng.uniform(0.5, 5.0), 0.3, 0.7};
    const auto expected = oracle::brute_force_collectivity(scene, {p.gamma, p.beta, p.w1, p.w2});
    const auto features = compute_scene_features(scene, p);
    for (std::size_t k = 0; k < scene.trajectories.size(); ++k) {
      for (const auto& f : features.per_pedestrian[k]) {
        CHECK(std::abs(f.collectivity - expected.at({f.pedestrian_id, f.frame})) <= 1e-9);
      }
    }
  }
}

TEST_CASE("single-pedestrian collectivity matches the whole-scene pass") {
  oracle::Rng rng(99);
  const auto scene = oracle::random_scene(rng, 10, 20);
  const auto features = compute_scene_features(scene, {});
  for (std::size_t k = 0; k < scene.trajectories.size(); ++k) {
    for (const auto& f : features.per_pedestrian[k]) {
      CHECK(collectivity(scene, f.pedestrian_id, f.frame, {}) == doctest::Approx(f.collectivity).epsilon(1e-12));
    }
  }
}

TEST_CASE("kernels instantiate for float") {
  Eigen::ArrayXf s(2), h(2);
  s << 0.02f, 0.02f;
  h << 0.0f, 0.0f;
  const Eigen::ArrayXf phi = kernels::frame_collectivity(s, h, CollectivityParams{});
  CHECK(phi(0) == doctest::Approx(1.0f));
}

TEST_CASE("features are invariant under rigid motions of the scene (property)") {
  oracle::Rng rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    const auto scene = oracle::random_scene(rng, 8, 25);
    const auto moved = rigid_motion(scene, rng.uniform(-3.0, 3.0), Vec2(rng.uniform(-50, 50), rng.uniform(-50, 50)));
    const auto a = compute_scene_features(scene, {});
    const auto b = compute_scene_features(moved, {});
    for (std::size_t k = 0; k < a.per_pedestrian.size(); ++k) {
      for (std::size_t i = 0; i < a.per_pedestrian[k].size(); ++i) {
        const auto& fa = a.per_pedestrian[k][i];
        const auto& fb = b.per_pedestrian[k][i];
        CHECK(std::abs(fa.speed - fb.speed) <= 1e-9);
        CHECK(std::abs(fa.angular_variation - fb.angular_variation) <= 1e-9);
        CHECK(std::abs(fa.mean_distance - fb.mean_distance) <= 1e-9);
        CHECK(std::abs(fa.collectivity - fb.collectivity) <= 1e-9);
        CHECK(fa.social_neighbors == fb.social_neighbors);
      }
    }
  }
}

TEST_CASE("collectivity stays in the unit interval and angular variation in [0, 180] (property)") {
  oracle::Rng rng(31);
  for (int trial = 0; trial < 20; ++trial) {
    const auto scene = oracle::random_scene(rng, 15, 30);
    const CollectivityParams p{rng.uniform(0.5, 3.0), rng.uniform(0.1, 5.0), 0.5, 0.5};
    for (const auto& series : compute_scene_features(scene, p).per_pedestrian) {
      for (const auto& f : series) {
        CHECK(f.collectivity >= 0.0);
        CHECK(f.collectivity <= 1.0);
        CHECK(f.angular_variation >= 0.0);
        CHECK(f.angular_variation <= 180.0);
        CHECK(f.heading > -180.0);
        CHECK(f.heading <= 180.0);
      }
    }
  }
}

TEST_CASE("aggregation averages frame features") {
  std::vector<FrameFeatures> frames(2);
  frames[0].position = Vec2(0, 0);
  frames[0].speed = 0.02;
  frames[0].angular_variation = 10;
  frames[0].collectivity = 0.2;
  frames[1].position = Vec2(2, 4);
  frames[1].speed = 0.04;
  frames[1].angular_variation = 30;
  frames[1].collectivity = 0.6;
  const auto v = aggregate_feature_vector(frames, SocialScores::from_socialization(0.3));
  CHECK(v.x.isApprox(Vec2(1, 2)));
  CHECK(v.s == doctest::Approx(0.03));
  CHECK(v.alpha == doctest::Approx(20.0));
  CHECK(v.collectivity == doctest::Approx(0.4));
  CHECK(v.socialization == 0.3);
  CHECK(v.isolation == doctest::Approx(0.7));
  CHECK(code_of([] { aggregate_feature_vector({}, {}); }) == ErrorCode::NoFrames);
}
