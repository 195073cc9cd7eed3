#include <doctest.h>

#include "crowdlens/analysis.hpp"
#include "crowdlens/error.hpp"
#include "crowdlens/synthetic.hpp"
#include "support/oracles.hpp"

using namespace crowdlens;

TEST_CASE("pipeline output shape") {
  oracle::Rng rng(40);
  const auto scene = oracle::random_scene(rng, 12, 50);
  const auto a = analyze_scene(scene);
  REQUIRE(a.pedestrians.size() == scene.trajectories.size());
  for (std::size_t k = 0; k < a.pedestrians.size(); ++k) {
    const auto& p = a.pedestrians[k];
    CHECK(p.id == scene.trajectories[k].pedestrian_id);
    CHECK(p.frames.size() == scene.trajectories[k].samples.size());
    CHECK(p.animation.size() == p.frames.size());
    CHECK(p.frame_socialization.size() == p.frames.size());
    CHECK(p.social.socialization + p.social.isolation == doctest::Approx(1.0));
    CHECK(p.at(p.frames.front().frame) == &p.frames.front());
    CHECK(p.at(-1) == nullptr);
  }
}

TEST_CASE("pedestrian socialization is the mean of its frame values") {
  const auto a = analyze_scene(synthetic::p03().scene);
  for (const auto& p : a.pedestrians) {
    double sum = 0.0;
    for (const double v : p.frame_socialization) {
      sum += v;
    }
    CHECK(p.social.socialization == doctest::Approx(sum / static_cast<double>(p.frame_socialization.size())));
    CHECK(p.vector.socialization == p.social.socialization);
  }
}

TEST_CASE("a loner is more neurotic than group members") {
  const auto s = synthetic::p01();
  const auto a = analyze_scene(s.scene);
  for (const PedestrianId member : {1, 2, 3, 4}) {
    CHECK(a.find(s.red)->ocean.N > a.find(member)->ocean.N);
  }
}

TEST_CASE("single-sample pedestrians are treated as standing still") {
  const Trajectory blip{9, {{3, Vec2(1, 1)}}};
  Trajectory walker{1, {}};
  for (Frame f = 0; f < 6; ++f) {
    walker.samples.push_back({f, Vec2(0.02 * static_cast<double>(f), 0)});
  }
  const auto a = analyze_scene(make_scene({}, {walker, blip}));
  const auto* p = a.find(9);
  REQUIRE(p != nullptr);
  CHECK(p->frames.size() == 1);
  CHECK(p->frames[0].speed == 0.0);
  CHECK(p->animation[0] == AnimationState::Idle);
}

TEST_CASE("config fingerprint tracks every parameter") {
  AnalysisConfig a;
  AnalysisConfig b;
  CHECK(a.fingerprint() == b.fingerprint());
  b.collectivity.beta = 3.0;
  CHECK(a.fingerprint() != b.fingerprint());
  AnalysisConfig c;
  c.registry.pop_back();
  CHECK(a.fingerprint() != c.fingerprint());
  AnalysisConfig d;
  d.social.bias = -2.0;
  CHECK(a.fingerprint() != d.fingerprint());
}

TEST_CASE("analysis is deterministic") {
  const auto scene = synthetic::crowd_scene(synthetic::cultural_crowds_videos()[5]);
  const auto a = summarize_scene(scene, analyze_scene(scene)).dump();
  const auto b = summarize_scene(scene, analyze_scene(scene)).dump();
  CHECK(a == b);
}

TEST_CASE("image-space input yields the same analysis as its world-space equivalent") {
  const auto world = synthetic::p02().scene;
  Eigen::Matrix3d h;
  h << 0.05, 0.0, -2.0, 0.0, 0.05, -3.0, 0.0, 0.0, 1.0;
  const CoordinateTransform to_world(h);
  auto image = apply_transform(world, to_world.inverse());
  image.metadata.coords = CoordinateSpace::Image;
  image.metadata.homography = h;
  const auto a = analyze_scene(world);
  const auto b = analyze_scene(image);
  for (std::size_t k = 0; k < a.pedestrians.size(); ++k) {
    CHECK(a.pedestrians[k].vector.s == doctest::Approx(b.pedestrians[k].vector.s).epsilon(1e-9));
    CHECK(a.pedestrians[k].ocean.N == doctest::Approx(b.pedestrians[k].ocean.N).epsilon(1e-6));
  }
}
