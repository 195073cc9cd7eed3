#include <doctest.h>

#include <cmath>
#include <limits>

#include "crowdlens/analysis.hpp"
#include "crowdlens/error.hpp"
#include "crowdlens/scene_classify.hpp"
#include "crowdlens/synthetic.hpp"
#include "support/oracles.hpp"

using namespace crowdlens;

namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::Io;
}

Trajectory walker(PedestrianId id, Vec2 start, Vec2 velocity, Frame frames) {
  Trajectory t{id, {}};
  for (Frame f = 0; f < frames; ++f) {
    t.samples.push_back({f, start + static_cast<double>(f) * velocity});
  }
  return t;
}

}  // namespace

TEST_CASE("animation state thresholds") {
  CHECK(classify_animation(0.0) == AnimationState::Idle);
  CHECK(classify_animation(1e-9) == AnimationState::Walk);
  CHECK(classify_animation(0.05) == AnimationState::Walk);
  CHECK(classify_animation(std::nextafter(0.08, 0.0)) == AnimationState::Walk);
  CHECK(classify_animation(0.08) == AnimationState::Run);
  CHECK(classify_animation(3.0) == AnimationState::Run);
  CHECK(code_of([] { classify_animation(-0.01); }) == ErrorCode::NegativeSpeed);
  CHECK(code_of([] { classify_animation(std::numeric_limits<double>::quiet_NaN()); }) == ErrorCode::NegativeSpeed);
}

TEST_CASE("animation state is monotone in speed (property)") {
  oracle::Rng rng(1);
  for (int k = 0; k < 5000; ++k) {
    const double a = rng.uniform(0, 0.2), b = rng.uniform(0, 0.2);
    const auto lo = classify_animation(std::min(a, b));
    const auto hi = classify_animation(std::max(a, b));
    CHECK(static_cast<int>(lo) <= static_cast<int>(hi));
  }
}

TEST_CASE("density by pedestrian count") {
  CHECK(classify_density(0) == DensityLevel::Low);
  CHECK(classify_density(20) == DensityLevel::Low);
  CHECK(classify_density(21) == DensityLevel::Medium);
  CHECK(classify_density(30) == DensityLevel::Medium);
  CHECK(classify_density(31) == DensityLevel::High);
  DensityConfig custom;
  custom.low_max = 5;
  custom.medium_max = 8;
  CHECK(classify_density(6, custom) == DensityLevel::Medium);
}

TEST_CASE("density by area") {
  DensityConfig cfg;
  cfg.mode = DensityConfig::Mode::Area;
  // 4 pedestrians on a 2 m x 2 m box: 1 per m^2.
  const auto dense = make_scene({}, {walker(1, Vec2(0, 0), Vec2(0, 0), 2), walker(2, Vec2(2, 0), Vec2(0, 0), 2),
                                     walker(3, Vec2(0, 2), Vec2(0, 0), 2), walker(4, Vec2(2, 2), Vec2(0, 0), 2)});
  CHECK(classify_density(dense, cfg) == DensityLevel::High);
  const auto sparse = make_scene({}, {walker(1, Vec2(0, 0), Vec2(0, 0), 2), walker(2, Vec2(10, 10), Vec2(0, 0), 2)});
  CHECK(classify_density(sparse, cfg) == DensityLevel::Low);
  CHECK(classify_density(sparse, DensityConfig{}) == DensityLevel::Low);
}

TEST_CASE("question keys") {
  CHECK(trait_for_question("Q1") == Trait::N);
  CHECK(trait_for_question("q2") == Trait::Anger);
  CHECK(trait_for_question("Q3") == Trait::O);
  CHECK(trait_for_question("Q4") == Trait::Fear);
  CHECK(trait_for_question("Q5") == Trait::Happiness);
  CHECK(trait_for_question("Q6") == Trait::E);
  CHECK(trait_for_question("Q7") == Trait::Socialization);
  CHECK_FALSE(trait_for_question("Q8").has_value());
}

TEST_CASE("annotation parsing") {
  const auto a = parse_annotations(R"([{"scene_id": "P01", "question": "Q2", "yellow_id": 2, "red_id": 5},
    {"scene_id": "P02", "trait": "sociable", "yellow_id": 1, "red_id": 3}])");
  REQUIRE(a.size() == 2);
  CHECK(a[0].question_key == Trait::Anger);
  CHECK(a[0].label == "Q2");
  CHECK(a[1].question_key == Trait::Socialization);
  CHECK(parse_annotations("[]").empty());
  for (const char* bad : {"{}", "[{\"scene_id\": \"P01\", \"question\": \"Q1\", \"yellow_id\": 2}]",
                          "[{\"scene_id\": \"P01\", \"question\": \"Q1\", \"yellow_id\": 2, \"red_id\": 2}]",
                          "[{\"scene_id\": \"P01\", \"question\": \"Q9\", \"yellow_id\": 2, \"red_id\": 3}]", "[1"}) {
    CAPTURE(bad);
    CHECK(code_of([&] { parse_annotations(bad); }) == ErrorCode::AnnotationParse);
  }
}

TEST_CASE("highlighted-pedestrian scenarios give the expected answers") {
  for (const auto& s : synthetic::highlight_scenarios()) {
    const auto analysis = analyze_scene(s.scene);
    for (std::size_t k = 0; k < s.questions.size(); ++k) {
      CAPTURE(s.questions[k].label);
      CHECK(answer_question(s.questions[k], analysis) == s.expected[k]);
    }
  }
}

TEST_CASE("answers need the scene and both pedestrians") {
  const auto s = synthetic::p01();
  const auto analysis = analyze_scene(s.scene);
  auto q = s.questions.front();
  q.red_id = 77;
  CHECK(code_of([&] { answer_question(q, analysis); }) == ErrorCode::PedestrianMissing);
  q = s.questions.front();
  q.scene_id = "P09";
  CHECK(code_of([&] { answer_question(q, analysis); }) == ErrorCode::UnknownScene);
}

TEST_CASE("summary contents") {
  const auto scene = synthetic::crowd_scene(synthetic::cultural_crowds_videos()[4]);
  const auto analysis = analyze_scene(scene);
  const auto doc = summarize_scene(scene, analysis);
  CHECK(doc["scene_id"] == "BR-25");
  CHECK(doc["density"] == "Medium");
  CHECK(doc["density_label"] == "Medium");
  CHECK(doc["pedestrians"].size() == 25);
  CHECK(doc["parameters_fingerprint"] == analysis.config.fingerprint());
  CHECK(doc["parameters"]["collectivity"]["beta"] == 2.77);
  const auto& p = doc["pedestrians"][0];
  for (const char* key : {"pedestrian_id", "frames", "feature_vector", "ocean", "emotions", "animation"}) {
    CHECK(p.contains(key));
  }
  auto partial = analysis;
  partial.pedestrians.pop_back();
  CHECK(code_of([&] { summarize_scene(scene, partial); }) == ErrorCode::IncompleteAnalyses);
}

TEST_CASE("animation timeline merges consecutive states") {
  // Idle for frames 0-2, walks 3-6, runs 7-9.
  Trajectory t{1, {}};
  Vec2 p(0, 0);
  for (Frame f = 0; f < 10; ++f) {
    t.samples.push_back({f, p});
    if (f >= 2) {
      p.x() += f >= 6 ? 0.1 : 0.03;
    }
  }
  const auto analysis = analyze_scene(make_scene({}, {t}));
  const auto segments = analysis.pedestrians[0].animation_timeline();
  REQUIRE(segments.size() == 3);
  CHECK(segments[0].state == AnimationState::Idle);
  CHECK(segments[0].last == 2);
  CHECK(segments[1].state == AnimationState::Walk);
  CHECK(segments[1].first == 3);
  CHECK(segments[2].state == AnimationState::Run);
  CHECK(segments[2].first == 7);
  CHECK(segments[2].last == 9);
}
