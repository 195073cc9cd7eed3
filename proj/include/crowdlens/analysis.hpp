#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "crowdlens/geometric_features.hpp"
#include "crowdlens/personality_emotion.hpp"
#include "crowdlens/scene_classify.hpp"
#include "crowdlens/trajectory_io.hpp"

namespace crowdlens {

struct AnalysisConfig {
  CollectivityParams collectivity;
  SocialSurrogateParams social;
  std::vector<ItemEquation> registry = default_registry();
  DensityConfig density;
  ComparisonBands bands;

  void validate() const;

  /// Every value that influences an analysis, in a stable layout.
  nlohmann::ordered_json ledger() const;
  /// Hash of the serialized ledger.
  std::string fingerprint() const;
};

struct AnimationSegment {
  AnimationState state = AnimationState::Idle;
  Frame first = 0;
  Frame last = 0;
};

struct PedestrianAnalysis {
  PedestrianId id = 0;
  std::vector<FrameFeatures> frames;
  std::vector<double> frame_socialization;
  std::vector<AnimationState> animation;
  FeatureVector vector;
  SocialScores social;
  OceanScores ocean;
  EmotionScores emotions;

  TraitProfile profile() const { return {ocean, emotions, social}; }
  const FrameFeatures* at(Frame f) const;
  std::vector<AnimationSegment> animation_timeline() const;
};

struct SceneAnalysis {
  TrackedScene scene;  // world coordinates, gap-free
  DensityLevel density = DensityLevel::Low;
  std::vector<PedestrianAnalysis> pedestrians;  // same order as scene.trajectories
  AnalysisConfig config;

  const PedestrianAnalysis* find(PedestrianId id) const;
};

/// Full pipeline on a parsed scene: normalization, frame features,
/// socialization, per-pedestrian vectors, OCEAN, emotions and animation.
SceneAnalysis analyze_scene(const TrackedScene& scene, const AnalysisConfig& config = {});

}  // namespace crowdlens
