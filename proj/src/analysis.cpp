#include "crowdlens/analysis.hpp"

#include <algorithm>
#include <numeric>

#include "crowdlens/error.hpp"
#include "text_util.hpp"

namespace crowdlens {

void AnalysisConfig::validate() const {
  collectivity.validate();
  social.validate();
  for (const auto f : kFactors) {
    if (std::none_of(registry.begin(), registry.end(), [f](const ItemEquation& eq) { return eq.factor == f; })) {
      throw Error(ErrorCode::EmptyRegistryFactor, std::string(to_string(f)));
    }
  }
  if (density.low_max >= density.medium_max || !(density.low_max_per_m2 < density.medium_max_per_m2) ||
      !(density.low_max_per_m2 > 0.0)) {
    throw Error(ErrorCode::InvalidParameter, "density cutpoints must be increasing and positive");
  }
  if (!(bands.tie_threshold >= 0.0) || !(bands.neither_max < bands.both_min)) {
    throw Error(ErrorCode::InvalidParameter, "comparison bands must satisfy neither_max < both_min");
  }
}

nlohmann::ordered_json AnalysisConfig::ledger() const {
  nlohmann::ordered_json doc;
  doc["collectivity"] = {
      {"gamma", collectivity.gamma}, {"beta", collectivity.beta}, {"w1", collectivity.w1}, {"w2", collectivity.w2}};
  doc["social"] = {{"weight_collectivity", social.weight_collectivity},
                   {"weight_proximity", social.weight_proximity},
                   {"weight_neighbors", social.weight_neighbors},
                   {"bias", social.bias},
                   {"d_max", social.d_max},
                   {"n_cap", social.n_cap}};
  doc["registry"] = nlohmann::ordered_json::parse(registry_to_json(registry));
  doc["density"] = {{"mode", density.mode == DensityConfig::Mode::Area ? "area" : "count"},
                    {"low_max", density.low_max},
                    {"medium_max", density.medium_max},
                    {"low_max_per_m2", density.low_max_per_m2},
                    {"medium_max_per_m2", density.medium_max_per_m2}};
  doc["comparison"] = {
      {"tie_threshold", bands.tie_threshold}, {"both_min", bands.both_min}, {"neither_max", bands.neither_max}};
  doc["constants"] = {{"preferred_transition_speed", kPreferredTransitionSpeed},
                      {"social_space_radius", kSocialSpaceRadius},
                      {"alone_mean_distance", kAloneMeanDistance},
                      {"expression_epsilon", Expression::kEpsilon}};
  return doc;
}

std::string AnalysisConfig::fingerprint() const { return detail::to_hex(detail::fnv1a(ledger().dump())); }

const FrameFeatures* PedestrianAnalysis::at(Frame f) const {
  const auto it = std::lower_bound(frames.begin(), frames.end(), f,
                                   [](const FrameFeatures& ff, Frame v) { return ff.frame < v; });
  return (it != frames.end() && it->frame == f) ? &*it : nullptr;
}

std::vector<AnimationSegment> PedestrianAnalysis::animation_timeline() const {
  std::vector<AnimationSegment> out;
  for (std::size_t k = 0; k < animation.size(); ++k) {
    if (!out.empty() && out.back().state == animation[k] && out.back().last + 1 == frames[k].frame) {
      out.back().last = frames[k].frame;
    } else {
      out.push_back({animation[k], frames[k].frame, frames[k].frame});
    }
  }
  return out;
}

const PedestrianAnalysis* SceneAnalysis::find(PedestrianId id) const {
  const auto it = std::find_if(pedestrians.begin(), pedestrians.end(),
                               [id](const PedestrianAnalysis& p) { return p.id == id; });
  return it == pedestrians.end() ? nullptr : &*it;
}

SceneAnalysis analyze_scene(const TrackedScene& scene, const AnalysisConfig& config) {
  config.validate();
  SceneAnalysis out;
  out.config = config;
  out.scene = normalize_scene(scene);
  out.density = classify_density(out.scene, config.density);

  auto features = compute_scene_features(out.scene, config.collectivity);
  std::vector<FeatureVector> vectors;
  vectors.reserve(features.per_pedestrian.size());
  out.pedestrians.resize(features.per_pedestrian.size());
  for (std::size_t i = 0; i < features.per_pedestrian.size(); ++i) {
    auto& ped = out.pedestrians[i];
    ped.id = out.scene.trajectories[i].pedestrian_id;
    ped.frames = std::move(features.per_pedestrian[i]);
    ped.frame_socialization.reserve(ped.frames.size());
    ped.animation.reserve(ped.frames.size());
    for (const auto& f : ped.frames) {
      ped.frame_socialization.push_back(
          socialization_level(f.collectivity, f.mean_distance, f.social_neighbors, config.social).socialization);
      ped.animation.push_back(classify_animation(f.speed));
    }
    const double mean_socialization =
        std::accumulate(ped.frame_socialization.begin(), ped.frame_socialization.end(), 0.0) /
        static_cast<double>(ped.frame_socialization.size());
    ped.social = SocialScores::from_socialization(mean_socialization);
    ped.vector = aggregate_feature_vector(ped.frames, ped.social);
    vectors.push_back(ped.vector);
  }

  const auto ocean = ocean_from_items(vectors, config.registry);
  for (std::size_t i = 0; i < out.pedestrians.size(); ++i) {
    out.pedestrians[i].ocean = ocean[i];
    out.pedestrians[i].emotions = emotions_from_ocean(ocean[i], EmotionMappingTable::standard());
  }
  return out;
}

}  // namespace crowdlens
