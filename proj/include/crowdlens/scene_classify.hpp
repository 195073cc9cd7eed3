#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "crowdlens/personality_emotion.hpp"
#include "crowdlens/trajectory_io.hpp"

namespace crowdlens {

struct SceneAnalysis;

enum class AnimationState { Idle, Walk, Run };
std::string_view to_string(AnimationState s);

/// Idle at exactly zero, Run from the preferred transition speed upward.
AnimationState classify_animation(double speed);

struct DensityConfig {
  enum class Mode { Count, Area };
  Mode mode = Mode::Count;
  std::size_t low_max = 20;     // pedestrians
  std::size_t medium_max = 30;  // pedestrians
  double low_max_per_m2 = 0.25;
  double medium_max_per_m2 = 0.5;
};

DensityLevel classify_density(std::size_t pedestrian_count);
DensityLevel classify_density(std::size_t pedestrian_count, const DensityConfig& config);
/// Area mode divides the count by the bounding-box area of all positions (at least 1 m^2).
DensityLevel classify_density(const TrackedScene& scene, const DensityConfig& config);

struct HighlightAnnotation {
  std::string scene_id;
  PedestrianId yellow_id = 0;
  PedestrianId red_id = 0;
  Trait question_key = Trait::N;
  std::string label;  // e.g. "Q4"; informational
};

/// Trait asked by each highlighted-pedestrian question Q1..Q7.
std::optional<Trait> trait_for_question(std::string_view label);

/// JSON list of {scene_id, yellow_id, red_id, question | trait}.
std::vector<HighlightAnnotation> parse_annotations(std::string_view json_text);
std::vector<HighlightAnnotation> load_annotations(const std::filesystem::path& path);

enum class Answer { Yellow, Red, Both, Neither, Tie };
std::string_view to_string(Answer a);

Answer answer_question(const HighlightAnnotation& annotation, const SceneAnalysis& analysis);

using SceneSummary = nlohmann::ordered_json;

/// Report of one analyzed scene; throws IncompleteAnalyses if any
/// pedestrian of `scene` lacks an analysis.
SceneSummary summarize_scene(const TrackedScene& scene, const SceneAnalysis& analysis);

}  // namespace crowdlens
