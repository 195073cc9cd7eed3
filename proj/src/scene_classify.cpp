#include "crowdlens/scene_classify.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "crowdlens/analysis.hpp"
#include "crowdlens/error.hpp"

namespace crowdlens {

std::string_view to_string(AnimationState s) {
  switch (s) {
    case AnimationState::Idle: return "Idle";
    case AnimationState::Walk: return "Walk";
    case AnimationState::Run: return "Run";
  }
  return "Idle";
}

AnimationState classify_animation(double speed) {
  if (!(speed >= 0.0)) {
    throw Error(ErrorCode::NegativeSpeed, std::to_string(speed));
  }
  if (speed == 0.0) {
    return AnimationState::Idle;
  }
  return speed < kPreferredTransitionSpeed ? AnimationState::Walk : AnimationState::Run;
}

DensityLevel classify_density(std::size_t pedestrian_count) { return classify_density(pedestrian_count, {}); }

DensityLevel classify_density(std::size_t pedestrian_count, const DensityConfig& config) {
  if (pedestrian_count <= config.low_max) {
    return DensityLevel::Low;
  }
  return pedestrian_count <= config.medium_max ? DensityLevel::Medium : DensityLevel::High;
}

DensityLevel classify_density(const TrackedScene& scene, const DensityConfig& config) {
  const auto count = scene.metadata.pedestrian_count;
  if (config.mode == DensityConfig::Mode::Count) {
    return classify_density(count, config);
  }
  Vec2 lo = Vec2::Constant(std::numeric_limits<double>::infinity());
  Vec2 hi = -lo;
  for (const auto& t : scene.trajectories) {
    for (const auto& s : t.samples) {
      lo = lo.cwiseMin(s.position);
      hi = hi.cwiseMax(s.position);
    }
  }
  const double area = count == 0 ? 1.0 : std::max(1.0, (hi - lo).prod());
  const double per_m2 = static_cast<double>(count) / area;
  if (per_m2 <= config.low_max_per_m2) {
    return DensityLevel::Low;
  }
  return per_m2 <= config.medium_max_per_m2 ? DensityLevel::Medium : DensityLevel::High;
}

std::optional<Trait> trait_for_question(std::string_view label) {
  std::string q(label);
  std::transform(q.begin(), q.end(), q.begin(), [](unsigned char c) { return std::toupper(c); });
  if (q == "Q1") return Trait::N;
  if (q == "Q2") return Trait::Anger;
  if (q == "Q3") return Trait::O;
  if (q == "Q4") return Trait::Fear;
  if (q == "Q5") return Trait::Happiness;
  if (q == "Q6") return Trait::E;
  if (q == "Q7") return Trait::Socialization;
  return std::nullopt;
}

std::vector<HighlightAnnotation> parse_annotations(std::string_view json_text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::AnnotationParse, std::string("invalid JSON: ") + e.what());
  }
  if (!doc.is_array()) {
    throw Error(ErrorCode::AnnotationParse, "annotations must be a JSON list");
  }
  std::vector<HighlightAnnotation> out;
  for (const auto& item : doc) {
    if (!item.is_object() || !item.contains("scene_id") || !item["scene_id"].is_string() ||
        !item.contains("yellow_id") || !item["yellow_id"].is_number_integer() || !item.contains("red_id") ||
        !item["red_id"].is_number_integer()) {
      throw Error(ErrorCode::AnnotationParse, "each annotation needs scene_id, yellow_id and red_id");
    }
    HighlightAnnotation a;
    a.scene_id = item["scene_id"].get<std::string>();
    a.yellow_id = item["yellow_id"].get<PedestrianId>();
    a.red_id = item["red_id"].get<PedestrianId>();
    if (a.yellow_id == a.red_id) {
      throw Error(ErrorCode::AnnotationParse, "yellow_id and red_id must differ");
    }
    std::optional<Trait> trait;
    if (item.contains("question") && item["question"].is_string()) {
      a.label = item["question"].get<std::string>();
      trait = trait_for_question(a.label);
    }
    if (!trait && item.contains("trait") && item["trait"].is_string()) {
      trait = parse_trait(item["trait"].get<std::string>());
      if (a.label.empty()) {
        a.label = item["trait"].get<std::string>();
      }
    }
    if (!trait) {
      throw Error(ErrorCode::AnnotationParse, "annotation needs a known question (Q1..Q7) or trait");
    }
    a.question_key = *trait;
    out.push_back(std::move(a));
  }
  return out;
}

std::vector<HighlightAnnotation> load_annotations(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorCode::Io, "cannot open annotations " + path.string());
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_annotations(buf.str());
}

std::string_view to_string(Answer a) {
  switch (a) {
    case Answer::Yellow: return "Yellow";
    case Answer::Red: return "Red";
    case Answer::Both: return "Both";
    case Answer::Neither: return "Neither";
    case Answer::Tie: return "Tie";
  }
  return "Tie";
}

Answer answer_question(const HighlightAnnotation& annotation, const SceneAnalysis& analysis) {
  if (annotation.scene_id != analysis.scene.metadata.scene_id) {
    throw Error(ErrorCode::UnknownScene, annotation.scene_id);
  }
  const auto* yellow = analysis.find(annotation.yellow_id);
  const auto* red = analysis.find(annotation.red_id);
  if (yellow == nullptr || red == nullptr) {
    throw Error(ErrorCode::PedestrianMissing,
                "scene " + annotation.scene_id + " pedestrian " +
                    std::to_string(yellow == nullptr ? annotation.yellow_id : annotation.red_id));
  }
  switch (compare_pedestrians(yellow->profile(), red->profile(), annotation.question_key, analysis.config.bands)) {
    case Comparison::A: return Answer::Yellow;
    case Comparison::B: return Answer::Red;
    case Comparison::Both: return Answer::Both;
    case Comparison::Neither: return Answer::Neither;
    case Comparison::Tie: return Answer::Tie;
  }
  return Answer::Tie;
}

SceneSummary summarize_scene(const TrackedScene& scene, const SceneAnalysis& analysis) {
  if (scene.trajectories.empty()) {
    throw Error(ErrorCode::IncompleteAnalyses, "scene has no trajectories");
  }
  for (const auto& t : scene.trajectories) {
    if (analysis.find(t.pedestrian_id) == nullptr) {
      throw Error(ErrorCode::IncompleteAnalyses, "pedestrian " + std::to_string(t.pedestrian_id));
    }
  }
  const auto& meta = scene.metadata;
  SceneSummary doc;
  doc["scene_id"] = meta.scene_id;
  doc["country"] = meta.country;
  doc["fps"] = meta.fps;
  doc["pedestrian_count"] = meta.pedestrian_count;
  doc["frame_range"] = {analysis.scene.frame_range.min, analysis.scene.frame_range.max};
  doc["density"] = to_string(analysis.density);
  doc["density_label"] = meta.density_label ? nlohmann::ordered_json(to_string(*meta.density_label)) : nullptr;
  doc["parameters_fingerprint"] = analysis.config.fingerprint();
  doc["parameters"] = analysis.config.ledger();

  auto peds = nlohmann::ordered_json::array();
  for (const auto& t : scene.trajectories) {
    const auto& p = *analysis.find(t.pedestrian_id);
    nlohmann::ordered_json entry;
    entry["pedestrian_id"] = p.id;
    entry["frames"] = p.frames.size();
    entry["feature_vector"] = {{"x", {p.vector.x.x(), p.vector.x.y()}},
                               {"s", p.vector.s},
                               {"alpha", p.vector.alpha},
                               {"isolation", p.vector.isolation},
                               {"socialization", p.vector.socialization},
                               {"collectivity", p.vector.collectivity}};
    entry["ocean"] = {{"O", p.ocean.O}, {"C", p.ocean.C}, {"E", p.ocean.E}, {"A", p.ocean.A}, {"N", p.ocean.N}};
    entry["emotions"] = {{"fear", p.emotions.fear},
                         {"happiness", p.emotions.happiness},
                         {"sadness", p.emotions.sadness},
                         {"anger", p.emotions.anger},
                         {"dominant", to_string(p.emotions.dominant())}};
    auto timeline = nlohmann::ordered_json::array();
    for (const auto& seg : p.animation_timeline()) {
      timeline.push_back({{"state", to_string(seg.state)}, {"first", seg.first}, {"last", seg.last}});
    }
    entry["animation"] = std::move(timeline);
    peds.push_back(std::move(entry));
  }
  doc["pedestrians"] = std::move(peds);
  return doc;
}

}  // namespace crowdlens
