#pragma once

// Deterministic scene generators: reconstructions of the three
// highlighted-pedestrian clips and crowd scenes shaped like the dataset videos.

#include <cstdint>
#include <string>
#include <vector>

#include "crowdlens/scene_classify.hpp"
#include "crowdlens/trajectory_io.hpp"

namespace crowdlens::synthetic {

struct Scenario {
  TrackedScene scene;
  PedestrianId yellow = 0;
  PedestrianId red = 0;
  std::vector<HighlightAnnotation> questions;
  std::vector<Answer> expected;  // same order as `questions`
};

/// Yellow walks inside a group; red cuts across the group alone, faster. Q1, Q2.
Scenario p01();
/// Yellow weaves through a walking group; red walks alone and slowly, far away. Q3, Q4.
Scenario p02();
/// Yellow walks with a group; red walks alone against the flow. Q5, Q6, Q7.
Scenario p03();

std::vector<Scenario> highlight_scenarios();

struct VideoInfo {
  std::string scene_id;
  std::string country;
  std::size_t pedestrians = 0;
  DensityLevel density = DensityLevel::Low;
};

/// AE-01, AT-03, BR-01, BR-15, BR-25, BR-34.
const std::vector<VideoInfo>& cultural_crowds_videos();

/// Random-walk crowd with the video's metadata and pedestrian count.
TrackedScene crowd_scene(const VideoInfo& video, Frame frames = 120, std::uint64_t seed = 0);

}  // namespace crowdlens::synthetic
