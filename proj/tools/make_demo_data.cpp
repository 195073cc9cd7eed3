// Writes the demo corpus: six crowd scenes shaped like the dataset videos,
// the three highlighted-pedestrian clips and their question annotations.

#include <fstream>
#include <iostream>

#include <json.hpp>

#include "crowdlens/synthetic.hpp"
#include "crowdlens/trajectory_io.hpp"

namespace fs = std::filesystem;
using namespace crowdlens;

namespace {

bool write(const fs::path& path, const std::string& text) {
  fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << text;
  if (!out) {
    std::cerr << "make_demo_data: cannot write " << path << "\n";
    return false;
  }
  return true;
}

}  // namespace

int main(int argc, char** argv) {
  const fs::path root = argc > 1 ? argv[1] : "data";
  bool ok = true;
  for (const auto& video : synthetic::cultural_crowds_videos()) {
    ok &= write(root / "scenes" / (video.scene_id + ".csv"),
                serialize_tracking_file(synthetic::crowd_scene(video), TrackingFormat::Csv));
  }
  auto annotations = nlohmann::ordered_json::array();
  for (const auto& s : synthetic::highlight_scenarios()) {
    ok &= write(root / "scenarios" / (s.scene.metadata.scene_id + ".csv"),
                serialize_tracking_file(s.scene, TrackingFormat::Csv));
    for (const auto& q : s.questions) {
      annotations.push_back({{"scene_id", q.scene_id},
                             {"question", q.label},
                             {"yellow_id", q.yellow_id},
                             {"red_id", q.red_id}});
    }
  }
  ok &= write(root / "annotations.json", annotations.dump(2) + "\n");
  return ok ? 0 : 3;
}
