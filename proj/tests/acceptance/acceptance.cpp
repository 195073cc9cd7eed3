// Acceptance gate. Runs every primary criterion, prints one PASS/FAIL line
// per criterion and exits non-zero if any failed or overran its time limit.

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Geometry>

#include "crowdlens/analysis.hpp"
#include "crowdlens/cli.hpp"
#include "crowdlens/synthetic.hpp"
#include "support/oracles.hpp"

using namespace crowdlens;
namespace fs = std::filesystem;

namespace {

struct Criterion {
  std::string name;
  double limit_seconds;
  std::function<std::string()> check;  // empty string on success
};

std::string fmt(const char* pattern, auto... args) {
  char buf[256];
  std::snprintf(buf, sizeof buf, pattern, args...);
  return buf;
}

std::string emotion_mapping_table() {
  // Rows O+, O-, C+, C-, E+, E-, A+, A-, N+, N-; columns Fear, Happiness, Sadness, Anger.
  constexpr std::array<std::array<int, 4>, 10> expected = {{
      {0, 0, 0, -1},
      {0, 0, 0, 1},
      {-1, 0, 0, 0},
      {1, 0, 0, 0},
      {-1, 1, -1, -1},
      {1, 0, 0, 0},
      {0, 0, 0, -1},
      {0, 0, 0, 1},
      {1, -1, 1, 1},
      {-1, 1, -1, -1},
  }};
  const auto& table = EmotionMappingTable::standard();
  int matched = 0;
  for (std::size_t f = 0; f < kFactors.size(); ++f) {
    for (int pol = 0; pol < 2; ++pol) {
      for (std::size_t e = 0; e < kEmotions.size(); ++e) {
        const auto p = pol == 0 ? Polarity::Positive : Polarity::Negative;
        const int want = expected[2 * f + static_cast<std::size_t>(pol)][e];
        if (emotion_contribution(table, kFactors[f], p, kEmotions[e]) != want ||
            table.entries()(static_cast<int>(2 * f) + pol, static_cast<int>(e)) != want) {
          return fmt("mismatch at row %zu column %zu", 2 * f + static_cast<std::size_t>(pol), e);
        }
        ++matched;
      }
    }
  }
  return matched == 40 ? "" : fmt("%d of 40 entries checked", matched);
}

std::string animation_thresholds() {
  const std::vector<std::pair<double, AnimationState>> cases = {
      {0.0, AnimationState::Idle},
      {0.05, AnimationState::Walk},
      {0.08, AnimationState::Run},
      {0.079, AnimationState::Walk},
      {0.0799999999, AnimationState::Walk},
      {std::nextafter(0.08, 0.0), AnimationState::Walk},
  };
  for (const auto& [speed, state] : cases) {
    if (classify_animation(speed) != state) {
      return fmt("speed %.17g classified as %s", speed, std::string(to_string(classify_animation(speed))).c_str());
    }
  }
  return "";
}

std::string pts_conversion() {
  const double meters_per_second = kPreferredTransitionSpeed * 24.0;
  if (std::abs(meters_per_second - 1.92) > 1e-12) {
    return fmt("0.08 m/frame x 24 fps = %.17g", meters_per_second);
  }
  if (std::abs(meters_per_second - 2.0) > 0.1) {
    return fmt("|%.4g - 2| exceeds 0.1", meters_per_second);
  }
  std::printf("  note: 0.08 m/frame x 24 frame/s = %.2f m/s, quoted as 2 m/s after rounding\n", meters_per_second);
  return "";
}

std::string density_labels() {
  const std::array<std::size_t, 6> counts = {12, 10, 16, 15, 25, 34};
  const std::array<DensityLevel, 6> labels = {DensityLevel::Low, DensityLevel::Low,    DensityLevel::Low,
                                              DensityLevel::Low, DensityLevel::Medium, DensityLevel::High};
  for (std::size_t k = 0; k < counts.size(); ++k) {
    if (classify_density(counts[k]) != labels[k]) {
      return fmt("count %zu classified as %s", counts[k], std::string(to_string(classify_density(counts[k]))).c_str());
    }
  }
  for (const auto& video : synthetic::cultural_crowds_videos()) {
    const auto analysis = analyze_scene(synthetic::crowd_scene(video));
    if (analysis.density != video.density) {
      return "scene " + video.scene_id + " classified as " + std::string(to_string(analysis.density));
    }
  }
  return "";
}

std::string collectivity_oracle() {
  oracle::Rng rng(20240601);
  double worst = 0.0;
  std::size_t values = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const auto scene = oracle::random_scene(rng, 50, 100);
    const auto expected = oracle::brute_force_collectivity(scene);
    const auto features = compute_scene_features(scene, {});
    for (const auto& series : features.per_pedestrian) {
      for (const auto& f : series) {
        worst = std::max(worst, std::abs(f.collectivity - expected.at({f.pedestrian_id, f.frame})));
        ++values;
      }
    }
  }
  std::printf("  %zu values, max |diff| = %.3g\n", values, worst);
  return worst <= 1e-9 ? "" : fmt("max |diff| %.3g > 1e-9", worst);
}

std::string isolation_complement() {
  oracle::Rng rng(99);
  double worst = 0.0;
  for (int k = 0; k < 100000; ++k) {
    const auto s = socialization_level(rng.uniform(0.0, 1.0), rng.uniform(0.0, 20.0),
                                       static_cast<double>(rng.integer(0, 30)), {});
    worst = std::max(worst, std::abs(s.isolation + s.socialization - 1.0));
  }
  return worst <= 1e-12 ? "" : fmt("max |phi + theta - 1| = %.3g", worst);
}

std::string scenario_reproduction() {
  struct Expected {
    const char* question;
    const char* answer;
  };
  const std::array<Expected, 7> table = {{{"Q1", "Red"},
                                          {"Q2", "Red"},
                                          {"Q3", "Yellow"},
                                          {"Q4", "Red"},
                                          {"Q5", "Yellow"},
                                          {"Q6", "Yellow"},
                                          {"Q7", "Yellow"}}};
  int correct = 0;
  std::string misses;
  std::size_t k = 0;
  for (const auto& scenario : synthetic::highlight_scenarios()) {
    const auto analysis = analyze_scene(scenario.scene);
    for (const auto& q : scenario.questions) {
      const auto answer = std::string(to_string(answer_question(q, analysis)));
      const auto& want = table.at(k++);
      std::printf("  %s %-13s -> %-6s (expected %s)\n", q.label.c_str(), std::string(to_string(q.question_key)).c_str(),
                  answer.c_str(), want.answer);
      if (q.label == want.question && answer == want.answer) {
        ++correct;
      } else {
        misses += " " + q.label;
      }
    }
  }
  if (k != table.size()) {
    return fmt("%zu questions asked", k);
  }
  return correct == 7 ? "" : fmt("%d/7 correct, missed:", correct) + misses;
}

std::string geometric_invariances() {
  oracle::Rng rng(4242);
  double worst_rotation = 0.0;
  double worst_translation = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const auto traj = oracle::random_walk(rng, 1, 0, rng.integer(2, 200));
    const double angle = rng.uniform(-std::numbers::pi, std::numbers::pi);
    const Vec2 offset(rng.uniform(-100.0, 100.0), rng.uniform(-100.0, 100.0));
    const Eigen::Rotation2Dd rotation(angle);
    auto rotated = traj;
    auto translated = traj;
    for (std::size_t i = 0; i < traj.samples.size(); ++i) {
      rotated.samples[i].position = rotation * traj.samples[i].position;
      translated.samples[i].position = traj.samples[i].position + offset;
    }
    const auto base = kinematic_series(traj);
    const auto r = kinematic_series(rotated);
    const auto t = kinematic_series(translated);
    for (std::size_t i = 0; i < traj.samples.size(); ++i) {
      worst_rotation = std::max(worst_rotation, std::abs(base.variation[i] - r.variation[i]));
      worst_translation = std::max(worst_translation, std::abs(base.speed[i] - t.speed[i]));
    }
  }
  std::printf("  max |d alpha| under rotation = %.3g deg, max |d s| under translation = %.3g m/frame\n", worst_rotation,
              worst_translation);
  if (worst_rotation > 1e-9) {
    return fmt("angular variation moved by %.3g under rotation", worst_rotation);
  }
  return worst_translation <= 1e-9 ? "" : fmt("speed moved by %.3g under translation", worst_translation);
}

std::string read_bytes(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::string determinism() {
  const auto root = fs::temp_directory_path() / ("crowdlens-acceptance-" + std::to_string(std::random_device{}()));
  const auto inputs = root / "scenes";
  fs::create_directories(inputs);
  const auto write = [](const fs::path& p, const std::string& text) { std::ofstream(p, std::ios::binary) << text; };
  for (const auto& video : synthetic::cultural_crowds_videos()) {
    write(inputs / (video.scene_id + ".csv"), serialize_tracking_file(synthetic::crowd_scene(video), TrackingFormat::Csv));
  }
  for (const auto& s : synthetic::highlight_scenarios()) {
    write(inputs / (s.scene.metadata.scene_id + ".csv"), serialize_tracking_file(s.scene, TrackingFormat::Csv));
  }
  std::ostringstream err;
  std::string failure;
  for (const char* run : {"first", "second"}) {
    const int code = run_cli({"analyze", "--input", inputs.string(), "--out", (root / run).string()}, err);
    if (code != 0) {
      failure = fmt("analyze exited with %d: ", code) + err.str();
    }
  }
  std::size_t compared = 0;
  if (failure.empty()) {
    for (const auto& e : fs::directory_iterator(root / "first")) {
      const auto other = root / "second" / e.path().filename();
      if (!fs::exists(other) || read_bytes(e.path()) != read_bytes(other)) {
        failure = "outputs differ: " + e.path().filename().string();
        break;
      }
      ++compared;
    }
  }
  if (failure.empty() && compared != 18) {
    failure = fmt("expected 18 output files, compared %zu", compared);
  }
  std::error_code ec;
  fs::remove_all(root, ec);
  return failure;
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {"emotion mapping table (40 entries, exact)", 1.0, emotion_mapping_table},
      {"animation thresholds (exact)", 1.0, animation_thresholds},
      {"walk/run transition speed conversion", 1.0, pts_conversion},
      {"density labels of the six dataset videos", 1.0, density_labels},
      {"collectivity vs brute force (100 scenes, <= 1e-9)", 30.0, collectivity_oracle},
      {"isolation complement (1e5 inputs, <= 1e-12)", 5.0, isolation_complement},
      {"highlighted-pedestrian scenarios (7/7)", 10.0, scenario_reproduction},
      {"geometric invariances (100 trajectories, <= 1e-9)", 10.0, geometric_invariances},
      {"analyze determinism (byte-identical)", 30.0, determinism},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    std::string reason;
    try {
      reason = c.check();
    } catch (const std::exception& e) {
      reason = std::string("exception: ") + e.what();
    }
    const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (reason.empty() && elapsed > c.limit_seconds) {
      reason = fmt("took %.3f s, limit %.0f s", elapsed, c.limit_seconds);
    }
    const bool pass = reason.empty();
    failures += pass ? 0 : 1;
    std::printf("%s  %s  [%.3f s / %.0f s]%s%s\n", pass ? "PASS" : "FAIL", c.name.c_str(), elapsed, c.limit_seconds,
                pass ? "" : "  ", reason.c_str());
    std::fflush(stdout);
  }
  std::printf("%zu criteria, %d failed\n", criteria.size(), failures);
  return failures == 0 ? 0 : 1;
}
