#pragma once

#include <array>
#include <chrono>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "crowdlens/analysis.hpp"

namespace crowdlens {

/// Analyzed scenes keyed by scene_id. Filled once at ingest, then read-only.
class SceneStore {
 public:
  void add(SceneAnalysis analysis);

  /// Sorted by scene_id.
  std::vector<SceneMetadata> list_scenes() const;
  std::shared_ptr<const SceneAnalysis> find(std::string_view scene_id) const;
  /// Throws UnknownScene.
  std::shared_ptr<const SceneAnalysis> get(std::string_view scene_id) const;
  std::size_t size() const { return scenes_.size(); }

  /// Ingests every tracking file in `dir`; throws StoreUnavailable if `dir` is not a directory.
  static SceneStore load_directory(const std::filesystem::path& dir, const AnalysisConfig& config = {});

 private:
  std::map<std::string, std::shared_ptr<const SceneAnalysis>, std::less<>> scenes_;
};

enum class Highlight { None, Yellow, Red };
std::string_view to_string(Highlight h);

struct OverlayConfig {
  bool show_emotion = false;
  bool show_socialization = false;
  bool show_collectivity = false;
  std::map<PedestrianId, Highlight> highlight;

  /// `overlays` is a comma list of emotion|socialization|collectivity;
  /// `highlight` is a comma list of id:yellow|red|none. Throws InvalidParameter.
  static OverlayConfig from_query(std::string_view overlays, std::string_view highlight);
  static OverlayConfig from_json(const nlohmann::json& doc);
};

struct PedestrianPayload {
  PedestrianId id = 0;
  Vec2 position = Vec2::Zero();
  AnimationState animation = AnimationState::Idle;
  Highlight highlight = Highlight::None;
  std::optional<EmotionScores> emotion;
  std::optional<double> socialization;
  std::optional<double> collectivity;
};

struct FramePayload {
  std::string scene_id;
  Frame frame = 0;
  std::vector<PedestrianPayload> pedestrians;

  nlohmann::ordered_json to_json() const;
};

/// Throws UnknownScene, FrameOutOfRange.
FramePayload get_frame_payload(const SceneStore& store, std::string_view scene_id, Frame frame,
                               const OverlayConfig& overlay);
FramePayload frame_payload(const SceneAnalysis& analysis, Frame frame, const OverlayConfig& overlay);

enum class PlaybackState { Playing, Paused, Stopped };
enum class PlaybackDirection { Forward, Reverse };
std::string_view to_string(PlaybackState s);

inline constexpr std::array<double, 4> kPlaybackRates = {0.5, 1.0, 2.0, 4.0};
bool is_allowed_rate(double rate);

struct PlaybackSession {
  std::string session_id;
  std::string scene_id;
  Frame cursor = 0;
  double rate = 1.0;
  PlaybackState state = PlaybackState::Paused;
  PlaybackDirection direction = PlaybackDirection::Forward;
  double pending_frames = 0.0;  // fractional advance carried between ticks
  OverlayConfig overlay;

  nlohmann::ordered_json to_json() const;
};

/// Playing sessions move by round(wall_dt * fps * rate) frames (with the
/// fractional remainder carried), clamped to `range`. Reaching the last frame
/// stops playback; rewinding to the first frame pauses it.
PlaybackSession advance_session(PlaybackSession s, double wall_dt, int fps, const FrameRange& range);

struct ControlCommand {
  enum class Action { Play, Pause, Stop, Rewind, Rate, Seek };
  Action action = Action::Play;
  double rate = 1.0;
  Frame seek = 0;

  /// {"action": "play|pause|stop|rewind|rate|seek", "rate": x, "frame": n}. Throws InvalidParameter.
  static ControlCommand from_json(const nlohmann::json& doc);
};

PlaybackSession apply_control(PlaybackSession s, const ControlCommand& cmd, const FrameRange& range);

/// Independent playback sessions over a shared store. Each operation first
/// advances the touched session to `now`.
class SessionManager {
 public:
  using Clock = std::chrono::steady_clock;

  explicit SessionManager(std::shared_ptr<const SceneStore> store) : store_(std::move(store)) {}

  PlaybackSession create(std::string_view scene_id, OverlayConfig overlay = {}, Clock::time_point now = Clock::now());
  PlaybackSession control(std::string_view session_id, const ControlCommand& cmd, Clock::time_point now = Clock::now());
  PlaybackSession poll(std::string_view session_id, Clock::time_point now = Clock::now());
  void close(std::string_view session_id);
  std::size_t size() const;

  const SceneStore& store() const { return *store_; }

 private:
  struct Entry {
    std::mutex mutex;
    PlaybackSession session;
    Clock::time_point last_tick;
    std::shared_ptr<const SceneAnalysis> scene;
  };

  std::shared_ptr<Entry> entry(std::string_view session_id) const;
  static void catch_up(Entry& e, Clock::time_point now);

  std::shared_ptr<const SceneStore> store_;
  mutable std::shared_mutex map_mutex_;
  std::map<std::string, std::shared_ptr<Entry>, std::less<>> sessions_;
  std::uint64_t counter_ = 0;
};

}  // namespace crowdlens
