#include "crowdlens/service.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "crowdlens/error.hpp"
#include "text_util.hpp"

namespace crowdlens {

namespace {

Highlight parse_highlight(std::string_view text) {
  const auto t = detail::trim(text);
  if (t == "yellow") return Highlight::Yellow;
  if (t == "red") return Highlight::Red;
  if (t == "none" || t.empty()) return Highlight::None;
  throw Error(ErrorCode::InvalidParameter, "highlight colour must be yellow, red or none");
}

bool is_tracking_input(const std::filesystem::path& p) {
  const auto name = p.filename().string();
  if (name.ends_with(".summary.json") || name.ends_with(".features.json")) {
    return false;
  }
  return format_for_path(p).has_value();
}

}  // namespace

void SceneStore::add(SceneAnalysis analysis) {
  auto id = analysis.scene.metadata.scene_id;
  if (scenes_.contains(id)) {
    throw Error(ErrorCode::InvalidParameter, "duplicate scene_id " + id);
  }
  scenes_.emplace(std::move(id), std::make_shared<const SceneAnalysis>(std::move(analysis)));
}

std::vector<SceneMetadata> SceneStore::list_scenes() const {
  std::vector<SceneMetadata> out;
  out.reserve(scenes_.size());
  for (const auto& [id, scene] : scenes_) {
    out.push_back(scene->scene.metadata);
  }
  return out;
}

std::shared_ptr<const SceneAnalysis> SceneStore::find(std::string_view scene_id) const {
  const auto it = scenes_.find(scene_id);
  return it == scenes_.end() ? nullptr : it->second;
}

std::shared_ptr<const SceneAnalysis> SceneStore::get(std::string_view scene_id) const {
  auto scene = find(scene_id);
  if (!scene) {
    throw Error(ErrorCode::UnknownScene, std::string(scene_id));
  }
  return scene;
}

SceneStore SceneStore::load_directory(const std::filesystem::path& dir, const AnalysisConfig& config) {
  std::error_code ec;
  if (!std::filesystem::is_directory(dir, ec)) {
    throw Error(ErrorCode::StoreUnavailable, dir.string() + " is not a directory");
  }
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.is_regular_file() && is_tracking_input(entry.path())) {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());
  SceneStore store;
  for (const auto& f : files) {
    store.add(analyze_scene(read_tracking_file(f), config));
  }
  return store;
}

std::string_view to_string(Highlight h) {
  switch (h) {
    case Highlight::None: return "none";
    case Highlight::Yellow: return "yellow";
    case Highlight::Red: return "red";
  }
  return "none";
}

OverlayConfig OverlayConfig::from_query(std::string_view overlays, std::string_view highlight) {
  OverlayConfig cfg;
  for (const auto token : detail::split(overlays, ',')) {
    const auto t = detail::trim(token);
    if (t.empty() || t == "none") {
      continue;
    }
    if (t == "emotion") {
      cfg.show_emotion = true;
    } else if (t == "socialization") {
      cfg.show_socialization = true;
    } else if (t == "collectivity") {
      cfg.show_collectivity = true;
    } else if (t == "all") {
      cfg.show_emotion = cfg.show_socialization = cfg.show_collectivity = true;
    } else {
      throw Error(ErrorCode::InvalidParameter, "unknown overlay '" + std::string(t) + "'");
    }
  }
  for (const auto token : detail::split(highlight, ',')) {
    const auto t = detail::trim(token);
    if (t.empty()) {
      continue;
    }
    const auto colon = t.find(':');
    const auto id = colon == std::string_view::npos ? std::nullopt : detail::parse_int(t.substr(0, colon));
    if (!id) {
      throw Error(ErrorCode::InvalidParameter, "highlight entries look like <id>:<colour>");
    }
    cfg.highlight[*id] = parse_highlight(t.substr(colon + 1));
  }
  return cfg;
}

OverlayConfig OverlayConfig::from_json(const nlohmann::json& doc) {
  if (doc.is_null()) {
    return {};
  }
  if (!doc.is_object()) {
    throw Error(ErrorCode::InvalidParameter, "overlay must be a JSON object");
  }
  OverlayConfig cfg;
  try {
    cfg.show_emotion = doc.value("show_emotion", false);
    cfg.show_socialization = doc.value("show_socialization", false);
    cfg.show_collectivity = doc.value("show_collectivity", false);
    if (doc.contains("highlight")) {
      for (const auto& [key, value] : doc["highlight"].items()) {
        const auto id = detail::parse_int(key);
        if (!id) {
          throw Error(ErrorCode::InvalidParameter, "highlight keys are pedestrian ids");
        }
        cfg.highlight[*id] = parse_highlight(value.get<std::string>());
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidParameter, e.what());
  }
  return cfg;
}

nlohmann::ordered_json FramePayload::to_json() const {
  nlohmann::ordered_json doc;
  doc["scene_id"] = scene_id;
  doc["frame"] = frame;
  auto peds = nlohmann::ordered_json::array();
  for (const auto& p : pedestrians) {
    nlohmann::ordered_json e;
    e["id"] = p.id;
    e["x"] = p.position.x();
    e["y"] = p.position.y();
    e["animation"] = to_string(p.animation);
    if (p.highlight != Highlight::None) {
      e["highlight"] = to_string(p.highlight);
    }
    if (p.emotion) {
      e["emotion"] = {{"fear", p.emotion->fear},
                      {"happiness", p.emotion->happiness},
                      {"sadness", p.emotion->sadness},
                      {"anger", p.emotion->anger},
                      {"dominant", to_string(p.emotion->dominant())}};
    }
    if (p.socialization) {
      e["socialization"] = *p.socialization;
    }
    if (p.collectivity) {
      e["collectivity"] = *p.collectivity;
    }
    peds.push_back(std::move(e));
  }
  doc["pedestrians"] = std::move(peds);
  return doc;
}

FramePayload frame_payload(const SceneAnalysis& analysis, Frame frame, const OverlayConfig& overlay) {
  const auto& range = analysis.scene.frame_range;
  if (!range.contains(frame)) {
    throw Error(ErrorCode::FrameOutOfRange, std::to_string(frame) + " outside [" + std::to_string(range.min) + ", " +
                                                std::to_string(range.max) + "]");
  }
  FramePayload out;
  out.scene_id = analysis.scene.metadata.scene_id;
  out.frame = frame;
  for (const auto& ped : analysis.pedestrians) {
    const auto* f = ped.at(frame);
    if (f == nullptr) {
      continue;
    }
    const auto k = static_cast<std::size_t>(f - ped.frames.data());
    PedestrianPayload p;
    p.id = ped.id;
    p.position = f->position;
    p.animation = ped.animation[k];
    if (const auto it = overlay.highlight.find(ped.id); it != overlay.highlight.end()) {
      p.highlight = it->second;
    }
    if (overlay.show_emotion) {
      p.emotion = ped.emotions;
    }
    if (overlay.show_socialization) {
      p.socialization = ped.frame_socialization[k];
    }
    if (overlay.show_collectivity) {
      p.collectivity = f->collectivity;
    }
    out.pedestrians.push_back(std::move(p));
  }
  return out;
}

FramePayload get_frame_payload(const SceneStore& store, std::string_view scene_id, Frame frame,
                               const OverlayConfig& overlay) {
  return frame_payload(*store.get(scene_id), frame, overlay);
}

std::string_view to_string(PlaybackState s) {
  switch (s) {
    case PlaybackState::Playing: return "Playing";
    case PlaybackState::Paused: return "Paused";
    case PlaybackState::Stopped: return "Stopped";
  }
  return "Paused";
}

bool is_allowed_rate(double rate) {
  return std::find(kPlaybackRates.begin(), kPlaybackRates.end(), rate) != kPlaybackRates.end();
}

nlohmann::ordered_json PlaybackSession::to_json() const {
  return {{"session_id", session_id},
          {"scene_id", scene_id},
          {"cursor", cursor},
          {"rate", rate},
          {"state", to_string(state)},
          {"direction", direction == PlaybackDirection::Forward ? "forward" : "reverse"}};
}

PlaybackSession advance_session(PlaybackSession s, double wall_dt, int fps, const FrameRange& range) {
  if (s.state != PlaybackState::Playing) {
    return s;
  }
  const double exact = std::max(0.0, wall_dt) * fps * s.rate + s.pending_frames;
  const auto steps = static_cast<Frame>(std::llround(exact));
  s.pending_frames = exact - static_cast<double>(steps);
  if (s.direction == PlaybackDirection::Forward) {
    s.cursor += steps;
    if (s.cursor >= range.max) {
      s.cursor = range.max;
      s.state = PlaybackState::Stopped;
      s.pending_frames = 0.0;
    }
  } else {
    s.cursor -= steps;
    if (s.cursor <= range.min) {
      s.cursor = range.min;
      s.state = PlaybackState::Paused;
      s.direction = PlaybackDirection::Forward;
      s.pending_frames = 0.0;
    }
  }
  s.cursor = range.clamp(s.cursor);
  return s;
}

ControlCommand ControlCommand::from_json(const nlohmann::json& doc) {
  if (!doc.is_object() || !doc.contains("action") || !doc["action"].is_string()) {
    throw Error(ErrorCode::InvalidParameter, "control body needs an 'action' string");
  }
  const auto action = doc["action"].get<std::string>();
  ControlCommand cmd;
  if (action == "play") {
    cmd.action = Action::Play;
  } else if (action == "pause") {
    cmd.action = Action::Pause;
  } else if (action == "stop") {
    cmd.action = Action::Stop;
  } else if (action == "rewind") {
    cmd.action = Action::Rewind;
  } else if (action == "rate") {
    cmd.action = Action::Rate;
    if (!doc.contains("rate") || !doc["rate"].is_number()) {
      throw Error(ErrorCode::InvalidParameter, "rate control needs a numeric 'rate'");
    }
    cmd.rate = doc["rate"].get<double>();
  } else if (action == "seek") {
    cmd.action = Action::Seek;
    if (!doc.contains("frame") || !doc["frame"].is_number_integer()) {
      throw Error(ErrorCode::InvalidParameter, "seek control needs an integer 'frame'");
    }
    cmd.seek = doc["frame"].get<Frame>();
  } else {
    throw Error(ErrorCode::InvalidParameter, "unknown action '" + action + "'");
  }
  return cmd;
}

PlaybackSession apply_control(PlaybackSession s, const ControlCommand& cmd, const FrameRange& range) {
  using Action = ControlCommand::Action;
  switch (cmd.action) {
    case Action::Play:
      if (s.state == PlaybackState::Stopped && s.cursor >= range.max) {
        s.cursor = range.min;
      }
      s.state = PlaybackState::Playing;
      s.direction = PlaybackDirection::Forward;
      s.pending_frames = 0.0;
      break;
    case Action::Pause:
      if (s.state == PlaybackState::Playing) {
        s.state = PlaybackState::Paused;
      }
      break;
    case Action::Stop:
      s.state = PlaybackState::Stopped;
      s.cursor = range.min;
      s.direction = PlaybackDirection::Forward;
      s.pending_frames = 0.0;
      break;
    case Action::Rewind:
      s.state = PlaybackState::Playing;
      s.direction = PlaybackDirection::Reverse;
      s.pending_frames = 0.0;
      break;
    case Action::Rate:
      if (!is_allowed_rate(cmd.rate)) {
        throw Error(ErrorCode::InvalidParameter, "rate must be one of 0.5, 1, 2, 4");
      }
      s.rate = cmd.rate;
      break;
    case Action::Seek:
      s.cursor = range.clamp(cmd.seek);
      s.pending_frames = 0.0;
      if (s.state == PlaybackState::Stopped) {
        s.state = PlaybackState::Paused;
      }
      break;
  }
  return s;
}

std::shared_ptr<SessionManager::Entry> SessionManager::entry(std::string_view session_id) const {
  std::shared_lock lock(map_mutex_);
  const auto it = sessions_.find(session_id);
  if (it == sessions_.end()) {
    throw Error(ErrorCode::UnknownSession, std::string(session_id));
  }
  return it->second;
}

void SessionManager::catch_up(Entry& e, Clock::time_point now) {
  const double dt = std::chrono::duration<double>(now - e.last_tick).count();
  e.session = advance_session(std::move(e.session), dt, e.scene->scene.metadata.fps, e.scene->scene.frame_range);
  e.last_tick = std::max(e.last_tick, now);
}

PlaybackSession SessionManager::create(std::string_view scene_id, OverlayConfig overlay, Clock::time_point now) {
  auto scene = store_->get(scene_id);
  static thread_local std::mt19937_64 rng{std::random_device{}()};
  auto e = std::make_shared<Entry>();
  e->scene = scene;
  e->last_tick = now;
  e->session.scene_id = std::string(scene_id);
  e->session.cursor = scene->scene.frame_range.min;
  e->session.overlay = std::move(overlay);

  std::unique_lock lock(map_mutex_);
  e->session.session_id = detail::to_hex(rng()) + detail::to_hex(++counter_);
  sessions_.emplace(e->session.session_id, e);
  return e->session;
}

PlaybackSession SessionManager::control(std::string_view session_id, const ControlCommand& cmd,
                                        Clock::time_point now) {
  auto e = entry(session_id);
  std::lock_guard lock(e->mutex);
  catch_up(*e, now);
  e->session = apply_control(std::move(e->session), cmd, e->scene->scene.frame_range);
  return e->session;
}

PlaybackSession SessionManager::poll(std::string_view session_id, Clock::time_point now) {
  auto e = entry(session_id);
  std::lock_guard lock(e->mutex);
  catch_up(*e, now);
  return e->session;
}

void SessionManager::close(std::string_view session_id) {
  std::unique_lock lock(map_mutex_);
  const auto it = sessions_.find(session_id);
  if (it == sessions_.end()) {
    throw Error(ErrorCode::UnknownSession, std::string(session_id));
  }
  sessions_.erase(it);
}

std::size_t SessionManager::size() const {
  std::shared_lock lock(map_mutex_);
  return sessions_.size();
}

}  // namespace crowdlens
