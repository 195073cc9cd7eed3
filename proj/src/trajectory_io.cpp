#include "crowdlens/trajectory_io.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include <Eigen/LU>
#include <Eigen/Geometry>
#include <json.hpp>

#include "crowdlens/error.hpp"
#include "text_util.hpp"

namespace crowdlens {

using detail::format_double;
using detail::parse_double;
using detail::parse_int;
using detail::trim;

namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
  return out;
}

bool all_finite(const Vec2& p) { return std::isfinite(p.x()) && std::isfinite(p.y()); }

Eigen::Matrix3d parse_homography(std::string_view text) {
  std::string normalized(text);
  std::replace(normalized.begin(), normalized.end(), ',', ' ');
  std::istringstream in(normalized);
  std::vector<double> values;
  std::string token;
  while (in >> token) {
    const auto v = parse_double(token);
    if (!v || !std::isfinite(*v)) {
      throw Error(ErrorCode::MalformedHeader, "homography entry '" + token + "' is not a finite number");
    }
    values.push_back(*v);
  }
  if (values.size() != 9) {
    throw Error(ErrorCode::MalformedHeader,
                "homography needs 9 values, got " + std::to_string(values.size()));
  }
  Eigen::Matrix3d m;
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) {
      m(r, c) = values[static_cast<std::size_t>(r * 3 + c)];
    }
  }
  return m;
}

struct HeaderState {
  SceneMetadata metadata;
  std::optional<std::size_t> declared_count;
};

void apply_header_entry(HeaderState& state, std::string_view key, std::string_view value) {
  auto& meta = state.metadata;
  if (key == "fps") {
    const auto fps = parse_int(value);
    if (!fps || *fps <= 0 || *fps > 100000) {
      throw Error(ErrorCode::MalformedHeader, "fps must be a positive integer, got '" + std::string(value) + "'");
    }
    meta.fps = static_cast<int>(*fps);
  } else if (key == "scene_id") {
    meta.scene_id = std::string(value);
  } else if (key == "country") {
    meta.country = std::string(value);
  } else if (key == "density_label") {
    const auto level = parse_density_level(value);
    if (!level) {
      throw Error(ErrorCode::MalformedHeader, "unknown density_label '" + std::string(value) + "'");
    }
    meta.density_label = level;
  } else if (key == "coords") {
    const auto v = lower(value);
    if (v == "image") {
      meta.coords = CoordinateSpace::Image;
    } else if (v == "world") {
      meta.coords = CoordinateSpace::World;
    } else {
      throw Error(ErrorCode::MalformedHeader, "coords must be image or world, got '" + std::string(value) + "'");
    }
  } else if (key == "homography") {
    meta.homography = parse_homography(value);
  } else if (key == "pedestrian_count") {
    const auto n = parse_int(value);
    if (!n || *n < 0) {
      throw Error(ErrorCode::MalformedHeader, "pedestrian_count must be a non-negative integer");
    }
    state.declared_count = static_cast<std::size_t>(*n);
  }
  // Unknown keys are tolerated so that newer writers stay readable.
}

void check_header(const HeaderState& state) {
  if (state.metadata.coords == CoordinateSpace::Image && !state.metadata.homography) {
    throw Error(ErrorCode::MalformedHeader, "coords=image requires a homography header");
  }
}

struct RowCollector {
  std::map<PedestrianId, Trajectory> by_id;

  void add(Frame frame, PedestrianId id, const Vec2& p, std::size_t row) {
    if (frame < 0) {
      throw Error(ErrorCode::MalformedRow, "row " + std::to_string(row) + ": negative frame");
    }
    if (!all_finite(p)) {
      throw Error(ErrorCode::NonFinitePosition, "row " + std::to_string(row));
    }
    auto& traj = by_id[id];
    traj.pedestrian_id = id;
    if (!traj.samples.empty() && frame <= traj.samples.back().frame) {
      throw Error(ErrorCode::NonMonotonicFrames, "pedestrian " + std::to_string(id) + " at frame " +
                                                     std::to_string(frame) + " (row " + std::to_string(row) + ")");
    }
    traj.samples.push_back({frame, p});
  }

  TrackedScene finish(HeaderState state) {
    std::vector<Trajectory> trajectories;
    trajectories.reserve(by_id.size());
    for (auto& [id, traj] : by_id) {
      trajectories.push_back(std::move(traj));
    }
    auto scene = make_scene(std::move(state.metadata), std::move(trajectories));
    if (state.declared_count && *state.declared_count != scene.metadata.pedestrian_count) {
      throw Error(ErrorCode::MalformedHeader,
                  "pedestrian_count=" + std::to_string(*state.declared_count) + " but file holds " +
                      std::to_string(scene.metadata.pedestrian_count) + " trajectories");
    }
    return scene;
  }
};

TrackedScene parse_csv(std::string_view bytes) {
  if (bytes.substr(0, 3) == "\xEF\xBB\xBF") {
    bytes.remove_prefix(3);
  }
  HeaderState state;
  RowCollector rows;
  bool saw_columns = false;
  std::size_t line_no = 0;
  for (const auto raw_line : detail::split(bytes, '\n')) {
    ++line_no;
    const auto line = trim(raw_line);
    if (line.empty()) {
      continue;
    }
    if (line.front() == '#') {
      const auto body = trim(line.substr(1));
      const auto eq = body.find('=');
      if (!saw_columns && eq != std::string_view::npos) {
        apply_header_entry(state, trim(body.substr(0, eq)), trim(body.substr(eq + 1)));
      }
      continue;
    }
    const auto fields = detail::split(line, ',');
    if (!saw_columns) {
      if (fields.size() != 4 || trim(fields[0]) != "frame" || trim(fields[1]) != "id" || trim(fields[2]) != "x" ||
          trim(fields[3]) != "y") {
        throw Error(ErrorCode::MalformedHeader,
                    "line " + std::to_string(line_no) + ": expected column header 'frame,id,x,y'");
      }
      check_header(state);
      saw_columns = true;
      continue;
    }
    if (fields.size() != 4) {
      throw Error(ErrorCode::MalformedRow, "line " + std::to_string(line_no) + ": expected 4 fields");
    }
    const auto frame = parse_int(fields[0]);
    const auto id = parse_int(fields[1]);
    const auto x = parse_double(fields[2]);
    const auto y = parse_double(fields[3]);
    if (!frame || !id || !x || !y) {
      throw Error(ErrorCode::MalformedRow, "line " + std::to_string(line_no) + ": unparsable field");
    }
    rows.add(*frame, *id, Vec2(*x, *y), line_no);
  }
  if (!saw_columns) {
    throw Error(ErrorCode::MalformedHeader, "missing column header 'frame,id,x,y'");
  }
  return rows.finish(std::move(state));
}

std::string json_scalar_text(const nlohmann::json& v) {
  if (v.is_string()) {
    return v.get<std::string>();
  }
  return v.dump();
}

TrackedScene parse_json(std::string_view bytes) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(bytes);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::MalformedHeader, std::string("invalid JSON: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("samples") || !doc["samples"].is_array()) {
    throw Error(ErrorCode::MalformedHeader, "expected an object with a 'samples' array");
  }
  HeaderState state;
  for (const auto& [key, value] : doc.items()) {
    if (key == "samples") {
      continue;
    }
    if (key == "homography") {
      if (!value.is_array()) {
        throw Error(ErrorCode::MalformedHeader, "homography must be an array of 9 numbers");
      }
      std::string joined;
      for (const auto& e : value) {
        joined += json_scalar_text(e) + " ";
      }
      apply_header_entry(state, key, joined);
    } else if (!value.is_null()) {
      apply_header_entry(state, key, json_scalar_text(value));
    }
  }
  check_header(state);

  RowCollector rows;
  std::size_t index = 0;
  for (const auto& s : doc["samples"]) {
    ++index;
    if (!s.is_object() || !s.contains("frame") || !s.contains("id") || !s.contains("x") || !s.contains("y") ||
        !s["frame"].is_number_integer() || !s["id"].is_number_integer()) {
      throw Error(ErrorCode::MalformedRow, "sample " + std::to_string(index) + ": need integer frame/id and x/y");
    }
    const auto& x = s["x"];
    const auto& y = s["y"];
    if (x.is_null() || y.is_null()) {
      throw Error(ErrorCode::NonFinitePosition, "row " + std::to_string(index));
    }
    if (!x.is_number() || !y.is_number()) {
      throw Error(ErrorCode::MalformedRow, "sample " + std::to_string(index) + ": x/y must be numbers");
    }
    rows.add(s["frame"].get<Frame>(), s["id"].get<PedestrianId>(), Vec2(x.get<double>(), y.get<double>()), index);
  }
  return rows.finish(std::move(state));
}

struct RowRef {
  Frame frame;
  PedestrianId id;
  const Vec2* position;
};

std::vector<RowRef> rows_by_frame(const TrackedScene& scene) {
  std::vector<RowRef> rows;
  for (const auto& t : scene.trajectories) {
    for (const auto& s : t.samples) {
      rows.push_back({s.frame, t.pedestrian_id, &s.position});
    }
  }
  std::sort(rows.begin(), rows.end(),
            [](const RowRef& a, const RowRef& b) { return std::tie(a.frame, a.id) < std::tie(b.frame, b.id); });
  return rows;
}

std::string homography_text(const Eigen::Matrix3d& m) {
  std::string out;
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) {
      if (!out.empty()) {
        out += ',';
      }
      out += format_double(m(r, c));
    }
  }
  return out;
}

std::string single_line(std::string_view s) {
  std::string out(s);
  std::replace(out.begin(), out.end(), '\n', ' ');
  std::replace(out.begin(), out.end(), '\r', ' ');
  return out;
}

std::string serialize_csv(const TrackedScene& scene) {
  const auto& m = scene.metadata;
  std::string out;
  out += "# scene_id=" + single_line(m.scene_id) + "\n";
  out += "# country=" + single_line(m.country) + "\n";
  out += "# fps=" + std::to_string(m.fps) + "\n";
  if (m.density_label) {
    out += "# density_label=" + std::string(to_string(*m.density_label)) + "\n";
  }
  out += "# coords=" + std::string(to_string(m.coords)) + "\n";
  if (m.homography) {
    out += "# homography=" + homography_text(*m.homography) + "\n";
  }
  out += "# pedestrian_count=" + std::to_string(m.pedestrian_count) + "\n";
  out += "frame,id,x,y\n";
  for (const auto& r : rows_by_frame(scene)) {
    out += std::to_string(r.frame) + ',' + std::to_string(r.id) + ',' + format_double(r.position->x()) + ',' +
           format_double(r.position->y()) + '\n';
  }
  return out;
}

std::string serialize_json(const TrackedScene& scene) {
  const auto& m = scene.metadata;
  nlohmann::ordered_json doc;
  doc["scene_id"] = m.scene_id;
  doc["country"] = m.country;
  doc["fps"] = m.fps;
  if (m.density_label) {
    doc["density_label"] = to_string(*m.density_label);
  }
  doc["coords"] = to_string(m.coords);
  if (m.homography) {
    auto h = nlohmann::ordered_json::array();
    for (int r = 0; r < 3; ++r) {
      for (int c = 0; c < 3; ++c) {
        h.push_back((*m.homography)(r, c));
      }
    }
    doc["homography"] = h;
  }
  doc["pedestrian_count"] = m.pedestrian_count;
  auto samples = nlohmann::ordered_json::array();
  for (const auto& r : rows_by_frame(scene)) {
    samples.push_back({{"frame", r.frame}, {"id", r.id}, {"x", r.position->x()}, {"y", r.position->y()}});
  }
  doc["samples"] = std::move(samples);
  return doc.dump(1) + "\n";
}

}  // namespace

std::string_view to_string(DensityLevel level) {
  switch (level) {
    case DensityLevel::Low: return "Low";
    case DensityLevel::Medium: return "Medium";
    case DensityLevel::High: return "High";
  }
  return "Low";
}

std::optional<DensityLevel> parse_density_level(std::string_view text) {
  const auto v = lower(trim(text));
  if (v == "low") return DensityLevel::Low;
  if (v == "medium") return DensityLevel::Medium;
  if (v == "high") return DensityLevel::High;
  return std::nullopt;
}

std::string_view to_string(CoordinateSpace space) {
  return space == CoordinateSpace::Image ? "image" : "world";
}

bool operator==(const SceneMetadata& a, const SceneMetadata& b) {
  if (a.homography.has_value() != b.homography.has_value()) {
    return false;
  }
  if (a.homography && *a.homography != *b.homography) {
    return false;
  }
  return a.scene_id == b.scene_id && a.country == b.country && a.fps == b.fps &&
         a.density_label == b.density_label && a.pedestrian_count == b.pedestrian_count && a.coords == b.coords;
}

const TrajectorySample* Trajectory::find(Frame frame) const {
  const auto it = std::lower_bound(samples.begin(), samples.end(), frame,
                                   [](const TrajectorySample& s, Frame f) { return s.frame < f; });
  return (it != samples.end() && it->frame == frame) ? &*it : nullptr;
}

CoordinateTransform::CoordinateTransform(const Eigen::Matrix3d& matrix) : matrix_(matrix) {
  if (!matrix_.allFinite()) {
    throw Error(ErrorCode::SingularTransform, "matrix has non-finite entries");
  }
  if (std::abs(matrix_.determinant()) <= kMinDeterminant) {
    throw Error(ErrorCode::SingularTransform, "|det| <= 1e-12");
  }
}

Vec2 CoordinateTransform::apply(const Vec2& p) const {
  const Eigen::Vector3d q = matrix_ * p.homogeneous();
  if (std::abs(q.z()) < kMinHomogeneousW) {
    throw Error(ErrorCode::PointAtInfinity,
                "(" + format_double(p.x()) + ", " + format_double(p.y()) + ") maps to w ~ 0");
  }
  return q.hnormalized();
}

const Trajectory* TrackedScene::find(PedestrianId id) const {
  const auto it = std::lower_bound(trajectories.begin(), trajectories.end(), id,
                                   [](const Trajectory& t, PedestrianId v) { return t.pedestrian_id < v; });
  return (it != trajectories.end() && it->pedestrian_id == id) ? &*it : nullptr;
}

TrackedScene make_scene(SceneMetadata metadata, std::vector<Trajectory> trajectories) {
  if (metadata.fps <= 0) {
    throw Error(ErrorCode::InvalidParameter, "fps must be positive");
  }
  std::erase_if(trajectories, [](const Trajectory& t) { return t.samples.empty(); });
  if (trajectories.empty()) {
    throw Error(ErrorCode::EmptyScene, metadata.scene_id.empty() ? "no samples" : metadata.scene_id);
  }
  std::sort(trajectories.begin(), trajectories.end(),
            [](const Trajectory& a, const Trajectory& b) { return a.pedestrian_id < b.pedestrian_id; });

  FrameRange range{trajectories.front().first_frame(), trajectories.front().first_frame()};
  for (std::size_t i = 0; i < trajectories.size(); ++i) {
    const auto& t = trajectories[i];
    if (i > 0 && trajectories[i - 1].pedestrian_id == t.pedestrian_id) {
      throw Error(ErrorCode::NonMonotonicFrames,
                  "pedestrian " + std::to_string(t.pedestrian_id) + " appears in two trajectories");
    }
    for (std::size_t k = 0; k < t.samples.size(); ++k) {
      const auto& s = t.samples[k];
      if (s.frame < 0) {
        throw Error(ErrorCode::MalformedRow, "negative frame for pedestrian " + std::to_string(t.pedestrian_id));
      }
      if (k > 0 && s.frame <= t.samples[k - 1].frame) {
        throw Error(ErrorCode::NonMonotonicFrames, "pedestrian " + std::to_string(t.pedestrian_id));
      }
      if (!all_finite(s.position)) {
        throw Error(ErrorCode::NonFinitePosition,
                    "pedestrian " + std::to_string(t.pedestrian_id) + " frame " + std::to_string(s.frame));
      }
    }
    range.min = std::min(range.min, t.first_frame());
    range.max = std::max(range.max, t.last_frame());
  }
  metadata.pedestrian_count = trajectories.size();
  return TrackedScene{std::move(metadata), std::move(trajectories), range};
}

TrackedScene parse_tracking_file(std::string_view bytes, TrackingFormat format) {
  if (!detail::is_valid_utf8(bytes)) {
    throw Error(ErrorCode::MalformedHeader, "input is not valid UTF-8");
  }
  return format == TrackingFormat::Json ? parse_json(bytes) : parse_csv(bytes);
}

std::string serialize_tracking_file(const TrackedScene& scene, TrackingFormat format) {
  return format == TrackingFormat::Json ? serialize_json(scene) : serialize_csv(scene);
}

std::optional<TrackingFormat> format_for_path(const std::filesystem::path& path) {
  const auto ext = lower(path.extension().string());
  if (ext == ".json") return TrackingFormat::Json;
  if (ext == ".csv" || ext == ".txt") return TrackingFormat::Csv;
  return std::nullopt;
}

TrackedScene read_tracking_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorCode::Io, "cannot open " + path.string());
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  const auto format = format_for_path(path).value_or(TrackingFormat::Csv);
  TrackedScene scene;
  try {
    scene = parse_tracking_file(buf.str(), format);
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.what());
  }
  if (scene.metadata.scene_id.empty()) {
    scene.metadata.scene_id = path.stem().string();
  }
  return scene;
}

TrackedScene apply_transform(const TrackedScene& scene, const CoordinateTransform& t) {
  TrackedScene out = scene;
  for (auto& traj : out.trajectories) {
    for (auto& s : traj.samples) {
      s.position = t.apply(s.position);
    }
  }
  return out;
}

Trajectory fill_gaps(const Trajectory& trajectory, std::optional<Frame> max_gap) {
  if (trajectory.samples.size() < 2) {
    throw Error(ErrorCode::TooFewSamples, "pedestrian " + std::to_string(trajectory.pedestrian_id));
  }
  Trajectory out{trajectory.pedestrian_id, {}};
  out.samples.reserve(static_cast<std::size_t>(trajectory.last_frame() - trajectory.first_frame() + 1));
  out.samples.push_back(trajectory.samples.front());
  for (std::size_t k = 1; k < trajectory.samples.size(); ++k) {
    const auto& a = trajectory.samples[k - 1];
    const auto& b = trajectory.samples[k];
    const Frame span = b.frame - a.frame;
    if (max_gap && span - 1 > *max_gap) {
      throw Error(ErrorCode::TrackLost, "pedestrian " + std::to_string(trajectory.pedestrian_id) + " missing " +
                                            std::to_string(span - 1) + " frames after frame " +
                                            std::to_string(a.frame));
    }
    for (Frame f = a.frame + 1; f < b.frame; ++f) {
      const double u = static_cast<double>(f - a.frame) / static_cast<double>(span);
      out.samples.push_back({f, a.position + u * (b.position - a.position)});
    }
    out.samples.push_back(b);
  }
  return out;
}

TrackedScene normalize_scene(const TrackedScene& scene) {
  TrackedScene world = scene;
  if (scene.metadata.coords == CoordinateSpace::Image) {
    if (!scene.metadata.homography) {
      throw Error(ErrorCode::MalformedHeader, "coords=image requires a homography header");
    }
    world = apply_transform(scene, CoordinateTransform(*scene.metadata.homography));
    world.metadata.coords = CoordinateSpace::World;
  }
  const Frame max_gap = 2 * static_cast<Frame>(world.metadata.fps);
  for (auto& traj : world.trajectories) {
    if (traj.samples.size() >= 2) {
      traj = fill_gaps(traj, max_gap);
    }
  }
  return make_scene(std::move(world.metadata), std::move(world.trajectories));
}

}  // namespace crowdlens
