#include "crowdlens/cli.hpp"

#include <algorithm>
#include <fstream>
#include <future>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "crowdlens/error.hpp"
#include "crowdlens/http_server.hpp"
#include "text_util.hpp"

namespace crowdlens {

namespace fs = std::filesystem;

namespace {

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorCode::Io, "cannot open " + path.string());
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::mutex g_write_mutex;

void write_file(const fs::path& path, std::string_view content) {
  std::lock_guard lock(g_write_mutex);
  if (path.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out || !out.write(content.data(), static_cast<std::streamsize>(content.size()))) {
    throw Error(ErrorCode::Io, "cannot write " + path.string());
  }
}

bool is_analysis_output(const fs::path& p) {
  const auto name = p.filename().string();
  return name.ends_with(".summary.json") || name.ends_with(".features.json");
}

/// Files are taken as given; directories contribute their tracking files, sorted.
std::vector<fs::path> collect_inputs(const std::vector<std::string>& inputs) {
  std::vector<fs::path> out;
  for (const auto& raw : inputs) {
    const fs::path p(raw);
    std::error_code ec;
    if (fs::is_directory(p, ec)) {
      std::vector<fs::path> found;
      for (const auto& e : fs::directory_iterator(p)) {
        if (e.is_regular_file() && !is_analysis_output(e.path()) && format_for_path(e.path())) {
          found.push_back(e.path());
        }
      }
      std::sort(found.begin(), found.end());
      out.insert(out.end(), found.begin(), found.end());
    } else if (fs::exists(p, ec)) {
      out.push_back(p);
    } else {
      throw Error(ErrorCode::Io, "no such file: " + raw);
    }
  }
  return out;
}

struct AnalyzedScene {
  TrackedScene scene;
  SceneAnalysis analysis;
};

/// Scenes run concurrently; the first failure in input order is rethrown.
std::vector<AnalyzedScene> analyze_inputs(const std::vector<fs::path>& files, const AnalysisConfig& config) {
  const std::size_t workers = std::max(1u, std::thread::hardware_concurrency());
  std::vector<AnalyzedScene> out;
  out.reserve(files.size());
  for (std::size_t start = 0; start < files.size(); start += workers) {
    std::vector<std::future<AnalyzedScene>> batch;
    for (std::size_t k = start; k < std::min(files.size(), start + workers); ++k) {
      batch.push_back(std::async(std::launch::async, [&config, path = files[k]] {
        auto scene = read_tracking_file(path);
        auto analysis = analyze_scene(scene, config);
        return AnalyzedScene{std::move(scene), std::move(analysis)};
      }));
    }
    for (auto& f : batch) {
      out.push_back(f.get());
    }
  }
  std::set<std::string> ids;
  for (const auto& a : out) {
    if (!ids.insert(a.scene.metadata.scene_id).second) {
      throw Error(ErrorCode::InvalidParameter, "duplicate scene_id " + a.scene.metadata.scene_id);
    }
  }
  std::sort(out.begin(), out.end(), [](const AnalyzedScene& a, const AnalyzedScene& b) {
    return a.scene.metadata.scene_id < b.scene.metadata.scene_id;
  });
  return out;
}

std::string dump(const nlohmann::ordered_json& doc) { return doc.dump(2) + "\n"; }

void add_analysis_options(CLI::App* cmd, ConfigOverrides& o) {
  cmd->add_option("--config", o.config_file, "JSON config file (flags take precedence)");
  cmd->add_option("--gamma", o.gamma, "Collectivity gain");
  cmd->add_option("--beta", o.beta, "Collectivity decay");
  cmd->add_option("--w1", o.w1, "Speed weight of the dissimilarity");
  cmd->add_option("--w2", o.w2, "Orientation weight of the dissimilarity");
  cmd->add_option("--registry", o.registry, "Personality item registry (JSON)");
}

int cmd_ingest(const std::vector<std::string>& inputs, const fs::path& out_dir) {
  for (const auto& path : collect_inputs(inputs)) {
    const auto scene = normalize_scene(read_tracking_file(path));
    write_file(out_dir / (scene.metadata.scene_id + ".csv"), serialize_tracking_file(scene, TrackingFormat::Csv));
  }
  return 0;
}

int cmd_analyze(const std::vector<std::string>& inputs, const fs::path& out_dir, const AnalysisConfig& config) {
  const auto files = collect_inputs(inputs);
  if (files.empty()) {
    throw Error(ErrorCode::Io, "no tracking files in input");
  }
  for (const auto& a : analyze_inputs(files, config)) {
    const auto& id = a.scene.metadata.scene_id;
    write_file(out_dir / (id + ".summary.json"), dump(summarize_scene(a.scene, a.analysis)));
    write_file(out_dir / (id + ".features.json"), dump(features_document(a.analysis)));
  }
  return 0;
}

int cmd_questions(const fs::path& annotations_path, const std::vector<std::string>& inputs, const fs::path& out,
                  const AnalysisConfig& config) {
  const auto annotations = load_annotations(annotations_path);
  const auto scenes = analyze_inputs(collect_inputs(inputs), config);
  auto answers = nlohmann::ordered_json::array();
  for (const auto& q : annotations) {
    const auto it = std::find_if(scenes.begin(), scenes.end(),
                                 [&](const AnalyzedScene& s) { return s.scene.metadata.scene_id == q.scene_id; });
    if (it == scenes.end()) {
      throw Error(ErrorCode::UnknownScene, q.scene_id + " is not among the inputs");
    }
    const auto answer = answer_question(q, it->analysis);
    const auto* yellow = it->analysis.find(q.yellow_id);
    const auto* red = it->analysis.find(q.red_id);
    answers.push_back({{"question_key", q.label},
                       {"trait", to_string(q.question_key)},
                       {"scene_id", q.scene_id},
                       {"yellow_id", q.yellow_id},
                       {"red_id", q.red_id},
                       {"answer", to_string(answer)},
                       {"scores",
                        {{"yellow", yellow->profile().score(q.question_key)},
                         {"red", red->profile().score(q.question_key)}}}});
  }
  nlohmann::ordered_json doc;
  doc["parameters_fingerprint"] = config.fingerprint();
  doc["parameters"] = config.ledger();
  doc["answers"] = std::move(answers);
  write_file(out, dump(doc));
  return 0;
}

std::optional<std::string> existing_fingerprint(const fs::path& path) {
  std::ifstream in(path);
  std::string line;
  constexpr std::string_view key = "# parameters_fingerprint=";
  while (std::getline(in, line) && line.starts_with("#")) {
    if (line.starts_with(key)) {
      return line.substr(key.size());
    }
  }
  return std::nullopt;
}

std::string csv_header(const fs::path& path, const nlohmann::json& summary, std::string_view columns) {
  const auto fingerprint = summary.at("parameters_fingerprint").get<std::string>();
  std::string out = "# scene_id=" + summary.at("scene_id").get<std::string>() + "\n";
  out += "# parameters_fingerprint=" + fingerprint + "\n";
  out += "# parameters=" + summary.at("parameters").dump() + "\n";
  if (const auto old = existing_fingerprint(path); old && *old != fingerprint) {
    out += "# parameters_changed_from=" + *old + "\n";
  }
  out += columns;
  out += "\n";
  return out;
}

void export_scene(const fs::path& summary_path, const fs::path& out_dir) {
  const auto name = summary_path.filename().string();
  const auto id = name.substr(0, name.size() - std::string_view(".summary.json").size());
  const auto features_path = summary_path.parent_path() / (id + ".features.json");
  if (!fs::exists(features_path)) {
    throw Error(ErrorCode::IncompleteAnalyses, "missing " + features_path.string());
  }
  nlohmann::json summary;
  nlohmann::json features;
  try {
    summary = nlohmann::json::parse(read_file(summary_path));
    features = nlohmann::json::parse(read_file(features_path));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::IncompleteAnalyses, id + ": " + e.what());
  }
  if (summary.value("parameters_fingerprint", "") != features.value("parameters_fingerprint", "")) {
    throw Error(ErrorCode::IncompleteAnalyses, id + ": summary and features come from different parameters");
  }

  for (const std::string series : {"speed", "angular_variation", "collectivity"}) {
    const auto path = out_dir / (id + "_" + series + ".csv");
    std::string body = csv_header(path, summary, "pedestrian_id,frame," + series);
    for (const auto& ped : features.at("pedestrians")) {
      const auto pid = std::to_string(ped.at("pedestrian_id").get<PedestrianId>());
      const auto& frames = ped.at("frame");
      const auto& values = ped.at(series);
      for (std::size_t k = 0; k < frames.size(); ++k) {
        body += pid + "," + std::to_string(frames[k].get<Frame>()) + "," +
                detail::format_double(values[k].get<double>()) + "\n";
      }
    }
    write_file(path, body);
  }

  const auto path = out_dir / (id + "_scores.csv");
  std::string body = csv_header(
      path, summary, "pedestrian_id,O,C,E,A,N,fear,happiness,sadness,anger,socialization,isolation,collectivity");
  for (const auto& ped : summary.at("pedestrians")) {
    body += std::to_string(ped.at("pedestrian_id").get<PedestrianId>());
    for (const char* f : {"O", "C", "E", "A", "N"}) {
      body += "," + detail::format_double(ped.at("ocean").at(f).get<double>());
    }
    for (const char* e : {"fear", "happiness", "sadness", "anger"}) {
      body += "," + detail::format_double(ped.at("emotions").at(e).get<double>());
    }
    for (const char* v : {"socialization", "isolation", "collectivity"}) {
      body += "," + detail::format_double(ped.at("feature_vector").at(v).get<double>());
    }
    body += "\n";
  }
  write_file(path, body);
}

int cmd_export(const fs::path& in_dir, const fs::path& out_dir) {
  std::error_code ec;
  if (!fs::is_directory(in_dir, ec)) {
    throw Error(ErrorCode::IncompleteAnalyses, "no analysis directory " + in_dir.string());
  }
  std::vector<fs::path> summaries;
  for (const auto& e : fs::directory_iterator(in_dir)) {
    if (e.is_regular_file() && e.path().filename().string().ends_with(".summary.json")) {
      summaries.push_back(e.path());
    }
  }
  if (summaries.empty()) {
    throw Error(ErrorCode::IncompleteAnalyses, "no summaries in " + in_dir.string());
  }
  std::sort(summaries.begin(), summaries.end());
  for (const auto& s : summaries) {
    export_scene(s, out_dir);
  }
  return 0;
}

int cmd_serve(const fs::path& scenes_dir, const std::string& host, int port, const AnalysisConfig& config,
              std::ostream& err) {
  auto store = std::make_shared<const SceneStore>(SceneStore::load_directory(scenes_dir, config));
  HttpServer server(store);
  const int bound = server.bind(host, port);
  err << "crowdlens: serving " << store->size() << " scenes on http://" << host << ":" << bound << std::endl;
  server.listen();
  return 0;
}

}  // namespace

AnalysisConfig config_from_json(const nlohmann::json& doc, const fs::path& base_dir) {
  if (!doc.is_object()) {
    throw Error(ErrorCode::ConfigParse, "config must be a JSON object");
  }
  AnalysisConfig cfg;
  try {
    if (const auto c = doc.find("collectivity"); c != doc.end()) {
      cfg.collectivity.gamma = c->value("gamma", cfg.collectivity.gamma);
      cfg.collectivity.beta = c->value("beta", cfg.collectivity.beta);
      cfg.collectivity.w1 = c->value("w1", cfg.collectivity.w1);
      cfg.collectivity.w2 = c->value("w2", cfg.collectivity.w2);
    }
    if (const auto s = doc.find("social"); s != doc.end()) {
      auto& p = cfg.social;
      p.weight_collectivity = s->value("weight_collectivity", p.weight_collectivity);
      p.weight_proximity = s->value("weight_proximity", p.weight_proximity);
      p.weight_neighbors = s->value("weight_neighbors", p.weight_neighbors);
      p.bias = s->value("bias", p.bias);
      p.d_max = s->value("d_max", p.d_max);
      p.n_cap = s->value("n_cap", p.n_cap);
    }
    if (const auto r = doc.find("registry"); r != doc.end()) {
      cfg.registry = r->is_string() ? load_registry(base_dir / r->get<std::string>()) : parse_registry(r->dump());
    }
    if (const auto d = doc.find("density"); d != doc.end()) {
      auto& p = cfg.density;
      const auto mode = d->value("mode", std::string("count"));
      if (mode != "count" && mode != "area") {
        throw Error(ErrorCode::ConfigParse, "density.mode must be count or area");
      }
      p.mode = mode == "area" ? DensityConfig::Mode::Area : DensityConfig::Mode::Count;
      p.low_max = d->value("low_max", p.low_max);
      p.medium_max = d->value("medium_max", p.medium_max);
      p.low_max_per_m2 = d->value("low_max_per_m2", p.low_max_per_m2);
      p.medium_max_per_m2 = d->value("medium_max_per_m2", p.medium_max_per_m2);
    }
    if (const auto b = doc.find("comparison"); b != doc.end()) {
      cfg.bands.tie_threshold = b->value("tie_threshold", cfg.bands.tie_threshold);
      cfg.bands.both_min = b->value("both_min", cfg.bands.both_min);
      cfg.bands.neither_max = b->value("neither_max", cfg.bands.neither_max);
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ConfigParse, e.what());
  }
  return cfg;
}

AnalysisConfig resolve_config(const ConfigOverrides& o) {
  AnalysisConfig cfg;
  if (o.config_file) {
    nlohmann::json doc;
    try {
      doc = nlohmann::json::parse(read_file(*o.config_file));
    } catch (const nlohmann::json::parse_error& e) {
      throw Error(ErrorCode::ConfigParse, o.config_file->string() + ": " + e.what());
    }
    cfg = config_from_json(doc, o.config_file->parent_path());
  }
  if (o.gamma) cfg.collectivity.gamma = *o.gamma;
  if (o.beta) cfg.collectivity.beta = *o.beta;
  if (o.w1) cfg.collectivity.w1 = *o.w1;
  if (o.w2) cfg.collectivity.w2 = *o.w2;
  if (o.registry) cfg.registry = load_registry(*o.registry);
  try {
    cfg.validate();
  } catch (const Error& e) {
    throw Error(ErrorCode::ConfigParse, e.what());
  }
  return cfg;
}

nlohmann::ordered_json features_document(const SceneAnalysis& analysis) {
  nlohmann::ordered_json doc;
  doc["scene_id"] = analysis.scene.metadata.scene_id;
  doc["parameters_fingerprint"] = analysis.config.fingerprint();
  doc["parameters"] = analysis.config.ledger();
  auto peds = nlohmann::ordered_json::array();
  for (const auto& p : analysis.pedestrians) {
    nlohmann::ordered_json frame, x, y, speed, heading, variation, distance, neighbors, phi, social, anim;
    for (std::size_t k = 0; k < p.frames.size(); ++k) {
      const auto& f = p.frames[k];
      frame.push_back(f.frame);
      x.push_back(f.position.x());
      y.push_back(f.position.y());
      speed.push_back(f.speed);
      heading.push_back(f.heading);
      variation.push_back(f.angular_variation);
      distance.push_back(f.mean_distance);
      neighbors.push_back(f.social_neighbors);
      phi.push_back(f.collectivity);
      social.push_back(p.frame_socialization[k]);
      anim.push_back(to_string(p.animation[k]));
    }
    peds.push_back({{"pedestrian_id", p.id},
                    {"frame", std::move(frame)},
                    {"x", std::move(x)},
                    {"y", std::move(y)},
                    {"speed", std::move(speed)},
                    {"heading", std::move(heading)},
                    {"angular_variation", std::move(variation)},
                    {"mean_distance", std::move(distance)},
                    {"social_neighbors", std::move(neighbors)},
                    {"collectivity", std::move(phi)},
                    {"socialization", std::move(social)},
                    {"animation", std::move(anim)}});
  }
  doc["pedestrians"] = std::move(peds);
  return doc;
}

int run_cli(const std::vector<std::string>& args, std::ostream& err) {
  CLI::App app{"Crowd trajectory analytics", "crowdlens"};
  app.require_subcommand(1);

  std::vector<std::string> inputs;
  std::string out;
  ConfigOverrides overrides;

  auto* ingest = app.add_subcommand("ingest", "Validate tracking files and write normalized world-space CSV");
  ingest->add_option("--input", inputs, "Tracking files or directories")->required();
  ingest->add_option("--out", out, "Output directory")->required();

  auto* analyze = app.add_subcommand("analyze", "Compute features, personality and emotions per scene");
  analyze->add_option("--input", inputs, "Tracking files or directories")->required();
  analyze->add_option("--out", out, "Output directory")->required();
  add_analysis_options(analyze, overrides);

  std::string annotations;
  auto* questions = app.add_subcommand("questions", "Answer highlighted-pedestrian questions");
  questions->add_option("--annotations", annotations, "Annotation list (JSON)")->required();
  questions->add_option("--input", inputs, "Tracking files or directories holding the annotated scenes");
  questions->add_option("--out", out, "Answers file")->default_str("answers.json");
  add_analysis_options(questions, overrides);

  std::string format = "csv";
  auto* exporter = app.add_subcommand("export", "Write plot data from analyze outputs");
  exporter->add_option("--input", out, "Directory written by analyze")->required();
  std::string export_out;
  exporter->add_option("--out", export_out, "Output directory (defaults to the input directory)");
  exporter->add_option("--format", format, "Output format")->check(CLI::IsMember({"csv"}));

  std::string scenes_dir;
  std::string host = "127.0.0.1";
  int port = 8080;
  auto* serve = app.add_subcommand("serve", "Serve scenes and playback sessions over HTTP");
  serve->add_option("--scenes", scenes_dir, "Directory of tracking files")->required();
  serve->add_option("--port", port, "TCP port (0 picks a free one)")->check(CLI::Range(0, 65535));
  serve->add_option("--host", host, "Bind address");
  add_analysis_options(serve, overrides);

  std::vector<std::string> argv_storage{"crowdlens"};
  argv_storage.insert(argv_storage.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& a : argv_storage) {
    argv.push_back(a.c_str());
  }

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    app.exit(e, std::cout, err);
    return 0;
  } catch (const CLI::ParseError& e) {
    app.exit(e, std::cout, err);
    return 2;
  }

  try {
    if (ingest->parsed()) {
      return cmd_ingest(inputs, out);
    }
    if (analyze->parsed()) {
      return cmd_analyze(inputs, out, resolve_config(overrides));
    }
    if (questions->parsed()) {
      return cmd_questions(annotations, inputs, out.empty() ? "answers.json" : out, resolve_config(overrides));
    }
    if (exporter->parsed()) {
      return cmd_export(out, export_out.empty() ? out : export_out);
    }
    if (serve->parsed()) {
      return cmd_serve(scenes_dir, host, port, resolve_config(overrides), err);
    }
  } catch (const Error& e) {
    err << "crowdlens: " << e.what() << "\n";
    return is_parse_error(e.code()) ? 2 : 3;
  } catch (const std::exception& e) {
    err << "crowdlens: " << e.what() << "\n";
    return 3;
  }
  return 0;
}

}  // namespace crowdlens
