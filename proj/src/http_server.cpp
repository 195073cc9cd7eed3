#include "crowdlens/http_server.hpp"

#include <atomic>
#include <thread>

#include <httplib.h>

#include "crowdlens/error.hpp"
#include "text_util.hpp"

namespace crowdlens {

namespace {

constexpr auto kIdlePoll = std::chrono::milliseconds(40);
constexpr auto kKeepAlive = std::chrono::seconds(1);

int status_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::UnknownScene:
    case ErrorCode::UnknownSession:
    case ErrorCode::FrameOutOfRange:
      return 404;
    case ErrorCode::InvalidParameter:
      return 400;
    default:
      return 500;
  }
}

void send_json(httplib::Response& res, const nlohmann::ordered_json& doc, int status = 200) {
  res.status = status;
  res.set_content(doc.dump(), "application/json");
}

void send_error(httplib::Response& res, int status, std::string_view code, std::string_view detail) {
  send_json(res, {{"error", code}, {"detail", detail}}, status);
}

nlohmann::ordered_json scene_entry(const SceneAnalysis& a) {
  const auto& m = a.scene.metadata;
  return {{"scene_id", m.scene_id},
          {"country", m.country},
          {"fps", m.fps},
          {"pedestrian_count", m.pedestrian_count},
          {"frame_range", {a.scene.frame_range.min, a.scene.frame_range.max}},
          {"density", to_string(a.density)},
          {"density_label", m.density_label ? nlohmann::ordered_json(to_string(*m.density_label)) : nullptr}};
}

nlohmann::json parse_body(const httplib::Request& req) {
  if (req.body.empty()) {
    return nlohmann::json::object();
  }
  try {
    return nlohmann::json::parse(req.body);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::InvalidParameter, std::string("request body is not JSON: ") + e.what());
  }
}

}  // namespace

struct HttpServer::Impl {
  explicit Impl(std::shared_ptr<const SceneStore> s) : store(std::move(s)), sessions(store) {}

  std::shared_ptr<const SceneStore> store;
  SessionManager sessions;
  std::map<std::string, std::string, std::less<>> summaries;
  std::string scene_list;
  httplib::Server server;
  std::atomic<bool> running{true};

  void routes();
  bool stream_feed(const std::string& session_id, httplib::DataSink& sink);
};

void HttpServer::Impl::routes() {
  server.set_default_headers({{"Access-Control-Allow-Origin", "*"}});
  server.set_exception_handler([](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
    try {
      std::rethrow_exception(ep);
    } catch (const Error& e) {
      send_error(res, status_for(e.code()), to_string(e.code()), e.what());
    } catch (const std::exception& e) {
      send_error(res, 500, "Internal", e.what());
    }
  });

  server.Get("/scenes", [this](const httplib::Request&, httplib::Response& res) {
    res.set_content(scene_list, "application/json");
  });

  server.Get(R"(/scenes/([^/]+)/summary)", [this](const httplib::Request& req, httplib::Response& res) {
    const auto it = summaries.find(req.matches[1].str());
    if (it == summaries.end()) {
      throw Error(ErrorCode::UnknownScene, req.matches[1].str());
    }
    res.set_content(it->second, "application/json");
  });

  server.Get(R"(/scenes/([^/]+)/frames/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
    const auto frame = detail::parse_int(req.matches[2].str());
    if (!frame) {
      throw Error(ErrorCode::InvalidParameter, "frame must be an integer");
    }
    const auto overlay =
        OverlayConfig::from_query(req.get_param_value("overlays"), req.get_param_value("highlight"));
    send_json(res, get_frame_payload(*store, req.matches[1].str(), *frame, overlay).to_json());
  });

  server.Post("/sessions", [this](const httplib::Request& req, httplib::Response& res) {
    const auto body = parse_body(req);
    if (!body.contains("scene_id") || !body["scene_id"].is_string()) {
      throw Error(ErrorCode::InvalidParameter, "body needs a 'scene_id' string");
    }
    auto overlay = OverlayConfig::from_json(body.value("overlay", nlohmann::json()));
    send_json(res, sessions.create(body["scene_id"].get<std::string>(), std::move(overlay)).to_json(), 201);
  });

  server.Get(R"(/sessions/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
    send_json(res, sessions.poll(req.matches[1].str()).to_json());
  });

  server.Delete(R"(/sessions/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
    sessions.close(req.matches[1].str());
    res.status = 204;
  });

  server.Post(R"(/sessions/([^/]+)/control)", [this](const httplib::Request& req, httplib::Response& res) {
    const auto cmd = ControlCommand::from_json(parse_body(req));
    send_json(res, sessions.control(req.matches[1].str(), cmd).to_json());
  });

  server.Get(R"(/sessions/([^/]+)/feed)", [this](const httplib::Request& req, httplib::Response& res) {
    auto id = req.matches[1].str();
    sessions.poll(id);
    res.set_header("Cache-Control", "no-cache");
    res.set_chunked_content_provider("text/event-stream", [this, id](std::size_t, httplib::DataSink& sink) {
      return stream_feed(id, sink);
    });
  });
}

// One message per cursor change. A slow reader only ever sees the latest frame.
bool HttpServer::Impl::stream_feed(const std::string& session_id, httplib::DataSink& sink) {
  using Clock = std::chrono::steady_clock;
  std::optional<Frame> last_sent;
  auto last_write = Clock::now();
  while (running && sink.is_writable()) {
    PlaybackSession s;
    try {
      s = sessions.poll(session_id);
    } catch (const Error&) {
      sink.done();
      return true;
    }
    const auto scene = store->get(s.scene_id);
    std::string message;
    if (last_sent != s.cursor) {
      message = "event: frame\nid: " + std::to_string(s.cursor) + "\ndata: " +
                frame_payload(*scene, s.cursor, s.overlay).to_json().dump() + "\n\n";
      last_sent = s.cursor;
    } else if (Clock::now() - last_write >= kKeepAlive) {
      message = ": keepalive\n\n";
    }
    if (!message.empty()) {
      if (!sink.write(message.data(), message.size())) {
        return false;
      }
      last_write = Clock::now();
    }
    if (s.state == PlaybackState::Playing) {
      std::this_thread::sleep_for(std::chrono::duration<double>(1.0 / (scene->scene.metadata.fps * s.rate)));
    } else {
      std::this_thread::sleep_for(kIdlePoll);
    }
  }
  return false;
}

HttpServer::HttpServer(std::shared_ptr<const SceneStore> store) : impl_(std::make_unique<Impl>(std::move(store))) {
  auto list = nlohmann::ordered_json::array();
  for (const auto& meta : impl_->store->list_scenes()) {
    const auto analysis = impl_->store->get(meta.scene_id);
    list.push_back(scene_entry(*analysis));
    impl_->summaries.emplace(meta.scene_id, summarize_scene(analysis->scene, *analysis).dump());
  }
  impl_->scene_list = list.dump();
  impl_->routes();
}

HttpServer::~HttpServer() { stop(); }

int HttpServer::bind(const std::string& host, int port) {
  if (port == 0) {
    const int bound = impl_->server.bind_to_any_port(host);
    if (bound < 0) {
      throw Error(ErrorCode::StoreUnavailable, "cannot bind " + host);
    }
    return bound;
  }
  if (!impl_->server.bind_to_port(host, port)) {
    throw Error(ErrorCode::StoreUnavailable, "cannot bind " + host + ":" + std::to_string(port));
  }
  return port;
}

void HttpServer::listen() { impl_->server.listen_after_bind(); }

void HttpServer::stop() {
  impl_->running = false;
  impl_->server.stop();
}

SessionManager& HttpServer::sessions() { return impl_->sessions; }

}  // namespace crowdlens
