#pragma once

#include <memory>
#include <string>

#include "crowdlens/service.hpp"

namespace crowdlens {

/// JSON over HTTP for the viewer:
///   GET  /scenes
///   GET  /scenes/{id}/summary
///   GET  /scenes/{id}/frames/{n}?overlays=emotion,socialization,collectivity&highlight=3:yellow,5:red
///   POST /sessions                {"scene_id": ..., "overlay": {...}}
///   GET  /sessions/{id}
///   POST /sessions/{id}/control   {"action": "play|pause|stop|rewind|rate|seek", ...}
///   DELETE /sessions/{id}
///   GET  /sessions/{id}/feed      text/event-stream of frame payloads
class HttpServer {
 public:
  explicit HttpServer(std::shared_ptr<const SceneStore> store);
  ~HttpServer();
  HttpServer(const HttpServer&) = delete;
  HttpServer& operator=(const HttpServer&) = delete;

  /// Port 0 picks a free port. Returns the bound port; throws StoreUnavailable on failure.
  int bind(const std::string& host, int port);
  /// Blocks until stop().
  void listen();
  void stop();

  SessionManager& sessions();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace crowdlens
