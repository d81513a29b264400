#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>

#include "campus/service.hpp"

namespace httplib {
class Server;
}

namespace campus::http {

struct ServerOptions {
  std::string host = "127.0.0.1";
  int port = 8080;
  std::optional<std::filesystem::path> web_root;  // static client files, served at /
};

// JSON-over-HTTP front end for a SessionService.
//
//   POST /api/sessions                 create-session
//   GET  /api/sessions/{id}            get-state
//   POST /api/sessions/{id}/actions    submit-action
//   GET  /api/sessions/{id}/stream     stream-state (server-sent events)
//   GET  /api/sessions/{id}/deltas     stream-state (long polling: ?after=&wait_ms=)
//   GET  /api/sessions/{id}/log        event log (NDJSON)
//   GET  /api/survey/instrument        get-survey-instrument
//   POST /api/survey                   submit-survey
//   GET  /api/admin/sessions           admin list-sessions
//   GET  /api/worlds/{id}/layout       static campus geometry
class Server {
 public:
  Server(std::shared_ptr<service::SessionService> service, ServerOptions options);
  ~Server();

  // Binds and serves until stop(). Returns false if the address cannot be bound.
  bool listen();
  // Binds to an OS-chosen port when options.port == 0; returns the bound port or -1.
  int bind();
  bool listen_after_bind();
  void stop();

 private:
  void install_routes();

  std::shared_ptr<service::SessionService> service_;
  ServerOptions options_;
  std::unique_ptr<httplib::Server> server_;
};

}  // namespace campus::http
