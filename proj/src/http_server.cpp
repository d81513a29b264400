#include "campus/http_server.hpp"

#include <httplib.h>

namespace campus::http {

using nlohmann::json;
using nlohmann::ordered_json;
using service::ServiceError;

namespace {

constexpr const char* kJson = "application/json";

void send(httplib::Response& res, int status, const ordered_json& body) {
  res.status = status;
  res.set_content(body.dump(), kJson);
}

json parse_body(const httplib::Request& req) {
  if (req.body.empty()) return json::object();
  try {
    return json::parse(req.body);
  } catch (const json::parse_error& e) {
    throw ServiceError(400, "bad-json", e.what());
  }
}

// Runs a handler and maps failures onto JSON error bodies.
template <class F>
httplib::Server::Handler guarded(F f) {
  return [f](const httplib::Request& req, httplib::Response& res) {
    try {
      f(req, res);
    } catch (const ServiceError& e) {
      send(res, e.status(), e.to_json());
    } catch (const json::exception& e) {
      send(res, 400, ordered_json{{"error", "bad-request"}, {"message", e.what()}});
    } catch (const std::exception& e) {
      send(res, 500, ordered_json{{"error", "internal"}, {"message", e.what()}});
    }
  };
}

std::uint64_t query_u64(const httplib::Request& req, const char* key, std::uint64_t fallback) {
  if (!req.has_param(key)) return fallback;
  try {
    return std::stoull(req.get_param_value(key));
  } catch (const std::exception&) {
    throw ServiceError(400, "bad-request", std::string("query parameter '") + key + "' must be an integer");
  }
}

}  // namespace

Server::Server(std::shared_ptr<service::SessionService> service, ServerOptions options)
    : service_(std::move(service)), options_(std::move(options)), server_(std::make_unique<httplib::Server>()) {
  install_routes();
}

Server::~Server() { stop(); }

void Server::install_routes() {
  auto& s = *server_;
  auto svc = service_;

  s.Post("/api/sessions", guarded([svc](const httplib::Request& req, httplib::Response& res) {
    const auto body = parse_body(req);
    service::CreateRequest create;
    if (body.contains("world")) create.world = body.at("world").get<std::string>();
    if (body.contains("config")) create.config = body.at("config");
    if (body.contains("seed") && !body.at("seed").is_null()) create.seed = body.at("seed").get<std::uint64_t>();
    if (body.contains("client_id")) create.client_id = body.at("client_id").get<std::string>();
    if (req.has_header("X-Client-Id")) create.client_id = req.get_header_value("X-Client-Id");
    const auto created = svc->create_session(create);
    send(res, 201,
         ordered_json{{"session_id", created.session_id}, {"seed", created.seed}, {"snapshot", created.snapshot}});
  }));

  s.Get("/api/sessions/:id", guarded([svc](const httplib::Request& req, httplib::Response& res) {
    send(res, 200, svc->get_state(req.path_params.at("id")));
  }));

  s.Post("/api/sessions/:id/actions", guarded([svc](const httplib::Request& req, httplib::Response& res) {
    send(res, 200, svc->submit_action(req.path_params.at("id"), parse_body(req)));
  }));

  s.Get("/api/sessions/:id/deltas", guarded([svc](const httplib::Request& req, httplib::Response& res) {
    const auto id = req.path_params.at("id");
    const auto after = query_u64(req, "after", 0);
    const auto wait = std::min<std::uint64_t>(query_u64(req, "wait_ms", 0), 30'000);
    const auto deltas = wait > 0 ? svc->wait_deltas(id, after, service::Millis(wait)) : svc->deltas_since(id, after);
    ordered_json out = ordered_json::array();
    for (const auto& d : deltas) out.push_back(service::delta_to_json(d));
    send(res, 200, ordered_json{{"deltas", std::move(out)}});
  }));

  s.Get("/api/sessions/:id/stream", guarded([svc](const httplib::Request& req, httplib::Response& res) {
    const auto id = req.path_params.at("id");
    auto after = std::make_shared<std::uint64_t>(query_u64(req, "after", 0));
    if (req.has_header("Last-Event-ID")) *after = std::stoull(req.get_header_value("Last-Event-ID"));
    svc->deltas_since(id, *after);  // fails fast for unknown sessions
    res.set_header("Cache-Control", "no-cache");
    res.set_chunked_content_provider("text/event-stream", [svc, id, after](std::size_t, httplib::DataSink& sink) {
      try {
        for (const auto& d : svc->wait_deltas(id, *after, service::Millis(1000))) {
          const auto frame =
              "id: " + std::to_string(d.seq) + "\nevent: delta\ndata: " + service::delta_to_json(d).dump() + "\n\n";
          if (!sink.write(frame.data(), frame.size())) return false;
          *after = d.seq;
          if (d.terminal) {
            sink.done();
            return true;
          }
        }
        static constexpr char kKeepAlive[] = ": keep-alive\n\n";
        return sink.write(kKeepAlive, sizeof kKeepAlive - 1);
      } catch (const std::exception&) {
        sink.done();
        return true;
      }
    });
  }));

  s.Get("/api/sessions/:id/log", guarded([svc](const httplib::Request& req, httplib::Response& res) {
    res.set_content(svc->event_log(req.path_params.at("id")), "application/x-ndjson");
  }));

  s.Get("/api/survey/instrument", guarded([svc](const httplib::Request&, httplib::Response& res) {
    send(res, 200, svc->instrument().to_json());
  }));

  s.Post("/api/survey", guarded([svc](const httplib::Request& req, httplib::Response& res) {
    const auto body = parse_body(req);
    std::optional<std::string> sid;
    if (body.contains("session_id") && !body.at("session_id").is_null()) {
      sid = body.at("session_id").get<std::string>();
    }
    if (!body.contains("answers")) throw ServiceError(400, "bad-request", "missing 'answers'");
    send(res, 201, svc->submit_survey(sid, body.at("answers")));
  }));

  s.Get("/api/admin/sessions", guarded([svc](const httplib::Request&, httplib::Response& res) {
    send(res, 200, ordered_json{{"sessions", svc->list_sessions()}});
  }));

  s.Get("/api/worlds/:id/layout", guarded([svc](const httplib::Request& req, httplib::Response& res) {
    send(res, 200, svc->world_layout(req.path_params.at("id")));
  }));

  if (options_.web_root) s.set_mount_point("/", options_.web_root->string());
}

bool Server::listen() { return server_->listen(options_.host, options_.port); }

int Server::bind() {
  if (options_.port == 0) return server_->bind_to_any_port(options_.host);
  return server_->bind_to_port(options_.host, options_.port) ? options_.port : -1;
}

bool Server::listen_after_bind() { return server_->listen_after_bind(); }

void Server::stop() {
  if (server_ && server_->is_running()) server_->stop();
}

}  // namespace campus::http
