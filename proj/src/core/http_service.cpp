#include "http_service.hpp"

#include <httplib.h>

#include <json.hpp>

namespace netbench {

namespace {

constexpr const char* kJson = "application/json";

void send_error(httplib::Response& res, const ServiceError& e) {
  res.status = http_status(e.kind());
  res.set_content(error_json(e), kJson);
}

nlohmann::json parse_body(const httplib::Request& req) {
  auto body = nlohmann::json::parse(req.body, nullptr, false);
  if (body.is_discarded() || !body.is_object()) {
    throw ServiceError(ServiceError::Kind::BadRequest, "request body must be a JSON object");
  }
  return body;
}

std::string string_field(const nlohmann::json& body, const char* key) {
  auto it = body.find(key);
  if (it == body.end() || !it->is_string()) {
    throw ServiceError(ServiceError::Kind::BadRequest,
                       std::string("field \"") + key + "\" must be a string");
  }
  return it->get<std::string>();
}

template <typename F>
void guarded(httplib::Response& res, F&& handler) {
  try {
    handler();
  } catch (const ServiceError& e) {
    send_error(res, e);
  } catch (const std::exception& e) {
    res.status = 500;
    const nlohmann::json body = {{"error", {{"kind", "internal"}, {"message", e.what()}}}};
    res.set_content(body.dump(), kJson);
  }
}

}  // namespace

struct HttpService::Impl {
  SessionManager& sessions;
  httplib::Server server;

  explicit Impl(SessionManager& s) : sessions(s) {
    // Keep-alive clients each hold a worker; the library default of a few
    // workers starves concurrent chat clients.
    server.new_task_queue = [] { return new httplib::ThreadPool(kWorkers); };
    // The library default also sets SO_REUSEPORT, which lets a second server
    // silently share the port instead of failing to bind.
    server.set_socket_options([](socket_t sock) {
      int yes = 1;
      setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, reinterpret_cast<const char*>(&yes), sizeof(yes));
    });
  }

  static constexpr std::size_t kWorkers = 64;
};

HttpService::HttpService(SessionManager& sessions, std::optional<std::string> static_dir)
    : impl_(std::make_unique<Impl>(sessions)) {
  auto& srv = impl_->server;
  auto& mgr = impl_->sessions;

  srv.Post("/api/v1/sessions", [&mgr](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      const auto body = parse_body(req);
      StepResult r;
      if (body.contains("spec")) {
        r = mgr.create_from_text(string_field(body, "spec"));
      } else if (body.contains("builtin")) {
        r = mgr.create_from_builtin(string_field(body, "builtin"));
      } else {
        throw ServiceError(ServiceError::Kind::BadRequest, "expected \"spec\" or \"builtin\"");
      }
      res.status = 201;
      res.set_content(step_json(r), kJson);
    });
  });

  srv.Post(R"(/api/v1/sessions/([0-9a-zA-Z]+)/reply)",
           [&mgr](const httplib::Request& req, httplib::Response& res) {
             guarded(res, [&] {
               const auto body = parse_body(req);
               const auto r = mgr.reply(req.matches[1], string_field(body, "answer"));
               res.status = 200;
               res.set_content(step_json(r), kJson);
             });
           });

  srv.Get(R"(/api/v1/sessions/([0-9a-zA-Z]+))",
          [&mgr](const httplib::Request& req, httplib::Response& res) {
            guarded(res, [&] {
              res.status = 200;
              res.set_content(snapshot_json(mgr.get(req.matches[1])), kJson);
            });
          });

  if (static_dir) srv.set_mount_point("/", *static_dir);
}

HttpService::~HttpService() { stop(); }

int HttpService::bind(const std::string& addr, int port) {
  if (port == 0) return impl_->server.bind_to_any_port(addr);
  return impl_->server.bind_to_port(addr, port) ? port : -1;
}

bool HttpService::listen() { return impl_->server.listen_after_bind(); }

void HttpService::stop() {
  if (impl_) impl_->server.stop();
}

}  // namespace netbench
