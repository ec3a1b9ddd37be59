#pragma once

#include <memory>
#include <optional>
#include <string>

#include "service.hpp"

namespace netbench {

// HTTP + JSON front end over a SessionManager:
//   POST /api/v1/sessions            {"spec": "..."} | {"builtin": "..."}
//   POST /api/v1/sessions/{id}/reply {"answer": "..."}
//   GET  /api/v1/sessions/{id}
// Optionally serves a static directory under "/".
class HttpService {
 public:
  explicit HttpService(SessionManager& sessions, std::optional<std::string> static_dir = {});
  ~HttpService();
  HttpService(const HttpService&) = delete;
  HttpService& operator=(const HttpService&) = delete;

  // Port 0 picks a free port. Returns the bound port, or -1 on failure.
  int bind(const std::string& addr, int port);
  // Blocks until stop().
  bool listen();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace netbench
