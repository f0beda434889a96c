// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <chrono>
#include <memory>
#include <string>

#include "refground/service.hpp"

namespace refground {

/// JSON over HTTP for a `SessionStore`:
///   POST /sessions                   scene document -> 201 {id}
///   GET  /sessions/{id}              state view
///   POST /sessions/{id}/instruction  {text} -> outcome view
///   POST /sessions/{id}/response     {text} -> outcome view
///   GET  /sessions/{id}/events       text/event-stream; resumes after
///                                    ?since=N or Last-Event-ID, ?follow=0 ends
///                                    the stream once the backlog is sent
/// Errors are {error, field?} with 400 (bad input), 404 (unknown session)
/// or 409 (wrong dialog state).
class HttpServer {
 public:
  struct Options {
    std::chrono::milliseconds heartbeat{1000};
  };

  explicit HttpServer(SessionStore& store);
  HttpServer(SessionStore& store, Options options);
  ~HttpServer();
  HttpServer(const HttpServer&) = delete;
  HttpServer& operator=(const HttpServer&) = delete;

  /// Blocks until `stop()`.
  bool listen(const std::string& host, int port);
  /// Binds an ephemeral port; returns it, or -1.
  int bind_any_port(const std::string& host);
  /// Serves on the port from `bind_any_port`; blocks until `stop()`.
  bool listen_after_bind();
  void wait_until_ready() const;
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace refground
