// SPDX-License-Identifier: Apache-2.0
#include "refground/http_server.hpp"

#include <atomic>

#include <httplib.h>

#include "refground/error.hpp"

namespace refground {

using nlohmann::json;

struct HttpServer::Impl {
  SessionStore& store;
  Options options;
  httplib::Server server;
  std::atomic<bool> stopping{false};

  Impl(SessionStore& s, Options o) : store(s), options(o) { routes(); }

  static void send(httplib::Response& res, int status, const json& body) {
    res.status = status;
    res.set_content(body.dump(), "application/json");
  }

  static json parse_body(const httplib::Request& req) {
    try {
      return json::parse(req.body);
    } catch (const json::parse_error& e) {
      throw ParseError("body", std::string("invalid JSON: ") + e.what());
    }
  }

  static std::string text_field(const json& body) {
    if (!body.is_object() || !body.contains("text") || !body["text"].is_string())
      throw ParseError("text", "expected a string");
    return body["text"].get<std::string>();
  }

  static std::string sse_frame(const SessionEvent& e) {
    return "id: " + std::to_string(e.revision) + "\nevent: " + e.type + "\ndata: " + e.view.dump() + "\n\n";
  }

  void routes() {
    server.set_exception_handler([](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
      try {
        std::rethrow_exception(ep);
      } catch (const ParseError& e) {
        json body = {{"error", e.what()}};
        if (!e.field().empty()) body["field"] = e.field();
        send(res, 400, body);
      } catch (const NotFound& e) {
        send(res, 404, {{"error", e.what()}});
      } catch (const StateError& e) {
        send(res, 409, {{"error", e.what()}});
      } catch (const Error& e) {
        send(res, 400, {{"error", e.what()}});
      } catch (const std::exception& e) {
        send(res, 500, {{"error", e.what()}});
      }
    });
    server.set_default_headers({{"Access-Control-Allow-Origin", "*"}});
    server.Options(R"(/sessions.*)", [](const httplib::Request&, httplib::Response& res) {
      res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
      res.set_header("Access-Control-Allow-Headers", "Content-Type, Last-Event-ID");
      res.status = 204;
    });

    server.Post("/sessions", [this](const httplib::Request& req, httplib::Response& res) {
      const json doc = parse_body(req);
      send(res, 201, {{"id", store.create_session(doc)}});
    });
    server.Get(R"(/sessions/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
      send(res, 200, store.view(req.matches[1]));
    });
    server.Post(R"(/sessions/([^/]+)/instruction)", [this](const httplib::Request& req, httplib::Response& res) {
      const std::string id = req.matches[1];
      store.view(id);  // 404 before 400 for unknown sessions
      send(res, 200, store.submit_instruction(id, text_field(parse_body(req))));
    });
    server.Post(R"(/sessions/([^/]+)/response)", [this](const httplib::Request& req, httplib::Response& res) {
      const std::string id = req.matches[1];
      store.view(id);
      send(res, 200, store.submit_response(id, text_field(parse_body(req))));
    });
    server.Get(R"(/sessions/([^/]+)/events)", [this](const httplib::Request& req, httplib::Response& res) {
      const std::string id = req.matches[1];
      store.view(id);
      std::uint64_t since = 0;
      const std::string cursor =
          req.has_param("since") ? req.get_param_value("since") : req.get_header_value("Last-Event-ID");
      if (!cursor.empty()) {
        try {
          since = std::stoull(cursor);
        } catch (const std::exception&) {
          throw ParseError("since", "expected a revision number");
        }
      }
      const bool follow = req.get_param_value("follow") != "0";
      res.set_header("Cache-Control", "no-cache");
      auto last = std::make_shared<std::uint64_t>(since);
      res.set_chunked_content_provider("text/event-stream", [this, id, follow, last](std::size_t, httplib::DataSink& sink) {
        const auto backlog = store.events_since(id, *last);
        if (backlog.empty() && !follow) {
          sink.done();
          return true;
        }
        auto events = backlog.empty() ? store.wait_events(id, *last, options.heartbeat) : backlog;
        if (stopping) return false;
        if (events.empty()) {
          const std::string ping = ": keepalive\n\n";
          return sink.write(ping.data(), ping.size());
        }
        for (const auto& e : events) {
          const std::string frame = sse_frame(e);
          if (!sink.write(frame.data(), frame.size())) return false;
          *last = e.revision;
        }
        return true;
      });
    });
  }
};

HttpServer::HttpServer(SessionStore& store) : HttpServer(store, Options{}) {}
HttpServer::HttpServer(SessionStore& store, Options options) : impl_(std::make_unique<Impl>(store, options)) {}
HttpServer::~HttpServer() { stop(); }

bool HttpServer::listen(const std::string& host, int port) { return impl_->server.listen(host, port); }
int HttpServer::bind_any_port(const std::string& host) { return impl_->server.bind_to_any_port(host); }
bool HttpServer::listen_after_bind() { return impl_->server.listen_after_bind(); }
void HttpServer::wait_until_ready() const { impl_->server.wait_until_ready(); }

void HttpServer::stop() {
  impl_->stopping = true;
  impl_->server.stop();
}

}  // namespace refground
