#pragma once

#include <atomic>
#include <map>
#include <memory>
#include <string>
#include <thread>

#include "nsaas/engine.hpp"
#include "nsaas/error.hpp"

namespace httplib {
class Server;
}

namespace nsaas {

int http_status(Errc code);

struct HttpResponse {
  int status = 200;
  std::string body;
  std::string content_type = "application/json";
  std::map<std::string, std::string> headers;

  Json json() const { return body.empty() ? Json() : Json::parse(body); }
};

// Northbound REST surface. `handle` is the transport-independent router; `serve` binds it
// to an HTTP listener.
class Gateway {
 public:
  // realtime_factor 0 runs every request to quiescence on the virtual clock; a positive
  // factor lets a pacer thread advance virtual time at that multiple of wall time.
  explicit Gateway(Engine& engine, double realtime_factor = 0.0);
  ~Gateway();
  Gateway(const Gateway&) = delete;
  Gateway& operator=(const Gateway&) = delete;

  HttpResponse handle(const std::string& method, const std::string& target, const std::string& body = {});

  // Blocks until stop(). Returns false when the address cannot be bound.
  bool serve(const std::string& host, int port);
  // Binds to an ephemeral port and serves on a background thread; returns the port.
  int serve_background(const std::string& host = "127.0.0.1");
  void stop();

 private:
  HttpResponse route(const std::string& method, const std::string& path, const std::map<std::string, std::string>& query,
                     const std::string& body);
  HttpResponse error_response(const Error& err, const std::string& method, const std::string& target,
                              const std::string& body);
  void install_routes();
  void start_pacer();
  bool virtual_mode() const { return realtime_factor_ <= 0.0; }

  Engine& engine_;
  double realtime_factor_;
  std::unique_ptr<httplib::Server> server_;
  std::thread listener_;
  std::thread pacer_;
  std::atomic<bool> running_{false};
};

}  // namespace nsaas
