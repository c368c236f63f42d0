#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>
#include <vector>

#include "svsp/diagnostic.hpp"
#include "svsp/engine.hpp"
#include "svsp/report.hpp"

namespace svsp {

struct Response {
  int status = 200;
  ordered_json body;
};

/// Transport-independent JSON API over one specification. Read-only
/// endpoints always work; creating a session answers 409 while the
/// specification has static errors. Safe to call from many threads.
class Service {
 public:
  explicit Service(std::shared_ptr<const SpecDb> db, std::string name = {});

  /// `path` is the raw request path (percent-encoded, query ignored).
  Response handle_request(std::string_view method, std::string_view path, std::string_view body);

  const std::vector<Diagnostic>& diagnostics() const { return diags_; }

 private:
  struct Entry {
    explicit Entry(Session s) : session(std::move(s)) {}
    std::mutex mutex;
    Session session;
    std::int64_t created_at = 0;
  };

  std::shared_ptr<const SpecDb> db_;
  std::string name_;
  std::vector<Diagnostic> diags_;
  std::mutex sessions_mutex_;
  std::map<std::string, std::shared_ptr<Entry>, std::less<>> sessions_;
  std::uint64_t next_id_ = 1;

  Response route(std::string_view method, const std::vector<std::string>& segs, std::string_view body);
  Response create_session(const ordered_json& body);
  std::shared_ptr<Entry> find_session(std::string_view id);
  Response call(Entry& e, const ordered_json& body, bool dry);
};

/// Decodes %XX escapes; '+' is left alone. Malformed escapes pass through.
std::string percent_decode(std::string_view s);

/// Blocking HTTP/1.1 front end for a Service.
class HttpServer {
 public:
  explicit HttpServer(Service& service);
  ~HttpServer();
  HttpServer(const HttpServer&) = delete;
  HttpServer& operator=(const HttpServer&) = delete;

  /// Binds `host:port`; port 0 picks a free one. Returns the bound port.
  /// Throws std::runtime_error when the address cannot be bound.
  int bind(const std::string& host, int port);
  /// Serves until stop() is called. bind() first.
  void listen();
  void stop();
  /// Blocks until the listener accepts connections.
  void wait_until_ready();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace svsp
