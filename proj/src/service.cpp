#include "svsp/service.hpp"

#include <chrono>
#include <stdexcept>

#include <httplib.h>

#include "svsp/checker.hpp"

namespace svsp {

namespace {

Response error_response(int status, std::string message, ordered_json extra = ordered_json::object()) {
  ordered_json j;
  j["error"] = std::move(message);
  for (auto& [k, v] : extra.items()) j[k] = v;
  return {status, std::move(j)};
}

std::vector<std::string> split_path(std::string_view path) {
  if (auto q = path.find('?'); q != std::string_view::npos) path = path.substr(0, q);
  std::vector<std::string> segs;
  std::size_t start = 0;
  while (start <= path.size()) {
    std::size_t slash = path.find('/', start);
    std::string_view seg = path.substr(start, slash == std::string_view::npos ? std::string_view::npos : slash - start);
    if (!seg.empty()) segs.push_back(percent_decode(seg));
    if (slash == std::string_view::npos) break;
    start = slash + 1;
  }
  return segs;
}

struct BadRequest {
  Response response;
};

ordered_json parse_body(std::string_view body) {
  if (body.find_first_not_of(" \t\r\n") == std::string_view::npos) return ordered_json::object();
  try {
    auto j = ordered_json::parse(body);
    if (!j.is_object()) throw BadRequest{error_response(400, "request body must be a JSON object")};
    return j;
  } catch (const ordered_json::parse_error& e) {
    throw BadRequest{error_response(400, std::string("malformed JSON body: ") + e.what())};
  }
}

// JSON argument → literal, following the element's declared type.
std::optional<Literal> to_literal(const DataType& t, const ordered_json& v) {
  using K = DataType::Kind;
  switch (t.kind) {
    case K::Integer:
      if (v.is_number_integer()) return Literal::of_int(v.get<std::int64_t>());
      return std::nullopt;
    case K::Real:
      if (v.is_number_integer()) return Literal::of_real(static_cast<double>(v.get<std::int64_t>()));
      if (v.is_number()) return Literal::of_real(v.get<double>());
      return std::nullopt;
    case K::Enum:
    case K::State:
      if (v.is_string()) return Literal::of_ident(v.get<std::string>());
      return std::nullopt;
    default:
      if (v.is_string()) return Literal::of_string(v.get<std::string>());
      if (v.is_number_integer()) return Literal::of_int(v.get<std::int64_t>());
      if (v.is_number()) return Literal::of_real(v.get<double>());
      return std::nullopt;
  }
}

bool argument_admissible(const SpecDb& db, const DataElementDef& e, const ParameterDef& p, const Literal& lit) {
  if (!e.restriction.admits(lit) || !p.restriction.admits(lit)) return false;
  if (e.dtype.storable()) return value_admissible(db, e, lit);
  return true;
}

}  // namespace

std::string percent_decode(std::string_view s) {
  auto hex = [](char c) -> int {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
  };
  std::string out;
  out.reserve(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '%' && i + 2 < s.size()) {
      int hi = hex(s[i + 1]), lo = hex(s[i + 2]);
      if (hi >= 0 && lo >= 0) {
        out += static_cast<char>(hi * 16 + lo);
        i += 2;
        continue;
      }
    }
    out += s[i];
  }
  return out;
}

Service::Service(std::shared_ptr<const SpecDb> db, std::string name)
    : db_(std::move(db)), name_(std::move(name)), diags_(run_all_checks(*db_)) {}

Response Service::handle_request(std::string_view method, std::string_view path, std::string_view body) {
  try {
    return route(method, split_path(path), body);
  } catch (const BadRequest& b) {
    return b.response;
  } catch (const LookupError& e) {
    return error_response(404, e.what());
  } catch (const ArgumentError& e) {
    return error_response(400, e.what());
  } catch (const std::exception& e) {
    return error_response(500, e.what());
  }
}

Response Service::route(std::string_view method, const std::vector<std::string>& segs, std::string_view body) {
  auto not_found = [&] { return error_response(404, "no such endpoint"); };
  auto wrong_method = [&] { return error_response(405, "method not allowed"); };
  if (segs.size() < 2 || segs[0] != "api") return not_found();
  const bool get = method == "GET", post = method == "POST";

  if (segs[1] == "spec") {
    if (!get) return wrong_method();
    const auto& db = *db_;
    if (segs.size() == 2) {
      ordered_json j;
      j["name"] = name_;
      j["counts"] = ordered_json{{"functions", db.functions().size()},
                                 {"data_elements", db.data_elements().size()},
                                 {"bundles", db.bundles().size()},
                                 {"groups", db.groups().size()},
                                 {"errors", db.errors().size()},
                                 {"enums", db.enums().size()}};
      j["states"] = db.states();
      j["initial_state"] = db.initial_state();
      j["levels"] = db.levels();
      return {200, std::move(j)};
    }
    if (segs[2] == "functions" && segs.size() == 3) {
      ordered_json a = ordered_json::array();
      for (const auto& f : db.functions()) a.push_back(function_summary_json(f));
      return {200, std::move(a)};
    }
    if (segs[2] == "functions" && segs.size() == 4) {
      const auto* f = db.find_function(segs[3]);
      if (!f) return error_response(404, "unknown function " + quote(segs[3]));
      return {200, function_detail_json(db, *f)};
    }
    if (segs[2] == "data-elements" && segs.size() == 3) {
      ordered_json a = ordered_json::array();
      for (const auto& e : db.data_elements()) a.push_back(element_json(e));
      return {200, std::move(a)};
    }
    return not_found();
  }

  if (segs[1] == "diagnostics" && segs.size() == 2) {
    if (!get) return wrong_method();
    ordered_json a = ordered_json::array();
    for (const auto& d : diags_) a.push_back(diagnostic_to_json(d));
    return {200, std::move(a)};
  }

  if (segs[1] != "sessions") return not_found();
  if (segs.size() == 2) {
    if (!post) return wrong_method();
    return create_session(parse_body(body));
  }
  auto entry = find_session(segs[2]);
  if (!entry) return error_response(404, "unknown session " + quote(segs[2]));
  if (segs.size() == 3) {
    if (!get) return wrong_method();
    std::lock_guard lock(entry->mutex);
    return {200, snapshot_to_json(entry->session.snapshot(), entry->session.level())};
  }
  if (segs.size() != 4) return not_found();
  const std::string& action = segs[3];
  if (action == "calls" || action == "dry-run") {
    if (!post) return wrong_method();
    return call(*entry, parse_body(body), action == "dry-run");
  }
  if (action == "reset") {
    if (!post) return wrong_method();
    std::lock_guard lock(entry->mutex);
    entry->session.reset();
    return {200, snapshot_to_json(entry->session.snapshot(), entry->session.level())};
  }
  if (action == "log") {
    if (!get) return wrong_method();
    std::lock_guard lock(entry->mutex);
    ordered_json a = ordered_json::array();
    for (const auto& r : entry->session.log()) a.push_back(record_to_json(r));
    return {200, std::move(a)};
  }
  return not_found();
}

Response Service::create_session(const ordered_json& body) {
  std::string level;
  if (body.contains("level") && !body["level"].is_null()) {
    if (!body["level"].is_string()) return error_response(400, "\"level\" must be a string");
    level = body["level"].get<std::string>();
  }
  std::string id;
  {
    std::lock_guard lock(sessions_mutex_);
    id = "s" + std::to_string(next_id_++);
  }
  auto entry = std::make_shared<Entry>([&] {
    try {
      return new_session(db_, level, id);
    } catch (const SessionRefused& e) {
      throw BadRequest{error_response(409, e.what(), ordered_json{{"errors", e.error_count}})};
    } catch (const LookupError& e) {
      throw BadRequest{error_response(400, e.what())};
    }
  }());
  entry->created_at = std::chrono::duration_cast<std::chrono::milliseconds>(
                          std::chrono::system_clock::now().time_since_epoch())
                          .count();
  ordered_json j;
  j["id"] = id;
  j["level"] = entry->session.level();
  j["created_at"] = entry->created_at;
  {
    std::lock_guard lock(sessions_mutex_);
    sessions_.emplace(id, std::move(entry));
  }
  return {201, std::move(j)};
}

std::shared_ptr<Service::Entry> Service::find_session(std::string_view id) {
  std::lock_guard lock(sessions_mutex_);
  auto it = sessions_.find(id);
  return it == sessions_.end() ? nullptr : it->second;
}

Response Service::call(Entry& e, const ordered_json& body, bool dry) {
  if (!body.contains("function") || !body["function"].is_string())
    return error_response(400, "\"function\" must be a string");
  std::string fn = body["function"].get<std::string>();
  const auto* f = db_->find_function(fn);
  if (!f) return error_response(404, "unknown function " + quote(fn));

  Arguments args;
  if (body.contains("args") && !body["args"].is_null()) {
    if (!body["args"].is_object()) return error_response(400, "\"args\" must be an object");
    for (const auto& [name, v] : body["args"].items()) {
      const auto* el = db_->find_element(name);
      if (!el) return error_response(404, "unknown data element " + quote(name));
      const auto* p = f->find_param(name);
      if (!p || p->direction != Direction::In || p->locality != Locality::External)
        return error_response(400, quote(name) + " is not an external input parameter of " + quote(f->name));
      auto lit = to_literal(el->dtype, v);
      if (!lit || !argument_admissible(*db_, *el, *p, *lit)) {
        std::string detail = "argument " + v.dump() + " for " + quote(name) + " violates type " +
                             to_string(el->dtype);
        if (!el->restriction.is_none()) detail += " / restriction " + to_source(el->restriction);
        if (!p->restriction.is_none()) detail += " / parameter restriction " + to_source(p->restriction);
        return error_response(400, "bad argument literal",
                              ordered_json{{"code", "X105"}, {"subject", name}, {"detail", detail}});
      }
      args.emplace_back(name, std::move(*lit));
    }
  }

  std::lock_guard lock(e.mutex);
  CallOutcome out = dry ? dry_run(e.session, fn, args) : apply_call(e.session, fn, args);
  return {200, outcome_to_json(out)};
}

// ---------------------------------------------------------------------------
// HTTP
// ---------------------------------------------------------------------------

struct HttpServer::Impl {
  Service& service;
  httplib::Server server;

  explicit Impl(Service& s) : service(s) {
    auto handler = [this](const httplib::Request& req, httplib::Response& res) {
      Response r = service.handle_request(req.method, req.target, req.body);
      res.status = r.status;
      res.set_content(dump(r.body), "application/json; charset=utf-8");
    };
    server.Get(".*", handler);
    server.Post(".*", handler);
    server.Put(".*", handler);
    server.Delete(".*", handler);
    server.Patch(".*", handler);
  }
};

HttpServer::HttpServer(Service& service) : impl_(std::make_unique<Impl>(service)) {}
HttpServer::~HttpServer() { stop(); }

int HttpServer::bind(const std::string& host, int port) {
  if (port == 0) {
    int bound = impl_->server.bind_to_any_port(host);
    if (bound < 0) throw std::runtime_error("cannot bind " + host);
    return bound;
  }
  if (!impl_->server.bind_to_port(host, port))
    throw std::runtime_error("cannot bind " + host + ":" + std::to_string(port));
  return port;
}

void HttpServer::listen() { impl_->server.listen_after_bind(); }
void HttpServer::stop() {
  if (impl_->server.is_running()) impl_->server.stop();
}
void HttpServer::wait_until_ready() { impl_->server.wait_until_ready(); }

}  // namespace svsp
