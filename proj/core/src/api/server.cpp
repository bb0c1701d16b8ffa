#include "fgis/api/server.hpp"

#include <httplib.h>

#include "fgis/error.hpp"

namespace fgis::api {

struct Server::Impl {
  const Service& service;
  httplib::Server http;

  explicit Impl(const Service& s) : service(s) {
    http.set_payload_max_length(std::size_t{512} << 20);
    http.set_keep_alive_max_count(1000);
    http.set_tcp_nodelay(true);
    const auto handler = [this](const httplib::Request& req, httplib::Response& res) { dispatch(req, res); };
    http.Get(".*", handler);
    http.Post(".*", handler);
    http.Put(".*", handler);
    http.Delete(".*", handler);
    http.Patch(".*", handler);
    http.Options(".*", handler);
  }

  void dispatch(const httplib::Request& req, httplib::Response& res) const {
    Request r;
    r.method = req.method;
    r.path = req.path;
    for (const auto& [k, v] : req.params) r.query.emplace(k, v);
    r.body = req.body;
    const Response out = service.handle(r);
    res.status = out.status;
    res.set_content(out.body, out.content_type);
    res.set_header("X-Content-Type-Options", "nosniff");
  }
};

Server::Server(const Service& service) : impl_(std::make_unique<Impl>(service)) {}
Server::~Server() = default;

int Server::bind(const std::string& address, int port, bool allow_public_bind) {
  check_bind_address(address, allow_public_bind);
  int bound = -1;
  if (port == 0) {
    bound = impl_->http.bind_to_any_port(address);
  } else if (impl_->http.bind_to_port(address, port)) {
    bound = port;
  }
  if (bound < 0) {
    throw Error(ErrorCode::IoError, "cannot bind " + address + ":" + std::to_string(port));
  }
  return bound;
}

void Server::run() { impl_->http.listen_after_bind(); }

void Server::stop() { impl_->http.stop(); }

}  // namespace fgis::api
