// SPDX-License-Identifier: Apache-2.0
#include <httplib.h>

#include "lcsx/service.hpp"

namespace lcsx::service {

struct HttpServer::Impl {
  const Service& service;
  std::string cors_origin;
  httplib::Server server;

  Impl(const Service& s, std::string origin) : service(s), cors_origin(std::move(origin)) {}

  void add_cors(httplib::Response& res) const {
    if (cors_origin.empty()) return;
    res.set_header("Access-Control-Allow-Origin", cors_origin);
    res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
    res.set_header("Access-Control-Allow-Headers", "Content-Type");
    res.set_header("Vary", "Origin");
  }

  void dispatch(const httplib::Request& req, httplib::Response& res) const {
    auto out = service.handle(req.method, req.target, req.body);
    res.status = out.status;
    res.set_content(out.body, "application/json; charset=utf-8");
    add_cors(res);
  }
};

HttpServer::HttpServer(const Service& service, std::string cors_origin)
    : impl_(std::make_unique<Impl>(service, std::move(cors_origin))) {
  auto handler = [this](const httplib::Request& req, httplib::Response& res) {
    impl_->dispatch(req, res);
  };
  impl_->server.Get(".*", handler);
  impl_->server.Post(".*", handler);
  impl_->server.Options(".*", [this](const httplib::Request&, httplib::Response& res) {
    res.status = 204;
    impl_->add_cors(res);
  });
}

HttpServer::~HttpServer() = default;

int HttpServer::bind(const std::string& host, int port) {
  if (port == 0) return impl_->server.bind_to_any_port(host);
  return impl_->server.bind_to_port(host, port) ? port : -1;
}

bool HttpServer::listen() { return impl_->server.listen_after_bind(); }

void HttpServer::stop() { impl_->server.stop(); }

void HttpServer::wait_until_ready() const { impl_->server.wait_until_ready(); }

}  // namespace lcsx::service
