#include "store/server.hpp"

#include <mutex>
#include <thread>

#include <httplib.h>

#include "common/error.hpp"

namespace pulse::api {

struct Server::Impl {
  std::filesystem::path dir;
  httplib::Server http;
  std::thread thread;
  std::mutex mu;
  std::shared_ptr<const store::Snapshot> snap;

  std::shared_ptr<const store::Snapshot> current() {
    std::lock_guard lock(mu);
    const auto version = store::Store::open(dir).current_version();
    if (!snap || snap->version() != version) snap = store::Snapshot::load(dir);
    return snap;
  }

  Response dispatch(std::string_view method, std::string_view path, const Query& query) {
    try {
      return handle(*current(), method, path, query);
    } catch (const Error& e) {
      return {500, {{"error", std::string(to_string(e.code()))}, {"message", e.what()}}};
    }
  }
};

Server::Server(std::filesystem::path store_dir, std::optional<std::filesystem::path> static_dir)
    : impl_(std::make_unique<Impl>()) {
  impl_->dir = std::move(store_dir);
  impl_->snap = store::Snapshot::load(impl_->dir);
  // No SO_REUSEPORT: a second server on a busy port must fail to bind.
  impl_->http.set_socket_options([](socket_t sock) {
    int yes = 1;
    setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof yes);
  });

  auto on_api = [this](const httplib::Request& req, httplib::Response& res) {
    Query query;
    for (const auto& [k, v] : req.params) query.emplace(k, v);
    const auto r = impl_->dispatch(req.method, req.path, query);
    res.status = r.status;
    res.set_header("Cache-Control", "no-store");
    res.set_content(r.body.dump(), "application/json");
  };
  impl_->http.Get(R"(/v1(/.*)?)", on_api);
  impl_->http.Post(R"(/v1(/.*)?)", on_api);
  impl_->http.Put(R"(/v1(/.*)?)", on_api);
  impl_->http.Patch(R"(/v1(/.*)?)", on_api);
  impl_->http.Delete(R"(/v1(/.*)?)", on_api);
  if (static_dir && !impl_->http.set_mount_point("/", static_dir->string())) {
    throw Error(Errc::not_found, "static directory " + static_dir->string() + " does not exist");
  }
}

Server::~Server() { stop(); }

int Server::bind(const std::string& address) {
  const auto colon = address.rfind(':');
  if (colon == std::string::npos) throw Error(Errc::bind_failure, "bind address must be host:port");
  std::string host = address.substr(0, colon);
  if (host.empty()) host = "127.0.0.1";
  int port = 0;
  try {
    port = std::stoi(address.substr(colon + 1));
  } catch (const std::exception&) {
    throw Error(Errc::bind_failure, "bad port in " + address);
  }
  if (port < 0 || port > 65535) throw Error(Errc::bind_failure, "port out of range in " + address);
  if (port == 0) {
    port = impl_->http.bind_to_any_port(host);
    if (port <= 0) throw Error(Errc::bind_failure, "cannot bind " + address);
  } else if (!impl_->http.bind_to_port(host, port)) {
    throw Error(Errc::bind_failure, "cannot bind " + address);
  }
  port_ = port;
  return port;
}

void Server::run() { impl_->http.listen_after_bind(); }

void Server::start() {
  impl_->thread = std::thread([this] { run(); });
  impl_->http.wait_until_ready();
}

void Server::stop() {
  if (!impl_) return;
  impl_->http.stop();
  if (impl_->thread.joinable()) impl_->thread.join();
}

Response Server::get(std::string_view target) {
  auto [path, query] = split_target(target);
  return impl_->dispatch("GET", path, query);
}

}  // namespace pulse::api
