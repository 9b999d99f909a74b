#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>

#include "store/api.hpp"
#include "store/store.hpp"

namespace pulse::api {

/// Serves the /v1 API for one store directory. Each request checks the
/// manifest version and reloads the snapshot when a writer has committed.
class Server {
 public:
  explicit Server(std::filesystem::path store_dir,
                  std::optional<std::filesystem::path> static_dir = std::nullopt);
  ~Server();
  Server(const Server&) = delete;
  Server& operator=(const Server&) = delete;

  /// "host:port" or ":port"; port 0 picks a free port. Returns the bound
  /// port. Throws Error{bind_failure}.
  int bind(const std::string& address);
  /// Blocks until stop().
  void run();
  /// run() on a background thread.
  void start();
  void stop();
  int port() const { return port_; }

  /// Routes against the current snapshot without going through a socket.
  Response get(std::string_view target);

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  int port_ = 0;
};

}  // namespace pulse::api
