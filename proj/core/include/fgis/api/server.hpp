#pragma once

#include <memory>
#include <string>

#include "fgis/api/service.hpp"

namespace fgis::api {

// HTTP/1.1 front end for a Service. The server never opens outbound
// connections and never resolves names: the bind address must be an IP
// literal and peer addresses are formatted numerically.
class Server {
 public:
  explicit Server(const Service& service);
  ~Server();
  Server(const Server&) = delete;
  Server& operator=(const Server&) = delete;

  // Applies the bind policy, then binds. Port 0 picks a free port. Returns
  // the bound port. Throws Error(BindRefused) / Error(InvalidConfig) /
  // Error(IoError).
  int bind(const std::string& address, int port, bool allow_public_bind);

  // Blocks serving requests until stop() is called from another thread.
  void run();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace fgis::api
