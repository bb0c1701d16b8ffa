#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

namespace fgis::api {

// Settings for `fgis serve`, read from one JSON file:
//
//   {
//     "bind_address": "127.0.0.1",
//     "port": 8080,
//     "tile_archive_path": "/srv/tiles",
//     "case_root_path": "/srv/cases",
//     "cache_capacity": 1024,
//     "lenient_import": false,
//     "allow_public_bind": false,
//     "ui_root_path": "/srv/webui"      (optional)
//   }
//
// Relative paths resolve against the config file's directory.
struct ServiceConfig {
  std::string bind_address = "127.0.0.1";
  int port = 8080;
  std::filesystem::path tile_archive_path;
  std::filesystem::path case_root_path;
  std::size_t cache_capacity = 1024;
  bool lenient_import = false;
  bool allow_public_bind = false;
  std::optional<std::filesystem::path> ui_root_path;
};

// Throws Error(InvalidConfig) naming the offending field. Unknown fields are
// rejected so typos do not silently fall back to defaults.
ServiceConfig parse_config(std::string_view json_text, const std::filesystem::path& base_dir = {});
ServiceConfig load_config(const std::filesystem::path& file);

// Startup checks: both paths exist and are directories, the port is in
// [0, 65535], and the bind address passes check_bind_address.
void validate_config(const ServiceConfig& cfg);

// Loopback (127/8, ::1), RFC 1918 (10/8, 172.16/12, 192.168/16) and IPv6
// unique-local (fc00::/7) literals. nullopt when `address` is not an IP
// literal.
std::optional<bool> is_private_address(std::string_view address);

// Throws Error(InvalidConfig) for a host name (resolving it would be a DNS
// lookup) and Error(BindRefused) for a non-private address unless
// allow_public_bind is set.
void check_bind_address(std::string_view address, bool allow_public_bind);

}  // namespace fgis::api
