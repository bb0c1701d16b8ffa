#include "fgis/api/service_config.hpp"

#include <arpa/inet.h>

#include <algorithm>
#include <array>
#include <json.hpp>

#include "fgis/error.hpp"
#include "store/atomic_file.hpp"

namespace fgis::api {
namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

[[noreturn]] void invalid(const std::string& field, const std::string& why) {
  throw Error(ErrorCode::InvalidConfig, "config field '" + field + "': " + why);
}

fs::path resolve(const fs::path& base, const std::string& p) {
  const fs::path path(p);
  return path.is_absolute() || base.empty() ? path : base / path;
}

}  // namespace

ServiceConfig parse_config(std::string_view text, const fs::path& base_dir) {
  const json doc = json::parse(text.begin(), text.end(), nullptr, false);
  if (doc.is_discarded() || !doc.is_object()) {
    throw Error(ErrorCode::InvalidConfig, "config is not a JSON object");
  }
  static constexpr std::array kKnown = {"bind_address",   "port",           "tile_archive_path",
                                        "case_root_path", "cache_capacity", "lenient_import",
                                        "allow_public_bind", "ui_root_path"};
  for (const auto& [key, value] : doc.items()) {
    if (std::find(kKnown.begin(), kKnown.end(), key) == kKnown.end()) invalid(key, "unknown field");
  }

  ServiceConfig cfg;
  auto string_field = [&](const char* field, bool required) -> std::optional<std::string> {
    const auto it = doc.find(field);
    if (it == doc.end() || it->is_null()) {
      if (required) invalid(field, "missing");
      return std::nullopt;
    }
    if (!it->is_string() || it->get<std::string>().empty()) invalid(field, "must be a non-empty string");
    return it->get<std::string>();
  };
  auto bool_field = [&](const char* field, bool fallback) {
    const auto it = doc.find(field);
    if (it == doc.end()) return fallback;
    if (!it->is_boolean()) invalid(field, "must be true or false");
    return it->get<bool>();
  };

  if (auto v = string_field("bind_address", false)) cfg.bind_address = *v;
  if (doc.contains("port")) {
    const auto& p = doc["port"];
    if (!p.is_number_integer() || p.get<long long>() < 0 || p.get<long long>() > 65535) {
      invalid("port", "must be an integer within [0, 65535]");
    }
    cfg.port = p.get<int>();
  }
  cfg.tile_archive_path = resolve(base_dir, *string_field("tile_archive_path", true));
  cfg.case_root_path = resolve(base_dir, *string_field("case_root_path", true));
  if (doc.contains("cache_capacity")) {
    const auto& c = doc["cache_capacity"];
    if (!c.is_number_unsigned()) invalid("cache_capacity", "must be a non-negative integer");
    cfg.cache_capacity = c.get<std::size_t>();
  }
  cfg.lenient_import = bool_field("lenient_import", false);
  cfg.allow_public_bind = bool_field("allow_public_bind", false);
  if (auto v = string_field("ui_root_path", false)) cfg.ui_root_path = resolve(base_dir, *v);
  return cfg;
}

ServiceConfig load_config(const fs::path& file) {
  const auto text = store::detail::read_whole_file(file);
  if (!text) throw Error(ErrorCode::InvalidConfig, "cannot read config file " + file.string());
  return parse_config(*text, file.parent_path());
}

void validate_config(const ServiceConfig& cfg) {
  std::error_code ec;
  if (!fs::is_directory(cfg.tile_archive_path, ec)) {
    invalid("tile_archive_path", "directory " + cfg.tile_archive_path.string() + " does not exist");
  }
  if (!fs::is_directory(cfg.case_root_path, ec)) {
    invalid("case_root_path", "directory " + cfg.case_root_path.string() + " does not exist");
  }
  if (cfg.ui_root_path && !fs::is_directory(*cfg.ui_root_path, ec)) {
    invalid("ui_root_path", "directory " + cfg.ui_root_path->string() + " does not exist");
  }
  if (cfg.port < 0 || cfg.port > 65535) invalid("port", "must be within [0, 65535]");
  check_bind_address(cfg.bind_address, cfg.allow_public_bind);
}

std::optional<bool> is_private_address(std::string_view address) {
  const std::string a(address);
  std::array<unsigned char, 16> buf{};
  if (inet_pton(AF_INET, a.c_str(), buf.data()) == 1) {
    const unsigned b0 = buf[0];
    const unsigned b1 = buf[1];
    return b0 == 127 || b0 == 10 || (b0 == 172 && (b1 & 0xF0) == 16) || (b0 == 192 && b1 == 168);
  }
  if (inet_pton(AF_INET6, a.c_str(), buf.data()) == 1) {
    const bool loopback =
        std::all_of(buf.begin(), buf.end() - 1, [](unsigned char c) { return c == 0; }) && buf[15] == 1;
    const bool unique_local = (buf[0] & 0xFE) == 0xFC;
    return loopback || unique_local;
  }
  return std::nullopt;
}

void check_bind_address(std::string_view address, bool allow_public_bind) {
  const auto priv = is_private_address(address);
  if (!priv) {
    invalid("bind_address", "'" + std::string(address) + "' is not an IP address literal");
  }
  if (!*priv && !allow_public_bind) {
    throw Error(ErrorCode::BindRefused,
                "refusing to bind " + std::string(address) +
                    ": the service is intranet-only and may listen on loopback or private "
                    "addresses only; pass --allow-public-bind to override");
  }
}

}  // namespace fgis::api
