#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>

#include "fgis/api/service_config.hpp"
#include "fgis/evidence_store.hpp"
#include "fgis/tile_archive.hpp"

namespace fgis::api {

struct Request {
  std::string method;  // "GET", "POST", ...
  std::string path;    // percent-decoded, without the query string
  std::map<std::string, std::string> query;
  std::string body;
};

struct Response {
  int status = 200;
  std::string content_type = "application/json";
  std::string body;
};

struct ServiceOptions {
  bool lenient_import = false;
  std::optional<std::filesystem::path> ui_root;
};

// Transport-independent request router over the tile archive, the evidence
// store and the analysis functions. handle() is safe to call concurrently;
// each call reads from one store snapshot.
//
// Errors come back as {"code": <ErrorCode name>, "message": ...}: 404 for
// unknown routes and ids, 409 for duplicate ids, 400 for bad input and 500
// for storage failures (with a generic message).
class Service {
 public:
  Service(std::optional<tiles::TileArchive> tiles, std::unique_ptr<store::EvidenceStore> store,
          ServiceOptions options = {});

  // Opens the archive and store named by a validated config.
  static std::unique_ptr<Service> from_config(const ServiceConfig& cfg);

  Response handle(const Request& request) const;

  const store::EvidenceStore& store() const noexcept { return *store_; }
  const tiles::TileArchive* tiles() const noexcept { return tiles_ ? &*tiles_ : nullptr; }

 private:
  Response import(const Request& request, const std::string& case_id) const;
  std::optional<Response> static_asset(const std::string& path) const;

  std::optional<tiles::TileArchive> tiles_;
  std::unique_ptr<store::EvidenceStore> store_;
  ServiceOptions options_;
};

}  // namespace fgis::api
