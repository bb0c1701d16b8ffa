#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace fgis {

// Every failure the library reports is an Error carrying one of these codes.
// The code names are part of the wire format: the HTTP layer emits them
// verbatim in {"code": ..., "message": ...} bodies.
enum class ErrorCode {
  InvalidCoordinate,
  LatitudeOutOfProjection,
  MalformedDocument,
  UnsupportedCrs,
  UnsupportedGeometry,
  MissingHeader,
  BadRow,
  UnknownCase,
  UnknownLayer,
  UnknownCamera,
  UnknownScan,
  UnknownTrack,
  DuplicateId,
  InvalidId,
  MalformedQuery,
  InvalidParameters,
  MissingManifest,
  CorruptManifest,
  ZoomOutOfRange,
  InvalidTileCoord,
  NotFound,
  CorruptStore,
  IoError,
  InvalidConfig,
  BindRefused,
};

std::string_view code_name(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }
  std::string_view code_name() const noexcept { return fgis::code_name(code_); }

 private:
  ErrorCode code_;
};

}  // namespace fgis
