#include "fgis/error.hpp"

namespace fgis {

std::string_view code_name(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidCoordinate: return "InvalidCoordinate";
    case ErrorCode::LatitudeOutOfProjection: return "LatitudeOutOfProjection";
    case ErrorCode::MalformedDocument: return "MalformedDocument";
    case ErrorCode::UnsupportedCrs: return "UnsupportedCrs";
    case ErrorCode::UnsupportedGeometry: return "UnsupportedGeometry";
    case ErrorCode::MissingHeader: return "MissingHeader";
    case ErrorCode::BadRow: return "BadRow";
    case ErrorCode::UnknownCase: return "UnknownCase";
    case ErrorCode::UnknownLayer: return "UnknownLayer";
    case ErrorCode::UnknownCamera: return "UnknownCamera";
    case ErrorCode::UnknownScan: return "UnknownScan";
    case ErrorCode::UnknownTrack: return "UnknownTrack";
    case ErrorCode::DuplicateId: return "DuplicateId";
    case ErrorCode::InvalidId: return "InvalidId";
    case ErrorCode::MalformedQuery: return "MalformedQuery";
    case ErrorCode::InvalidParameters: return "InvalidParameters";
    case ErrorCode::MissingManifest: return "MissingManifest";
    case ErrorCode::CorruptManifest: return "CorruptManifest";
    case ErrorCode::ZoomOutOfRange: return "ZoomOutOfRange";
    case ErrorCode::InvalidTileCoord: return "InvalidTileCoord";
    case ErrorCode::NotFound: return "NotFound";
    case ErrorCode::CorruptStore: return "CorruptStore";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::BindRefused: return "BindRefused";
  }
  return "Unknown";
}

}  // namespace fgis
