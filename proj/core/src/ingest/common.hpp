#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "fgis/feature.hpp"
#include "fgis/ingest.hpp"

namespace fgis::ingest::detail {

// Locale-independent decimal parse of the whole (trimmed) token. Rejects
// NaN/inf spellings and trailing garbage.
std::optional<double> parse_double(std::string_view text);
std::optional<long long> parse_integer(std::string_view text);

Provenance make_provenance(const ImportContext& ctx, SourceFormat format, std::string_view bytes);

// Throws Error(InvalidCoordinate) naming `where` when out of range.
GeoPoint checked_point(double lat, double lon, const std::string& where);

}  // namespace fgis::ingest::detail
