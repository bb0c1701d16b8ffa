#include "ingest/common.hpp"

#include <openssl/evp.h>

#include <charconv>
#include <chrono>
#include <cmath>

#include "fgis/error.hpp"
#include "ingest/xml_tree.hpp"

namespace fgis::ingest {
namespace detail {

std::optional<double> parse_double(std::string_view text) {
  text = trim(text);
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  if (text.empty()) return std::nullopt;
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value,
                                         std::chars_format::general);
  if (ec != std::errc() || ptr != text.data() + text.size() || !std::isfinite(value)) {
    return std::nullopt;
  }
  return value;
}

std::optional<long long> parse_integer(std::string_view text) {
  text = trim(text);
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  if (text.empty()) return std::nullopt;
  long long value = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) return std::nullopt;
  return value;
}

Provenance make_provenance(const ImportContext& ctx, SourceFormat format, std::string_view bytes) {
  Provenance p;
  p.source_name = ctx.source_name;
  p.source_format = format;
  p.import_time = ctx.import_time.value_or(
      std::chrono::time_point_cast<std::chrono::milliseconds>(std::chrono::system_clock::now()));
  p.content_sha256 = sha256_hex(bytes);
  return p;
}

GeoPoint checked_point(double lat, double lon, const std::string& where) {
  if (!is_valid_coordinate(lat, lon)) {
    throw Error(ErrorCode::InvalidCoordinate, where + ": coordinate out of range (lat=" +
                                                  std::to_string(lat) +
                                                  ", lon=" + std::to_string(lon) + ")");
  }
  return GeoPoint(lat, lon);
}

}  // namespace detail

std::string sha256_hex(std::string_view bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw Error(ErrorCode::IoError, "SHA-256 digest failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(len * 2);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(kHex[digest[i] >> 4]);
    out.push_back(kHex[digest[i] & 0xf]);
  }
  return out;
}

}  // namespace fgis::ingest
