#include <algorithm>
#include <cctype>
#include <map>
#include <span>

#include "fgis/error.hpp"
#include "fgis/ingest.hpp"
#include "ingest/common.hpp"
#include "ingest/csv_reader.hpp"
#include "ingest/xml_tree.hpp"

namespace fgis::ingest {
namespace {

constexpr std::size_t kMaxListedRows = 20;

struct RowFailure {
  std::string reason;
};

class Row {
 public:
  Row(const detail::CsvRecord& rec, const std::map<std::string, std::size_t>& columns)
      : rec_(rec), columns_(columns) {}

  std::string_view raw(const std::string& column) const {
    return rec_.fields.at(columns_.at(column));
  }
  std::string_view trimmed(const std::string& column) const { return detail::trim(raw(column)); }

  Timestamp timestamp(const std::string& column) const {
    const auto text = trimmed(column);
    auto t = parse_iso8601_utc(text);
    if (!t) {
      throw RowFailure{column + " '" + std::string(text) + "' is not ISO-8601 with a time zone"};
    }
    return *t;
  }

  GeoPoint position() const {
    const auto lat = detail::parse_double(raw("lat"));
    const auto lon = detail::parse_double(raw("lon"));
    if (!lat) throw RowFailure{"unparsable lat '" + std::string(trimmed("lat")) + "'"};
    if (!lon) throw RowFailure{"unparsable lon '" + std::string(trimmed("lon")) + "'"};
    if (*lat < -90.0 || *lat > 90.0) throw RowFailure{"lat " + std::string(trimmed("lat")) + " out of range"};
    if (*lon < -180.0 || *lon > 180.0) throw RowFailure{"lon " + std::string(trimmed("lon")) + " out of range"};
    return GeoPoint(*lat, *lon);
  }

  MacAddress mac(const std::string& column) const {
    auto m = MacAddress::parse(raw(column));
    if (!m) throw RowFailure{column + " '" + std::string(trimmed(column)) + "' is not a MAC address"};
    return *m;
  }

  std::string required(const std::string& column) const {
    const auto v = trimmed(column);
    if (v.empty()) throw RowFailure{"missing " + column};
    return std::string(v);
  }

 private:
  const detail::CsvRecord& rec_;
  const std::map<std::string, std::size_t>& columns_;
};

std::string lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::string join(std::span<const std::string> cols) {
  std::string out;
  for (const auto& c : cols) {
    if (!out.empty()) out.push_back(',');
    out += c;
  }
  return out;
}

template <typename T, typename RowFn>
CsvImport<std::vector<T>> parse_table(std::string_view bytes, std::span<const std::string> required,
                                      const CsvOptions& options, std::string_view schema, RowFn&& fn) {
  const auto records = detail::read_csv(bytes);
  const std::string expected = std::string(schema) + " header must contain: " + join(required);
  if (records.empty()) throw Error(ErrorCode::MissingHeader, "empty file; " + expected);
  const auto& header = records.front();
  if (header.error) throw Error(ErrorCode::MissingHeader, "unreadable header row; " + expected);

  std::map<std::string, std::size_t> columns;
  for (std::size_t i = 0; i < header.fields.size(); ++i) {
    columns.emplace(lower(detail::trim(header.fields[i])), i);
  }
  for (const auto& col : required) {
    if (!columns.contains(col)) {
      throw Error(ErrorCode::MissingHeader, "missing column '" + col + "'; " + expected);
    }
  }

  CsvImport<std::vector<T>> result;
  for (std::size_t r = 1; r < records.size(); ++r) {
    const auto& rec = records[r];
    if (rec.error) {
      result.skipped.push_back({rec.line, *rec.error});
      continue;
    }
    if (rec.fields.size() < header.fields.size()) {
      result.skipped.push_back({rec.line, "expected " + std::to_string(header.fields.size()) +
                                              " fields, found " + std::to_string(rec.fields.size())});
      continue;
    }
    try {
      result.value.push_back(fn(Row(rec, columns)));
    } catch (const RowFailure& f) {
      result.skipped.push_back({rec.line, f.reason});
    } catch (const Error& e) {
      result.skipped.push_back({rec.line, e.what()});
    }
  }

  if (!result.skipped.empty() && !options.lenient) {
    std::string msg = std::to_string(result.skipped.size()) + " bad row(s) in " +
                      std::string(schema) + " import:";
    for (std::size_t i = 0; i < result.skipped.size() && i < kMaxListedRows; ++i) {
      msg += " row " + std::to_string(result.skipped[i].row) + ": " + result.skipped[i].reason + ";";
    }
    if (result.skipped.size() > kMaxListedRows) msg += " ...";
    throw Error(ErrorCode::BadRow, msg);
  }
  return result;
}

const std::string kTimestamp = "timestamp";

}  // namespace

CsvImport<WifiScan> parse_wifi_csv(std::string_view bytes, const CsvOptions& options,
                                   const ImportContext& ctx) {
  static const std::vector<std::string> kColumns = {"timestamp", "bssid", "ssid", "lat", "lon",
                                                    "signal_dbm"};
  auto rows = parse_table<WifiObservation>(bytes, kColumns, options, "wifi", [](const Row& row) {
    WifiObservation obs;
    obs.timestamp = row.timestamp(kTimestamp);
    obs.bssid = row.mac("bssid");
    const auto ssid = row.raw("ssid");
    if (!ssid.empty()) obs.ssid = std::string(ssid);
    obs.position = row.position();
    const auto signal = row.trimmed("signal_dbm");
    if (!signal.empty()) {
      const auto v = detail::parse_integer(signal);
      if (!v || *v < -200 || *v > 50) {
        throw RowFailure{"signal_dbm '" + std::string(signal) + "' is not a dBm integer"};
      }
      obs.signal_dbm = static_cast<int>(*v);
    }
    return obs;
  });

  CsvImport<WifiScan> out;
  out.value.label = ctx.source_name;
  out.value.observations = std::move(rows.value);
  out.value.derive_capture_range();
  out.skipped = std::move(rows.skipped);
  return out;
}

CsvImport<std::vector<AnprDetection>> parse_anpr_csv(std::string_view bytes, const CsvOptions& options) {
  static const std::vector<std::string> kColumns = {"timestamp", "plate", "sensor_id", "lat", "lon"};
  return parse_table<AnprDetection>(bytes, kColumns, options, "anpr", [](const Row& row) {
    AnprDetection d;
    d.timestamp = row.timestamp(kTimestamp);
    d.plate = normalize_plate(row.raw("plate"));
    if (d.plate.empty()) throw RowFailure{"missing plate"};
    d.sensor_id = row.required("sensor_id");
    d.position = row.position();
    return d;
  });
}

CsvImport<std::vector<BtDetection>> parse_bt_csv(std::string_view bytes, const CsvOptions& options) {
  static const std::vector<std::string> kColumns = {"timestamp", "mac", "sensor_id", "lat", "lon"};
  return parse_table<BtDetection>(bytes, kColumns, options, "bt", [](const Row& row) {
    BtDetection d;
    d.timestamp = row.timestamp(kTimestamp);
    d.mac = row.mac("mac");
    d.sensor_id = row.required("sensor_id");
    d.position = row.position();
    return d;
  });
}

CsvImport<std::vector<CameraRecord>> parse_camera_csv(std::string_view bytes, const CsvOptions& options,
                                                      const ImportContext& ctx) {
  static const std::vector<std::string> kColumns = {"camera_id", "lat",   "lon",
                                                    "category",  "owner", "description"};
  return parse_table<CameraRecord>(bytes, kColumns, options, "camera", [&](const Row& row) {
    CameraRecord c;
    c.camera_id = row.required("camera_id");
    c.position = row.position();
    const auto raw_category = row.trimmed("category");
    if (auto cat = parse_category(raw_category)) {
      c.category = *cat;
    } else {
      c.category = CameraCategory::Unknown;
      if (!raw_category.empty()) c.tags.push_back("category:" + std::string(raw_category));
    }
    c.owner_contact = std::string(row.trimmed("owner"));
    c.description = std::string(row.trimmed("description"));
    c.source = ctx.source_name;
    return c;
  });
}

}  // namespace fgis::ingest
