#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace fgis::ingest::detail {

struct CsvRecord {
  std::size_t line = 0;  // 1-based line where the record starts
  std::vector<std::string> fields;
  std::optional<std::string> error;  // set when quoting is broken
};

// RFC 4180 reader: comma separator, double-quote quoting with "" escapes,
// quoted fields may span lines, CRLF or LF endings, leading UTF-8 BOM
// dropped, blank lines skipped. Never throws on content.
std::vector<CsvRecord> read_csv(std::string_view bytes);

}  // namespace fgis::ingest::detail
