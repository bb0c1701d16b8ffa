#include "ingest/csv_reader.hpp"

namespace fgis::ingest::detail {

std::vector<CsvRecord> read_csv(std::string_view in) {
  if (in.size() >= 3 && in.substr(0, 3) == "\xEF\xBB\xBF") in.remove_prefix(3);

  std::vector<CsvRecord> out;
  std::size_t i = 0;
  std::size_t line = 1;
  const std::size_t n = in.size();

  while (i < n) {
    CsvRecord rec;
    rec.line = line;
    std::string field;
    bool record_done = false;

    while (!record_done) {
      if (i < n && in[i] == '"') {
        // Quoted field.
        ++i;
        bool closed = false;
        while (i < n) {
          const char c = in[i];
          if (c == '"') {
            if (i + 1 < n && in[i + 1] == '"') {
              field.push_back('"');
              i += 2;
              continue;
            }
            ++i;
            closed = true;
            break;
          }
          if (c == '\n') ++line;
          field.push_back(c);
          ++i;
        }
        if (!closed) {
          rec.error = "unterminated quoted field";
          rec.fields.push_back(std::move(field));
          i = n;
          break;
        }
        // After a closing quote only a separator or line end is legal.
        if (i < n && in[i] != ',' && in[i] != '\n' && in[i] != '\r') {
          rec.error = "unexpected character after closing quote";
          while (i < n && in[i] != '\n') ++i;
        }
      } else {
        while (i < n && in[i] != ',' && in[i] != '\n' && in[i] != '\r') field.push_back(in[i++]);
      }

      rec.fields.push_back(std::move(field));
      field.clear();
      if (i >= n) {
        record_done = true;
      } else if (in[i] == ',') {
        ++i;
        if (i >= n) {
          rec.fields.emplace_back();
          record_done = true;
        }
      } else {
        if (in[i] == '\r') ++i;
        if (i < n && in[i] == '\n') ++i;
        ++line;
        record_done = true;
      }
    }

    const bool blank = rec.fields.size() == 1 && rec.fields[0].empty() && !rec.error;
    if (!blank) out.push_back(std::move(rec));
  }
  return out;
}

}  // namespace fgis::ingest::detail
