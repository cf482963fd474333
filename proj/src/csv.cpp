#include "proact/csv.hpp"

#include <fstream>
#include <sstream>

#include "proact/common.hpp"

namespace proact::csv {

std::vector<Row> parse(std::string_view content) {
  std::vector<Row> rows;
  Row row;
  std::string field;
  bool quoted = false;
  bool fieldStarted = false;
  std::size_t i = 0;
  // Skip a UTF-8 byte order mark.
  if (content.substr(0, 3) == "\xEF\xBB\xBF") i = 3;

  auto endField = [&] {
    row.push_back(std::move(field));
    field.clear();
    fieldStarted = false;
  };
  auto endRow = [&] {
    endField();
    if (!(row.size() == 1 && row[0].empty())) rows.push_back(std::move(row));
    row.clear();
  };

  for (; i < content.size(); ++i) {
    const char c = content[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < content.size() && content[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field.push_back(c);
      }
      continue;
    }
    switch (c) {
      case '"':
        if (!fieldStarted && field.empty()) {
          quoted = true;
          fieldStarted = true;
        } else {
          field.push_back(c);
        }
        break;
      case ',':
        endField();
        break;
      case '\r':
        if (i + 1 < content.size() && content[i + 1] == '\n') ++i;
        endRow();
        break;
      case '\n':
        endRow();
        break;
      default:
        field.push_back(c);
        fieldStarted = true;
    }
  }
  if (quoted) throw Error(ErrorCode::Parse, "unterminated quoted CSV field");
  if (fieldStarted || !field.empty() || !row.empty()) endRow();
  return rows;
}

std::string escapeField(std::string_view field) {
  if (field.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

std::string formatRow(const Row& row) {
  std::string out;
  for (std::size_t i = 0; i < row.size(); ++i) {
    if (i) out.push_back(',');
    out += escapeField(row[i]);
  }
  out.push_back('\n');
  return out;
}

std::string readFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void writeFile(const std::string& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path);
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw Error(ErrorCode::Io, "write failed: " + path);
}

}  // namespace proact::csv
