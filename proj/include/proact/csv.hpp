#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace proact::csv {

using Row = std::vector<std::string>;

/// RFC 4180 reader: quoted fields, doubled quotes, embedded newlines, CRLF.
/// Throws Error(Parse) on an unterminated quote.
std::vector<Row> parse(std::string_view content);

std::string escapeField(std::string_view field);
std::string formatRow(const Row& row);

std::string readFile(const std::string& path);
void writeFile(const std::string& path, std::string_view content);

}  // namespace proact::csv
