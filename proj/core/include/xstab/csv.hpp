#pragma once

#include <string>
#include <vector>

namespace xstab::csv {

/// Parses RFC 4180 CSV text: quoted fields, "" escapes, embedded commas and
/// newlines, CRLF or LF row separators. Throws IngestionError with `origin`
/// and a line number on malformed input.
std::vector<std::vector<std::string>> parse(const std::string& text,
                                            const std::string& origin);

/// Reads and parses a CSV file. Throws IoError if unreadable.
std::vector<std::vector<std::string>> read_file(const std::string& path);

/// Quotes a field only when needed (comma, quote, or newline present).
std::string escape_field(const std::string& field);

std::string join_row(const std::vector<std::string>& fields);

}  // namespace xstab::csv
