#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace taskgen::csv {

struct Record {
    std::vector<std::string> fields;
    std::size_t line = 0; // 1-based physical line where the record starts
};

// RFC 4180 reader: comma separated, double-quote quoting with "" escapes,
// CRLF or LF line endings, embedded newlines inside quoted fields.
std::vector<Record> parse(std::string_view text);

std::string escape_field(std::string_view field);

} // namespace taskgen::csv
