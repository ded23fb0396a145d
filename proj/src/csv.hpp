#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace iaa::csv {

struct Row {
    std::size_t line = 0;  // 1-based line the record starts on
    std::vector<std::string> fields;
    std::optional<std::string> error;
};

/// RFC-4180 reader. Accepts LF or CRLF terminators; quoted fields may span
/// lines. Blank lines are skipped.
std::vector<Row> read_rows(std::string_view text);

std::string quote_field(std::string_view field);

}  // namespace iaa::csv
