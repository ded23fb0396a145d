#include "csv.hpp"

namespace iaa::csv {

std::vector<Row> read_rows(std::string_view text) {
    std::vector<Row> rows;
    std::size_t pos = 0;
    std::size_t line = 1;
    const std::size_t n = text.size();

    while (pos < n) {
        Row row;
        row.line = line;
        std::string field;
        bool in_quotes = false;
        bool was_quoted = false;
        bool after_quote = false;
        bool row_done = false;

        while (pos < n && !row_done) {
            const char c = text[pos];
            if (in_quotes) {
                if (c == '"') {
                    if (pos + 1 < n && text[pos + 1] == '"') {
                        field.push_back('"');
                        pos += 2;
                        continue;
                    }
                    in_quotes = false;
                    after_quote = true;
                    ++pos;
                    continue;
                }
                if (c == '\n') ++line;
                field.push_back(c);
                ++pos;
                continue;
            }
            switch (c) {
            case ',':
                row.fields.push_back(std::move(field));
                field.clear();
                was_quoted = after_quote = false;
                ++pos;
                break;
            case '\r':
                if (pos + 1 < n && text[pos + 1] == '\n') {
                    ++pos;
                    break;
                }
                if (!row.error) row.error = "bare carriage return";
                ++pos;
                break;
            case '\n':
                ++pos;
                ++line;
                row_done = true;
                break;
            case '"':
                if (field.empty() && !was_quoted && !after_quote) {
                    in_quotes = was_quoted = true;
                } else if (!row.error) {
                    row.error = "unexpected quote inside field";
                }
                ++pos;
                break;
            default:
                if (after_quote && !row.error) row.error = "text after closing quote";
                field.push_back(c);
                ++pos;
                break;
            }
        }
        if (in_quotes && !row.error) row.error = "unterminated quoted field";
        row.fields.push_back(std::move(field));

        const bool blank = row.fields.size() == 1 && row.fields[0].empty() && !was_quoted &&
                           !row.error;
        if (!blank) rows.push_back(std::move(row));
    }
    return rows;
}

std::string quote_field(std::string_view field) {
    if (field.find_first_of(",\"\r\n") == std::string_view::npos && !field.empty() &&
        field.front() != ' ' && field.back() != ' ') {
        return std::string(field);
    }
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out.push_back('"');
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}

}  // namespace iaa::csv
