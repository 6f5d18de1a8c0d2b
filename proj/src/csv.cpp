#include "taskgen/csv.hpp"

#include "taskgen/errors.hpp"

namespace taskgen::csv {

std::vector<Record> parse(std::string_view text) {
    std::vector<Record> out;
    Record current;
    std::string field;
    bool quoted = false;
    bool field_started = false;
    std::size_t line = 1;
    current.line = 1;

    auto end_field = [&] {
        current.fields.push_back(std::move(field));
        field.clear();
        field_started = false;
    };
    auto end_record = [&] {
        end_field();
        // A blank physical line is not a record.
        if (!(current.fields.size() == 1 && current.fields[0].empty()))
            out.push_back(std::move(current));
        current = Record{};
        current.line = line;
    };

    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    field.push_back('"');
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                if (c == '\n') ++line;
                field.push_back(c);
            }
            continue;
        }
        switch (c) {
        case '"':
            if (field_started && !field.empty())
                throw CsvError(line, "quote inside unquoted field");
            quoted = true;
            field_started = true;
            break;
        case ',':
            end_field();
            break;
        case '\r':
            if (i + 1 < text.size() && text[i + 1] == '\n') break;
            ++line;
            end_record();
            break;
        case '\n':
            ++line;
            end_record();
            break;
        default:
            field.push_back(c);
            field_started = true;
        }
    }
    if (quoted) throw CsvError(current.line, "unterminated quoted field");
    if (field_started || !field.empty() || !current.fields.empty()) end_record();
    return out;
}

std::string escape_field(std::string_view field) {
    if (field.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(field);
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out.push_back('"');
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}

} // namespace taskgen::csv
