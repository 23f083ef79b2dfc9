#pragma once

#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "sciencemap/errors.hpp"

namespace sciencemap {
namespace csv {

// Minimal RFC-4180 style reader: comma separated, double-quoted fields with
// "" escapes, quoted fields may span lines. Tracks 1-based line numbers for
// error reporting.
class Reader {
public:
    explicit Reader(std::istream& in) : in_(in) {}

    // Reads one record; returns false on clean EOF.
    bool next(std::vector<std::string>& fields) {
        fields.clear();
        int c = in_.get();
        if (c == EOF) return false;
        ++line_;
        record_line_ = line_;
        std::string field;
        bool quoted = false;
        bool any = false;
        while (true) {
            if (c == EOF) {
                if (quoted) throw MalformedRow(record_line_, "unterminated quoted field");
                fields.push_back(std::move(field));
                return any || !fields.empty();
            }
            char ch = static_cast<char>(c);
            if (quoted) {
                if (ch == '"') {
                    int peek = in_.peek();
                    if (peek == '"') {
                        in_.get();
                        field.push_back('"');
                    } else {
                        quoted = false;
                    }
                } else {
                    if (ch == '\n') ++line_;
                    field.push_back(ch);
                }
            } else if (ch == '"' && field.empty()) {
                quoted = true;
                any = true;
            } else if (ch == ',') {
                fields.push_back(std::move(field));
                field.clear();
                any = true;
            } else if (ch == '\n') {
                if (!field.empty() && field.back() == '\r') field.pop_back();
                fields.push_back(std::move(field));
                return true;
            } else {
                field.push_back(ch);
                any = true;
            }
            c = in_.get();
        }
    }

    std::size_t record_line() const { return record_line_; }

private:
    std::istream& in_;
    std::size_t line_ = 0;        // lines consumed so far
    std::size_t record_line_ = 0; // first line of the current record
};

inline std::string escape(std::string_view field) {
    bool needs_quote = field.find_first_of(",\"\n\r") != std::string_view::npos;
    if (!needs_quote) return std::string(field);
    std::string out;
    out.reserve(field.size() + 2);
    out.push_back('"');
    for (char c : field) {
        if (c == '"') out.push_back('"');
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}

inline void write_row(std::ostream& out, const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) out.put(',');
        out << escape(fields[i]);
    }
    out.put('\n');
}

// Splits a multi-valued cell on ';', trimming nothing; empty parts dropped.
inline std::vector<std::string> split_multi(std::string_view cell) {
    std::vector<std::string> parts;
    std::size_t start = 0;
    while (start <= cell.size()) {
        std::size_t sep = cell.find(';', start);
        if (sep == std::string_view::npos) sep = cell.size();
        if (sep > start) parts.emplace_back(cell.substr(start, sep - start));
        start = sep + 1;
    }
    return parts;
}

} // namespace csv
} // namespace sciencemap
