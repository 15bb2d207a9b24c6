#pragma once

#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "../errors.hpp"

namespace frontier_audit::detail {

// Minimal RFC-4180 CSV support: quoted cells may contain commas, doubled
// quotes, and newlines. Enough for the table formats this library reads and
// writes; not a general-purpose parser.

inline std::vector<std::vector<std::string>> parse_csv(std::string_view text) {
    std::vector<std::vector<std::string>> rows;
    std::vector<std::string> row;
    std::string cell;
    bool quoted = false;
    bool cell_started = false;

    auto end_cell = [&] {
        row.push_back(cell);
        cell.clear();
        cell_started = false;
    };
    auto end_row = [&] {
        end_cell();
        rows.push_back(std::move(row));
        row.clear();
    };

    for (size_t i = 0; i < text.size(); ++i) {
        char c = text[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    cell.push_back('"');
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cell.push_back(c);
            }
            continue;
        }
        switch (c) {
            case '"':
                if (!cell.empty())
                    throw ParseError("stray quote inside unquoted CSV cell near offset " +
                                     std::to_string(i));
                quoted = true;
                cell_started = true;
                break;
            case ',':
                end_cell();
                cell_started = true;
                break;
            case '\r':
                break;
            case '\n':
                end_row();
                break;
            default:
                cell.push_back(c);
        }
    }
    if (quoted) throw ParseError("unterminated quoted CSV cell");
    if (!cell.empty() || cell_started || !row.empty()) end_row();
    return rows;
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void write_file(const std::string& path, std::string_view content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path);
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw IoError("short write to " + path);
}

inline std::string csv_escape(std::string_view cell) {
    bool needs = cell.find_first_of(",\"\n\r") != std::string_view::npos;
    if (!needs) return std::string(cell);
    std::string out = "\"";
    for (char c : cell) {
        if (c == '"') out.push_back('"');
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}

inline std::string csv_row(const std::vector<std::string>& cells) {
    std::string out;
    for (size_t i = 0; i < cells.size(); ++i) {
        if (i) out.push_back(',');
        out += csv_escape(cells[i]);
    }
    out.push_back('\n');
    return out;
}

}  // namespace frontier_audit::detail
