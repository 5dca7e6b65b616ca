// csv.hpp — deterministic text formatting and small CSV helpers
//
// All numeric output funnels through format_double (shortest round-trip via
// std::to_chars) so repeated runs produce byte-identical files.

#pragma once

#include <charconv>
#include <cstdint>
#include <fstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace nmbloch::csv {

inline std::string format_double(double v) {
    char buf[40];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    if (res.ec != std::errc{}) {
        throw std::runtime_error("format_double: to_chars failed");
    }
    return std::string(buf, res.ptr);
}

// Rows of doubles under a fixed header line.
struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;

    void add_row(std::vector<double> row) {
        if (row.size() != header.size()) {
            throw std::invalid_argument("csv::Table: row width does not match header");
        }
        rows.push_back(std::move(row));
    }

    std::string to_string() const {
        std::string out;
        for (std::size_t i = 0; i < header.size(); ++i) {
            if (i) out += ',';
            out += header[i];
        }
        out += '\n';
        for (const auto& row : rows) {
            for (std::size_t i = 0; i < row.size(); ++i) {
                if (i) out += ',';
                out += format_double(row[i]);
            }
            out += '\n';
        }
        return out;
    }
};

inline void write_file(const std::string& path, std::string_view contents) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open for writing: " + path);
    f.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!f) throw std::runtime_error("write failed: " + path);
}

// Split a line on commas or whitespace; used by the tabulated-spectrum loader.
inline std::vector<std::string> split_fields(std::string_view line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',' || c == ' ' || c == '\t' || c == '\r') {
            if (!cur.empty()) { out.push_back(cur); cur.clear(); }
        } else {
            cur += c;
        }
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
}

} // namespace nmbloch::csv
