#ifndef MEDIANBM_IO_HPP
#define MEDIANBM_IO_HPP

// Text I/O primitives: locale-independent round-trip number
// formatting and RFC-4180 CSV reading and writing.

#include <charconv>
#include <cstdint>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

namespace medianbm {

// ------------------------------------------------------------
// number formatting and parsing
// ------------------------------------------------------------

// shortest decimal form that parses back to the identical double;
// locale-independent, so output files are byte-stable across hosts
inline std::string format_double(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    if (ec != std::errc())
        throw std::runtime_error("format_double: conversion failed");
    return std::string(buf, ptr);
}

inline std::string format_int(std::int64_t v) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    if (ec != std::errc())
        throw std::runtime_error("format_int: conversion failed");
    return std::string(buf, ptr);
}

inline std::string format_uint(std::uint64_t v) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    if (ec != std::errc())
        throw std::runtime_error("format_uint: conversion failed");
    return std::string(buf, ptr);
}

// strict full-string parses; reject trailing garbage so config typos
// surface as errors instead of silently truncated values
inline double parse_double(std::string_view s) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size())
        throw std::invalid_argument("parse_double: not a number: '" +
                                    std::string(s) + "'");
    return v;
}

inline std::int64_t parse_int(std::string_view s) {
    std::int64_t v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size())
        throw std::invalid_argument("parse_int: not an integer: '" +
                                    std::string(s) + "'");
    return v;
}

inline std::uint64_t parse_uint(std::string_view s) {
    std::uint64_t v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size())
        throw std::invalid_argument("parse_uint: not an unsigned integer: '" +
                                    std::string(s) + "'");
    return v;
}

// ------------------------------------------------------------
// CSV (RFC-4180 quoting, '\n' row terminator)
// ------------------------------------------------------------

inline std::string csv_field(std::string_view s) {
    bool needs_quote = false;
    for (char c : s) {
        if (c == ',' || c == '"' || c == '\n' || c == '\r') {
            needs_quote = true;
            break;
        }
    }
    if (!needs_quote) return std::string(s);
    std::string out;
    out.reserve(s.size() + 2);
    out.push_back('"');
    for (char c : s) {
        if (c == '"') out.push_back('"');
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}

inline void write_csv_row(std::ostream& os,
                          const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i > 0) os.put(',');
        os << csv_field(fields[i]);
    }
    os.put('\n');
}

// Inverse of write_csv_row over a whole stream: quoted fields may hold
// commas, doubled quotes, and line breaks; CRLF and a missing final
// newline are tolerated.  A stray quote mid-field throws.
inline std::vector<std::vector<std::string>> parse_csv(std::istream& in) {
    std::vector<std::vector<std::string>> rows;
    std::vector<std::string> row;
    std::string field;
    bool quoted = false;
    bool field_started = false;  // distinguishes "" from a missing row
    int c;
    while ((c = in.get()) != std::char_traits<char>::eof()) {
        const char ch = static_cast<char>(c);
        if (quoted) {
            if (ch == '"') {
                if (in.peek() == '"') {
                    field.push_back('"');
                    in.get();
                } else {
                    quoted = false;
                }
            } else {
                field.push_back(ch);
            }
            continue;
        }
        switch (ch) {
            case '"':
                if (!field.empty())
                    throw std::invalid_argument(
                        "parse_csv: quote inside unquoted field");
                quoted = true;
                field_started = true;
                break;
            case ',':
                row.push_back(std::move(field));
                field.clear();
                field_started = true;
                break;
            case '\r':
                break;
            case '\n':
                if (field_started || !field.empty() || !row.empty()) {
                    row.push_back(std::move(field));
                    field.clear();
                    rows.push_back(std::move(row));
                    row.clear();
                }
                field_started = false;
                break;
            default:
                field.push_back(ch);
                field_started = true;
                break;
        }
    }
    if (quoted) throw std::invalid_argument("parse_csv: unterminated quote");
    if (field_started || !field.empty() || !row.empty()) {
        row.push_back(std::move(field));
        rows.push_back(std::move(row));
    }
    return rows;
}

} // namespace medianbm

#endif // MEDIANBM_IO_HPP
