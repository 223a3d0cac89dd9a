#pragma once

#include "sgi/errors.hpp"

#include <charconv>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <iterator>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

namespace sgi::csv {

/// One data line of a CSV file, with its 1-based line number in the file.
struct Record {
    std::size_t line;
    std::vector<std::string> fields;
};

/// A parsed CSV file with a required header row.
class Table {
  public:
    Table(std::string source, std::vector<std::string> header, std::vector<Record> records)
        : source_{std::move(source)}, header_{std::move(header)}, records_{std::move(records)} {}

    const std::string &source() const noexcept { return source_; }
    const std::vector<std::string> &header() const noexcept { return header_; }
    const std::vector<Record> &records() const noexcept { return records_; }

    std::optional<std::size_t> column(std::string_view name) const {
        for (std::size_t i = 0; i < header_.size(); ++i) {
            if (header_[i] == name) {
                return i;
            }
        }
        return std::nullopt;
    }

    std::size_t require_column(std::string_view name) const {
        if (auto index = column(name)) {
            return *index;
        }
        throw validation_error{source_, 1, std::string{name}, "missing required column"};
    }

  private:
    std::string source_;
    std::vector<std::string> header_;
    std::vector<Record> records_;
};

namespace detail {

inline std::string trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r");
    return std::string{s.substr(first, last - first + 1)};
}

} // namespace detail

/// Parses RFC 4180 style text: quoted fields may contain commas, doubled quotes and newlines.
/// Blank lines are skipped; a UTF-8 byte order mark is ignored.
inline Table parse(std::string_view text, const std::string &source) {
    if (text.starts_with("\xEF\xBB\xBF")) {
        text.remove_prefix(3);
    }

    std::vector<Record> rows;
    Record current{1, {}};
    std::string field;
    bool in_quotes = false;
    bool was_quoted = false;
    std::size_t line = 1;

    auto end_field = [&] {
        current.fields.push_back(was_quoted ? field : detail::trim(field));
        field.clear();
        was_quoted = false;
    };
    auto end_record = [&] {
        end_field();
        const bool blank = current.fields.size() == 1 && current.fields[0].empty();
        if (!blank) {
            rows.push_back(std::move(current));
        }
        current = Record{line + 1, {}};
    };

    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        if (in_quotes) {
            if (c == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    field += '"';
                    ++i;
                } else {
                    in_quotes = false;
                }
            } else {
                if (c == '\n') {
                    ++line;
                }
                field += c;
            }
            continue;
        }
        switch (c) {
        case '"':
            in_quotes = true;
            was_quoted = true;
            field.clear();
            break;
        case ',':
            end_field();
            break;
        case '\n':
            end_record();
            ++line;
            break;
        case '\r':
            break;
        default:
            field += c;
        }
    }
    if (in_quotes) {
        throw validation_error{source, line, "", "unterminated quoted field"};
    }
    if (!field.empty() || !current.fields.empty()) {
        end_record();
    }

    if (rows.empty()) {
        throw validation_error{source, 1, "", "file is empty; a header row is required"};
    }
    std::vector<std::string> header = std::move(rows.front().fields);
    rows.erase(rows.begin());
    for (const auto &row : rows) {
        if (row.fields.size() != header.size()) {
            throw validation_error{source, row.line, "",
                                   "expected " + std::to_string(header.size()) + " fields, found " +
                                       std::to_string(row.fields.size())};
        }
    }
    return Table{source, std::move(header), std::move(rows)};
}

inline Table read_file(const std::string &path) {
    std::ifstream in{path, std::ios::binary};
    if (!in) {
        throw validation_error{path, 0, "", "cannot open file"};
    }
    const std::string text{std::istreambuf_iterator<char>{in}, std::istreambuf_iterator<char>{}};
    return parse(text, path);
}

inline std::optional<double> to_double(std::string_view text) {
    double value = 0.0;
    const auto *end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (ec != std::errc{} || ptr != end || !std::isfinite(value)) {
        return std::nullopt;
    }
    return value;
}

inline std::optional<std::int64_t> to_int(std::string_view text) {
    std::int64_t value = 0;
    const auto *end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (ec != std::errc{} || ptr != end) {
        return std::nullopt;
    }
    return value;
}

/// Shortest decimal text that reads back to the same double.
inline std::string format_double(double value) {
    char buffer[64];
    auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof buffer, value);
    if (ec != std::errc{}) {
        return "nan";
    }
    return std::string{buffer, ptr};
}

/// Quotes a field when it contains a delimiter, quote or newline.
inline std::string escape(std::string_view field) {
    if (field.find_first_of(",\"\n\r") == std::string_view::npos) {
        return std::string{field};
    }
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') {
            out += '"';
        }
        out += c;
    }
    return out + "\"";
}

/// Accumulates rows into CSV text.
class Writer {
  public:
    explicit Writer(const std::vector<std::string> &header) { row(header); }

    Writer &row(const std::vector<std::string> &fields) {
        for (std::size_t i = 0; i < fields.size(); ++i) {
            if (i) {
                out_ << ',';
            }
            out_ << escape(fields[i]);
        }
        out_ << '\n';
        return *this;
    }

    std::string str() const { return out_.str(); }

  private:
    std::ostringstream out_;
};

} // namespace sgi::csv
