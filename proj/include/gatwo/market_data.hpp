#pragma once

#include <algorithm>
#include <array>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "gatwo/error.hpp"

namespace gatwo {

using Date = std::chrono::year_month_day;

inline std::optional<Date> parse_date(std::string_view text) {
    // YYYY-MM-DD only.
    if (text.size() != 10 || text[4] != '-' || text[7] != '-') return std::nullopt;
    int y = 0;
    unsigned m = 0;
    unsigned d = 0;
    auto parse_part = [&](std::size_t pos, std::size_t len, auto& out) {
        const char* first = text.data() + pos;
        auto [ptr, ec] = std::from_chars(first, first + len, out);
        return ec == std::errc{} && ptr == first + len;
    };
    if (!parse_part(0, 4, y) || !parse_part(5, 2, m) || !parse_part(8, 2, d)) return std::nullopt;
    Date date{std::chrono::year{y}, std::chrono::month{m}, std::chrono::day{d}};
    if (!date.ok()) return std::nullopt;
    return date;
}

inline std::string format_date(const Date& date) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(date.year()),
                  static_cast<unsigned>(date.month()), static_cast<unsigned>(date.day()));
    return buf;
}

/// Shortest decimal text that parses back to the identical double.
inline std::string format_number(double value) {
    char buf[400];
    const double mag = std::abs(value);
    const bool plain = mag == 0.0 || (mag >= 1e-4 && mag < 1e15);
    auto [ptr, ec] = plain ? std::to_chars(buf, buf + sizeof buf, value, std::chars_format::fixed)
                           : std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, ptr);
}

struct Bar {
    Date date;
    double open = 0.0;
    double high = 0.0;
    double low = 0.0;
    double close = 0.0;
    double volume = 0.0;

    friend bool operator==(const Bar&, const Bar&) = default;
};

/// Reason the bar breaks an OHLCV invariant, or nullopt if it is valid.
inline std::optional<std::string> check_bar(const Bar& bar) {
    if (!(bar.open > 0.0 && bar.high > 0.0 && bar.low > 0.0 && bar.close > 0.0))
        return "prices must be positive";
    if (bar.low > bar.high) return "low > high";
    if (bar.open < bar.low || bar.open > bar.high) return "open outside [low, high]";
    if (bar.close < bar.low || bar.close > bar.high) return "close outside [low, high]";
    if (!(bar.volume >= 0.0)) return "negative volume";
    return std::nullopt;
}

struct PriceSeries {
    std::string symbol;
    std::vector<Bar> bars;

    [[nodiscard]] std::size_t size() const noexcept { return bars.size(); }
    [[nodiscard]] bool empty() const noexcept { return bars.empty(); }
    const Bar& operator[](std::size_t i) const { return bars[i]; }

    /// Bars [first, first + count), clamped to the end of the series.
    [[nodiscard]] PriceSeries slice(std::size_t first, std::size_t count) const {
        PriceSeries out{symbol, {}};
        if (first >= bars.size()) return out;
        const std::size_t last = std::min(bars.size(), first + count);
        out.bars.assign(bars.begin() + static_cast<std::ptrdiff_t>(first),
                        bars.begin() + static_cast<std::ptrdiff_t>(last));
        return out;
    }

    friend bool operator==(const PriceSeries&, const PriceSeries&) = default;
};

/// A price series plus the next-day-movement class of every bar but the last.
struct LabeledSeries {
    PriceSeries series;
    std::vector<int> labels;
};

/// Label of bar t: 1 when the next close is equal or higher, 0 when lower.
inline LabeledSeries label(PriceSeries series) {
    if (series.size() < 2)
        throw Error(ErrorKind::TooShort, "labeling needs at least 2 bars, got " +
                                             std::to_string(series.size()));
    std::vector<int> labels(series.size() - 1);
    for (std::size_t t = 0; t + 1 < series.size(); ++t)
        labels[t] = series[t + 1].close >= series[t].close ? 1 : 0;
    return LabeledSeries{std::move(series), std::move(labels)};
}

/// Column names for each OHLCV role.
struct CsvSchema {
    std::string date = "Date";
    std::string open = "Open";
    std::string high = "High";
    std::string low = "Low";
    std::string close = "Close";
    std::string volume = "Volume";

    /// Parses overrides of the form `date=Date,close=Adj Close`. Unmentioned
    /// roles keep their defaults.
    static CsvSchema parse(std::string_view text) {
        CsvSchema schema;
        std::size_t pos = 0;
        while (pos <= text.size() && !text.empty()) {
            const std::size_t comma = std::min(text.find(',', pos), text.size());
            const std::string_view item = text.substr(pos, comma - pos);
            if (!item.empty()) {
                const std::size_t eq = item.find('=');
                if (eq == std::string_view::npos)
                    throw Error(ErrorKind::InvalidArgument,
                                "csv schema entry without '=': " + std::string(item));
                const std::string_view key = item.substr(0, eq);
                std::string value(item.substr(eq + 1));
                if (key == "date") schema.date = value;
                else if (key == "open") schema.open = value;
                else if (key == "high") schema.high = value;
                else if (key == "low") schema.low = value;
                else if (key == "close") schema.close = value;
                else if (key == "volume") schema.volume = value;
                else
                    throw Error(ErrorKind::InvalidArgument,
                                "unknown csv schema role: " + std::string(key));
            }
            pos = comma + 1;
        }
        return schema;
    }
};

namespace detail {

inline std::vector<std::string> split_csv_line(std::string_view line) {
    std::vector<std::string> fields;
    std::string field;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    field.push_back('"');
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                field.push_back(c);
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(std::move(field));
            field.clear();
        } else {
            field.push_back(c);
        }
    }
    fields.push_back(std::move(field));
    return fields;
}

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

inline std::optional<double> parse_double(std::string_view s) {
    s = trim(s);
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty()) return std::nullopt;
    return value;
}

} // namespace detail

/// Reads OHLCV bars. Line numbers in errors are 1-based and count the header.
inline PriceSeries parse_csv(std::istream& in, const CsvSchema& schema, std::string symbol) {
    std::string line;
    std::size_t line_no = 0;
    // Skip leading blank lines; the first non-blank line is the header.
    while (std::getline(in, line)) {
        ++line_no;
        if (!detail::trim(line).empty()) break;
    }
    if (detail::trim(line).empty())
        throw Error(ErrorKind::ParseError, "line 1: missing header row");
    if (line.size() >= 3 && static_cast<unsigned char>(line[0]) == 0xEF &&
        static_cast<unsigned char>(line[1]) == 0xBB && static_cast<unsigned char>(line[2]) == 0xBF)
        line.erase(0, 3);

    const auto header = detail::split_csv_line(line);
    const std::array<const std::string*, 6> wanted{&schema.date, &schema.open,  &schema.high,
                                                   &schema.low,  &schema.close, &schema.volume};
    std::array<std::size_t, 6> column{};
    for (std::size_t role = 0; role < wanted.size(); ++role) {
        auto it = std::find_if(header.begin(), header.end(), [&](const std::string& h) {
            return detail::trim(h) == *wanted[role];
        });
        if (it == header.end())
            throw Error(ErrorKind::ParseError, "line " + std::to_string(line_no) +
                                                   ": column '" + *wanted[role] + "' not found");
        column[role] = static_cast<std::size_t>(it - header.begin());
    }

    PriceSeries series{std::move(symbol), {}};
    while (std::getline(in, line)) {
        ++line_no;
        if (detail::trim(line).empty()) continue;
        const auto fields = detail::split_csv_line(line);
        auto field = [&](std::size_t role) -> std::string_view {
            if (column[role] >= fields.size())
                throw Error(ErrorKind::ParseError, "line " + std::to_string(line_no) + ", column " +
                                                       *wanted[role] + ": missing field");
            return fields[column[role]];
        };
        Bar bar;
        const auto date = parse_date(detail::trim(field(0)));
        if (!date)
            throw Error(ErrorKind::ParseError, "line " + std::to_string(line_no) + ", column " +
                                                   schema.date + ": bad date '" +
                                                   std::string(field(0)) + "'");
        bar.date = *date;
        double* targets[5] = {&bar.open, &bar.high, &bar.low, &bar.close, &bar.volume};
        for (std::size_t role = 1; role < 6; ++role) {
            const auto value = detail::parse_double(field(role));
            if (!value)
                throw Error(ErrorKind::ParseError, "line " + std::to_string(line_no) + ", column " +
                                                       *wanted[role] + ": bad number '" +
                                                       std::string(field(role)) + "'");
            *targets[role - 1] = *value;
        }
        if (auto reason = check_bar(bar))
            throw Error(ErrorKind::InvariantViolation,
                        "line " + std::to_string(line_no) + ": " + *reason);
        series.bars.push_back(bar);
    }

    std::stable_sort(series.bars.begin(), series.bars.end(),
                     [](const Bar& a, const Bar& b) { return a.date < b.date; });
    for (std::size_t i = 1; i < series.bars.size(); ++i)
        if (series.bars[i].date == series.bars[i - 1].date)
            throw Error(ErrorKind::DuplicateDate, format_date(series.bars[i].date));
    return series;
}

/// Symbol defaults to the file stem.
inline PriceSeries load_csv(const std::filesystem::path& path, const CsvSchema& schema = {}) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::FileNotFound, path.string());
    return parse_csv(in, schema, path.stem().string());
}

inline void write_csv(const PriceSeries& series, std::ostream& out) {
    out << "Date,Open,High,Low,Close,Volume\n";
    for (const Bar& b : series.bars) {
        out << format_date(b.date) << ',' << format_number(b.open) << ','
            << format_number(b.high) << ',' << format_number(b.low) << ','
            << format_number(b.close) << ',' << format_number(b.volume) << '\n';
    }
}

inline void write_csv(const PriceSeries& series, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw Error(ErrorKind::FileNotFound, "cannot write " + path.string());
    write_csv(series, out);
}

/// 64-bit FNV-1a of a file's bytes; identifies the data a model was trained on.
inline std::uint64_t file_fingerprint(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::FileNotFound, path.string());
    std::uint64_t hash = 0xcbf29ce484222325ULL;
    char buf[4096];
    while (in.read(buf, sizeof buf) || in.gcount() > 0) {
        for (std::streamsize i = 0; i < in.gcount(); ++i) {
            hash ^= static_cast<unsigned char>(buf[i]);
            hash *= 0x100000001b3ULL;
        }
    }
    return hash;
}

} // namespace gatwo
