#pragma once

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "epswap/errors.hpp"
#include "epswap/gbm.hpp"
#include "epswap/hedge.hpp"
#include "epswap/instrument.hpp"
#include "epswap/portfolio.hpp"

namespace epswap {

namespace detail {

inline std::string trim(std::string_view text) {
    std::size_t begin = 0;
    std::size_t end = text.size();
    while (begin < end && std::isspace(static_cast<unsigned char>(text[begin]))) ++begin;
    while (end > begin && std::isspace(static_cast<unsigned char>(text[end - 1]))) --end;
    return std::string(text.substr(begin, end - begin));
}

inline std::vector<std::string> split_csv_row(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::istringstream row(line);
    while (std::getline(row, field, ',')) fields.push_back(trim(field));
    if (!line.empty() && line.back() == ',') fields.push_back("");
    return fields;
}

inline double parse_double_field(const std::string& text, int line_no, const char* what) {
    try {
        std::size_t used = 0;
        const double value = std::stod(text, &used);
        if (used != text.size()) throw std::invalid_argument(text);
        return value;
    } catch (const std::exception&) {
        throw DataError("line " + std::to_string(line_no) + ": invalid " + what + " '" + text + "'");
    }
}

inline std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

inline std::vector<std::string> read_lines(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open file '" + path.string() + "'");
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (lines.empty() && line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);  // UTF-8 BOM
        lines.push_back(line);
    }
    return lines;
}

}  // namespace detail

// Index close file: header `date,close`, ISO-8601 dates, positive decimal
// closes, rows in ascending date order.
inline PriceSeries load_price_csv(const std::filesystem::path& path) {
    const std::vector<std::string> lines = detail::read_lines(path);
    if (lines.empty()) throw DataError("empty price file '" + path.string() + "'");
    if (detail::lower(detail::trim(lines[0])) != "date,close")
        throw DataError("line 1: expected header 'date,close'");
    PriceSeries series;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const int line_no = static_cast<int>(i) + 1;
        if (detail::trim(lines[i]).empty()) continue;
        const std::vector<std::string> fields = detail::split_csv_row(lines[i]);
        if (fields.size() != 2)
            throw DataError("line " + std::to_string(line_no) + ": expected 2 fields, got " +
                            std::to_string(fields.size()));
        PricePoint point;
        try {
            point.date = Date::parse(fields[0]);
        } catch (const Error& e) {
            throw DataError("line " + std::to_string(line_no) + ": " + e.what());
        }
        point.close = detail::parse_double_field(fields[1], line_no, "close");
        if (!(point.close > 0.0))
            throw DataError("line " + std::to_string(line_no) + ": nonpositive close");
        if (!series.points.empty() && !(series.points.back().date < point.date))
            throw DataError("line " + std::to_string(line_no) + ": dates must be strictly increasing");
        series.points.push_back(point);
    }
    if (series.empty()) throw DataError("no price rows in '" + path.string() + "'");
    return series;
}

// Option chain file: header `quote_date,expiration,strike,type,bid,ask,spot`
// with `type` either Call or Put (any case) and dates in ISO or slash form.
inline QuoteBoard load_quote_csv(const std::filesystem::path& path) {
    const std::vector<std::string> lines = detail::read_lines(path);
    if (lines.empty()) throw DataError("empty quote file '" + path.string() + "'");
    if (detail::lower(detail::trim(lines[0])) != "quote_date,expiration,strike,type,bid,ask,spot")
        throw DataError("line 1: expected header 'quote_date,expiration,strike,type,bid,ask,spot'");
    QuoteBoard board;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const int line_no = static_cast<int>(i) + 1;
        if (detail::trim(lines[i]).empty()) continue;
        const std::vector<std::string> fields = detail::split_csv_row(lines[i]);
        if (fields.size() != 7)
            throw DataError("line " + std::to_string(line_no) + ": expected 7 fields, got " +
                            std::to_string(fields.size()));
        OptionQuote quote;
        try {
            quote.quote_date = Date::parse(fields[0]);
            quote.expiration = Date::parse(fields[1]);
        } catch (const Error& e) {
            throw DataError("line " + std::to_string(line_no) + ": " + e.what());
        }
        quote.strike = detail::parse_double_field(fields[2], line_no, "strike");
        const std::string type = detail::lower(fields[3]);
        if (type == "call") {
            quote.kind = OptionKind::call;
        } else if (type == "put") {
            quote.kind = OptionKind::put;
        } else {
            throw DataError("line " + std::to_string(line_no) + ": unknown option type '" + fields[3] + "'");
        }
        quote.bid = detail::parse_double_field(fields[4], line_no, "bid");
        quote.ask = detail::parse_double_field(fields[5], line_no, "ask");
        quote.spot = detail::parse_double_field(fields[6], line_no, "spot");
        if (quote.bid > quote.ask)
            throw DataError("line " + std::to_string(line_no) + ": bid exceeds ask");
        if (!board.quotes.empty()) {
            if (quote.expiration != board.quotes.front().expiration)
                throw DataError("line " + std::to_string(line_no) + ": mixed expirations in one board");
            if (quote.spot != board.quotes.front().spot)
                throw DataError("line " + std::to_string(line_no) + ": inconsistent spot");
        }
        board.quotes.push_back(quote);
    }
    if (board.quotes.empty()) throw DataError("no quotes in '" + path.string() + "'");
    validate(board);
    return board;
}

inline EpsSpec load_spec_json(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open file '" + path.string() + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw DataError("cannot parse '" + path.string() + "': " + e.what());
    }
    EpsSpec spec;
    try {
        spec = j.get<EpsSpec>();
    } catch (const nlohmann::json::exception& e) {
        throw DataError("bad spec document '" + path.string() + "': " + e.what());
    }
    validate(spec);
    return spec;
}

// Simulated paths as CSV, one row per step.
inline void write_paths_csv(std::ostream& os, const PathGrid& grid) {
    os << "step";
    for (int path = 0; path < grid.n_paths; ++path) os << ",path" << path;
    os << '\n';
    os.precision(12);
    for (int step = 0; step <= grid.n_steps; ++step) {
        os << step;
        for (int path = 0; path < grid.n_paths; ++path) os << ',' << grid.at(step, path);
        os << '\n';
    }
}

}  // namespace epswap
