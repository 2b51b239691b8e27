#pragma once

// Tabular file IO shared by all loaders: a minimal RFC 4180 CSV reader/writer,
// the JSON mirror format (top-level array of flat objects), and canonical
// number formatting so that write -> read round trips are bit-identical.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "fairlens/error.hpp"

namespace fairlens {

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    std::optional<std::size_t> find_column(std::string_view name) const {
        for (std::size_t i = 0; i < header.size(); ++i)
            if (header[i] == name) return i;
        return std::nullopt;
    }

    std::size_t column(std::string_view name) const {
        if (auto c = find_column(name)) return *c;
        throw SchemaError(std::string(name));
    }
};

// Shortest representation that parses back to the same double.
inline std::string format_number(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

inline std::optional<double> parse_number(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
    if (s.empty()) return std::nullopt;
    if (s.front() == '+') s.remove_prefix(1);
    double v = 0.0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) return std::nullopt;
    return v;
}

inline double parse_finite(std::string_view s, std::size_t row, std::string_view column) {
    auto v = parse_number(s);
    if (!v || !std::isfinite(*v))
        throw ParseError(row, "column '" + std::string(column) + "' is not a finite number: '" + std::string(s) + "'");
    return *v;
}

namespace detail {

inline std::vector<std::vector<std::string>> split_csv(std::string_view text) {
    std::vector<std::vector<std::string>> records;
    std::vector<std::string> record;
    std::string field;
    bool quoted = false;
    bool field_started = false;
    std::size_t i = 0;
    if (text.size() >= 3 && text.substr(0, 3) == "\xEF\xBB\xBF") i = 3;

    auto end_field = [&] {
        record.push_back(std::move(field));
        field.clear();
        field_started = false;
    };
    auto end_record = [&] {
        end_field();
        if (!(record.size() == 1 && record[0].empty())) records.push_back(std::move(record));
        record.clear();
    };

    for (; i < text.size(); ++i) {
        char c = text[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    field += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                field += c;
            }
            continue;
        }
        if (c == '"' && !field_started) {
            quoted = true;
            field_started = true;
        } else if (c == ',') {
            end_field();
        } else if (c == '\n') {
            end_record();
        } else if (c == '\r') {
            if (i + 1 < text.size() && text[i + 1] == '\n') continue;
            end_record();
        } else {
            field += c;
            field_started = true;
        }
    }
    if (quoted) throw ParseError(records.empty() ? 0 : records.size() - 1, "unterminated quoted field");
    if (!field.empty() || !record.empty()) end_record();
    return records;
}

inline std::string quote_csv(const std::string& s) {
    if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

inline std::string json_cell(const nlohmann::ordered_json& v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_number_float()) return format_number(v.get<double>());
    if (v.is_boolean()) return v.get<bool>() ? "1" : "0";
    if (v.is_null()) return "";
    return v.dump();
}

inline bool ends_with(std::string_view s, std::string_view suffix) {
    return s.size() >= suffix.size() && s.substr(s.size() - suffix.size()) == suffix;
}

} // namespace detail

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void write_file(const std::string& path, std::string_view contents) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write '" + path + "'");
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) throw Error("write failed for '" + path + "'");
}

inline Table parse_csv(std::string_view text) {
    auto records = detail::split_csv(text);
    if (records.empty()) throw ParseError(0, "missing header row");
    Table t;
    t.header = std::move(records.front());
    std::unordered_map<std::string, int> seen;
    for (auto& h : t.header)
        if (seen[h]++) throw ParseError(0, "duplicate header column '" + h + "'");
    for (std::size_t r = 1; r < records.size(); ++r) {
        if (records[r].size() != t.header.size())
            throw ParseError(r, "expected " + std::to_string(t.header.size()) + " fields, found " +
                                    std::to_string(records[r].size()));
        t.rows.push_back(std::move(records[r]));
    }
    return t;
}

// JSON mirror: [{"id": "a", "x_0": 1.0, ...}, ...]; every object must carry the same keys.
inline Table parse_json_table(std::string_view text) {
    nlohmann::ordered_json doc;
    try {
        doc = nlohmann::ordered_json::parse(text);
    } catch (const nlohmann::ordered_json::parse_error& e) {
        throw ParseError(0, std::string("invalid JSON: ") + e.what());
    }
    if (!doc.is_array()) throw ParseError(0, "JSON table must be a top-level array");
    Table t;
    if (doc.empty()) return t;
    if (!doc.front().is_object()) throw ParseError(1, "JSON table rows must be objects");
    for (auto it = doc.front().begin(); it != doc.front().end(); ++it) t.header.push_back(it.key());
    for (std::size_t r = 0; r < doc.size(); ++r) {
        const auto& obj = doc[r];
        if (!obj.is_object() || obj.size() != t.header.size())
            throw ParseError(r + 1, "JSON row does not match the field set of the first row");
        std::vector<std::string> row;
        row.reserve(t.header.size());
        for (const auto& key : t.header) {
            auto f = obj.find(key);
            if (f == obj.end()) throw ParseError(r + 1, "JSON row lacks field '" + key + "'");
            row.push_back(detail::json_cell(*f));
        }
        t.rows.push_back(std::move(row));
    }
    return t;
}

// Dispatches on extension: ".json" reads the mirror format, anything else is CSV.
inline Table read_table(const std::string& path) {
    auto text = read_file(path);
    if (detail::ends_with(path, ".json")) return parse_json_table(text);
    return parse_csv(text);
}

inline std::string to_csv(const Table& t) {
    std::string out;
    auto emit = [&out](const std::vector<std::string>& rec) {
        for (std::size_t i = 0; i < rec.size(); ++i) {
            if (i) out += ',';
            out += detail::quote_csv(rec[i]);
        }
        out += '\n';
    };
    emit(t.header);
    for (const auto& r : t.rows) emit(r);
    return out;
}

// The JSON mirror writes numeric-looking cells as numbers except in text_columns.
inline void write_table(const std::string& path, const Table& t,
                        const std::vector<std::string>& text_columns = {"id"}) {
    if (detail::ends_with(path, ".json")) {
        auto arr = nlohmann::ordered_json::array();
        for (const auto& r : t.rows) {
            nlohmann::ordered_json obj;
            for (std::size_t i = 0; i < t.header.size(); ++i) {
                bool text = std::find(text_columns.begin(), text_columns.end(), t.header[i]) != text_columns.end();
                if (auto v = parse_number(r[i]); !text && v && std::isfinite(*v))
                    obj[t.header[i]] = *v;
                else
                    obj[t.header[i]] = r[i];
            }
            arr.push_back(std::move(obj));
        }
        write_file(path, arr.dump(2) + "\n");
        return;
    }
    write_file(path, to_csv(t));
}

} // namespace fairlens
