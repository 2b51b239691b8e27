#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace fairlens {

// Base of every error the library throws. The CLI maps these to exit code 1.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Header lacks a required column. column() names it.
class SchemaError : public Error {
public:
    explicit SchemaError(std::string column)
        : Error("schema error: missing column '" + column + "'"), column_(std::move(column)) {}
    const std::string& column() const noexcept { return column_; }

private:
    std::string column_;
};

// Malformed cell. row() is 1-based over data rows (the header is row 0).
class ParseError : public Error {
public:
    ParseError(std::size_t row, const std::string& what)
        : Error("parse error at row " + std::to_string(row) + ": " + what), row_(row) {}
    std::size_t row() const noexcept { return row_; }

private:
    std::size_t row_;
};

class DuplicateKeyError : public Error {
public:
    explicit DuplicateKeyError(std::string id)
        : Error("duplicate id '" + id + "'"), id_(std::move(id)) {}
    const std::string& id() const noexcept { return id_; }

private:
    std::string id_;
};

class ValidationError : public Error {
public:
    using Error::Error;
};

// Some ids are not covered by every input. missing() lists them in sorted order.
class CoverageError : public Error {
public:
    explicit CoverageError(std::vector<std::string> missing)
        : Error(format(missing)), missing_(std::move(missing)) {}
    const std::vector<std::string>& missing() const noexcept { return missing_; }

private:
    static std::string format(const std::vector<std::string>& ids) {
        std::string msg = "coverage error: missing ids:";
        for (std::size_t i = 0; i < ids.size() && i < 20; ++i) msg += " " + ids[i];
        if (ids.size() > 20) msg += " ... (" + std::to_string(ids.size()) + " total)";
        return msg;
    }
    std::vector<std::string> missing_;
};

class GeometryError : public Error {
public:
    using Error::Error;
};

class ShapeError : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

// Collects non-fatal diagnostics (clamped intensities, degenerate features, empty selections).
struct Warnings {
    std::vector<std::string> messages;
    void add(std::string msg) { messages.push_back(std::move(msg)); }
    bool empty() const noexcept { return messages.empty(); }
};

} // namespace fairlens
