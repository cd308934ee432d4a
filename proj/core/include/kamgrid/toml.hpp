#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <variant>
#include <vector>

namespace kamgrid::toml {

/// Minimal TOML reader covering the subset used by the problem configs:
/// bare keys, [section] and [section.sub] headers, strings, integers,
/// floats, booleans, and (nested, multi-line) arrays. Parse errors carry
/// line numbers.
class Value;
using Array = std::vector<Value>;
using Table = std::map<std::string, Value>;

class Value {
public:
    Value() : data_(std::monostate{}) {}
    explicit Value(std::int64_t v) : data_(v) {}
    explicit Value(double v) : data_(v) {}
    explicit Value(bool v) : data_(v) {}
    explicit Value(std::string v) : data_(std::move(v)) {}
    explicit Value(Array v) : data_(std::move(v)) {}
    explicit Value(Table v) : data_(std::move(v)) {}

    bool is_integer() const { return std::holds_alternative<std::int64_t>(data_); }
    bool is_float() const { return std::holds_alternative<double>(data_); }
    bool is_bool() const { return std::holds_alternative<bool>(data_); }
    bool is_string() const { return std::holds_alternative<std::string>(data_); }
    bool is_array() const { return std::holds_alternative<Array>(data_); }
    bool is_table() const { return std::holds_alternative<Table>(data_); }

    std::int64_t as_integer() const;
    /// Numeric accessor: integers promote to double.
    double as_number() const;
    bool as_bool() const;
    const std::string& as_string() const;
    const Array& as_array() const;
    const Table& as_table() const;
    Table& as_table();

private:
    std::variant<std::monostate, std::int64_t, double, bool, std::string, Array, Table> data_;
};

/// Parses TOML text; throws ConfigError with a line reference on failure.
Table parse(const std::string& text);

/// Parses the file at path; throws ConfigError when unreadable.
Table parse_file(const std::string& path);

/// Lookup helpers returning nullptr when the key is missing.
const Value* find(const Table& table, const std::string& key);

} // namespace kamgrid::toml
