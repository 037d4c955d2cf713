#pragma once

// Minimal TOML reader covering what run configs need: [table] and
// [[array-of-tables]] headers, bare dotted keys, strings, integers, floats,
// booleans, and nested arrays (which may span lines until the brackets
// balance).  Parse errors carry 1-based line numbers; typed access errors
// name the requested key.

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace og::cli {

struct TomlValue {
    enum class Kind { String, Integer, Float, Boolean, Array, Table };
    Kind kind = Kind::Table;

    std::string str;
    int64_t integer = 0;
    double real = 0.0;
    bool boolean = false;
    std::vector<TomlValue> items;              // Array (and [[...]] lists)
    std::map<std::string, TomlValue> entries;  // Table

    // Typed access; throws ConfigError naming `where` on a kind mismatch.
    // as_float accepts integers, everything else is strict.
    const std::string& as_string(const std::string& where) const;
    int64_t as_int(const std::string& where) const;
    double as_float(const std::string& where) const;
    bool as_bool(const std::string& where) const;
    const std::vector<TomlValue>& as_array(const std::string& where) const;
    const std::map<std::string, TomlValue>& as_table(const std::string& where) const;

    // Table lookup; nullptr when absent (or when this is not a table).
    const TomlValue* find(const std::string& key) const;
};

TomlValue toml_parse(const std::string& text);

}  // namespace og::cli
