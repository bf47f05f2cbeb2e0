#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "riemfpp/errors.hpp"

namespace riemfpp::toml {

/// Minimal TOML reader covering the experiment-config subset: comments,
/// [section] headers, bare keys, strings, integers, floats, booleans and
/// flat arrays. Keys are flattened to "section.key". Parse errors carry
/// line numbers and never crash on arbitrary bytes.
struct Value {
    enum class Type { String, Integer, Float, Boolean, Array };
    Type type = Type::String;
    std::string str;
    int64_t integer = 0;
    double number = 0;
    bool boolean = false;
    std::vector<Value> array;

    double as_number() const {
        if (type == Type::Integer) return double(integer);
        if (type == Type::Float) return number;
        throw Error("toml: value is not a number");
    }
};

struct Table {
    std::map<std::string, Value> values;

    bool has(const std::string& key) const { return values.count(key) != 0; }
    const Value& at(const std::string& key) const;

    double number_or(const std::string& key, double fallback) const;
    int64_t integer_or(const std::string& key, int64_t fallback) const;
    bool boolean_or(const std::string& key, bool fallback) const;
    std::string string_or(const std::string& key, const std::string& fallback) const;
    std::vector<double> numbers_or(const std::string& key, std::vector<double> fallback) const;
};

Table parse(const std::string& text);
Table parse_file(const std::string& path);

}  // namespace riemfpp::toml
