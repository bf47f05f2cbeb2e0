#include "riemfpp/tomlmini.hpp"

#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

namespace riemfpp::toml {

namespace {

struct Cursor {
    const std::string& text;
    size_t pos = 0;
    int line = 1;

    bool done() const { return pos >= text.size(); }
    char peek() const { return text[pos]; }
    char take() {
        char c = text[pos++];
        if (c == '\n') ++line;
        return c;
    }
    void skip_ws_inline() {
        while (!done() && (peek() == ' ' || peek() == '\t')) ++pos;
    }
    [[noreturn]] void fail(const std::string& msg) const {
        std::ostringstream os;
        os << "toml parse error at line " << line << ": " << msg;
        throw Error(os.str());
    }
};

bool is_bare_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-';
}

std::string parse_bare(Cursor& cur) {
    std::string out;
    while (!cur.done() && is_bare_char(cur.peek())) out.push_back(cur.take());
    if (out.empty()) cur.fail("expected a key");
    return out;
}

std::string parse_string(Cursor& cur) {
    cur.take();  // opening quote
    std::string out;
    while (true) {
        if (cur.done()) cur.fail("unterminated string");
        char c = cur.take();
        if (c == '"') break;
        if (c == '\n') cur.fail("newline inside string");
        if (c == '\\') {
            if (cur.done()) cur.fail("dangling escape");
            char e = cur.take();
            switch (e) {
                case 'n': out.push_back('\n'); break;
                case 't': out.push_back('\t'); break;
                case 'r': out.push_back('\r'); break;
                case '"': out.push_back('"'); break;
                case '\\': out.push_back('\\'); break;
                default: cur.fail("unsupported escape sequence");
            }
        } else {
            out.push_back(c);
        }
    }
    return out;
}

Value parse_scalar(Cursor& cur);

Value parse_array(Cursor& cur) {
    cur.take();  // '['
    Value v;
    v.type = Value::Type::Array;
    while (true) {
        cur.skip_ws_inline();
        while (!cur.done() && (cur.peek() == '\n' || cur.peek() == '\r')) {
            cur.take();
            cur.skip_ws_inline();
        }
        if (cur.done()) cur.fail("unterminated array");
        if (cur.peek() == ']') {
            cur.take();
            break;
        }
        v.array.push_back(parse_scalar(cur));
        cur.skip_ws_inline();
        while (!cur.done() && (cur.peek() == '\n' || cur.peek() == '\r')) {
            cur.take();
            cur.skip_ws_inline();
        }
        if (cur.done()) cur.fail("unterminated array");
        if (cur.peek() == ',') {
            cur.take();
        } else if (cur.peek() != ']') {
            cur.fail("expected ',' or ']' in array");
        }
    }
    return v;
}

Value parse_scalar(Cursor& cur) {
    cur.skip_ws_inline();
    if (cur.done()) cur.fail("expected a value");
    char c = cur.peek();
    if (c == '"') {
        Value v;
        v.type = Value::Type::String;
        v.str = parse_string(cur);
        return v;
    }
    if (c == '[') return parse_array(cur);
    // bare token: boolean or number
    std::string tok;
    while (!cur.done() && cur.peek() != '\n' && cur.peek() != ',' && cur.peek() != ']' &&
           cur.peek() != '#' && cur.peek() != ' ' && cur.peek() != '\t' && cur.peek() != '\r')
        tok.push_back(cur.take());
    if (tok == "true" || tok == "false") {
        Value v;
        v.type = Value::Type::Boolean;
        v.boolean = tok == "true";
        return v;
    }
    bool looks_float = tok.find_first_of(".eE") != std::string::npos ||
                       tok == "inf" || tok == "-inf" || tok == "nan";
    if (!looks_float) {
        int64_t iv = 0;
        auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), iv);
        if (ec == std::errc() && p == tok.data() + tok.size()) {
            Value v;
            v.type = Value::Type::Integer;
            v.integer = iv;
            return v;
        }
    }
    try {
        size_t used = 0;
        double dv = std::stod(tok, &used);
        if (used == tok.size()) {
            Value v;
            v.type = Value::Type::Float;
            v.number = dv;
            return v;
        }
    } catch (...) {
    }
    cur.fail("cannot parse value token '" + tok + "'");
}

}  // namespace

Table parse(const std::string& text) {
    Table table;
    Cursor cur{text};
    std::string section;
    while (!cur.done()) {
        cur.skip_ws_inline();
        if (cur.done()) break;
        char c = cur.peek();
        if (c == '\n' || c == '\r') {
            cur.take();
            continue;
        }
        if (c == '#') {
            while (!cur.done() && cur.peek() != '\n') cur.take();
            continue;
        }
        if (c == '[') {
            cur.take();
            cur.skip_ws_inline();
            section = parse_bare(cur);
            while (!cur.done() && cur.peek() == '.') {
                cur.take();
                section += "." + parse_bare(cur);
            }
            cur.skip_ws_inline();
            if (cur.done() || cur.peek() != ']') cur.fail("expected ']' after section name");
            cur.take();
            continue;
        }
        std::string key = parse_bare(cur);
        cur.skip_ws_inline();
        if (cur.done() || cur.peek() != '=') cur.fail("expected '=' after key '" + key + "'");
        cur.take();
        Value v = parse_scalar(cur);
        cur.skip_ws_inline();
        if (!cur.done() && cur.peek() == '#')
            while (!cur.done() && cur.peek() != '\n') cur.take();
        if (!cur.done() && cur.peek() != '\n' && cur.peek() != '\r')
            cur.fail("unexpected trailing characters after value for '" + key + "'");
        std::string full = section.empty() ? key : section + "." + key;
        if (table.values.count(full)) cur.fail("duplicate key '" + full + "'");
        table.values[full] = std::move(v);
    }
    return table;
}

Table parse_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot read config file: " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return parse(os.str());
}

const Value& Table::at(const std::string& key) const {
    auto it = values.find(key);
    if (it == values.end()) throw Error("missing config key: " + key);
    return it->second;
}

double Table::number_or(const std::string& key, double fallback) const {
    auto it = values.find(key);
    return it == values.end() ? fallback : it->second.as_number();
}

int64_t Table::integer_or(const std::string& key, int64_t fallback) const {
    auto it = values.find(key);
    if (it == values.end()) return fallback;
    if (it->second.type != Value::Type::Integer) throw Error("config key is not an integer: " + key);
    return it->second.integer;
}

bool Table::boolean_or(const std::string& key, bool fallback) const {
    auto it = values.find(key);
    if (it == values.end()) return fallback;
    if (it->second.type != Value::Type::Boolean) throw Error("config key is not a boolean: " + key);
    return it->second.boolean;
}

std::string Table::string_or(const std::string& key, const std::string& fallback) const {
    auto it = values.find(key);
    if (it == values.end()) return fallback;
    if (it->second.type != Value::Type::String) throw Error("config key is not a string: " + key);
    return it->second.str;
}

std::vector<double> Table::numbers_or(const std::string& key, std::vector<double> fallback) const {
    auto it = values.find(key);
    if (it == values.end()) return fallback;
    if (it->second.type != Value::Type::Array) throw Error("config key is not an array: " + key);
    std::vector<double> out;
    for (auto& v : it->second.array) out.push_back(v.as_number());
    return out;
}

}  // namespace riemfpp::toml
