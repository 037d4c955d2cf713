#include "overgaze/cli/toml.hpp"

#include <cctype>
#include <cstdlib>
#include <sstream>

#include "overgaze/common/error.hpp"

namespace og::cli {

namespace {

const char* kind_names[] = {"string", "integer", "float", "boolean", "array", "table"};

[[noreturn]] void kind_error(const std::string& where, TomlValue::Kind want,
                             TomlValue::Kind got) {
    throw ConfigError(where + ": expected " + kind_names[static_cast<int>(want)] + ", found " +
                      kind_names[static_cast<int>(got)]);
}

// One logical line: physical lines are joined until brackets balance, so
// arrays may wrap.  `line` is the first physical line (for diagnostics).
struct Cursor {
    const std::string& text;
    size_t pos;
    int line;
};

[[noreturn]] void fail(const Cursor& c, const std::string& what) {
    throw ParseError("toml: " + what, c.line);
}

void skip_ws(Cursor& c) {
    while (c.pos < c.text.size() && (c.text[c.pos] == ' ' || c.text[c.pos] == '\t')) ++c.pos;
}

bool bare_key_char(char ch) {
    return std::isalnum(static_cast<unsigned char>(ch)) || ch == '_' || ch == '-';
}

std::string parse_bare_key(Cursor& c) {
    size_t start = c.pos;
    while (c.pos < c.text.size() && bare_key_char(c.text[c.pos])) ++c.pos;
    if (c.pos == start) fail(c, "expected a key");
    return c.text.substr(start, c.pos - start);
}

std::string parse_string(Cursor& c) {
    ++c.pos;  // opening quote
    std::string out;
    while (c.pos < c.text.size()) {
        char ch = c.text[c.pos++];
        if (ch == '"') return out;
        if (ch == '\\') {
            if (c.pos >= c.text.size()) fail(c, "dangling escape");
            char esc = c.text[c.pos++];
            switch (esc) {
                case '"': out += '"'; break;
                case '\\': out += '\\'; break;
                case 'n': out += '\n'; break;
                case 't': out += '\t'; break;
                case 'r': out += '\r'; break;
                default: fail(c, std::string("unsupported escape \\") + esc);
            }
        } else {
            out += ch;
        }
    }
    fail(c, "unterminated string");
}

TomlValue parse_value(Cursor& c);

TomlValue parse_array(Cursor& c) {
    TomlValue v;
    v.kind = TomlValue::Kind::Array;
    ++c.pos;  // '['
    for (;;) {
        skip_ws(c);
        if (c.pos >= c.text.size()) fail(c, "unterminated array");
        if (c.text[c.pos] == ']') {
            ++c.pos;
            return v;
        }
        v.items.push_back(parse_value(c));
        skip_ws(c);
        if (c.pos < c.text.size() && c.text[c.pos] == ',') {
            ++c.pos;
            continue;
        }
        if (c.pos < c.text.size() && c.text[c.pos] == ']') {
            ++c.pos;
            return v;
        }
        fail(c, "expected ',' or ']' in array");
    }
}

TomlValue parse_scalar(Cursor& c) {
    size_t start = c.pos;
    while (c.pos < c.text.size() && c.text[c.pos] != ',' && c.text[c.pos] != ']' &&
           c.text[c.pos] != ' ' && c.text[c.pos] != '\t')
        ++c.pos;
    std::string token = c.text.substr(start, c.pos - start);
    if (token.empty()) fail(c, "expected a value");

    TomlValue v;
    if (token == "true" || token == "false") {
        v.kind = TomlValue::Kind::Boolean;
        v.boolean = token == "true";
        return v;
    }
    std::string digits;
    for (char ch : token)
        if (ch != '_') digits += ch;  // 1_000 style separators
    bool floaty = digits.find_first_of(".eE") != std::string::npos;
    // "1e3" is a float; bare "e" in a token means it was never a number.
    const char* s = digits.c_str();
    char* end = nullptr;
    if (floaty) {
        v.kind = TomlValue::Kind::Float;
        v.real = std::strtod(s, &end);
    } else {
        v.kind = TomlValue::Kind::Integer;
        v.integer = std::strtoll(s, &end, 10);
    }
    if (end == s || *end != '\0') fail(c, "malformed value '" + token + "'");
    return v;
}

TomlValue parse_value(Cursor& c) {
    skip_ws(c);
    if (c.pos >= c.text.size()) fail(c, "expected a value");
    char ch = c.text[c.pos];
    if (ch == '"') {
        TomlValue v;
        v.kind = TomlValue::Kind::String;
        v.str = parse_string(c);
        return v;
    }
    if (ch == '[') return parse_array(c);
    return parse_scalar(c);
}

// Strips a trailing comment (a '#' outside any string).
std::string strip_comment(const std::string& line) {
    bool in_string = false;
    for (size_t i = 0; i < line.size(); ++i) {
        char ch = line[i];
        if (in_string) {
            if (ch == '\\') ++i;
            else if (ch == '"') in_string = false;
        } else if (ch == '"') {
            in_string = true;
        } else if (ch == '#') {
            return line.substr(0, i);
        }
    }
    return line;
}

int bracket_delta(const std::string& line) {
    bool in_string = false;
    int delta = 0;
    for (size_t i = 0; i < line.size(); ++i) {
        char ch = line[i];
        if (in_string) {
            if (ch == '\\') ++i;
            else if (ch == '"') in_string = false;
        } else if (ch == '"') {
            in_string = true;
        } else if (ch == '[') {
            ++delta;
        } else if (ch == ']') {
            --delta;
        }
    }
    return delta;
}

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

// Walks/creates the table at a dotted path from the root.
TomlValue* descend(TomlValue* table, const std::string& path, int line) {
    std::istringstream parts(path);
    std::string part;
    while (std::getline(parts, part, '.')) {
        part = trim(part);
        if (part.empty()) throw ParseError("toml: empty table-name component", line);
        TomlValue& slot = table->entries[part];
        if (slot.kind == TomlValue::Kind::Array) {
            if (slot.items.empty()) throw ParseError("toml: empty table array", line);
            table = &slot.items.back();
        } else if (slot.kind == TomlValue::Kind::Table) {
            table = &slot;
        } else {
            throw ParseError("toml: '" + part + "' is not a table", line);
        }
    }
    return table;
}

}  // namespace

const std::string& TomlValue::as_string(const std::string& where) const {
    if (kind != Kind::String) kind_error(where, Kind::String, kind);
    return str;
}
int64_t TomlValue::as_int(const std::string& where) const {
    if (kind != Kind::Integer) kind_error(where, Kind::Integer, kind);
    return integer;
}
double TomlValue::as_float(const std::string& where) const {
    if (kind == Kind::Integer) return static_cast<double>(integer);
    if (kind != Kind::Float) kind_error(where, Kind::Float, kind);
    return real;
}
bool TomlValue::as_bool(const std::string& where) const {
    if (kind != Kind::Boolean) kind_error(where, Kind::Boolean, kind);
    return boolean;
}
const std::vector<TomlValue>& TomlValue::as_array(const std::string& where) const {
    if (kind != Kind::Array) kind_error(where, Kind::Array, kind);
    return items;
}
const std::map<std::string, TomlValue>& TomlValue::as_table(const std::string& where) const {
    if (kind != Kind::Table) kind_error(where, Kind::Table, kind);
    return entries;
}
const TomlValue* TomlValue::find(const std::string& key) const {
    if (kind != Kind::Table) return nullptr;
    auto it = entries.find(key);
    return it == entries.end() ? nullptr : &it->second;
}

TomlValue toml_parse(const std::string& text) {
    TomlValue root;
    TomlValue* current = &root;

    std::istringstream in(text);
    std::string physical;
    int line_no = 0;
    while (std::getline(in, physical)) {
        ++line_no;
        int first_line = line_no;
        std::string line = trim(strip_comment(physical));
        if (line.empty()) continue;

        if (line[0] == '[') {
            bool array_header = line.size() > 1 && line[1] == '[';
            size_t open = array_header ? 2 : 1;
            std::string close = array_header ? "]]" : "]";
            size_t end = line.find(close, open);
            if (end == std::string::npos || trim(line.substr(end + close.size())) != "")
                throw ParseError("toml: malformed table header", first_line);
            std::string path = trim(line.substr(open, end - open));
            if (path.empty()) throw ParseError("toml: empty table name", first_line);

            if (array_header) {
                size_t dot = path.rfind('.');
                TomlValue* parent =
                    dot == std::string::npos ? &root
                                             : descend(&root, path.substr(0, dot), first_line);
                std::string leaf = dot == std::string::npos ? path : trim(path.substr(dot + 1));
                TomlValue& slot = parent->entries[leaf];
                if (slot.kind != TomlValue::Kind::Array && !slot.entries.empty())
                    throw ParseError("toml: '" + leaf + "' already used as a table", first_line);
                slot.kind = TomlValue::Kind::Array;
                slot.items.emplace_back();
                current = &slot.items.back();
            } else {
                current = descend(&root, path, first_line);
            }
            continue;
        }

        // key = value; pull lines until array brackets balance.
        int depth = bracket_delta(line);
        while (depth > 0 && std::getline(in, physical)) {
            ++line_no;
            std::string more = trim(strip_comment(physical));
            line += " " + more;
            depth += bracket_delta(more);
        }
        if (depth != 0) throw ParseError("toml: unbalanced brackets", first_line);

        Cursor c{line, 0, first_line};
        std::string key = parse_bare_key(c);
        skip_ws(c);
        if (c.pos >= line.size() || line[c.pos] != '=') fail(c, "expected '=' after key");
        ++c.pos;
        TomlValue value = parse_value(c);
        skip_ws(c);
        if (c.pos != line.size()) fail(c, "trailing characters after value");

        if (current->entries.count(key))
            throw ParseError("toml: duplicate key '" + key + "'", first_line);
        current->entries[key] = std::move(value);
    }
    return root;
}

}  // namespace og::cli
