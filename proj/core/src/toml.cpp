#include "kamgrid/toml.hpp"

#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

#include "kamgrid/errors.hpp"

namespace kamgrid::toml {

std::int64_t Value::as_integer() const {
    if (!is_integer()) throw ConfigError("toml: expected an integer value");
    return std::get<std::int64_t>(data_);
}

double Value::as_number() const {
    if (is_integer()) return static_cast<double>(std::get<std::int64_t>(data_));
    if (is_float()) return std::get<double>(data_);
    throw ConfigError("toml: expected a numeric value");
}

bool Value::as_bool() const {
    if (!is_bool()) throw ConfigError("toml: expected a boolean value");
    return std::get<bool>(data_);
}

const std::string& Value::as_string() const {
    if (!is_string()) throw ConfigError("toml: expected a string value");
    return std::get<std::string>(data_);
}

const Array& Value::as_array() const {
    if (!is_array()) throw ConfigError("toml: expected an array value");
    return std::get<Array>(data_);
}

const Table& Value::as_table() const {
    if (!is_table()) throw ConfigError("toml: expected a table value");
    return std::get<Table>(data_);
}

Table& Value::as_table() {
    if (!is_table()) throw ConfigError("toml: expected a table value");
    return std::get<Table>(data_);
}

const Value* find(const Table& table, const std::string& key) {
    auto it = table.find(key);
    return it == table.end() ? nullptr : &it->second;
}

namespace {

class Parser {
public:
    explicit Parser(const std::string& text) : text_(text) {}

    Table run() {
        Table root;
        Table* current = &root;
        skip_blank();
        while (pos_ < text_.size()) {
            if (peek() == '[') {
                current = open_table(root);
            } else {
                parse_assignment(*current);
            }
            skip_blank();
        }
        return root;
    }

private:
    const std::string& text_;
    std::size_t pos_ = 0;
    int line_ = 1;

    [[noreturn]] void fail(const std::string& msg) const {
        std::ostringstream os;
        os << "toml: line " << line_ << ": " << msg;
        throw ConfigError(os.str());
    }

    char peek() const { return text_[pos_]; }
    bool done() const { return pos_ >= text_.size(); }

    void advance() {
        if (text_[pos_] == '\n') ++line_;
        ++pos_;
    }

    void skip_spaces() {
        while (!done() && (peek() == ' ' || peek() == '\t')) advance();
    }

    void skip_comment() {
        while (!done() && peek() != '\n') advance();
    }

    /// Whitespace, newlines and comments between statements.
    void skip_blank() {
        while (!done()) {
            char c = peek();
            if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
                advance();
            } else if (c == '#') {
                skip_comment();
            } else {
                break;
            }
        }
    }

    void expect_line_end() {
        skip_spaces();
        if (done()) return;
        if (peek() == '#') {
            skip_comment();
            return;
        }
        if (peek() == '\n' || peek() == '\r') return;
        fail("unexpected trailing characters");
    }

    std::string parse_key() {
        skip_spaces();
        std::size_t start = pos_;
        while (!done() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_' ||
                           peek() == '-')) {
            advance();
        }
        if (start == pos_) fail("expected a key");
        return text_.substr(start, pos_ - start);
    }

    Table* open_table(Table& root) {
        advance(); // '['
        Table* current = &root;
        while (true) {
            std::string key = parse_key();
            auto [it, inserted] = current->try_emplace(key, Value(Table{}));
            if (!inserted && !it->second.is_table()) fail("key '" + key + "' is not a table");
            current = &it->second.as_table();
            skip_spaces();
            if (!done() && peek() == '.') {
                advance();
                continue;
            }
            break;
        }
        if (done() || peek() != ']') fail("expected ']' to close the table header");
        advance();
        expect_line_end();
        return current;
    }

    void parse_assignment(Table& table) {
        std::string key = parse_key();
        skip_spaces();
        if (done() || peek() != '=') fail("expected '=' after key '" + key + "'");
        advance();
        skip_spaces();
        Value v = parse_value();
        if (!table.emplace(key, std::move(v)).second) fail("duplicate key '" + key + "'");
        expect_line_end();
    }

    Value parse_value() {
        if (done()) fail("expected a value");
        char c = peek();
        if (c == '"') return parse_string();
        if (c == '[') return parse_array();
        if (std::isalpha(static_cast<unsigned char>(c))) return parse_bool();
        return parse_number();
    }

    Value parse_string() {
        advance(); // opening quote
        std::string out;
        while (!done() && peek() != '"') {
            char c = peek();
            if (c == '\n') fail("unterminated string");
            if (c == '\\') {
                advance();
                if (done()) fail("unterminated escape");
                switch (peek()) {
                    case 'n': out.push_back('\n'); break;
                    case 't': out.push_back('\t'); break;
                    case '"': out.push_back('"'); break;
                    case '\\': out.push_back('\\'); break;
                    default: fail("unsupported escape sequence");
                }
                advance();
                continue;
            }
            out.push_back(c);
            advance();
        }
        if (done()) fail("unterminated string");
        advance(); // closing quote
        return Value(std::move(out));
    }

    Value parse_bool() {
        std::size_t start = pos_;
        while (!done() && std::isalpha(static_cast<unsigned char>(peek()))) advance();
        std::string word = text_.substr(start, pos_ - start);
        if (word == "true") return Value(true);
        if (word == "false") return Value(false);
        fail("unknown literal '" + word + "'");
    }

    Value parse_number() {
        std::size_t start = pos_;
        bool is_float = false;
        while (!done()) {
            char c = peek();
            if (std::isdigit(static_cast<unsigned char>(c)) || c == '+' || c == '-' ||
                c == '_') {
                advance();
            } else if (c == '.' || c == 'e' || c == 'E') {
                is_float = true;
                advance();
            } else if (c == 'i' || c == 'n' || c == 'a' || c == 'f') {
                // inf / nan spellings
                is_float = true;
                advance();
            } else {
                break;
            }
        }
        std::string raw = text_.substr(start, pos_ - start);
        std::string cleaned;
        for (char c : raw)
            if (c != '_') cleaned.push_back(c);
        if (cleaned.empty()) fail("expected a number");
        if (!is_float) {
            std::int64_t value = 0;
            auto [p, ec] = std::from_chars(cleaned.data(), cleaned.data() + cleaned.size(), value);
            if (ec == std::errc() && p == cleaned.data() + cleaned.size()) return Value(value);
        }
        try {
            std::size_t used = 0;
            double value = std::stod(cleaned, &used);
            if (used != cleaned.size()) fail("malformed number '" + raw + "'");
            return Value(value);
        } catch (const std::exception&) {
            fail("malformed number '" + raw + "'");
        }
    }

    Value parse_array() {
        advance(); // '['
        Array items;
        while (true) {
            skip_blank();
            if (done()) fail("unterminated array");
            if (peek() == ']') {
                advance();
                break;
            }
            items.push_back(parse_value());
            skip_blank();
            if (done()) fail("unterminated array");
            if (peek() == ',') {
                advance();
                continue;
            }
            if (peek() == ']') {
                advance();
                break;
            }
            fail("expected ',' or ']' in array");
        }
        return Value(std::move(items));
    }
};

} // namespace

Table parse(const std::string& text) { return Parser(text).run(); }

Table parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("toml: cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse(buf.str());
}

} // namespace kamgrid::toml
