#pragma once

#include <cctype>
#include <cstdlib>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace framelab {

/// Malformed or invalid experiment configuration. Carries the offending line
/// (0 when no single line applies); the CLI maps this to exit status 2.
struct config_error : std::runtime_error {
    config_error(const std::string& msg, int line = 0)
        : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + msg : msg),
          line(line) {}
    int line;
};

/// One parsed config value: a number, string, boolean, or (nested) array.
struct ConfigValue {
    enum class Kind { Number, String, Boolean, Array };
    Kind kind = Kind::Number;
    double num = 0.0;
    std::string str;
    bool boolean = false;
    std::vector<ConfigValue> array;
    int line = 0;
};

/// Structured-text experiment config: `key = value` entries grouped under
/// `[table]` headers, stored as a flat map of dotted keys. Strings are
/// double-quoted, arrays bracketed (nesting allowed), `#` starts a comment.
class Config {
  public:
    static Config parse_string(const std::string& text) {
        Config cfg;
        std::istringstream in(text);
        std::string line;
        std::string prefix;
        int lineno = 0;
        int entry_line = 0;
        std::string pending;
        int depth = 0;
        while (std::getline(in, line)) {
            ++lineno;
            const std::string stripped = strip_comment(line);
            if (pending.empty()) {
                if (is_blank(stripped)) continue;
                entry_line = lineno;
                pending = stripped;
            } else {
                pending += ' ';
                pending += stripped;
            }
            depth = bracket_depth(pending);
            if (depth > 0) continue; // array continues on the next line
            if (depth < 0) throw config_error("unbalanced ']'", lineno);
            cfg.consume_entry(pending, prefix, entry_line);
            pending.clear();
        }
        if (!pending.empty()) throw config_error("unterminated array", entry_line);
        return cfg;
    }

    static Config parse_file(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw config_error("cannot open config file: " + path);
        std::ostringstream buf;
        buf << in.rdbuf();
        return parse_string(buf.str());
    }

    bool has(const std::string& key) const { return values_.count(key) > 0; }

    const std::map<std::string, ConfigValue>& entries() const { return values_; }

    /// Keys under `prefix.` (direct and nested), with the prefix removed.
    std::vector<std::string> keys_under(const std::string& prefix) const {
        std::vector<std::string> out;
        const std::string p = prefix + ".";
        for (const auto& [k, v] : values_)
            if (k.rfind(p, 0) == 0) out.push_back(k.substr(p.size()));
        return out;
    }

    double number(const std::string& key) const {
        const ConfigValue& v = require(key);
        if (v.kind != ConfigValue::Kind::Number)
            throw config_error("key '" + key + "' must be a number", v.line);
        return v.num;
    }

    long long integer(const std::string& key) const {
        const double d = number(key);
        const long long i = static_cast<long long>(d);
        if (static_cast<double>(i) != d)
            throw config_error("key '" + key + "' must be an integer", require(key).line);
        return i;
    }

    std::string string(const std::string& key) const {
        const ConfigValue& v = require(key);
        if (v.kind != ConfigValue::Kind::String)
            throw config_error("key '" + key + "' must be a string", v.line);
        return v.str;
    }

    std::vector<double> number_list(const std::string& key) const {
        const ConfigValue& v = require(key);
        if (v.kind != ConfigValue::Kind::Array)
            throw config_error("key '" + key + "' must be an array", v.line);
        std::vector<double> out;
        for (const ConfigValue& e : v.array) {
            if (e.kind != ConfigValue::Kind::Number)
                throw config_error("key '" + key + "' must hold numbers", v.line);
            out.push_back(e.num);
        }
        return out;
    }

    std::vector<std::vector<double>> number_matrix(const std::string& key) const {
        const ConfigValue& v = require(key);
        if (v.kind != ConfigValue::Kind::Array)
            throw config_error("key '" + key + "' must be an array of arrays", v.line);
        std::vector<std::vector<double>> out;
        for (const ConfigValue& row : v.array) {
            if (row.kind != ConfigValue::Kind::Array)
                throw config_error("key '" + key + "' must be an array of arrays", v.line);
            out.emplace_back();
            for (const ConfigValue& e : row.array) {
                if (e.kind != ConfigValue::Kind::Number)
                    throw config_error("key '" + key + "' must hold numbers", v.line);
                out.back().push_back(e.num);
            }
        }
        return out;
    }

    std::vector<std::string> string_list(const std::string& key) const {
        const ConfigValue& v = require(key);
        if (v.kind != ConfigValue::Kind::Array)
            throw config_error("key '" + key + "' must be an array", v.line);
        std::vector<std::string> out;
        for (const ConfigValue& e : v.array) {
            if (e.kind != ConfigValue::Kind::String)
                throw config_error("key '" + key + "' must hold strings", v.line);
            out.push_back(e.str);
        }
        return out;
    }

    double number_or(const std::string& key, double fallback) const {
        return has(key) ? number(key) : fallback;
    }

    const ConfigValue& require(const std::string& key) const {
        auto it = values_.find(key);
        if (it == values_.end()) throw config_error("missing required key '" + key + "'");
        return it->second;
    }

    int line_of(const std::string& key) const {
        auto it = values_.find(key);
        return it == values_.end() ? 0 : it->second.line;
    }

  private:
    static bool is_blank(const std::string& s) {
        for (char c : s)
            if (!std::isspace(static_cast<unsigned char>(c))) return false;
        return true;
    }

    static std::string strip_comment(const std::string& s) {
        bool in_string = false;
        for (std::size_t i = 0; i < s.size(); ++i) {
            if (s[i] == '"') in_string = !in_string;
            if (s[i] == '#' && !in_string) return s.substr(0, i);
        }
        return s;
    }

    static int bracket_depth(const std::string& s) {
        int depth = 0;
        bool in_string = false;
        for (char c : s) {
            if (c == '"') in_string = !in_string;
            if (in_string) continue;
            if (c == '[') ++depth;
            if (c == ']') --depth;
        }
        return depth;
    }

    static std::string trim(const std::string& s) {
        std::size_t b = 0, e = s.size();
        while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
        while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
        return s.substr(b, e - b);
    }

    void consume_entry(const std::string& raw, std::string& prefix, int line) {
        const std::string s = trim(raw);
        if (s.front() == '[') {
            if (s.back() != ']') throw config_error("malformed table header", line);
            const std::string name = trim(s.substr(1, s.size() - 2));
            if (name.empty()) throw config_error("empty table name", line);
            prefix = name;
            return;
        }
        const std::size_t eq = s.find('=');
        if (eq == std::string::npos)
            throw config_error("expected 'key = value'", line);
        const std::string key = trim(s.substr(0, eq));
        if (key.empty()) throw config_error("empty key", line);
        const std::string full = prefix.empty() ? key : prefix + "." + key;
        if (values_.count(full))
            throw config_error("duplicate key '" + full + "'", line);
        std::size_t pos = 0;
        const std::string value_text = trim(s.substr(eq + 1));
        if (value_text.empty()) throw config_error("missing value for '" + key + "'", line);
        ConfigValue v = parse_value(value_text, pos, line);
        skip_ws(value_text, pos);
        if (pos != value_text.size())
            throw config_error("trailing characters after value", line);
        v.line = line;
        values_.emplace(full, std::move(v));
    }

    static void skip_ws(const std::string& s, std::size_t& pos) {
        while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
    }

    static ConfigValue parse_value(const std::string& s, std::size_t& pos, int line) {
        skip_ws(s, pos);
        if (pos >= s.size()) throw config_error("missing value", line);
        ConfigValue v;
        v.line = line;
        if (s[pos] == '"') {
            ++pos;
            std::string out;
            while (pos < s.size() && s[pos] != '"') out.push_back(s[pos++]);
            if (pos >= s.size()) throw config_error("unterminated string", line);
            ++pos;
            v.kind = ConfigValue::Kind::String;
            v.str = std::move(out);
            return v;
        }
        if (s[pos] == '[') {
            ++pos;
            v.kind = ConfigValue::Kind::Array;
            skip_ws(s, pos);
            if (pos < s.size() && s[pos] == ']') {
                ++pos;
                return v;
            }
            for (;;) {
                v.array.push_back(parse_value(s, pos, line));
                skip_ws(s, pos);
                if (pos < s.size() && s[pos] == ',') {
                    ++pos;
                    skip_ws(s, pos);
                    if (pos < s.size() && s[pos] == ']') { // trailing comma
                        ++pos;
                        return v;
                    }
                    continue;
                }
                if (pos < s.size() && s[pos] == ']') {
                    ++pos;
                    return v;
                }
                throw config_error("expected ',' or ']' in array", line);
            }
        }
        if (s.compare(pos, 4, "true") == 0) {
            pos += 4;
            v.kind = ConfigValue::Kind::Boolean;
            v.boolean = true;
            return v;
        }
        if (s.compare(pos, 5, "false") == 0) {
            pos += 5;
            v.kind = ConfigValue::Kind::Boolean;
            v.boolean = false;
            return v;
        }
        char* end = nullptr;
        const double num = std::strtod(s.c_str() + pos, &end);
        if (end == s.c_str() + pos)
            throw config_error("cannot parse value", line);
        pos = static_cast<std::size_t>(end - s.c_str());
        v.kind = ConfigValue::Kind::Number;
        v.num = num;
        return v;
    }

    std::map<std::string, ConfigValue> values_;
};

} // namespace framelab
