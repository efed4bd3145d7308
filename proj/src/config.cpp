#include "memeclf/config.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

#include "memeclf/errors.hpp"

namespace memeclf {

namespace {

std::string trim(const std::string& s) {
    size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

std::string read_whole_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

std::string json_scalar_to_string(const nlohmann::json& v, const std::string& key) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
    if (v.is_number_integer()) return std::to_string(v.get<int64_t>());
    if (v.is_number_unsigned()) return std::to_string(v.get<uint64_t>());
    if (v.is_number_float()) {
        std::ostringstream out;
        out.precision(17);
        out << v.get<double>();
        return out.str();
    }
    throw ConfigError("config key '" + key + "' has a non-scalar value in the manifest");
}

} // namespace

Config Config::from_file(const std::string& path) {
    Config c;
    c.load_file(path);
    return c;
}

void Config::load_file(const std::string& path) {
    const std::string text = read_whole_file(path);
    load_text(text, path);
}

void Config::load_text(const std::string& text, const std::string& origin) {
    // Manifest sniffing: a JSON object supplies its "config" section.
    size_t first = text.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && text[first] == '{') {
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(text);
        } catch (const nlohmann::json::exception& e) {
            throw ConfigError(origin + ": invalid JSON: " + e.what());
        }
        if (!j.contains("config") || !j["config"].is_object())
            throw ConfigError(origin + ": JSON config must contain a \"config\" object");
        for (const auto& [key, value] : j["config"].items())
            entries_[key] = json_scalar_to_string(value, key);
        return;
    }

    std::istringstream in(text);
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        const size_t eq = t.find('=');
        if (eq == std::string::npos)
            throw ConfigError(origin + ": line " + std::to_string(line_no) +
                              ": expected key = value, got '" + t + "'");
        const std::string key = trim(t.substr(0, eq));
        if (key.empty())
            throw ConfigError(origin + ": line " + std::to_string(line_no) + ": empty key");
        entries_[key] = trim(t.substr(eq + 1));
    }
}

void Config::set(const std::string& key, const std::string& value) {
    if (trim(key).empty()) throw ConfigError("config: empty key");
    entries_[trim(key)] = trim(value);
}

void Config::set_kv(const std::string& assignment) {
    const size_t eq = assignment.find('=');
    if (eq == std::string::npos)
        throw ConfigError("override must be key=value, got '" + assignment + "'");
    set(assignment.substr(0, eq), assignment.substr(eq + 1));
}

bool Config::has(const std::string& key) const { return entries_.count(key) != 0; }

std::string Config::get_string(const std::string& key) const {
    auto it = entries_.find(key);
    if (it == entries_.end()) throw ConfigError("missing config key: " + key);
    return it->second;
}

std::string Config::get_string(const std::string& key, const std::string& fallback) const {
    auto it = entries_.find(key);
    return it == entries_.end() ? fallback : it->second;
}

int64_t Config::get_int(const std::string& key) const {
    const std::string v = get_string(key);
    try {
        size_t used = 0;
        const int64_t n = std::stoll(v, &used);
        if (used != v.size()) throw std::invalid_argument(v);
        return n;
    } catch (const std::exception&) {
        throw ConfigError("config key '" + key + "' is not an integer: '" + v + "'");
    }
}

int64_t Config::get_int(const std::string& key, int64_t fallback) const {
    return has(key) ? get_int(key) : fallback;
}

uint64_t Config::get_uint(const std::string& key, uint64_t fallback) const {
    if (!has(key)) return fallback;
    const std::string v = get_string(key);
    try {
        size_t used = 0;
        const uint64_t n = std::stoull(v, &used);
        if (used != v.size()) throw std::invalid_argument(v);
        return n;
    } catch (const std::exception&) {
        throw ConfigError("config key '" + key + "' is not a non-negative integer: '" + v + "'");
    }
}

double Config::get_double(const std::string& key) const {
    const std::string v = get_string(key);
    try {
        size_t used = 0;
        const double d = std::stod(v, &used);
        if (used != v.size()) throw std::invalid_argument(v);
        return d;
    } catch (const std::exception&) {
        throw ConfigError("config key '" + key + "' is not a number: '" + v + "'");
    }
}

double Config::get_double(const std::string& key, double fallback) const {
    return has(key) ? get_double(key) : fallback;
}

bool Config::get_bool(const std::string& key) const {
    std::string v = get_string(key);
    for (auto& c : v) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    throw ConfigError("config key '" + key + "' is not a boolean: '" + get_string(key) + "'");
}

bool Config::get_bool(const std::string& key, bool fallback) const {
    return has(key) ? get_bool(key) : fallback;
}

std::vector<std::string> Config::get_list(const std::string& key) const {
    const std::string v = get_string(key);
    std::vector<std::string> items;
    std::string item;
    std::istringstream in(v);
    while (std::getline(in, item, ',')) {
        item = trim(item);
        if (!item.empty()) items.push_back(item);
    }
    return items;
}

std::vector<std::string> Config::get_list(const std::string& key,
                                          const std::vector<std::string>& fallback) const {
    return has(key) ? get_list(key) : fallback;
}

std::vector<std::string> Config::keys_with_prefix(const std::string& prefix) const {
    const std::string p = prefix + ".";
    std::vector<std::string> keys;
    for (const auto& [key, _] : entries_)
        if (key.rfind(p, 0) == 0) keys.push_back(key);
    return keys;
}

nlohmann::json Config::to_json() const {
    nlohmann::json j = nlohmann::json::object();
    for (const auto& [key, value] : entries_) j[key] = value;
    return j;
}

Config Config::from_json(const nlohmann::json& j) {
    Config c;
    for (const auto& [key, value] : j.items()) c.entries_[key] = json_scalar_to_string(value, key);
    return c;
}

} // namespace memeclf
