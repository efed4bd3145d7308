#ifndef MEMECLF_CONFIG_HPP
#define MEMECLF_CONFIG_HPP

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace memeclf {

// Flat key=value configuration with typed access. Files use one `key = value`
// pair per line, `#` comments, blank lines allowed. A file whose first
// non-space byte is `{` is treated as a run manifest: its "config" object is
// loaded instead, which makes `--config manifest.json` reproduce a run.
class Config {
public:
    Config() = default;

    static Config from_file(const std::string& path);
    void load_file(const std::string& path);   // merge, later keys win
    void load_text(const std::string& text, const std::string& origin);
    void set(const std::string& key, const std::string& value);
    void set_kv(const std::string& assignment); // "key=value" form

    bool has(const std::string& key) const;

    std::string get_string(const std::string& key) const; // ConfigError if absent
    std::string get_string(const std::string& key, const std::string& fallback) const;
    int64_t get_int(const std::string& key) const;
    int64_t get_int(const std::string& key, int64_t fallback) const;
    uint64_t get_uint(const std::string& key, uint64_t fallback) const;
    double get_double(const std::string& key) const;
    double get_double(const std::string& key, double fallback) const;
    bool get_bool(const std::string& key) const;
    bool get_bool(const std::string& key, bool fallback) const;
    // Comma-separated list, items trimmed, empty items dropped.
    std::vector<std::string> get_list(const std::string& key) const;
    std::vector<std::string> get_list(const std::string& key,
                                      const std::vector<std::string>& fallback) const;

    const std::map<std::string, std::string>& entries() const { return entries_; }
    // All keys under "<prefix>." (prefix without the trailing dot).
    std::vector<std::string> keys_with_prefix(const std::string& prefix) const;

    nlohmann::json to_json() const;
    static Config from_json(const nlohmann::json& j);

private:
    std::map<std::string, std::string> entries_;
};

} // namespace memeclf

#endif
