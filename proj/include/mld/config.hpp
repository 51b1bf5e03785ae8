#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace mld {

/// Flat `key = value` configuration text: one pair per line, `#` comments,
/// later keys override earlier ones. Typed getters throw ConfigError naming
/// the offending key.
class KeyValueConfig {
  public:
    KeyValueConfig() = default;
    static KeyValueConfig parse(const std::string& text);
    static KeyValueConfig parse_file(const std::string& path);

    bool has(const std::string& key) const { return values_.count(key) != 0; }
    std::string get(const std::string& key) const;
    std::string get_or(const std::string& key, const std::string& fallback) const;

    double get_double(const std::string& key, double fallback) const;
    std::int64_t get_int(const std::string& key, std::int64_t fallback) const;
    std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) const;
    std::vector<std::string> get_list(const std::string& key) const;  // comma-separated

    /// Overwrites (or inserts) one key.
    void set(const std::string& key, const std::string& value);

    /// Rejects keys that neither appear in `exact` nor start with one of
    /// `prefixes`. Throws ConfigError naming the first unknown key.
    void require_known(const std::vector<std::string>& exact,
                       const std::vector<std::string>& prefixes) const;

    /// Keys starting with `prefix`, in lexicographic order.
    std::vector<std::string> keys_with_prefix(const std::string& prefix) const;

  private:
    std::map<std::string, std::string> values_;
};

}  // namespace mld
