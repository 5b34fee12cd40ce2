#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace toyaudit {

/// Flat key=value file: one pair per line, '#' comments, blank lines ignored.
class FlatConfig {
  public:
    static FlatConfig parse(const std::string& text);
    static FlatConfig load(const std::string& path);

    bool has(const std::string& key) const;
    std::optional<std::string> get(const std::string& key) const;
    std::string get_or(const std::string& key, const std::string& fallback) const;
    long long get_int_or(const std::string& key, long long fallback) const;
    double get_double_or(const std::string& key, double fallback) const;
    bool get_bool_or(const std::string& key, bool fallback) const;

    /// Keys beginning with the given prefix, in file order.
    std::vector<std::string> keys_with_prefix(const std::string& prefix) const;

  private:
    std::vector<std::string> order_;
    std::map<std::string, std::string> values_;
};

}  // namespace toyaudit
