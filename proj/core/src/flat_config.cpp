#include "toyaudit/flat_config.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include "toyaudit/errors.hpp"

namespace toyaudit {

namespace {

std::string trim(const std::string& s) {
    auto begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) return {};
    auto end = s.find_last_not_of(" \t\r\n");
    return s.substr(begin, end - begin + 1);
}

}  // namespace

FlatConfig FlatConfig::parse(const std::string& text) {
    FlatConfig cfg;
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        auto eq = t.find('=');
        if (eq == std::string::npos) {
            throw InvalidConfig("config line " + std::to_string(line_no) + ": expected key=value");
        }
        std::string key = trim(t.substr(0, eq));
        std::string value = trim(t.substr(eq + 1));
        if (key.empty()) {
            throw InvalidConfig("config line " + std::to_string(line_no) + ": empty key");
        }
        if (!cfg.values_.count(key)) cfg.order_.push_back(key);
        cfg.values_[key] = value;
    }
    return cfg;
}

FlatConfig FlatConfig::load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InvalidConfig("cannot open config file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse(buf.str());
}

bool FlatConfig::has(const std::string& key) const { return values_.count(key) > 0; }

std::optional<std::string> FlatConfig::get(const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end()) return std::nullopt;
    return it->second;
}

std::string FlatConfig::get_or(const std::string& key, const std::string& fallback) const {
    return get(key).value_or(fallback);
}

long long FlatConfig::get_int_or(const std::string& key, long long fallback) const {
    auto v = get(key);
    if (!v) return fallback;
    try {
        return std::stoll(*v);
    } catch (const std::exception&) {
        throw InvalidConfig("config key " + key + ": not an integer: " + *v);
    }
}

double FlatConfig::get_double_or(const std::string& key, double fallback) const {
    auto v = get(key);
    if (!v) return fallback;
    try {
        return std::stod(*v);
    } catch (const std::exception&) {
        throw InvalidConfig("config key " + key + ": not a number: " + *v);
    }
}

bool FlatConfig::get_bool_or(const std::string& key, bool fallback) const {
    auto v = get(key);
    if (!v) return fallback;
    std::string s = *v;
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
    if (s == "false" || s == "0" || s == "no" || s == "off") return false;
    throw InvalidConfig("config key " + key + ": not a boolean: " + *v);
}

std::vector<std::string> FlatConfig::keys_with_prefix(const std::string& prefix) const {
    std::vector<std::string> out;
    for (const auto& k : order_) {
        if (k.rfind(prefix, 0) == 0) out.push_back(k);
    }
    return out;
}

}  // namespace toyaudit
