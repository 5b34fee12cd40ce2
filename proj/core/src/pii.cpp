#include <algorithm>
#include <cctype>

#include <nlohmann/json.hpp>

#include "toyaudit/pii.hpp"

namespace toyaudit {

namespace {

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

// "childBirthday" -> {child, birthday}; "user_name" -> {user, name}
std::vector<std::string> key_parts(const std::string& key) {
    std::vector<std::string> parts;
    std::string cur;
    char prev = '\0';
    for (char c : key) {
        if (!std::isalnum(static_cast<unsigned char>(c))) {
            if (!cur.empty()) parts.push_back(lower(cur));
            cur.clear();
            prev = '\0';
            continue;
        }
        if (std::isupper(static_cast<unsigned char>(c)) &&
            std::islower(static_cast<unsigned char>(prev))) {
            parts.push_back(lower(cur));
            cur.clear();
        }
        cur.push_back(c);
        prev = c;
    }
    if (!cur.empty()) parts.push_back(lower(cur));
    return parts;
}

void collect_json_keys(const nlohmann::json& node, std::vector<std::string>& keys) {
    if (node.is_object()) {
        for (auto it = node.begin(); it != node.end(); ++it) {
            keys.push_back(it.key());
            collect_json_keys(it.value(), keys);
        }
    } else if (node.is_array()) {
        for (const auto& item : node) collect_json_keys(item, keys);
    }
}

bool looks_like_form(const std::string& body) {
    if (body.empty() || body.find('=') == std::string::npos) return false;
    return body.find('\n') == std::string::npos && body.find('{') == std::string::npos;
}

std::vector<std::string> form_keys(const std::string& body) {
    std::vector<std::string> keys;
    std::size_t pos = 0;
    while (pos <= body.size()) {
        std::size_t amp = body.find('&', pos);
        if (amp == std::string::npos) amp = body.size();
        std::string pair = body.substr(pos, amp - pos);
        std::size_t eq = pair.find('=');
        if (eq != std::string::npos && eq > 0) keys.push_back(pair.substr(0, eq));
        pos = amp + 1;
        if (amp == body.size()) break;
    }
    return keys;
}

// delimited, case-insensitive substring search for the raw fallback
bool contains_token(const std::string& haystack, const std::string& needle) {
    const std::string hay = lower(haystack);
    const std::string pat = lower(needle);
    std::size_t pos = hay.find(pat);
    while (pos != std::string::npos) {
        const bool left_ok =
            pos == 0 || !std::isalnum(static_cast<unsigned char>(hay[pos - 1]));
        const std::size_t end = pos + pat.size();
        const bool right_ok =
            end >= hay.size() || !std::isalnum(static_cast<unsigned char>(hay[end]));
        if (left_ok && right_ok) return true;
        pos = hay.find(pat, pos + 1);
    }
    return false;
}

}  // namespace

PiiDictionary PiiDictionary::defaults() {
    return PiiDictionary{{
        {"name", "name"},
        {"gender", "gender"},
        {"birthday", "birthday"},
        {"weight", "weight"},
        {"height", "height"},
        {"age", "age"},
        {"photo", "photo"},
    }};
}

bool pii_key_matches(const std::string& key, const std::string& pattern) {
    const std::vector<std::string> parts = key_parts(key);
    const std::string pat = lower(pattern);
    for (std::size_t i = 0; i < parts.size(); ++i) {
        std::string joined;
        for (std::size_t j = i; j < parts.size(); ++j) {
            joined += parts[j];
            if (joined.size() > pat.size()) break;
            if (joined == pat) return true;
        }
    }
    return false;
}

std::vector<std::string> pii_kinds_in_body(const std::string& body, const PiiDictionary& dict) {
    std::vector<std::string> kinds;
    if (body.empty()) return kinds;

    std::vector<std::string> keys;
    bool structured = false;
    {
        nlohmann::json doc = nlohmann::json::parse(body, nullptr, false);
        if (!doc.is_discarded() && (doc.is_object() || doc.is_array())) {
            collect_json_keys(doc, keys);
            structured = true;
        }
    }
    if (!structured && looks_like_form(body)) {
        keys = form_keys(body);
        structured = !keys.empty();
    }

    for (const auto& pattern : dict.field_patterns) {
        bool hit = false;
        if (structured) {
            for (const auto& key : keys) {
                if (pii_key_matches(key, pattern.key)) {
                    hit = true;
                    break;
                }
            }
        } else {
            hit = contains_token(body, pattern.key);
        }
        if (hit && std::find(kinds.begin(), kinds.end(), pattern.kind) == kinds.end())
            kinds.push_back(pattern.kind);
    }
    return kinds;
}

}  // namespace toyaudit
